"""Exact scalars: rationals, quadratic extensions Q(sqrt d), and F_p / F_{p^2}.

Rationals are plain :class:`fractions.Fraction` values.  ``QuadExt`` and
``FqElem`` are small immutable value types that interoperate with ``int``
and ``Fraction`` operands.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

__all__ = [
    "BadPrimeError",
    "FiniteField",
    "FqElem",
    "QuadExt",
    "fmt_rational",
    "is_prime",
    "make_quad_ext",
    "parse_rational",
    "quad_char",
    "reduce_mod_p",
    "squarefree_part",
]

# trial division is only attempted below this magnitude
TRIAL_DIVISION_LIMIT = 10**14


class BadPrimeError(ArithmeticError):
    """A reduction mod p hit a denominator (or witness) divisible by p."""

    def __init__(self, p, reason="denominator divisible by p", witness=None):
        self.p = p
        self.reason = reason
        self.witness = witness
        super().__init__(f"bad prime {p}: {reason}")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def fmt_rational(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise ValueError(f"expected a 'num/den' string, got {s!r}")
    return Fraction(s.strip())


def squarefree_part(n: int) -> tuple[int, int]:
    """Return ``(d, scale)`` with ``d`` squarefree and ``d * scale**2 == n``."""
    if n == 0:
        raise ValueError("zero has no squarefree part")
    if abs(n) > TRIAL_DIVISION_LIMIT:
        raise ValueError(f"|{n}| too large for bounded trial division")
    sign = -1 if n < 0 else 1
    m = abs(n)
    d, scale = 1, 1
    f = 2
    while f * f <= m:
        e = 0
        while m % f == 0:
            m //= f
            e += 1
        scale *= f ** (e // 2)
        if e % 2:
            d *= f
        f += 1 if f == 2 else 2
    d *= m
    return sign * d, scale


def make_quad_ext(d_raw: int) -> tuple[int, int]:
    """Normalize ``d_raw`` so that sqrt(d_raw) = scale * sqrt(d), d squarefree."""
    return squarefree_part(int(d_raw))


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"not a rational: {x!r}")


class QuadExt:
    """Element a + b*sqrt(d) of Q(sqrt d), d squarefree and not 0 or 1."""

    __slots__ = ("d", "a", "b")

    def __init__(self, d: int, a=0, b=0):
        if d in (0, 1):
            raise ValueError("d must not be 0 or 1")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "a", _frac(a))
        object.__setattr__(self, "b", _frac(b))

    def __setattr__(self, name, value):
        raise AttributeError("QuadExt is immutable")

    @classmethod
    def sqrt(cls, d: int) -> "QuadExt":
        return cls(d, 0, 1)

    def _coerce(self, other):
        if isinstance(other, QuadExt):
            if other.d != self.d:
                raise ValueError(f"mixing Q(sqrt {self.d}) and Q(sqrt {other.d})")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExt(self.d, other, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.d, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(self.d, -self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.d, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadExt(self.d, self.a * other, self.b * other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(
            self.d,
            self.a * o.a + self.b * o.b * self.d,
            self.a * o.b + self.b * o.a,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.d, self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self) -> "QuadExt":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(sqrt d)")
        return QuadExt(self.d, self.a / n, -self.b / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return QuadExt(self.d, self.a / other, self.b / other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = QuadExt(self.d, 1, 0)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __eq__(self, other):
        if isinstance(other, QuadExt):
            return self.d == other.d and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.d, self.a, self.b))

    def is_rational(self) -> bool:
        return self.b == 0

    def __repr__(self):
        return f"QuadExt({self.d}, {fmt_rational(self.a)}, {fmt_rational(self.b)})"

    def __str__(self):
        if self.b == 0:
            return fmt_rational(self.a)
        return f"({fmt_rational(self.a)} + {fmt_rational(self.b)}*sqrt({self.d}))"

    def to_json(self) -> dict:
        return {"d": self.d, "a": fmt_rational(self.a), "b": fmt_rational(self.b)}

    @classmethod
    def from_json(cls, obj) -> "QuadExt":
        return cls(int(obj["d"]), parse_rational(obj["a"]), parse_rational(obj["b"]))


def reduce_mod_p(x, p: int) -> int:
    """Image of a rational in F_p as an int in [0, p)."""
    x = _frac(x)
    if x.denominator % p == 0:
        raise BadPrimeError(p, f"denominator {x.denominator} divisible by {p}")
    return x.numerator * pow(x.denominator, -1, p) % p


@lru_cache(maxsize=None)
def _nonresidue(p: int) -> int:
    for r in range(2, p):
        if pow(r, (p - 1) // 2, p) == p - 1:
            return r
    raise ValueError(f"no non-residue mod {p}")


def sqrt_mod_p(a: int, p: int) -> int | None:
    """A square root of a mod p (Tonelli-Shanks), or None if a is a non-residue."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = _nonresidue(p)
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return min(r, p - r)


class FiniteField:
    """F_q with q = p or p^2; F_{p^2} = F_p[t]/(t^2 - r), r the least non-residue."""

    def __init__(self, p: int, k: int = 1):
        if p == 2 or not is_prime(p):
            raise ValueError(f"p must be an odd prime, got {p}")
        if k not in (1, 2):
            raise ValueError("only extension degrees 1 and 2 are supported")
        self.p = p
        self.k = k
        self.q = p**k
        self.r = _nonresidue(p)

    def __eq__(self, other):
        return isinstance(other, FiniteField) and (self.p, self.k) == (other.p, other.k)

    def __hash__(self):
        return hash((self.p, self.k))

    def __repr__(self):
        return f"FiniteField({self.p}, {self.k})"

    def __call__(self, c0=0, c1=0) -> "FqElem":
        return FqElem(self, c0, c1)

    def zero(self):
        return FqElem(self, 0)

    def one(self):
        return FqElem(self, 1)

    def gen(self):
        """The adjoined square root t of r (only for k = 2)."""
        if self.k != 2:
            raise ValueError("F_p has no adjoined generator")
        return FqElem(self, 0, 1)

    def elements(self):
        p = self.p
        if self.k == 1:
            return [FqElem(self, a) for a in range(p)]
        return [FqElem(self, a, b) for b in range(p) for a in range(p)]

    def from_code(self, code: int) -> "FqElem":
        """Inverse of :meth:`FqElem.encode`."""
        return FqElem(self, int(code) % self.p, int(code) // self.p)

    def from_rational(self, x) -> "FqElem":
        return FqElem(self, reduce_mod_p(x, self.p))

    def sqrt_int(self, d: int) -> "FqElem":
        """A square root of the integer d inside this field."""
        p = self.p
        s = sqrt_mod_p(d, p)
        if s is not None:
            return FqElem(self, s)
        if self.k == 1:
            raise ValueError(f"{d} is not a square mod {p}")
        # d = r * c^2 for a non-residue d, so sqrt(d) = c * t
        c = sqrt_mod_p(d * pow(self.r, -1, p), p)
        return FqElem(self, 0, c)

    def has_sqrt_int(self, d: int) -> bool:
        return self.k == 2 or sqrt_mod_p(d, self.p) is not None

    def extension(self) -> "FiniteField":
        if self.k == 2:
            return self
        return FiniteField(self.p, 2)

    def convert(self, x):
        """Map an int, Fraction, QuadExt or FqElem into this field."""
        if isinstance(x, FqElem):
            if x.field == self:
                return x
            if x.field.p == self.p and x.c1 == 0:
                return FqElem(self, x.c0)
            raise ValueError(f"cannot map {x!r} into {self!r}")
        if isinstance(x, QuadExt):
            return self.from_rational(x.a) + self.from_rational(x.b) * self.sqrt_int(x.d)
        return self.from_rational(x)


class FqElem:
    """Element c0 + c1*t of F_p or F_{p^2} (c1 = 0 when k = 1)."""

    __slots__ = ("field", "c0", "c1")

    def __init__(self, field: FiniteField, c0=0, c1=0):
        p = field.p
        if isinstance(c0, Fraction):
            c0 = reduce_mod_p(c0, p)
        if isinstance(c1, Fraction):
            c1 = reduce_mod_p(c1, p)
        c1 %= p
        if field.k == 1 and c1:
            raise ValueError("F_p element with nonzero t-coordinate")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "c0", c0 % p)
        object.__setattr__(self, "c1", c1)

    def __setattr__(self, name, value):
        raise AttributeError("FqElem is immutable")

    @property
    def p(self):
        return self.field.p

    @property
    def coordinates(self):
        return (self.c0,) if self.field.k == 1 else (self.c0, self.c1)

    def encode(self) -> int:
        return self.c0 + self.c1 * self.field.p

    def _coerce(self, other):
        if isinstance(other, FqElem):
            if other.field != self.field:
                return self.field.convert(other)
            return other
        if isinstance(other, (int, Fraction)):
            return FqElem(self.field, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FqElem(self.field, self.c0 + o.c0, self.c1 + o.c1)

    __radd__ = __add__

    def __neg__(self):
        return FqElem(self.field, -self.c0, -self.c1)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FqElem(self.field, self.c0 - o.c0, self.c1 - o.c1)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        r = self.field.r
        return FqElem(
            self.field,
            self.c0 * o.c0 + r * self.c1 * o.c1,
            self.c0 * o.c1 + self.c1 * o.c0,
        )

    __rmul__ = __mul__

    def conjugate(self):
        return FqElem(self.field, self.c0, -self.c1)

    def norm(self) -> int:
        p = self.field.p
        return (self.c0 * self.c0 - self.field.r * self.c1 * self.c1) % p

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in F_q")
        ninv = pow(n, -1, self.field.p)
        return FqElem(self.field, self.c0 * ninv, -self.c1 * ninv)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = FqElem(self.field, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __bool__(self):
        return bool(self.c0) or bool(self.c1)

    def __eq__(self, other):
        if isinstance(other, FqElem):
            return self.field == other.field and (self.c0, self.c1) == (other.c0, other.c1)
        if isinstance(other, (int, Fraction)):
            try:
                return self == FqElem(self.field, other)
            except BadPrimeError:
                return False
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.k, self.c0, self.c1))

    def __repr__(self):
        if self.field.k == 1:
            return f"F{self.field.p}({self.c0})"
        return f"F{self.field.p}^2({self.c0} + {self.c1}t)"


def quad_char(a: FqElem) -> int:
    """Quadratic character of a in F_q: 0, +1 (nonzero square) or -1."""
    if not a:
        return 0
    v = a ** ((a.field.q - 1) // 2)
    return 1 if v == 1 else -1


def gcd_list(values) -> int:
    g = 0
    for v in values:
        g = gcd(g, int(v))
    return g


def is_square_int(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n
