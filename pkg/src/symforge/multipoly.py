"""Sparse multivariate polynomials over exact scalars.

A :class:`MultiPoly` stores a dict from exponent tuples to nonzero
coefficients.  Coefficients can be ``Fraction``, ``QuadExt`` or ``FqElem``;
the polynomial layer never inspects them beyond ring operations.

Besides the ring operations this module provides the determinant machinery
(division-free minor expansion, symmetric 4x4 determinants, cofactors),
Sylvester resultants and principal subresultant coefficients, and the
analysis of binary forms (content, squarefree decomposition, gcd).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import gcd, lcm

from . import univariate as up
from .arith import QuadExt, fmt_rational, parse_rational

__all__ = [
    "BinaryFormAnalysis",
    "MultiPoly",
    "analyze_binary_form",
    "binary_discriminant_witness",
    "binary_gcd",
    "binary_resultant",
    "cofactor3",
    "det",
    "det_leibniz",
    "det_sym4",
    "form_resultant",
    "gram_matrix",
    "linear_change",
    "principal_subresultant",
    "resultant",
    "sym_linear_matrix",
]


def _grevlex_key(exps):
    return (sum(exps), tuple(-e for e in reversed(exps)))


def _is_zero(c) -> bool:
    return not c


class MultiPoly:
    """Immutable sparse polynomial in ``nvars`` variables."""

    __slots__ = ("nvars", "terms", "names")

    def __init__(self, terms=None, nvars: int = 0, names=None):
        clean = {}
        if terms:
            for exps, c in terms.items():
                exps = tuple(exps)
                if len(exps) != nvars:
                    raise ValueError(f"exponent {exps} does not have {nvars} entries")
                if not _is_zero(c):
                    clean[exps] = c
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", clean)
        if names is None:
            names = tuple(f"z{i}" for i in range(nvars))
        object.__setattr__(self, "names", tuple(names))

    def __setattr__(self, name, value):
        raise AttributeError("MultiPoly is immutable")

    # -- construction -------------------------------------------------
    @classmethod
    def const(cls, c, nvars: int, names=None):
        return cls({(0,) * nvars: c}, nvars, names)

    @classmethod
    def var(cls, i: int, nvars: int, names=None, coeff=1):
        e = [0] * nvars
        e[i] = 1
        return cls({tuple(e): Fraction(coeff) if isinstance(coeff, int) else coeff}, nvars, names)

    @classmethod
    def gens(cls, nvars: int, names=None):
        return [cls.var(i, nvars, names) for i in range(nvars)]

    @classmethod
    def linear(cls, coeffs, names=None):
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = Fraction(c) if isinstance(c, int) else c
        return cls(terms, n, names)

    def zero(self):
        return MultiPoly({}, self.nvars, self.names)

    def _wrap(self, terms):
        return MultiPoly(terms, self.nvars, self.names)

    # -- basic queries ------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def assert_homogeneous(self, degree: int | None = None):
        if not self.is_homogeneous():
            raise ValueError("polynomial is not homogeneous")
        if degree is not None and self.terms and self.degree() != degree:
            raise ValueError(f"expected degree {degree}, got {self.degree()}")
        return self

    def degree_in(self, i: int) -> int:
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _grevlex_key(t[0]), reverse=True)

    def leading_coeff(self):
        if not self.terms:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.sorted_terms()[0][1]

    def coeff(self, exps):
        return self.terms.get(tuple(exps), 0)

    def constant_coeff(self):
        return self.terms.get((0,) * self.nvars, 0)

    def coeffs(self):
        return list(self.terms.values())

    def coeffs_in(self, i: int) -> dict:
        """Map power k -> coefficient polynomial of var_i^k (var_i kept, exponent 0)."""
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            rest = e[:i] + (0,) + e[i + 1:]
            out.setdefault(k, {})[rest] = c
        return {k: self._wrap(t) for k, t in out.items()}

    # -- arithmetic ---------------------------------------------------
    def _check(self, other):
        if other.nvars != self.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def _lift(self, other):
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        return MultiPoly.const(other, self.nvars, self.names)

    def __add__(self, other):
        other = self._lift(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            if e in t:
                t[e] = t[e] + c
            else:
                t[e] = c
        return self._wrap(t)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            if _is_zero(other):
                return self.zero()
            return self._wrap({e: c * other for e, c in self.terms.items()})
        self._check(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = c1 * c2
                if e in out:
                    out[e] = out[e] + v
                else:
                    out[e] = v
        return self._wrap(out)

    def __rmul__(self, other):
        return self * other

    def __truediv__(self, scalar):
        if isinstance(scalar, MultiPoly):
            raise TypeError("only division by scalars is supported")
        if isinstance(scalar, int):
            scalar = Fraction(scalar)
        return self._wrap({e: c / scalar for e, c in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = MultiPoly.const(Fraction(1), self.nvars, self.names)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                return False
            return (self - other).is_zero()
        if isinstance(other, (int, Fraction, QuadExt)):
            return (self - other).is_zero()
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def map_coeffs(self, fn):
        return self._wrap({e: fn(c) for e, c in self.terms.items()})

    def rename(self, names):
        return MultiPoly(self.terms, self.nvars, names)

    # -- calculus and substitution -----------------------------------
    def diff(self, i: int):
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[ne] = c * k
        return self._wrap(out)

    def gradient(self):
        return [self.diff(i) for i in range(self.nvars)]

    def __call__(self, *point):
        return self.evaluate(point)

    def evaluate(self, point):
        if len(point) != self.nvars:
            raise ValueError(f"need {self.nvars} coordinates, got {len(point)}")
        total = None
        powers = [dict() for _ in range(self.nvars)]
        for e, c in self.terms.items():
            v = c
            for i, k in enumerate(e):
                if k:
                    pw = powers[i].get(k)
                    if pw is None:
                        pw = point[i] ** k
                        powers[i][k] = pw
                    v = v * pw
            total = v if total is None else total + v
        if total is None:
            return Fraction(0)
        return total

    def compose(self, images, nvars: int | None = None, names=None):
        """Substitute ``images[i]`` (polynomials or scalars) for variable i."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        polys = [im for im in images if isinstance(im, MultiPoly)]
        if nvars is None:
            if not polys:
                raise ValueError("cannot infer target ring from scalar images")
            nvars = polys[0].nvars
            names = names or polys[0].names
        imgs = [im if isinstance(im, MultiPoly) else MultiPoly.const(im, nvars, names) for im in images]
        for im in imgs:
            if im.nvars != nvars:
                raise ValueError("image polynomials live in different rings")
        result = MultiPoly({}, nvars, names)
        cache = [dict() for _ in range(self.nvars)]
        for e, c in self.terms.items():
            term = MultiPoly.const(c, nvars, names)
            for i, k in enumerate(e):
                if k:
                    pw = cache[i].get(k)
                    if pw is None:
                        pw = imgs[i] ** k
                        cache[i][k] = pw
                    term = term * pw
            result = result + term
        return result

    def subs(self, mapping: dict):
        """Substitute scalars or polynomials (same ring) for some variables."""
        gens = MultiPoly.gens(self.nvars, self.names)
        images = [mapping.get(i, gens[i]) for i in range(self.nvars)]
        return self.compose(images, self.nvars, self.names)

    def dehomogenize(self, i: int):
        """Set variable i to 1 and drop it, giving a polynomial in nvars-1 variables."""
        out = {}
        for e, c in self.terms.items():
            ne = e[:i] + e[i + 1:]
            if ne in out:
                out[ne] = out[ne] + c
            else:
                out[ne] = c
        names = self.names[:i] + self.names[i + 1:]
        return MultiPoly(out, self.nvars - 1, names)

    def divide_by_monomial(self, exps):
        out = {}
        for e, c in self.terms.items():
            ne = tuple(a - b for a, b in zip(e, exps))
            if min(ne) < 0:
                raise ValueError("monomial does not divide polynomial")
            out[ne] = c
        return self._wrap(out)

    # -- printing and serialization ----------------------------------
    def __repr__(self):
        return f"MultiPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(self.names, e) if k
            )
            cs = fmt_rational(c) if isinstance(c, (int, Fraction)) else str(c)
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> dict:
        terms = []
        for e, c in self.sorted_terms():
            if isinstance(c, QuadExt):
                cj = c.to_json()
            else:
                cj = fmt_rational(c)
            terms.append([list(e), cj])
        return {"vars": list(self.names), "terms": terms}

    @classmethod
    def from_json(cls, obj) -> "MultiPoly":
        names = list(obj["vars"])
        n = len(names)
        terms = {}
        for e, c in obj["terms"]:
            if len(e) != n:
                raise ValueError("exponent length does not match variable list")
            if any((not isinstance(k, int)) or k < 0 for k in e):
                raise ValueError("exponents must be nonnegative integers")
            coeff = QuadExt.from_json(c) if isinstance(c, dict) else parse_rational(c)
            if tuple(e) in terms:
                raise ValueError("duplicate exponent vector")
            if not coeff:
                raise ValueError("stored zero coefficient")
            terms[tuple(e)] = coeff
        return cls(terms, n, names)


# ---------------------------------------------------------------------------
# determinants


def det(matrix):
    """Division-free determinant by memoized expansion along rows.

    Works over any commutative ring whose elements support ``+``, ``-`` and
    ``*`` (polynomials included).  Cost is O(n 2^n) ring products.
    """
    n = len(matrix)
    if n == 0:
        return Fraction(1)
    memo = {}

    def minor(cols: tuple):
        # rows 0..len(cols)-1 against the given sorted column tuple
        key = cols
        if key in memo:
            return memo[key]
        k = len(cols) - 1
        row = matrix[k]
        acc = None
        for idx, j in enumerate(cols):
            a = row[j]
            if _is_zero(a):
                continue
            if k == 0:
                term = a
            else:
                sub = minor(cols[:idx] + cols[idx + 1:])
                if sub is None:
                    continue
                term = a * sub
            if (k + idx) % 2:
                term = -term
            acc = term if acc is None else acc + term
        memo[key] = acc
        return acc

    result = minor(tuple(range(n)))
    if result is None:
        probe = matrix[0][0]
        return probe - probe
    return result


def det_leibniz(matrix):
    """Determinant as the signed sum over all permutations (test oracle)."""
    n = len(matrix)
    total = None
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = None
        for i in range(n):
            a = matrix[i][perm[i]]
            term = a if term is None else term * a
        if inv % 2:
            term = -term
        total = term if total is None else total + term
    return total


def sym_linear_matrix(upper, nvars: int = 4, names=None):
    """4x4 symmetric matrix from its 10 upper-triangle entries (row-major).

    Entries may be ``MultiPoly`` linear forms or coefficient lists.
    """
    if len(upper) != 10:
        raise ValueError("a symmetric 4x4 matrix has 10 upper-triangle entries")
    forms = []
    for ent in upper:
        if isinstance(ent, MultiPoly):
            ent.assert_homogeneous(1)
            forms.append(ent)
        else:
            forms.append(MultiPoly.linear([Fraction(c) for c in ent], names))
    m = [[None] * 4 for _ in range(4)]
    it = iter(forms)
    for i in range(4):
        for j in range(i, 4):
            f = next(it)
            m[i][j] = f
            m[j][i] = f
    return m


def det_sym4(matrix) -> MultiPoly:
    """Determinant of a 4x4 symmetric matrix of linear forms (a quartic form)."""
    if len(matrix) != 4 or any(len(r) != 4 for r in matrix):
        raise ValueError("need a 4x4 matrix")
    return det(matrix)


def cofactor3(matrix, i: int, j: int):
    """Adjugate entry adj(M)_{ij} (1-based indices): signed minor of M_{ji}."""
    if not (1 <= i <= 4 and 1 <= j <= 4):
        raise ValueError("indices are 1-based and at most 4")
    r, c = j - 1, i - 1
    sub = [[matrix[a][b] for b in range(4) if b != c] for a in range(4) if a != r]
    val = det(sub)
    return -val if (i + j) % 2 else val


def gram_matrix(q: MultiPoly):
    """Symmetric Gram matrix G of a quadratic form, q(z) = z^T G z."""
    q.assert_homogeneous(2)
    n = q.nvars
    g = [[Fraction(0)] * n for _ in range(n)]
    for e, c in q.terms.items():
        idx = [i for i, k in enumerate(e) for _ in range(k)]
        a, b = idx
        if a == b:
            g[a][a] = g[a][a] + c
        else:
            g[a][b] = g[a][b] + c / 2
            g[b][a] = g[b][a] + c / 2
    return g


def linear_change(f: MultiPoly, G) -> MultiPoly:
    """f(G w): substitute z_i = sum_j G[i][j] w_j."""
    n = f.nvars
    images = []
    for i in range(n):
        images.append(MultiPoly.linear([Fraction(G[i][j]) for j in range(n)], f.names))
    return f.compose(images, n, f.names)


# ---------------------------------------------------------------------------
# resultants


def _coeff_list_high_first(f: MultiPoly, i: int, degree: int):
    parts = f.coeffs_in(i)
    zero = f.zero()
    return [parts.get(k, zero) for k in range(degree, -1, -1)]


def resultant(f: MultiPoly, g: MultiPoly, i: int) -> MultiPoly:
    """Sylvester resultant eliminating variable i (variable i stays, unused)."""
    f._check(g)
    if f.is_zero() or g.is_zero():
        raise ValueError("resultant of the zero polynomial")
    m, e = f.degree_in(i), g.degree_in(i)
    if m <= 0 or e <= 0:
        raise ValueError("both polynomials need positive degree in the eliminated variable")
    rows = up.sylvester_rows(_coeff_list_high_first(f, i, m), _coeff_list_high_first(g, i, e))
    return det(rows)


def principal_subresultant(f: MultiPoly, g: MultiPoly, i: int, j: int) -> MultiPoly:
    """j-th principal subresultant coefficient with respect to variable i.

    At a point where the leading coefficients do not vanish, the gcd of the
    specializations has degree >= j+1 iff psc_0, ..., psc_j all vanish there.
    """
    m, e = f.degree_in(i), g.degree_in(i)
    if not (0 <= j < min(m, e)):
        raise ValueError("subresultant index out of range")
    fc = _coeff_list_high_first(f, i, m)
    gc = _coeff_list_high_first(g, i, e)
    size = m + e - 2 * j
    zero = f.zero()
    rows = []
    for r in range(e - j):
        row = [zero] * r + fc + [zero] * (m + e - j)
        rows.append(row[:size])
    for r in range(m - j):
        row = [zero] * r + gc + [zero] * (m + e - j)
        rows.append(row[:size])
    return det(rows)


def _binary_uni(F: MultiPoly, N: int | None = None):
    """Binary form F(x, y) of degree N -> (coefficients of F(1, t), N)."""
    if F.nvars != 2:
        raise ValueError("binary forms have two variables")
    if N is None:
        N = F.degree()
    coeffs = [None] * (N + 1)
    for (a, b), c in F.terms.items():
        if a + b != N:
            raise ValueError("binary form is not homogeneous of the stated degree")
        coeffs[b] = c
    zero = _zero_of(F)
    return up.trim([zero if c is None else c for c in coeffs]), N


def _zero_of(F: MultiPoly):
    if F.terms:
        c = next(iter(F.terms.values()))
        return c - c
    return Fraction(0)


def _binary_from_uni(u, N: int, names=("x", "y")) -> MultiPoly:
    terms = {}
    for k, c in enumerate(u):
        if c:
            terms[(N - k, k)] = c
    return MultiPoly(terms, 2, names)


def form_resultant(f: MultiPoly, g: MultiPoly, samples=None) -> MultiPoly:
    """Resultant of two ternary forms eliminating the last variable.

    Requires f(0,0,1) and g(0,0,1) nonzero; the result is a binary form of
    degree deg f * deg g in the first two variables, obtained by evaluating
    numeric Sylvester determinants along (1, t) and interpolating.
    """
    if f.nvars != 3 or g.nvars != 3:
        raise ValueError("form_resultant expects ternary forms")
    m, e = f.degree(), g.degree()
    f.assert_homogeneous()
    g.assert_homogeneous()
    lf, lg = f.coeff((0, 0, m)), g.coeff((0, 0, e))
    if _is_zero(lf) or _is_zero(lg):
        raise ValueError("(0:0:1) lies on one of the curves; change coordinates first")
    N = m * e
    if samples is None:
        samples = list(range(N + 1))
    fparts = f.coeffs_in(2)
    gparts = g.coeffs_in(2)
    xs, ys = [], []
    for t in samples[: N + 1]:
        fc = [fparts[k].evaluate((1, t, 0)) if k in fparts else 0 for k in range(m, -1, -1)]
        gc = [gparts[k].evaluate((1, t, 0)) if k in gparts else 0 for k in range(e, -1, -1)]
        zero = lf - lf
        fc = [zero + c for c in fc]
        gc = [zero + c for c in gc]
        xs.append(t)
        ys.append(up.det_field(up.sylvester_rows(fc, gc)))
    if len(xs) < N + 1:
        raise ValueError("not enough interpolation samples")
    coeffs = up.interpolate(xs, ys)
    return _binary_from_uni(coeffs, N, f.names[:2])


def binary_resultant(F: MultiPoly, G: MultiPoly):
    """Resultant of binary forms with their formal degrees (zero iff a common root in P^1)."""
    fu, N = _binary_uni(F)
    gu, M = _binary_uni(G)
    return up.resultant(fu, gu, N, M)


def binary_discriminant_witness(F: MultiPoly):
    """Res(F_x, F_y): nonzero iff F has no repeated root in P^1 (char not dividing deg F)."""
    N = F.degree()
    if N <= 1:
        return Fraction(1)
    fx, fy = F.diff(0), F.diff(1)
    fxu, _ = _binary_uni(fx, N - 1) if fx.terms else ([], N - 1)
    fyu, _ = _binary_uni(fy, N - 1) if fy.terms else ([], N - 1)
    if not fxu or not fyu:
        return Fraction(0)
    return up.resultant(fxu, fyu, N - 1, N - 1)


def binary_gcd(F: MultiPoly, G: MultiPoly) -> MultiPoly:
    """Gcd of two binary forms, normalized to leading coefficient 1 in canonical order."""
    fu, N = _binary_uni(F)
    gu, M = _binary_uni(G)
    if not fu and not gu:
        raise ValueError("gcd of two zero forms")
    if not fu:
        return _normalize_form(G)
    if not gu:
        return _normalize_form(F)
    inf = min(N - up.deg(fu), M - up.deg(gu))
    g = up.pgcd(fu, gu)
    res = _binary_from_uni(g, up.deg(g) + inf, F.names)
    return _normalize_form(res)


def _normalize_form(F: MultiPoly) -> MultiPoly:
    return F / F.leading_coeff()


@dataclass(frozen=True)
class BinaryFormAnalysis:
    """Content, squarefree part and multiplicity profile of a binary form.

    ``pieces`` are the squarefree-decomposition factors (pairwise coprime,
    each squarefree, one per multiplicity) and ``profile`` lists
    ``(degree of piece, multiplicity)``, highest multiplicity first.
    """

    form: MultiPoly
    content: object
    squarefree_part: MultiPoly
    pieces: tuple
    profile: tuple

    @property
    def is_squarefree(self) -> bool:
        return all(m == 1 for _, m in self.profile)

    @property
    def degree(self) -> int:
        return self.form.degree()

    def reconstruct(self) -> MultiPoly:
        acc = MultiPoly.const(self.content, 2, self.form.names)
        for piece, mult in self.pieces:
            acc = acc * piece**mult
        return acc

    def to_json(self) -> dict:
        c = self.content
        return {
            "content": c.to_json() if isinstance(c, QuadExt) else fmt_rational(c),
            "squarefree_part": self.squarefree_part.to_json(),
            "profile": [list(p) for p in self.profile],
        }


def _primitive_rational(F: MultiPoly):
    """Split a rational form into (content, primitive integer form with positive lead)."""
    nums, dens = [], []
    for c in F.terms.values():
        c = Fraction(c)
        nums.append(c.numerator)
        dens.append(c.denominator)
    g = 0
    for n in nums:
        g = gcd(g, n)
    den = 1
    for d in dens:
        den = lcm(den, d)
    content = Fraction(g, den)
    if Fraction(F.leading_coeff()) < 0:
        content = -content
    return content, F / content


def _all_rational(F: MultiPoly) -> bool:
    return all(isinstance(c, (int, Fraction)) for c in F.terms.values())


def analyze_binary_form(F: MultiPoly) -> BinaryFormAnalysis:
    """Squarefree analysis of a nonzero binary form over Q or Q(sqrt d).

    The dehomogenization F(1, t) is decomposed with Yun's algorithm; the root
    at infinity (the factor x) is recovered from the drop in degree.
    """
    if F.is_zero():
        raise ValueError("cannot analyze the zero form")
    if F.nvars != 2:
        raise ValueError("binary forms have two variables")
    F.assert_homogeneous()
    fu, N = _binary_uni(F)
    lc, pieces = up.squarefree_decomposition(fu)
    inf_mult = N - up.deg(fu)
    names = F.names
    by_mult = {}
    for p, k in pieces:
        by_mult[k] = _binary_from_uni(p, up.deg(p), names)
    if inf_mult:
        xform = MultiPoly({(1, 0): lc - lc + 1}, 2, names)
        by_mult[inf_mult] = by_mult[inf_mult] * xform if inf_mult in by_mult else xform
    content = lc
    rational = _all_rational(F)
    out_pieces = []
    for k in sorted(by_mult, reverse=True):
        piece = by_mult[k]
        if rational:
            c, piece = _primitive_rational(piece)
        else:
            c = piece.leading_coeff()
            piece = piece / c
        content = content * c**k
        out_pieces.append((piece, k))
    sqf = MultiPoly.const(content - content + 1, 2, names)
    for piece, _ in out_pieces:
        sqf = sqf * piece
    profile = tuple((piece.degree(), k) for piece, k in out_pieces)
    return BinaryFormAnalysis(F, content, sqf, tuple(out_pieces), profile)
