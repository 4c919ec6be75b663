"""Vectorized arithmetic in F_q (q = p or p^2) on numpy integer arrays.

Elements are encoded as integers ``c0 + c1*p`` exactly as :meth:`FqElem.encode`
does, so F_p sits inside F_{p^2} with the same codes.  Counting code works on
whole grids of points at once through this class.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import BadPrimeError, FiniteField, FqElem, QuadExt, is_prime, reduce_mod_p

__all__ = ["GF", "field_for_q", "projective_points"]


class GF:
    def __init__(self, p: int, k: int = 1):
        self.field = FiniteField(p, k)
        self.p = p
        self.k = k
        self.q = p**k
        self.r = self.field.r
        sq = np.zeros(p, dtype=np.int64)
        sq[(np.arange(1, p) ** 2) % p] = 1
        chi_p = np.where(sq == 1, 1, -1)
        chi_p[0] = 0
        self._chi_p = chi_p.astype(np.int64)
        self._inv_p = np.array([0] + [pow(i, -1, p) for i in range(1, p)], dtype=np.int64)

    def __repr__(self):
        return f"GF({self.q})"

    # -- encoding -----------------------------------------------------
    def split(self, x):
        x = np.asarray(x, dtype=np.int64)
        return x % self.p, x // self.p

    def join(self, a, b):
        return (a % self.p) + (b % self.p) * self.p

    def elements(self):
        return np.arange(self.q, dtype=np.int64)

    # -- arithmetic ---------------------------------------------------
    def add(self, x, y):
        if self.k == 1:
            return (np.asarray(x) + y) % self.p
        a1, b1 = self.split(x)
        a2, b2 = self.split(y)
        return self.join(a1 + a2, b1 + b2)

    def sub(self, x, y):
        if self.k == 1:
            return (np.asarray(x) - y) % self.p
        a1, b1 = self.split(x)
        a2, b2 = self.split(y)
        return self.join(a1 - a2, b1 - b2)

    def neg(self, x):
        if self.k == 1:
            return (-np.asarray(x)) % self.p
        a, b = self.split(x)
        return self.join(-a, -b)

    def mul(self, x, y):
        p = self.p
        if self.k == 1:
            return (np.asarray(x) * y) % p
        a1, b1 = self.split(x)
        a2, b2 = self.split(y)
        c0 = (a1 * a2 + self.r * ((b1 * b2) % p)) % p
        c1 = (a1 * b2 + a2 * b1) % p
        return c0 + c1 * p

    def norm(self, x):
        if self.k == 1:
            return np.asarray(x) % self.p
        a, b = self.split(x)
        return (a * a - self.r * ((b * b) % self.p)) % self.p

    def inv(self, x):
        """Inverse; zero maps to zero (callers mask it out)."""
        p = self.p
        if self.k == 1:
            return self._inv_p[np.asarray(x) % p]
        a, b = self.split(x)
        ninv = self._inv_p[self.norm(x)]
        return self.join(a * ninv, -b * ninv)

    def chi(self, x):
        """Quadratic character; a nonzero element of F_{p^2} is a square iff its norm is."""
        return self._chi_p[self.norm(x)]

    def scalar(self, c) -> int:
        """Encode an int, Fraction, QuadExt or FqElem."""
        if isinstance(c, FqElem):
            return self.field.convert(c).encode()
        if isinstance(c, QuadExt):
            return self.field.convert(c).encode()
        return reduce_mod_p(Fraction(c), self.p)

    def has_sqrt_int(self, d: int) -> bool:
        return self.field.has_sqrt_int(d)

    # -- polynomial evaluation ---------------------------------------
    def compile(self, poly):
        """Reduce a MultiPoly's coefficients into this field: list of (exps, code)."""
        out = []
        for e, c in poly.terms.items():
            code = self.scalar(c)
            if code:
                out.append((e, code))
        return out

    def evaluate(self, compiled, coords):
        """Evaluate a compiled polynomial at arrays of coordinates (broadcasting)."""
        shape = np.broadcast(*coords).shape if coords else ()
        total = np.zeros(shape, dtype=np.int64)
        cache = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                if k == 1:
                    cache[key] = np.asarray(coords[i], dtype=np.int64)
                else:
                    half = power(i, k // 2)
                    sq = self.mul(half, half)
                    cache[key] = self.mul(sq, coords[i]) if k % 2 else sq
            return cache[key]

        for e, code in compiled:
            term = np.full(shape, code, dtype=np.int64)
            for i, k in enumerate(e):
                if k:
                    term = self.mul(term, power(i, k))
            total = self.add(total, term)
        return total


@lru_cache(maxsize=64)
def field_for_q(q: int) -> GF:
    """The field with q elements, q an odd prime or the square of one."""
    if is_prime(q) and q != 2:
        return GF(q, 1)
    r = int(round(q**0.5))
    for cand in (r - 1, r, r + 1):
        if cand > 2 and cand * cand == q and is_prime(cand):
            return GF(cand, 2)
    raise ValueError(f"q = {q} is not an odd prime or the square of one")


def projective_points(q: int, n: int):
    """Normalized representatives of P^n(F_q): first nonzero coordinate is 1.

    Returns an int64 array of shape (count, n+1), ordered by the position of
    the leading 1 and then lexicographically.
    """
    blocks = []
    for lead in range(n + 1):
        free = n - lead
        if free:
            grids = np.indices((q,) * free).reshape(free, -1).T
        else:
            grids = np.zeros((1, 0), dtype=np.int64)
        block = np.zeros((grids.shape[0], n + 1), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1:] = grids
        blocks.append(block)
    return np.concatenate(blocks, axis=0)


def check_odd_prime_power(q: int) -> GF:
    try:
        return field_for_q(q)
    except ValueError as exc:
        raise BadPrimeError(q, str(exc)) from None
