"""Quartic symmetroids with a node at (0:0:0:1).

The generator places the node by making the z3-coefficient matrix C of rank
two.  A congruence ``T`` (over Q(sqrt d) in general) brings C to the
hyperbolic block at positions (3,4); in that basis

    det M' = alpha*z3^2 + beta*z3 + gamma,   beta^2 - 4*alpha*gamma = eps1*eps2

with eps1, eps2 twice the (3,3) and (4,4) adjugate entries of the z3-free
part M'_0 (Jacobi's complementary-minor identity).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .arith import QuadExt, fmt_rational, make_quad_ext, parse_rational
from .multipoly import MultiPoly, cofactor3, det_sym4

__all__ = [
    "RATIONAL_SPLIT",
    "DiscriminantSplit",
    "ProjectedSymmetroid",
    "SymLinearMatrix",
    "generate_candidate",
    "hyperbolize",
    "project_from_node",
    "rank_q",
    "split_discriminant",
]

RATIONAL_SPLIT = 1
"""Marker used in place of d when -c1*c2 is a rational square (no extension needed)."""

HYPERBOLIC = [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]
UPPER = [(i, j) for i in range(4) for j in range(i, 4)]


@dataclass(frozen=True)
class SymLinearMatrix:
    """Upper triangle (row-major) of a 4x4 symmetric matrix of linear forms in z0..z3."""

    upper: tuple

    def __post_init__(self):
        if len(self.upper) != 10 or any(len(f) != 4 for f in self.upper):
            raise ValueError("need 10 linear forms with 4 coefficients each")
        object.__setattr__(
            self, "upper", tuple(tuple(Fraction(c) for c in f) for f in self.upper)
        )

    def entry(self, i: int, j: int):
        if i > j:
            i, j = j, i
        return self.upper[UPPER.index((i, j))]

    def forms(self):
        """4x4 matrix of MultiPoly linear forms."""
        m = [[None] * 4 for _ in range(4)]
        for (i, j), coeffs in zip(UPPER, self.upper):
            f = MultiPoly.linear(list(coeffs))
            m[i][j] = f
            m[j][i] = f
        return m

    def z3_matrix(self):
        return [[self.entry(i, j)[3] for j in range(4)] for i in range(4)]

    def to_json(self):
        return [[fmt_rational(c) for c in f] for f in self.upper]

    @classmethod
    def from_json(cls, obj):
        return cls(tuple(tuple(parse_rational(c) for c in f) for f in obj))


def rank_q(matrix) -> int:
    m = [[Fraction(x) for x in row] for row in matrix]
    rank = 0
    rows, cols = len(m), len(m[0]) if m else 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(rows):
            if r != rank and m[r][c]:
                f = m[r][c] / m[rank][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def generate_candidate(seed, bound: int) -> SymLinearMatrix:
    """Seeded random symmetric matrix M0(z0,z1,z2) + z3*C with rank C = 2.

    C is drawn as a*u*u^T + b*v*v^T with u, v in {-1,0,1}^4 and nonzero
    weights a, b in [-bound, bound], redrawn until its rank is exactly 2 and
    all entries lie in [-bound, bound].  The weights make the extension
    discriminant d (squarefree part of -a*b) vary with the seed.
    """
    if bound < 1:
        raise ValueError("bound must be at least 1")
    rng = random.Random(seed)
    while True:
        u = [rng.randint(-1, 1) for _ in range(4)]
        v = [rng.randint(-1, 1) for _ in range(4)]
        s = rng.choice([w for w in range(-bound, bound + 1) if w])
        t = rng.choice([w for w in range(-bound, bound + 1) if w])
        C = [[s * u[i] * u[j] + t * v[i] * v[j] for j in range(4)] for i in range(4)]
        if max(abs(x) for row in C for x in row) <= bound and rank_q(C) == 2:
            break
    upper = []
    for i, j in UPPER:
        base = [rng.randint(-bound, bound) for _ in range(3)]
        upper.append(tuple(base) + (C[i][j],))
    return SymLinearMatrix(tuple(upper))


def _matmul(A, B):
    n, m, k = len(A), len(B), len(B[0])
    return [[sum((A[i][l] * B[l][j] for l in range(m)), Fraction(0)) for j in range(k)] for i in range(n)]


def _transpose(A):
    return [list(r) for r in zip(*A)]


def _identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def _congruence(A, E):
    return _matmul(_matmul(_transpose(E), A), E)


def sym_diagonalize(C):
    """Rational P with P^T C P diagonal (char 0 congruence diagonalization)."""
    n = len(C)
    A = [[Fraction(x) for x in row] for row in C]
    P = _identity(n)
    for i in range(n):
        if A[i][i] == 0:
            j = next((j for j in range(i + 1, n) if A[j][j] != 0), None)
            if j is not None:
                E = _identity(n)
                E[i][i] = E[j][j] = Fraction(0)
                E[i][j] = E[j][i] = Fraction(1)
            else:
                j = next((j for j in range(i + 1, n) if A[i][j] != 0), None)
                if j is None:
                    continue
                E = _identity(n)
                E[j][i] = Fraction(1)
            A = _congruence(A, E)
            P = _matmul(P, E)
        for j in range(i + 1, n):
            if A[i][j] != 0:
                E = _identity(n)
                E[i][j] = -A[i][j] / A[i][i]
                A = _congruence(A, E)
                P = _matmul(P, E)
    return P, [A[i][i] for i in range(n)]


def hyperbolize(C):
    """Congruence T with T^T C T = hyperbolic block at (3,4); returns (T, d).

    T has entries in Q(sqrt d) where d is the squarefree part of -c1*c2 for a
    rational diagonalization diag(c1, c2, 0, 0) of C.  When -c1*c2 is a square
    d is ``RATIONAL_SPLIT`` and T is rational.
    """
    C = [[Fraction(x) for x in row] for row in C]
    if rank_q(C) != 2:
        raise ValueError("hyperbolize needs a rank-2 matrix")
    if C == [[Fraction(x) for x in row] for row in HYPERBOLIC]:
        return _identity(4), RATIONAL_SPLIT
    P, diag = sym_diagonalize(C)
    nz = [i for i, c in enumerate(diag) if c != 0]
    zero = [i for i in range(4) if diag[i] == 0]
    order = zero + nz
    Q = [[Fraction(int(order[j] == i)) for j in range(4)] for i in range(4)]
    T0 = _matmul(P, Q)
    c1, c2 = diag[nz[0]], diag[nz[1]]
    n = -c1 * c2
    d, scale = make_quad_ext(n.numerator * n.denominator)
    if d == 1:
        s = Fraction(scale, n.denominator) / c1
    else:
        s = QuadExt(d, 0, Fraction(scale, n.denominator) / c1)
    T2 = [[Fraction(1, 2), 1 / c1], [1 / (2 * s), -1 / (c1 * s)]]
    block = [[Fraction(int(i == j)) if i < 2 or j < 2 else 0 for j in range(4)] for i in range(4)]
    for i in range(2):
        for j in range(2):
            block[2 + i][2 + j] = T2[i][j]
    T = [[sum((T0[i][l] * block[l][j] for l in range(4)), Fraction(0)) for j in range(4)] for i in range(4)]
    return T, d


def congruent_entries(M, T):
    """Entries of T^T M T for a matrix M of polynomials and scalar matrix T."""
    n = len(M)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            acc = M[0][0].zero()
            for k in range(n):
                if not T[k][i]:
                    continue
                for l in range(n):
                    if not T[l][j]:
                        continue
                    acc = acc + M[k][l] * (T[k][i] * T[l][j])
            out[i][j] = acc
            out[j][i] = acc
    return out


def scalar_det(T):
    from .univariate import det_field

    return det_field([[x for x in row] for row in T])


def as_rational(c):
    if isinstance(c, QuadExt):
        if c.b != 0:
            raise ValueError(f"expected a rational value, got {c}")
        return c.a
    return Fraction(c)


def _drop_var(poly: MultiPoly, i: int) -> MultiPoly:
    if poly.degree_in(i) > 0:
        raise ValueError("variable still occurs")
    out = {e[:i] + e[i + 1:]: c for e, c in poly.terms.items()}
    names = poly.names[:i] + poly.names[i + 1:]
    return MultiPoly(out, poly.nvars - 1, names)


@dataclass(frozen=True)
class ProjectedSymmetroid:
    alpha: MultiPoly
    beta: MultiPoly
    gamma: MultiPoly
    source: SymLinearMatrix
    T: tuple
    d: int
    base_matrix: tuple  # z3-free part of T^T M T, entries in z0, z1, z2
    det_T_squared: Fraction

    @property
    def discriminant(self) -> MultiPoly:
        return self.beta**2 - 4 * self.alpha * self.gamma

    def quartic(self) -> MultiPoly:
        """alpha*z3^2 + beta*z3 + gamma as a form in z0..z3."""
        z = MultiPoly.gens(4)
        lift = [z[0], z[1], z[2]]
        a = self.alpha.compose(lift, 4)
        b = self.beta.compose(lift, 4)
        g = self.gamma.compose(lift, 4)
        return a * z[3] ** 2 + b * z[3] + g


def project_from_node(M: SymLinearMatrix) -> ProjectedSymmetroid:
    C = M.z3_matrix()
    if rank_q(C) != 2:
        raise ValueError("the z3-coefficient matrix must have rank 2")
    T, d = hyperbolize(C)
    Mp = congruent_entries(M.forms(), T)
    for i in range(4):
        for j in range(4):
            lin = Mp[i][j].coeffs_in(3).get(1)
            c = lin.coeff((0, 0, 0, 0)) if lin is not None else 0
            if c != HYPERBOLIC[i][j]:
                raise RuntimeError("congruence did not produce the hyperbolic z3-block")
    D = det_sym4(Mp)
    parts = D.coeffs_in(3)
    if any(k > 2 for k in parts):
        raise RuntimeError("determinant has z3-degree above 2")
    zero3 = MultiPoly({}, 3)
    abc = []
    for k in (2, 1, 0):
        poly = parts.get(k)
        if poly is None:
            abc.append(zero3)
        else:
            abc.append(_drop_var(poly.map_coeffs(as_rational), 3))
    base = tuple(
        tuple(_drop_var(Mp[i][j].subs({3: 0}), 3) for j in range(4)) for i in range(4)
    )
    dt = scalar_det(T)
    return ProjectedSymmetroid(
        alpha=abc[0],
        beta=abc[1],
        gamma=abc[2],
        source=M,
        T=tuple(tuple(r) for r in T),
        d=d,
        base_matrix=base,
        det_T_squared=as_rational(dt * dt),
    )


@dataclass(frozen=True)
class DiscriminantSplit:
    d: int
    eps1: MultiPoly
    eps2: MultiPoly
    unit: object
    conjugate_pair: bool


def _conj_poly(f: MultiPoly) -> MultiPoly:
    return f.map_coeffs(lambda c: c.conjugate() if isinstance(c, QuadExt) else c)


def is_conjugate_pair(e1: MultiPoly, e2: MultiPoly) -> bool:
    """True iff e2 = lambda * conj(e1) for a rational lambda."""
    c1 = _conj_poly(e1)
    if set(c1.terms) != set(e2.terms) or not c1.terms:
        return False
    mono = next(iter(c1.terms))
    lam = e2.terms[mono] / c1.terms[mono]
    if isinstance(lam, QuadExt) and lam.b != 0:
        return False
    return (e2 - c1 * lam).is_zero()


def split_discriminant(ps: ProjectedSymmetroid, normalize: bool = True) -> DiscriminantSplit:
    base = [list(r) for r in ps.base_matrix]
    eps1 = cofactor3(base, 3, 3) * 2
    eps2 = cofactor3(base, 4, 4) * 2
    if not (eps1 * eps2 - ps.discriminant).is_zero():
        raise RuntimeError("eps1*eps2 != beta^2 - 4*alpha*gamma; upstream bug")
    unit = Fraction(1)
    if normalize:
        unit = eps1.leading_coeff()
        eps1 = eps1 / unit
        eps2 = eps2 * unit
    eps1 = _simplify(eps1)
    eps2 = _simplify(eps2)
    conj = ps.d != RATIONAL_SPLIT and is_conjugate_pair(eps1, eps2)
    return DiscriminantSplit(ps.d, eps1, eps2, unit, conj)


def _simplify(f: MultiPoly) -> MultiPoly:
    """Store purely rational QuadExt coefficients as Fractions."""
    if all((not isinstance(c, QuadExt)) or c.b == 0 for c in f.terms.values()):
        return f.map_coeffs(as_rational)
    return f
