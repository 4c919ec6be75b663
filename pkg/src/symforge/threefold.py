"""The quartic threefold h = alpha*z3^2 + beta*z3 + gamma + delta*z4^2.

This module assembles instances from symmetroid data, serializes them,
certifies the singular locus (the line L = {z0=z1=z2=0} plus nine nodes),
builds the blowup charts along L and classifies fibers of the projection
to (z0:z1:z2).
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm

import numpy as np

from . import univariate as up
from .arith import BadPrimeError, FqElem, QuadExt, fmt_rational, is_prime, parse_rational, quad_char
from .genericity import SCHEDULE, GenericityReport, full_genericity, scalar_integers
from .gf import GF, field_for_q, projective_points
from .multipoly import MultiPoly, analyze_binary_form, det, form_resultant, gram_matrix, linear_change
from .symmetroid import (
    RATIONAL_SPLIT,
    DiscriminantSplit,
    ProjectedSymmetroid,
    SymLinearMatrix,
    project_from_node,
    split_discriminant,
)

log = logging.getLogger(__name__)

__all__ = [
    "FiberType",
    "Instance",
    "SingularLocusCertificate",
    "assemble_instance",
    "build_instance",
    "chart_smoothness_check",
    "classify_fiber",
    "exceptional_surface",
    "fiber_census",
    "instance_from_json",
    "load_instance",
    "node_scheme_census",
    "rational_nodes",
    "singular_locus_certificate",
    "singular_points_bruteforce",
    "splitting_character",
    "strict_transform_chart",
    "total_transform",
]

DELTA_MONOMIALS = ((2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2))
CHARTS = tuple((amb, k) for amb in (4, 3) for k in range(3))

W_NAMES = ("z0", "z1", "z2")
H_NAMES = ("z0", "z1", "z2", "z3", "z4")


def delta_from_coeffs(coeffs) -> MultiPoly:
    if len(coeffs) != 6:
        raise ValueError("delta needs 6 coefficients")
    return MultiPoly({e: Fraction(c) for e, c in zip(DELTA_MONOMIALS, coeffs)}, 3, W_NAMES)


def delta_coeffs(delta: MultiPoly):
    return [Fraction(delta.coeff(e)) for e in DELTA_MONOMIALS]


def sample_delta(rng: random.Random, bound: int) -> list[int]:
    while True:
        c = [rng.randint(-bound, bound) for _ in range(6)]
        if any(c):
            return c


def _lift5(f: MultiPoly) -> MultiPoly:
    return MultiPoly({e + (0, 0): c for e, c in f.terms.items()}, 5, H_NAMES)


def _content(f: MultiPoly) -> Fraction:
    """Positive rational c with f/c primitive with integer coefficients."""
    g, den = 0, 1
    for c in f.terms.values():
        c = Fraction(c)
        g = gcd(g, c.numerator)
        den = lcm(den, c.denominator)
    return Fraction(g, den)


@dataclass
class Instance:
    matrix: SymLinearMatrix
    delta_raw: tuple
    ps: ProjectedSymmetroid
    split: DiscriminantSplit
    alpha: MultiPoly
    beta: MultiPoly
    gamma: MultiPoly
    delta: MultiPoly
    eps1: MultiPoly
    eps2: MultiPoly
    d: int
    scale: Fraction
    h: MultiPoly
    genericity: GenericityReport | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def discriminant(self) -> MultiPoly:
        return self.beta**2 - 4 * self.alpha * self.gamma

    @property
    def E1(self) -> MultiPoly:
        """Integral representative of eps1 (same curve, no denominators)."""
        if "E1" not in self._cache:
            self._cache["E1"] = integral_form(self.eps1)
        return self._cache["E1"]

    @property
    def E2(self) -> MultiPoly:
        if "E2" not in self._cache:
            self._cache["E2"] = integral_form(self.eps2)
        return self._cache["E2"]

    def curve_ratio(self):
        """kappa with E1*E2 = kappa*(beta^2 - 4*alpha*gamma)."""
        prod = self.E1 * self.E2
        mono, c = prod.sorted_terms()[0]
        return c / self.discriminant.coeff(mono)

    # -- certificates and good primes ---------------------------------
    def certify(self) -> GenericityReport:
        if self.genericity is None:
            self.genericity = full_genericity(self)
        return self.genericity

    def witness_integers(self) -> list[int]:
        """Sorted positive integers whose prime divisors are the bad primes."""
        if "witness" in self._cache:
            return self._cache["witness"]
        ints = [2]
        if self.d != RATIONAL_SPLIT:
            ints.append(self.d)
        rep = self.certify()
        ints.extend(rep.witness_integers())
        ints.extend(scalar_integers(self.curve_ratio()))
        for f in (self.alpha, self.delta):
            ints.extend(scalar_integers(det_gram(f)))
        out = sorted({abs(int(n)) for n in ints if n and abs(int(n)) != 1})
        self._cache["witness"] = out
        return out

    def bad_prime_witness(self, p: int):
        """None if p is a good prime, else the witness integer that excludes it."""
        if p == 2 or not is_prime(p):
            return p
        for n in self.witness_integers():
            if n % p == 0:
                return n
        return None

    def is_good(self, q: int) -> bool:
        return self.bad_prime_witness(_char_of(q)) is None

    def require_good(self, q: int) -> int:
        p = _char_of(q)
        w = self.bad_prime_witness(p)
        if w is not None:
            raise BadPrimeError(p, "prime divides an instance witness integer", w)
        return p

    # -- reductions ----------------------------------------------------
    def reduced(self, q: int) -> "ReducedInstance":
        key = ("reduced", q)
        if key not in self._cache:
            self._cache[key] = ReducedInstance(self, q)
        return self._cache[key]

    def to_json(self) -> dict:
        return {
            "matrix": self.matrix.to_json(),
            "delta": [fmt_rational(c) for c in self.delta_raw],
            "d": self.d,
            "normalization": {
                "scale": fmt_rational(self.scale),
                "eps_unit": _scalar_json(self.split.unit),
                "h": self.h.to_json(),
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"


def _scalar_json(c):
    return c.to_json() if isinstance(c, QuadExt) else fmt_rational(c)


def _char_of(q: int) -> int:
    gf = field_for_q(q)
    return gf.p


def integral_form(f: MultiPoly) -> MultiPoly:
    """Scalar multiple of f with coefficients in Z or Z[sqrt d] and no common integer factor."""
    den, parts = 1, []
    for c in f.terms.values():
        if isinstance(c, QuadExt):
            parts.extend([c.a, c.b])
        else:
            parts.append(Fraction(c))
    for x in parts:
        den = lcm(den, x.denominator)
    g = 0
    for x in parts:
        g = gcd(g, (x * den).numerator)
    out = f * Fraction(den, g)
    lead = out.leading_coeff()
    sign = lead.a if isinstance(lead, QuadExt) and lead.a else (lead.b if isinstance(lead, QuadExt) else lead)
    return -out if sign < 0 else out


def det_gram(f: MultiPoly):
    return up.det_field(gram_matrix(f))


def assemble_instance(ps: ProjectedSymmetroid, split: DiscriminantSplit, delta: MultiPoly, matrix=None, delta_raw=None) -> Instance:
    """Build h and normalize it to a primitive integer form.

    The common scale factor is applied to alpha, beta, gamma, delta and its
    square to eps2, so that eps1*eps2 = beta^2 - 4*alpha*gamma still holds
    with eps1 monic.
    """
    if delta.is_zero():
        raise ValueError("delta must be nonzero")
    delta.assert_homogeneous(2)
    z = MultiPoly.gens(5, H_NAMES)
    raw = (
        _lift5(ps.alpha) * z[3] ** 2 + _lift5(ps.beta) * z[3] + _lift5(ps.gamma)
        + _lift5(delta) * z[4] ** 2
    )
    lam = 1 / _content(raw)
    h = raw * lam
    return Instance(
        matrix=matrix if matrix is not None else ps.source,
        delta_raw=tuple(delta_raw if delta_raw is not None else delta_coeffs(delta)),
        ps=ps,
        split=split,
        alpha=ps.alpha * lam,
        beta=ps.beta * lam,
        gamma=ps.gamma * lam,
        delta=delta * lam,
        eps1=split.eps1,
        eps2=split.eps2 * (lam * lam),
        d=split.d,
        scale=lam,
        h=h,
    )


def build_instance(matrix: SymLinearMatrix, delta_raw) -> Instance:
    ps = project_from_node(matrix)
    split = split_discriminant(ps)
    delta = delta_from_coeffs(delta_raw)
    return assemble_instance(ps, split, delta, matrix, [Fraction(c) for c in delta_raw])


def instance_from_json(obj) -> Instance:
    try:
        matrix = SymLinearMatrix.from_json(obj["matrix"])
        delta_raw = [parse_rational(c) for c in obj["delta"]]
        d = int(obj["d"])
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed instance: {exc}") from None
    inst = build_instance(matrix, delta_raw)
    if inst.d != d:
        raise ValueError(f"stored d = {d} but the matrix gives d = {inst.d}")
    # the normalization block is derived data; a stale one (say after editing
    # delta by hand) is recomputed rather than trusted
    norm = obj.get("normalization")
    if norm is not None:
        try:
            stale = (
                ("h" in norm and MultiPoly.from_json(norm["h"]) != inst.h)
                or ("scale" in norm and parse_rational(norm["scale"]) != inst.scale)
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed normalization block: {exc}") from None
        if stale:
            log.warning("stored normalization does not match the instance; recomputed")
    return inst


def load_instance(path) -> Instance:
    with open(path) as fh:
        text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"instance file is not valid JSON: {exc}") from None
    return instance_from_json(obj)


# ---------------------------------------------------------------------------
# reductions mod p


class ReducedInstance:
    """Compiled reductions of an instance's forms into F_q.

    The eps forms live over Q(sqrt d); they are evaluated in ``eps_gf``,
    which is F_q itself when d is a square there and F_{q^2} otherwise
    (only possible for q = p).  Codes of F_p-points are valid codes in both.
    """

    def __init__(self, inst: Instance, q: int):
        inst.require_good(q)
        self.q = q
        self.gf = field_for_q(q)
        p = self.gf.p
        if inst.d == RATIONAL_SPLIT or self.gf.has_sqrt_int(inst.d):
            self.eps_gf = self.gf
        else:
            self.eps_gf = GF(p, 2)
        c = self.gf.compile
        self.alpha = c(inst.alpha)
        self.beta = c(inst.beta)
        self.gamma = c(inst.gamma)
        self.delta = c(inst.delta)
        self.disc = c(inst.discriminant)
        self.eps1 = self.eps_gf.compile(inst.E1)
        self.eps2 = self.eps_gf.compile(inst.E2)

    def eval(self, name: str, coords):
        gf = self.eps_gf if name.startswith("eps") else self.gf
        return gf.evaluate(getattr(self, name), coords)


# ---------------------------------------------------------------------------
# singular locus


def singular_points_bruteforce(h: MultiPoly, q: int, cap: int = 17):
    """Points of P^n(F_q) where every partial of h vanishes, sorted.

    Points are tuples of field codes (see :mod:`symforge.gf`) normalized so
    that the first nonzero coordinate is 1.
    """
    if q > cap:
        raise ValueError(f"q = {q} exceeds the brute-force cap {cap}")
    gf = field_for_q(q)
    n = h.nvars - 1
    pts = projective_points(q, n)
    coords = [pts[:, i] for i in range(n + 1)]
    mask = np.ones(len(pts), dtype=bool)
    for part in h.gradient():
        comp = gf.compile(part)
        if not comp:
            continue
        vals = gf.evaluate(comp, [c[mask] for c in coords])
        idx = np.nonzero(mask)[0]
        mask[idx[vals != 0]] = False
        if not mask.any():
            break
    return sorted(tuple(int(x) for x in row) for row in pts[mask])


def line_points(q: int):
    """L(F_q) as normalized points of P^4."""
    out = [(0, 0, 0, 1, t) for t in range(q)] + [(0, 0, 0, 0, 1)]
    return sorted(out)


def _nodes_on_plane(inst: Instance, q: int):
    """Points a of P^2(F_q) with eps1(a) = eps2(a) = 0, as code tuples."""
    red = inst.reduced(q)
    pts = projective_points(q, 2)
    coords = [pts[:, i] for i in range(3)]
    e1 = red.eval("eps1", coords)
    mask = e1 == 0
    sub = [c[mask] for c in coords]
    e2 = red.eval("eps2", sub)
    keep = pts[mask][e2 == 0]
    return [tuple(int(x) for x in row) for row in keep]


def _normalize_code_point(gf: GF, pt):
    """Scale a point (codes) so its first nonzero coordinate is 1."""
    arr = np.array(pt, dtype=np.int64)
    lead = next(i for i, x in enumerate(pt) if x)
    inv = gf.inv(arr[lead])
    return tuple(int(x) for x in gf.mul(arr, inv))


def rational_nodes(inst: Instance, q: int):
    """F_q-rational nodes of V: scan P^2 for eps1 = eps2 = 0, lift to (a : -beta/2alpha : 0)."""
    red = inst.reduced(q)
    gf = red.gf
    out = []
    for a in _nodes_on_plane(inst, q):
        coords = [np.array(x) for x in a]
        al = int(gf.evaluate(red.alpha, coords))
        be = int(gf.evaluate(red.beta, coords))
        if al == 0:
            raise BadPrimeError(gf.p, "alpha vanishes at a node", None)
        z3 = int(gf.neg(gf.mul(be, gf.inv(gf.mul(gf.scalar(2), al)))))
        out.append(_normalize_code_point(gf, a + (z3, 0)))
    return sorted(out)


def node_quadric(inst: Instance, q: int, a):
    """Split type of the projectivized tangent cone at the node over a.

    The local equation alpha*u^2 - Delta/(4 alpha) + delta*z4^2 has quadratic
    part of determinant delta*det(G)/(16 alpha), G the Gram matrix of the
    quadratic part of Delta at a in an affine chart; the quadric surface is
    split iff that determinant is a square.
    """
    red = inst.reduced(q)
    gf = red.gf
    fld = gf.field
    k = next(i for i, x in enumerate(a) if x)
    pt = [gf.field.from_code(x) for x in a]
    hess = _hessians(inst)
    free = [i for i in range(3) if i != k]
    H = [[fld.convert(0)] * 2 for _ in range(2)]
    for r, i in enumerate(free):
        for s, j in enumerate(free):
            H[r][s] = _eval_fq(hess[(min(i, j), max(i, j))], fld, pt)
    # a is normalized with a_k = 1, so H is the Hessian in the affine chart a_k = 1
    detG = (H[0][0] * H[1][1] - H[0][1] * H[1][0]) / 4
    al = _eval_fq(inst.alpha, fld, pt)
    de = _eval_fq(inst.delta, fld, pt)
    val = al * de * detG
    chi = quad_char(val)
    if chi == 0:
        raise BadPrimeError(gf.p, "tangent cone of a node is degenerate", None)
    return "split" if chi == 1 else "nonsplit"


def _eval_fq(f: MultiPoly, fld, pt):
    acc = fld.zero()
    for e, c in f.terms.items():
        term = fld.convert(c)
        for x, k in zip(pt, e):
            if k:
                term = term * x**k
        acc = acc + term
    return acc


def _hessians(inst: Instance):
    if "hess" not in inst._cache:
        D = inst.discriminant
        inst._cache["hess"] = {
            (i, j): D.diff(i).diff(j) for i in range(3) for j in range(i, 3)
        }
    return inst._cache["hess"]


def _node_resultant(inst: Instance, fld):
    """Resultant of eps1, eps2 mod p as a squarefree degree-9 polynomial.

    Tries the coordinate changes of the genericity schedule until the leading
    z2-coefficients survive and the reduced resultant is squarefree of full
    degree, so that its roots are in bijection with the points of E1 n E2.
    """
    for G in SCHEDULE:
        e1 = linear_change(inst.E1, G).map_coeffs(fld.convert)
        e2 = linear_change(inst.E2, G).map_coeffs(fld.convert)
        if not e1.coeff((0, 0, 3)) or not e2.coeff((0, 0, 3)):
            continue
        R = form_resultant(e1, e2)
        uni = [fld.zero()] * 10
        for (i, j), c in R.terms.items():
            uni[j] = c
        uni = up.trim(uni)
        if up.deg(uni) == 9 and up.is_squarefree(uni):
            return uni
    return None


def node_scheme_census(inst: Instance, p: int):
    """Galois orbit structure of E1 n E2 over F = F_p(sqrt d).

    The resultant of eps1, eps2 is reduced into F, checked squarefree of
    degree 9, and factored by distinct degrees.  Returns a dict with the
    orbit degrees, the number of F-rational points and an independent scan
    of P^2(F).
    """
    inst.require_good(p)
    if p <= 9:
        raise ValueError("node census needs p > 9 for interpolation")
    red = inst.reduced(p)
    fld = red.eps_gf.field
    uni = _node_resultant(inst, fld)
    if uni is None:
        raise BadPrimeError(p, "no coordinate change separates E1 n E2 mod p", None)
    orbits = up.ddf(uni, fld.q)
    total = sum(k * v for k, v in orbits.items())
    scanned = len(_nodes_on_plane(inst, fld.q))
    return {
        "field_size": fld.q,
        "orbits": {int(k): int(v) for k, v in sorted(orbits.items())},
        "total_degree": total,
        "rational_points": orbits.get(1, 0),
        "scanned_rational_points": scanned,
    }


@dataclass
class SingularLocusCertificate:
    line_contained: bool
    node_count: int
    node_system: str
    dependencies: list
    dependency_status: dict
    modular: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return (
            self.line_contained
            and self.node_count == 9
            and all(s == "pass" for s in self.dependency_status.values())
            and all(m.get("agree", False) for m in self.modular)
        )

    def to_json(self) -> dict:
        return {
            "line_contained": self.line_contained,
            "node_count": self.node_count,
            "node_system": self.node_system,
            "dependencies": self.dependencies,
            "dependency_status": self.dependency_status,
            "modular": self.modular,
            "valid": self.valid,
        }


SINGULAR_DEPENDENCIES = [
    "smooth E1",
    "smooth E2",
    "transversal E1 E2",
    "empty A E1 E2",
    "empty D E1 E2",
]


def singular_locus_certificate(inst: Instance, primes=()) -> SingularLocusCertificate:
    rep = inst.certify()
    zero_L = {0: 0, 1: 0, 2: 0}
    contained = not inst.h.subs(zero_L) and all(
        not part.subs(zero_L) for part in inst.h.gradient()
    )
    status = {}
    for name in SINGULAR_DEPENDENCIES:
        try:
            status[name] = rep.get(name).status
        except KeyError:
            status[name] = "missing"
    tr = rep.get("transversal E1 E2")
    count = tr.count if tr.passed else 0
    modular = []
    for p in primes:
        if not inst.is_good(p):
            modular.append({"p": p, "skipped": True, "witness": inst.bad_prime_witness(p), "agree": True})
            continue
        brute = singular_points_bruteforce(inst.h, p, cap=max(p, 17))
        expected = sorted(set(line_points(p)) | set(rational_nodes(inst, p)))
        census = node_scheme_census(inst, p)
        agree = (
            brute == expected
            and census["total_degree"] == 9
            and census["rational_points"] == census["scanned_rational_points"]
        )
        modular.append({
            "p": p,
            "singular_points": len(brute),
            "line_points": p + 1,
            "rational_nodes": len(expected) - (p + 1),
            "census": census,
            "agree": agree,
        })
    return SingularLocusCertificate(
        line_contained=contained,
        node_count=count,
        node_system="2*alpha*z3 + beta = eps1 = eps2 = z4 = 0",
        dependencies=list(SINGULAR_DEPENDENCIES),
        dependency_status=status,
        modular=modular,
    )


# ---------------------------------------------------------------------------
# blowup along L


def _chart_images(chart):
    """Images of (z0..z4) in chart coordinates (y0, y1, y2, y3)."""
    amb, k = chart
    if amb not in (3, 4) or k not in (0, 1, 2):
        raise ValueError(f"invalid chart {chart!r}")
    names = ("y0", "y1", "y2", "y3")
    y = MultiPoly.gens(4, names)
    others = [i for i in range(3) if i != k]
    img = [None] * 5
    img[k] = y[0]
    img[others[0]] = y[0] * y[1]
    img[others[1]] = y[0] * y[2]
    one = MultiPoly.const(1, 4, names)
    if amb == 4:
        img[3], img[4] = y[3], one
    else:
        img[3], img[4] = one, y[3]
    return img


def total_transform(inst: Instance, chart) -> MultiPoly:
    return inst.h.compose(_chart_images(chart), 4, ("y0", "y1", "y2", "y3"))


def strict_transform_chart(inst: Instance, chart) -> MultiPoly:
    """Strict transform of V in a blowup chart; the exceptional divisor is y0 = 0."""
    tot = total_transform(inst, chart)
    f = tot.divide_by_monomial((2, 0, 0, 0))
    y0 = MultiPoly.var(0, 4, ("y0", "y1", "y2", "y3"))
    if f * y0**2 != tot:
        raise RuntimeError("total transform is not y0^2 times the strict transform")
    return f


def chart_smoothness_check(inst: Instance, chart, q: int) -> dict:
    """Scan the exceptional locus y0 = 0 of a chart over F_q for singular points.

    A point with f = df/dy1 = df/dy2 = df/dy3 = 0 would be a singular point of
    the exceptional surface (and a candidate singular point of the strict
    transform); none may exist.
    """
    inst.require_good(q)
    gf = field_for_q(q)
    f = strict_transform_chart(inst, chart)
    polys = [f] + [f.diff(i) for i in (1, 2, 3)]
    grid = np.indices((q, q, q)).reshape(3, -1)
    coords = [np.zeros(grid.shape[1], dtype=np.int64), grid[0], grid[1], grid[2]]
    mask = np.ones(grid.shape[1], dtype=bool)
    for poly in polys:
        comp = gf.compile(poly)
        if not comp:
            continue
        vals = gf.evaluate(comp, coords)
        mask &= vals == 0
    bad = [tuple(int(x) for x in grid[:, i]) for i in np.nonzero(mask)[0]]
    return {
        "chart": list(chart),
        "q": q,
        "status": "pass" if not bad else "fail",
        "witness_points": bad[:10],
        "dependencies": ["smooth D", "transversal D A"],
    }


@dataclass
class ExceptionalSurface:
    form: MultiPoly
    pencil_det: MultiPoly
    analysis: object

    @property
    def degenerate_fibers(self) -> int:
        return sum(piece.degree() for piece, _ in self.analysis.pieces)

    @property
    def simple(self) -> bool:
        return self.analysis.is_squarefree

    def to_json(self) -> dict:
        return {
            "form": self.form.to_json(),
            "pencil_det": self.pencil_det.to_json(),
            "profile": [list(p) for p in self.analysis.profile],
            "degenerate_fibers": self.degenerate_fibers,
            "simple": self.simple,
        }


def exceptional_surface(inst: Instance) -> ExceptionalSurface:
    """The conic bundle alpha(w)*z3^2 + delta(w)*z4^2 over L and its degenerate fibers."""
    names = ("w0", "w1", "w2", "z3", "z4")
    g = MultiPoly.gens(5, names)
    a = MultiPoly({e + (0, 0): c for e, c in inst.alpha.terms.items()}, 5, names)
    dl = MultiPoly({e + (0, 0): c for e, c in inst.delta.terms.items()}, 5, names)
    form = a * g[3] ** 2 + dl * g[4] ** 2
    bn = ("z3", "z4")
    s2 = MultiPoly({(2, 0): Fraction(1)}, 2, bn)
    t2 = MultiPoly({(0, 2): Fraction(1)}, 2, bn)
    Ga, Gd = gram_matrix(inst.alpha), gram_matrix(inst.delta)
    pencil = [[s2 * Ga[i][j] + t2 * Gd[i][j] for j in range(3)] for i in range(3)]
    P = det(pencil)
    return ExceptionalSurface(form, P, analyze_binary_form(P))


# ---------------------------------------------------------------------------
# fibers of W -> P^2

LINE, TWO_LINES, DOUBLE_LINE, LSL = "Line", "TwoLines", "DoubleLine", "LineSurfaceLine"
FIBER_TAGS = (LINE, TWO_LINES, DOUBLE_LINE, LSL)


@dataclass(frozen=True)
class FiberType:
    tag: str
    in_E1: bool
    in_E2: bool
    in_D: bool

    @classmethod
    def from_bits(cls, e1: bool, e2: bool, dd: bool) -> "FiberType":
        if e1 and e2:
            tag = LSL
        elif (e1 or e2) and dd:
            tag = DOUBLE_LINE
        elif e1 or e2 or dd:
            tag = TWO_LINES
        else:
            tag = LINE
        return cls(tag, bool(e1), bool(e2), bool(dd))


def _eval_point(inst: Instance, f: MultiPoly, a):
    if isinstance(a[0], FqElem):
        fld = a[0].field
        if f is inst.E1 or f is inst.E2:
            if inst.d != RATIONAL_SPLIT and not fld.has_sqrt_int(inst.d):
                fld = fld.extension()
                a = [fld.convert(x) for x in a]
        return _eval_fq(f, fld, a)
    for x in a:
        if isinstance(x, QuadExt) and x.d != inst.d:
            raise ValueError(f"point lives in Q(sqrt {x.d}), not Q(sqrt {inst.d})")
        if not isinstance(x, (int, Fraction, QuadExt)):
            raise ValueError(f"cannot evaluate at coordinate {x!r}")
    return f.evaluate(tuple(a))


def classify_fiber(inst: Instance, a) -> FiberType:
    """Fiber type over a point of P^2 with coordinates in Q, Q(sqrt d) or F_q."""
    if len(a) != 3 or not any(a):
        raise ValueError("need a nonzero point with 3 coordinates")
    e1 = not _eval_point(inst, inst.E1, a)
    e2 = not _eval_point(inst, inst.E2, a)
    dd = not _eval_point(inst, inst.delta, a)
    return FiberType.from_bits(e1, e2, dd)


def splitting_character(inst: Instance, a) -> str:
    """ramified / split / nonsplit for a point of E1 or E2 over F_q with alpha(a) != 0."""
    if not all(isinstance(x, FqElem) for x in a):
        raise ValueError("splitting character needs a point over a finite field")
    fld = a[0].field
    on_e = (not _eval_point(inst, inst.E1, a)) or (not _eval_point(inst, inst.E2, a))
    al = _eval_fq(inst.alpha, fld, a)
    if not on_e or not al:
        raise ValueError("point must lie on E1 or E2 and off A")
    de = _eval_fq(inst.delta, fld, a)
    if not de:
        return "ramified"
    return "split" if quad_char(-de / al) == 1 else "nonsplit"


def fiber_conic_count(inst: Instance, a) -> int:
    """Brute-force F_q-count of the projective conic
    gamma*s^2 + beta*s*z3 + alpha*z3^2 + delta*z4^2 in (s : z3 : z4) over a."""
    fld = a[0].field
    q = fld.q
    gf = field_for_q(q)
    vals = [gf.scalar(_eval_fq(f, fld, a)) for f in (inst.gamma, inst.beta, inst.alpha, inst.delta)]
    pts = projective_points(q, 2)
    s, z3, z4 = pts[:, 0], pts[:, 1], pts[:, 2]
    m = gf.mul
    tot = gf.add(gf.add(m(vals[0], m(s, s)), m(vals[1], m(s, z3))),
                 gf.add(m(vals[2], m(z3, z3)), m(vals[3], m(z4, z4))))
    return int(np.count_nonzero(tot == 0))


def fiber_census(inst: Instance, q: int) -> dict:
    """Counts of the four fiber types over all a in P^2(F_q), plus membership statistics."""
    red = inst.reduced(q)
    pts = projective_points(q, 2)
    coords = [pts[:, i] for i in range(3)]
    e1 = red.eval("eps1", coords) == 0
    e2 = red.eval("eps2", coords) == 0
    dd = red.eval("delta", coords) == 0
    lsl = e1 & e2
    dbl = (e1 | e2) & dd & ~lsl
    two = (e1.astype(int) + e2.astype(int) + dd.astype(int) == 1)
    line = ~(e1 | e2 | dd)
    return {
        "q": q,
        LINE: int(line.sum()),
        TWO_LINES: int(two.sum()),
        DOUBLE_LINE: int(dbl.sum()),
        LSL: int(lsl.sum()),
        "two_lines_by_membership": {
            "E1": int((e1 & ~e2 & ~dd).sum()),
            "E2": int((e2 & ~e1 & ~dd).sum()),
            "D": int((dd & ~e1 & ~e2).sum()),
        },
    }


def splitting_statistics(inst: Instance, q: int) -> dict:
    """Split / nonsplit / ramified counts of the double cover along E1 and E2 over F_q.

    Points of E1 n E2 are left out; points of A on a curve (where the cover
    is undefined) are counted under "on_A".
    """
    red = inst.reduced(q)
    gf = red.gf
    pts = projective_points(q, 2)
    coords = [pts[:, i] for i in range(3)]
    e1 = red.eval("eps1", coords) == 0
    e2 = red.eval("eps2", coords) == 0
    al = red.eval("alpha", coords)
    de = red.eval("delta", coords)
    chi = gf.chi(gf.neg(gf.mul(al, de)))
    out = {}
    for name, on in (("E1", e1 & ~e2), ("E2", e2 & ~e1)):
        off_a = on & (al != 0)
        out[name] = {
            "points": int(on.sum()),
            "ramified": int((off_a & (de == 0)).sum()),
            "split": int((off_a & (de != 0) & (chi == 1)).sum()),
            "nonsplit": int((off_a & (de != 0) & (chi == -1)).sum()),
            "on_A": int((on & (al == 0)).sum()),
        }
    return out
