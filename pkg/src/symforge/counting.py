"""Point counts of V, S, V~ and W over finite fields.

The fibered counter projects V from the line L onto P^2: over a point a the
fiber is the affine conic alpha(a) x3^2 + beta(a) x3 + gamma(a) + delta(a) x4^2,
whose number of points has a closed form in the quadratic character.  With
the coefficient arrays evaluated once over all of P^2(F_q) the whole count
is O(q^2) array work.

Brute-force counters enumerate normalized projective points and serve as
independent oracles.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .arith import BadPrimeError
from .gf import GF, check_odd_prime_power, field_for_q, projective_points
from .multipoly import MultiPoly, gram_matrix

__all__ = [
    "CountReport",
    "count_bruteforce",
    "count_affine_conic",
    "affine_conic_counts",
    "projective_conic_counts",
    "count_V_fibered",
    "count_S",
    "count_S_bruteforce",
    "count_Vtilde",
    "count_Vtilde_bruteforce",
    "node_quadric_bruteforce",
    "count_W_strata",
    "ax_report",
]

BRUTE_CAP = 13


# ---------------------------------------------------------------------------
# oracles


def count_bruteforce(f: MultiPoly, q: int, cap: int = BRUTE_CAP) -> int:
    """Number of points of {f = 0} in P^n(F_q), n + 1 = f.nvars."""
    gf = check_odd_prime_power(q)
    if q > cap:
        raise ValueError(f"q = {q} exceeds the brute-force cap {cap}")
    n = f.nvars - 1
    pts = projective_points(q, n)
    vals = gf.evaluate(gf.compile(f), [pts[:, i] for i in range(n + 1)])
    return int(np.count_nonzero(vals == 0))


# ---------------------------------------------------------------------------
# conic counts


def affine_conic_counts(gf: GF, A, B, C, D):
    """Vectorized count of (x, y) in F_q^2 with A x^2 + B x + C + D y^2 = 0.

    A, B, C, D are arrays of field codes (broadcastable).
    """
    q = gf.q
    A, B, C, D = np.broadcast_arrays(*(np.asarray(x, dtype=np.int64) for x in (A, B, C, D)))
    disc = gf.sub(gf.mul(B, B), gf.mul(gf.scalar(4), gf.mul(A, C)))
    out = np.zeros(A.shape, dtype=np.int64)
    a0, b0, d0 = A == 0, B == 0, D == 0

    m = ~a0 & ~d0
    chi_ad = gf.chi(gf.neg(gf.mul(A, D)))
    out = np.where(m & (disc != 0), q - chi_ad, out)
    out = np.where(m & (disc == 0), q + (q - 1) * chi_ad, out)

    m = ~a0 & d0
    out = np.where(m, q * (1 + gf.chi(disc)), out)

    out = np.where(a0 & ~b0, q, out)

    m = a0 & b0 & ~d0
    out = np.where(m, q * (1 + gf.chi(gf.neg(gf.mul(C, D)))), out)

    m = a0 & b0 & d0
    out = np.where(m, np.where(C == 0, q * q, 0), out)
    return out


def count_affine_conic(A, B, C, D_, q: int) -> int:
    """Points (x3, x4) in F_q^2 with A x3^2 + B x3 + C + D_ x4^2 = 0.

    Coefficients may be ints, Fractions or field elements; they are reduced
    into F_q.
    """
    gf = check_odd_prime_power(q)
    codes = [gf.scalar(c) for c in (A, B, C, D_)]
    return int(affine_conic_counts(gf, *codes))


def projective_conic_counts(gf: GF, m11, m12, m13, m22, m23, m33):
    """Vectorized point count of the plane conic x^T M x = 0 over F_q.

    M is symmetric with the given entries (arrays of codes).  Rank 3 gives
    q + 1, rank 1 gives q + 1, rank 0 the whole plane, and rank 2 gives two
    lines: 2q + 1 if they are defined over F_q, else their single common point.
    """
    q = gf.q
    mul, sub = gf.mul, gf.sub
    m11, m12, m13, m22, m23, m33 = np.broadcast_arrays(
        *(np.asarray(x, dtype=np.int64) for x in (m11, m12, m13, m22, m23, m33))
    )
    # principal 2x2 minors
    p12 = sub(mul(m11, m22), mul(m12, m12))
    p13 = sub(mul(m11, m33), mul(m13, m13))
    p23 = sub(mul(m22, m33), mul(m23, m23))
    c1 = sub(mul(m12, m23), mul(m13, m22))
    c2 = sub(mul(m12, m33), mul(m13, m23))
    c3 = sub(mul(m11, m23), mul(m12, m13))
    det = gf.add(gf.sub(mul(m11, p23), mul(m12, c2)), mul(m13, c1))

    rank2 = (det == 0) & ((p12 != 0) | (p13 != 0) | (p23 != 0) | (c1 != 0) | (c2 != 0) | (c3 != 0))
    entries = np.stack([m11, m12, m13, m22, m23, m33])
    rank0 = (det == 0) & ~rank2 & ~entries.any(axis=0)
    minor = np.where(p12 != 0, p12, np.where(p13 != 0, p13, p23))
    split = gf.chi(gf.neg(minor)) == 1

    out = np.full(m11.shape, q + 1, dtype=np.int64)
    out = np.where(rank2, np.where(split, 2 * q + 1, 1), out)
    out = np.where(rank0, q * q + q + 1, out)
    return out


# ---------------------------------------------------------------------------
# V, S, V~


def _plane_values(inst, q: int):
    """Codes of alpha, beta, gamma, delta over every point of P^2(F_q)."""
    red = inst.reduced(q)
    pts = projective_points(q, 2)
    coords = [pts[:, i] for i in range(3)]
    vals = {name: red.eval(name, coords) for name in ("alpha", "beta", "gamma", "delta")}
    return red, pts, vals


def count_V_fibered(inst, q: int) -> int:
    """#V(F_q) = #L(F_q) + sum over a in P^2(F_q) of the affine fiber conic count."""
    _, _, v = _plane_values(inst, q)
    gf = field_for_q(q)
    fib = affine_conic_counts(gf, v["alpha"], v["beta"], v["gamma"], v["delta"])
    return int(q + 1 + fib.sum())


def _gram_codes(gf: GF, form: MultiPoly):
    g = gram_matrix(form)
    return [[gf.scalar(g[i][j]) for j in range(3)] for i in range(3)]


def count_S(inst, q: int) -> int:
    """#S(F_q) for the conic bundle alpha(w) z3^2 + delta(w) z4^2 over L = P^1."""
    inst.require_good(q)
    gf = field_for_q(q)
    Ga, Gd = _gram_codes(gf, inst.alpha), _gram_codes(gf, inst.delta)
    line = projective_points(q, 1)
    s2 = gf.mul(line[:, 0], line[:, 0])
    t2 = gf.mul(line[:, 1], line[:, 1])

    def entry(i, j):
        return gf.add(gf.mul(s2, Ga[i][j]), gf.mul(t2, Gd[i][j]))

    counts = projective_conic_counts(
        gf, entry(0, 0), entry(0, 1), entry(0, 2), entry(1, 1), entry(1, 2), entry(2, 2)
    )
    return int(counts.sum())


def count_S_bruteforce(inst, q: int, cap: int = BRUTE_CAP) -> int:
    """#S(F_q) by enumerating P^2 x P^1."""
    if q > cap:
        raise ValueError(f"q = {q} exceeds the brute-force cap {cap}")
    inst.require_good(q)
    red = inst.reduced(q)
    gf = red.gf
    plane = projective_points(q, 2)
    coords = [plane[:, i] for i in range(3)]
    al = red.eval("alpha", coords)[:, None]
    de = red.eval("delta", coords)[:, None]
    line = projective_points(q, 1)
    z3, z4 = line[None, :, 0], line[None, :, 1]
    tot = gf.add(gf.mul(al, gf.mul(z3, z3)), gf.mul(de, gf.mul(z4, z4)))
    return int(np.count_nonzero(tot == 0))


def count_Vtilde(inst, q: int) -> int:
    """#V~(F_q) from the fibration of the blowup over P^2.

    Over a in P^2 the strict transform is the conic
    gamma s^2 + beta s z3 + alpha z3^2 + delta z4^2 in (s : z3 : z4).
    """
    _, _, v = _plane_values(inst, q)
    gf = field_for_q(q)
    half = gf.inv(gf.scalar(2))
    zero = np.zeros_like(v["alpha"])
    counts = projective_conic_counts(
        gf, v["gamma"], gf.mul(v["beta"], half), zero, v["alpha"], zero, v["delta"]
    )
    return int(counts.sum())


def count_Vtilde_bruteforce(inst, q: int, cap: int = BRUTE_CAP) -> int:
    """#V~(F_q) by enumerating P^2 x P^2."""
    if q > cap:
        raise ValueError(f"q = {q} exceeds the brute-force cap {cap}")
    _, _, v = _plane_values(inst, q)
    gf = field_for_q(q)
    fib = projective_points(q, 2)
    s, z3, z4 = (fib[None, :, i] for i in range(3))
    al, be, ga, de = (v[k][:, None] for k in ("alpha", "beta", "gamma", "delta"))
    mul, add = gf.mul, gf.add
    tot = add(add(mul(ga, mul(s, s)), mul(be, mul(s, z3))), add(mul(al, mul(z3, z3)), mul(de, mul(z4, z4))))
    return int(np.count_nonzero(tot == 0))


# ---------------------------------------------------------------------------
# nodes


def node_quadric_bruteforce(inst, q: int, node) -> int:
    """F_q-points of the projectivized tangent cone of V at a node.

    The Hessian form of h at the node vanishes on the node direction, so its
    zero set in P^4 is a cone over the quadric surface with the node as
    vertex: #cone = 1 + q * #quadric.
    """
    gf = field_for_q(q)
    pts = projective_points(q, 4)
    coords = [pts[:, i] for i in range(5)]
    node_c = [np.array(x, dtype=np.int64) for x in node]
    tot = np.zeros(len(pts), dtype=np.int64)
    for i in range(5):
        for j in range(5):
            hij = inst.h.diff(i).diff(j)
            c = gf.evaluate(gf.compile(hij), node_c)
            if c:
                tot = gf.add(tot, gf.mul(c, gf.mul(coords[i], coords[j])))
    cone = int(np.count_nonzero(tot == 0))
    if (cone - 1) % q:
        raise BadPrimeError(gf.p, "Hessian at a node is not a cone over a quadric", None)
    return (cone - 1) // q


@dataclass
class CountReport:
    q: int
    counts: dict = field(default_factory=dict)
    method: dict = field(default_factory=dict)
    elapsed_ms: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    skipped: dict | None = None

    @property
    def residues(self) -> dict:
        return {k: v % self.q for k, v in self.counts.items()}

    @property
    def passed(self) -> bool:
        return self.skipped is None and all(self.checks.values())

    def to_json(self) -> dict:
        out = {
            "q": self.q,
            "counts": dict(self.counts),
            "residues": self.residues,
            "method": dict(self.method),
            "elapsed_ms": dict(self.elapsed_ms),
            "checks": dict(self.checks),
            "pass": self.passed,
        }
        if self.skipped is not None:
            out["skipped"] = dict(self.skipped)
        return out


class _Clock:
    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.times = {}

    def run(self, name, fn, *args):
        t0 = time.perf_counter()
        val = fn(*args)
        if self.enabled:
            self.times[name] = round((time.perf_counter() - t0) * 1000, 3)
        return val


def _skipped_report(inst, q: int, exc: BadPrimeError) -> CountReport:
    witness = exc.witness
    if witness is None and isinstance(exc.p, int) and exc.p > 1:
        witness = inst.bad_prime_witness(exc.p)
    return CountReport(q=q, skipped={"p": exc.p, "reason": exc.reason, "witness": witness})


def count_W_strata(inst, q: int, brute_cap: int = 0, timings: bool = False) -> CountReport:
    """Counts of V, L, S, V~ and W at q with their congruence checks.

    V~ is computed twice: as V - #L + #S (the blowup replaces L by S) and
    directly from its conic fibration.  W replaces each F_q-rational node of
    V~ by a smooth quadric surface.  With ``brute_cap >= q`` the fibered
    counts of V, S and V~ are also checked against enumeration.
    """
    from .threefold import node_quadric, rational_nodes

    inst.require_good(q)
    clock = _Clock(timings)
    V = clock.run("V", count_V_fibered, inst, q)
    S = clock.run("S", count_S, inst, q)
    vt_direct = clock.run("Vtilde_direct", count_Vtilde, inst, q)
    Vt = V - (q + 1) + S
    nodes = clock.run("nodes", rational_nodes, inst, q)
    kinds = [node_quadric(inst, q, node[:3]) for node in nodes]
    split = kinds.count("split")
    nonsplit = kinds.count("nonsplit")
    W = Vt - len(nodes) + split * (q + 1) ** 2 + nonsplit * (q * q + 1)
    rep = CountReport(
        q=q,
        counts={
            "V": V,
            "L": q + 1,
            "S": S,
            "Vtilde": Vt,
            "node_scheme_rational_points": len(nodes),
            "nodes_split": split,
            "nodes_nonsplit": nonsplit,
            "W": W,
        },
        method={"V": "fibered", "S": "fibered", "Vtilde": "strata", "W": "strata"},
        checks={
            "V = 1 mod q": V % q == 1,
            "S = 1 mod q": S % q == 1,
            "Vtilde = V - (q+1) + S": Vt == vt_direct,
            "W = 1 mod q": W % q == 1,
        },
    )
    if q <= brute_cap:
        bv = clock.run("V_bruteforce", count_bruteforce, inst.h, q, brute_cap)
        bs = clock.run("S_bruteforce", count_S_bruteforce, inst, q, brute_cap)
        bt = clock.run("Vtilde_bruteforce", count_Vtilde_bruteforce, inst, q, brute_cap)
        rep.counts.update({"V_bruteforce": bv, "S_bruteforce": bs, "Vtilde_bruteforce": bt})
        rep.method.update({"V_bruteforce": "bruteforce", "S_bruteforce": "bruteforce", "Vtilde_bruteforce": "bruteforce"})
        rep.checks.update({
            "V fibered = bruteforce": bv == V,
            "S fibered = bruteforce": bs == S,
            "Vtilde fibered = bruteforce": bt == vt_direct,
        })
    rep.elapsed_ms = clock.times
    return rep


def ax_report(inst, q_list, brute_cap: int = BRUTE_CAP, timings: bool = False) -> list:
    """Ax congruence #V(F_q) = 1 mod q for every q, one report each.

    Bad q do not abort the batch; they come back as skipped reports that
    carry the witness integer excluding them.
    """
    out = []
    for q in q_list:
        try:
            check_odd_prime_power(q)
            inst.require_good(q)
        except BadPrimeError as exc:
            out.append(_skipped_report(inst, q, exc))
            continue
        clock = _Clock(timings)
        V = clock.run("V", count_V_fibered, inst, q)
        rep = CountReport(q=q, counts={"V": V}, method={"V": "fibered"}, checks={"V = 1 mod q": V % q == 1})
        if q <= brute_cap:
            bv = clock.run("V_bruteforce", count_bruteforce, inst.h, q, brute_cap)
            rep.counts["V_bruteforce"] = bv
            rep.method["V_bruteforce"] = "bruteforce"
            rep.checks["V fibered = bruteforce"] = bv == V
        rep.elapsed_ms = clock.times
        out.append(rep)
    return out
