"""Resultant certificates for the genericity conditions on A, D, E1, E2.

Every certificate projects from the point (0:0:1) after one of the fixed
coordinate changes in ``SCHEDULE`` and reads the answer off binary forms.
A ``pass`` is always backed by a nonzero witness scalar; the integers
``witness_integers`` collect the numerators and denominators (norms over
Q(sqrt d)) of those scalars so that a prime dividing none of them keeps the
conclusion after reduction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from . import univariate as up
from .arith import QuadExt, fmt_rational
from .multipoly import (
    MultiPoly,
    analyze_binary_form,
    binary_discriminant_witness,
    binary_gcd,
    binary_resultant,
    form_resultant,
    gram_matrix,
    linear_change,
    principal_subresultant,
)

__all__ = [
    "SCHEDULE",
    "Certificate",
    "GenericityReport",
    "empty_triple_certificate",
    "full_genericity",
    "smooth_conic_certificate",
    "smooth_curve_certificate",
    "tangency_certificate",
    "transversality_certificate",
]

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"

# z = G w; the projection center (0:0:1) in w-coordinates is the last column of G.
SCHEDULE = (
    ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    ((1, 0, 1), (0, 1, 1), (0, 0, 1)),
    ((1, 0, 2), (0, 1, -1), (0, 0, 1)),
    ((1, 0, -3), (0, 1, 2), (0, 0, 1)),
    ((1, 0, 5), (0, 1, 3), (0, 0, 1)),
    ((0, 0, 1), (1, 0, 0), (0, 1, 0)),
    ((1, 0, 0), (0, 0, 1), (0, 1, 0)),
    ((1, 0, -7), (0, 1, -4), (0, 0, 1)),
    ((1, 0, 11), (0, 1, -6), (0, 0, 1)),
    ((1, 0, 13), (0, 1, 17), (0, 0, 1)),
)

IDENTITY = SCHEDULE[0]


def _json_value(v):
    if isinstance(v, MultiPoly):
        return v.to_json()
    if isinstance(v, QuadExt):
        return v.to_json()
    if isinstance(v, bool):
        return v
    if isinstance(v, int) and abs(v) < 2**53:
        return v
    if isinstance(v, (int, Fraction)):
        # big integers travel as strings so that no JSON reader rounds them
        return fmt_rational(v)
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if hasattr(v, "to_json"):
        return v.to_json()
    return v


def scalar_integers(c) -> list[int]:
    """Integers whose non-vanishing mod p keeps the scalar c nonzero mod p."""
    if isinstance(c, QuadExt):
        n = c.norm()
        return [n.numerator, n.denominator, c.a.denominator, c.b.denominator]
    c = Fraction(c)
    return [c.numerator, c.denominator]


def poly_denominators(f: MultiPoly) -> list[int]:
    out = []
    for c in f.terms.values():
        if isinstance(c, QuadExt):
            out.extend([c.a.denominator, c.b.denominator])
        else:
            out.append(Fraction(c).denominator)
    return out


@dataclass
class Certificate:
    condition: str
    status: str
    coordinate_change: tuple = IDENTITY
    witnesses: dict = field(default_factory=dict)
    reason: str = ""
    count: int | None = None
    witness_integers: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_json(self) -> dict:
        w = {k: _json_value(v) for k, v in self.witnesses.items()}
        if self.count is not None:
            w["count"] = self.count
        return {
            "condition": self.condition,
            "status": self.status,
            "coordinate_change": [list(r) for r in self.coordinate_change],
            "witnesses": w,
            "reason": self.reason,
        }


def _apply(G, point):
    return tuple(sum((G[i][j] * point[j] for j in range(3)), Fraction(0)) for i in range(3))


def _lead_z(f: MultiPoly):
    return f.coeff((0, 0, f.degree()))


def _usable(G, *forms):
    """Forms after the change z = G w, or None if (0:0:1) lies on one of them."""
    out = [linear_change(f, G) for f in forms]
    if any(not _lead_z(f) for f in out):
        return None
    return out


def _line_poly(f: MultiPoly, x0, y0):
    """Coefficients (low first) of t -> f(x0, y0, t)."""
    parts = f.coeffs_in(2)
    m = f.degree_in(2)
    coeffs = []
    for k in range(m + 1):
        part = parts.get(k)
        coeffs.append(part.evaluate((x0, y0, 0)) if part is not None else Fraction(0))
    return up.trim(coeffs)


def _linear_root(F: MultiPoly):
    """(x : y) for a degree-1 binary form a*x + b*y."""
    a = F.coeff((1, 0))
    b = F.coeff((0, 1))
    return (b, -a)


def _linear_roots(F: MultiPoly):
    """Roots of the rational linear factors of a binary form, each once."""
    if F.degree() == 0:
        return []
    if F.degree() == 1:
        return [_linear_root(F)]
    return [_linear_root(piece) for piece, _ in analyze_binary_form(F).pieces if piece.degree() == 1]


def _lift(forms, G, root):
    """Try to lift a root (x0:y0) of a projected gcd to a common zero of ``forms``.

    Returns the point in original coordinates, or None if the common zero on
    that line is not a single rational (or Q(sqrt d)) point.
    """
    x0, y0 = root
    g = None
    for f in forms:
        u = _line_poly(f, x0, y0)
        if not u:
            continue
        g = u if g is None else up.pgcd(g, u)
    if g is None or up.deg(g) != 1:
        return None
    z0 = -g[0] / g[1]
    w = (x0, y0, z0)
    if any(f.evaluate(w) for f in forms):
        return None
    return _apply(G, w)


def _point_json(pt):
    return [_json_value(c) for c in pt]


# ---------------------------------------------------------------------------
# conics


def smooth_conic_certificate(q: MultiPoly, name: str = "smooth conic") -> Certificate:
    if q.is_zero():
        raise ValueError("zero form")
    q.assert_homogeneous(2)
    g = gram_matrix(q)
    dg = up.det_field(g)
    if dg:
        return Certificate(
            name, PASS, witnesses={"gram_det": dg},
            reason="Gram determinant is nonzero", witness_integers=scalar_integers(dg),
        )
    return Certificate(name, FAIL, witnesses={"gram_det": dg}, reason="Gram matrix is singular")


# ---------------------------------------------------------------------------
# plane curves
#
# Each certificate is an ``attempt(G)`` returning None (try the next
# coordinate change), a FAIL certificate (an exact counterexample), or a PASS
# certificate together with its witness scalars.  ``_drive`` keeps going
# through the whole schedule after the first pass: a prime is only bad for
# the condition if it kills the witnesses of every passing alternative, so
# the recorded integer is the gcd over alternatives.


def _numerators(values) -> int:
    prod = 1
    for v in values:
        prod *= scalar_integers(v)[0]
    return abs(prod)


def _denominators(values) -> list[int]:
    out = []
    for v in values:
        out.extend(scalar_integers(v)[1:])
    return out


def _drive(name, attempt) -> Certificate:
    first = None
    alt_products = []
    dens = []
    for G in SCHEDULE:
        res = attempt(G)
        if res is None:
            continue
        cert, scalars, polys = res if isinstance(res, tuple) else (res, None, None)
        if cert.status == FAIL:
            if first is None:
                return cert
            continue
        if first is None:
            first = cert
        alt_products.append(_numerators(scalars))
        dens.extend(_denominators(scalars))
        for f in polys:
            dens.extend(poly_denominators(f))
    if first is None:
        return Certificate(name, INCONCLUSIVE, reason="schedule exhausted")
    g = 0
    for n in alt_products:
        g = gcd(g, n)
    first.witnesses["alternatives"] = len(alt_products)
    first.witness_integers = [g] + sorted(set(dens))
    return first


def smooth_curve_certificate(f: MultiPoly, name: str = "smooth curve") -> Certificate:
    """Smoothness of a plane curve via pairwise resultants of its partials."""
    if f.is_zero():
        raise ValueError("zero form")
    f.assert_homogeneous()
    if f.degree() < 2:
        return Certificate(name, PASS, reason="lines are smooth")

    def attempt(G):
        ch = _usable(G, f)
        if ch is None:
            return None
        fp = ch[0]
        parts = fp.gradient()
        if any(not _lead_z(p) for p in parts):
            return None
        if not form_resultant(fp, parts[2]):
            return Certificate(
                name, FAIL, G, reason="curve has a repeated component (Res(f, f_z) vanishes)",
            )
        R01 = form_resultant(parts[0], parts[1])
        R02 = form_resultant(parts[0], parts[2])
        R12 = form_resultant(parts[1], parts[2])
        if not R01 or not R02 or not R12:
            return None
        common = binary_gcd(binary_gcd(R01, R02), R12)
        if common.degree() == 0:
            for c in range(1, 25):
                w = binary_resultant(R01, R02 + R12 * c)
                if w:
                    lcs = [_lead_z(p) for p in parts]
                    cert = Certificate(
                        name, PASS, G,
                        witnesses={"shift": c, "resultant": w, "leading": lcs},
                        reason="partials have no common zero",
                    )
                    return cert, [w, *lcs], [fp]
            return None
        for root in _linear_roots(common):
            pt = _lift(parts, G, root)
            if pt is not None:
                return Certificate(
                    name, FAIL, G, witnesses={"singular_point": pt},
                    reason=f"singular point {_point_json(pt)}",
                )
        return None

    return _drive(name, attempt)


def transversality_certificate(f: MultiPoly, g: MultiPoly, name: str = "transversal") -> Certificate:
    """Transverse intersection of two plane curves; count = deg f * deg g."""
    f.assert_homogeneous()
    g.assert_homogeneous()
    N = f.degree() * g.degree()

    def attempt(G):
        ch = _usable(G, f, g)
        if ch is None:
            return None
        fp, gp = ch
        R = form_resultant(fp, gp)
        if not R:
            return Certificate(name, FAIL, G, reason="common component")
        an = analyze_binary_form(R)
        if an.is_squarefree:
            w = binary_discriminant_witness(R)
            lcs = [_lead_z(fp), _lead_z(gp)]
            cert = Certificate(
                name, PASS, G,
                witnesses={"resultant_profile": an.profile, "discriminant": w, "leading": lcs},
                reason=f"resultant squarefree of degree {N}",
                count=N,
            )
            return cert, [w, *lcs], [fp, gp]
        for piece, mult in an.pieces:
            if mult > 1 and piece.degree() == 1:
                pt = _lift([fp, gp], G, _linear_root(piece))
                if pt is not None and _tangent_at(f, g, pt):
                    return Certificate(
                        name, FAIL, G, witnesses={"tangent_point": pt},
                        reason=f"non-transverse intersection at {_point_json(pt)}",
                    )
        return None

    return _drive(name, attempt)


def _tangent_at(f, g, pt) -> bool:
    """True iff the gradients of f and g at pt are linearly dependent."""
    a = [d.evaluate(pt) for d in f.gradient()]
    b = [d.evaluate(pt) for d in g.gradient()]
    return all(not (a[i] * b[j] - a[j] * b[i]) for i in range(3) for j in range(i + 1, 3))


def tangency_certificate(alpha: MultiPoly, eps: MultiPoly, name: str = "tangent") -> Certificate:
    """A conic meeting a cubic in exactly 3 points, each of multiplicity 2."""
    alpha.assert_homogeneous(2)
    eps.assert_homogeneous(3)

    def attempt(G):
        ch = _usable(G, alpha, eps)
        if ch is None:
            return None
        ap, ep = ch
        R = form_resultant(ap, ep)
        if not R:
            return Certificate(name, FAIL, G, reason="common component")
        an = analyze_binary_form(R)
        if any(m % 2 for _, m in an.profile):
            return Certificate(
                name, FAIL, G, witnesses={"resultant_profile": an.profile},
                reason="a resultant root has odd multiplicity, so some intersection is not a simple tangency",
            )
        if an.profile != ((3, 2),):
            return None
        s = an.pieces[0][0]
        psc = principal_subresultant(ap, ep, 2, 1)
        psc2 = MultiPoly({e[:2]: c for e, c in psc.terms.items()}, 2, s.names)
        if not psc2 or not psc2.is_homogeneous():
            return None
        sep = binary_resultant(s, psc2)
        if not sep:
            return None
        disc = binary_discriminant_witness(s)
        lcs = [_lead_z(ap), _lead_z(ep)]
        cert = Certificate(
            name, PASS, G,
            witnesses={
                "resultant_profile": an.profile,
                "square_root": s,
                "discriminant": disc,
                "separation": sep,
                "leading": lcs,
            },
            reason="resultant is a unit times the square of a squarefree cubic; one point per root",
            count=3,
        )
        return cert, [disc, sep, an.content, *lcs], [ap, ep, s]

    return _drive(name, attempt)


def empty_triple_certificate(f: MultiPoly, g: MultiPoly, h: MultiPoly, name: str = "empty triple") -> Certificate:
    """No common zero of three plane curves."""

    def attempt(G):
        ch = _usable(G, f, g, h)
        if ch is None:
            return None
        fp, gp, hp = ch
        R1 = form_resultant(fp, gp)
        R2 = form_resultant(fp, hp)
        if not R1 or not R2:
            return None
        w = binary_resultant(R1, R2)
        if w:
            lcs = [_lead_z(fp), _lead_z(gp), _lead_z(hp)]
            cert = Certificate(
                name, PASS, G, witnesses={"resultant": w, "leading": lcs},
                reason="projected resultants are coprime",
            )
            return cert, [w, *lcs], [fp, gp, hp]
        for root in _linear_roots(binary_gcd(R1, R2)):
            pt = _lift([fp, gp, hp], G, root)
            if pt is not None:
                return Certificate(
                    name, FAIL, G, witnesses={"common_point": pt},
                    reason=f"common zero at {_point_json(pt)}",
                )
        return None

    return _drive(name, attempt)


# ---------------------------------------------------------------------------
# aggregate


@dataclass
class GenericityReport:
    certificates: list

    @property
    def status(self) -> str:
        sts = [c.status for c in self.certificates]
        if FAIL in sts:
            return FAIL
        if INCONCLUSIVE in sts:
            return INCONCLUSIVE
        return PASS

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def get(self, name: str) -> Certificate:
        for c in self.certificates:
            if c.condition == name:
                return c
        raise KeyError(name)

    def first_problem(self):
        return next((c for c in self.certificates if not c.passed), None)

    def witness_integers(self) -> list[int]:
        return [n for c in self.certificates for n in c.witness_integers]

    def to_json(self) -> list:
        return [c.to_json() for c in self.certificates]


def genericity_plan(alpha, delta, eps1, eps2):
    """Ordered (name, callable) list of the conditions checked on an instance."""
    return [
        ("smooth A", lambda: smooth_conic_certificate(alpha, "smooth A")),
        ("smooth D", lambda: smooth_conic_certificate(delta, "smooth D")),
        ("smooth E1", lambda: smooth_curve_certificate(eps1, "smooth E1")),
        ("smooth E2", lambda: smooth_curve_certificate(eps2, "smooth E2")),
        ("transversal E1 E2", lambda: transversality_certificate(eps1, eps2, "transversal E1 E2")),
        ("tangent A E1", lambda: tangency_certificate(alpha, eps1, "tangent A E1")),
        ("tangent A E2", lambda: tangency_certificate(alpha, eps2, "tangent A E2")),
        ("empty A E1 E2", lambda: empty_triple_certificate(alpha, eps1, eps2, "empty A E1 E2")),
        ("empty D E1 E2", lambda: empty_triple_certificate(delta, eps1, eps2, "empty D E1 E2")),
        ("transversal D E1", lambda: transversality_certificate(delta, eps1, "transversal D E1")),
        ("transversal D E2", lambda: transversality_certificate(delta, eps2, "transversal D E2")),
        ("transversal D A", lambda: transversality_certificate(delta, alpha, "transversal D A")),
    ]


def full_genericity(inst, stop_early: bool = False) -> GenericityReport:
    """Run every genericity certificate on an object carrying alpha, delta, eps1, eps2.

    When the object also exposes integral curve equations ``E1``, ``E2``
    those are certified instead (same curves, smaller witnesses).

    With ``stop_early`` the run ends at the first certificate that does not
    pass (used by the search loop to reject candidates cheaply).
    """
    certs = []
    e1 = getattr(inst, "E1", inst.eps1)
    e2 = getattr(inst, "E2", inst.eps2)
    for _, run in genericity_plan(inst.alpha, inst.delta, e1, e2):
        c = run()
        certs.append(c)
        if stop_early and not c.passed:
            break
    return GenericityReport(certs)
