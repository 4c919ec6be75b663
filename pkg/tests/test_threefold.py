import json
import logging
import random
from fractions import Fraction

import numpy as np
import pytest

from symforge.arith import BadPrimeError
from symforge.gf import GF, field_for_q, projective_points
from symforge.multipoly import MultiPoly
from symforge.threefold import (
    CHARTS,
    DOUBLE_LINE,
    FIBER_TAGS,
    LINE,
    LSL,
    TWO_LINES,
    FiberType,
    build_instance,
    chart_smoothness_check,
    classify_fiber,
    delta_coeffs,
    exceptional_surface,
    fiber_census,
    fiber_conic_count,
    instance_from_json,
    line_points,
    load_instance,
    node_scheme_census,
    rational_nodes,
    singular_locus_certificate,
    singular_points_bruteforce,
    splitting_character,
    strict_transform_chart,
    total_transform,
)

from test_symmetroid import diag_example


@pytest.fixture(scope="module")
def alpha_delta(ref):
    # delta := alpha breaks transversality of D and A
    return build_instance(ref.matrix, delta_coeffs(ref.ps.alpha))


def is_integral(f):
    return all(Fraction(c).denominator == 1 for c in f.terms.values())


# -- assembly -------------------------------------------------------------------


def test_assemble_diag_example():
    inst = build_instance(diag_example(), [1, 0, 0, 1, 0, 1])
    assert str(inst.h) == "z0^2*z1*z2 - z0*z1*z3^2 + z0^2*z4^2 + z1^2*z4^2 + z2^2*z4^2"
    assert inst.h.subs({4: 0}) == inst.ps.quartic().compose(MultiPoly.gens(5)[:4], 5) * inst.scale


def test_reference_h(ref):
    h = ref.h
    assert h.is_homogeneous() and h.degree() == 4 and h.nvars == 5
    assert is_integral(h)
    quartic = ref.ps.quartic().compose(MultiPoly.gens(5)[:4], 5) * ref.scale
    assert h.subs({4: 0}) == quartic
    assert h - h.subs({4: 0}) == ref.delta.compose(MultiPoly.gens(5)[:3], 5) * MultiPoly.gens(5)[4] ** 2
    assert ref.E1 * ref.E2 == ref.discriminant * ref.curve_ratio()


def test_instance_json_roundtrip(ref):
    from importlib import resources

    text = resources.files("symforge").joinpath("data/reference_instance.json").read_text()
    assert ref.dumps() == text
    again = instance_from_json(json.loads(text))
    assert again.h == ref.h and again.dumps() == text


def test_corrupted_instances(ref, tmp_path, caplog):
    obj = ref.to_json()
    broken = dict(obj)
    del broken["matrix"]
    with pytest.raises(ValueError):
        instance_from_json(broken)
    with pytest.raises(ValueError):
        instance_from_json(dict(obj, d=obj["d"] + 1))
    with pytest.raises(ValueError):
        instance_from_json(dict(obj, delta=["1", "x"]))
    path = tmp_path / "trunc.json"
    path.write_text(ref.dumps()[:200])
    with pytest.raises(ValueError):
        load_instance(path)
    stale = json.loads(ref.dumps())
    stale["normalization"]["scale"] = "7"
    with caplog.at_level(logging.WARNING):
        inst = instance_from_json(stale)
    assert inst.h == ref.h
    assert "recomputed" in caplog.text


# -- singular locus ---------------------------------------------------------------


def test_singular_bruteforce_examples():
    z = MultiPoly.gens(5)
    # z0^2 = 0 is singular along the whole hyperplane z0 = 0, a P^3 with 40 points over F_3
    assert len(singular_points_bruteforce(z[0] ** 2, 3)) == 40
    w = MultiPoly.gens(4)
    assert singular_points_bruteforce(sum(x**4 for x in w), 7) == []
    with pytest.raises(ValueError):
        singular_points_bruteforce(w[0] ** 2, 19)


@pytest.mark.parametrize("p", [11, 13, 17])
def test_singular_locus_mod_p(ref, p):
    brute = singular_points_bruteforce(ref.h, p)
    nodes = rational_nodes(ref, p)
    assert brute == sorted(set(line_points(p)) | set(nodes))
    census = node_scheme_census(ref, p)
    assert census["total_degree"] == 9
    assert census["rational_points"] == census["scanned_rational_points"]
    gf = field_for_q(p)
    for pt in nodes:
        assert pt[4] == 0
        assert int(gf.evaluate(gf.compile(ref.h), [np.array(x) for x in pt])) == 0


def test_singular_locus_certificate(ref):
    cert = singular_locus_certificate(ref, [11, 13, 17])
    assert cert.valid and cert.line_contained and cert.node_count == 9
    assert [m["census"]["total_degree"] for m in cert.modular] == [9, 9, 9]


def test_node_census_rejects_bad_prime(ref):
    with pytest.raises(BadPrimeError):
        node_scheme_census(ref, 41)


# -- blowup -------------------------------------------------------------------------


@pytest.mark.parametrize("chart", CHARTS)
def test_strict_transform(ref, chart):
    f = strict_transform_chart(ref, chart)
    y0 = MultiPoly.var(0, 4, f.names)
    assert f * y0**2 == total_transform(ref, chart)
    # on the exceptional divisor only alpha and delta survive
    amb, k = chart
    ys = MultiPoly.gens(4, f.names)
    others = [i for i in range(3) if i != k]
    e = [None] * 3
    e[k] = MultiPoly.const(1, 4, f.names)
    e[others[0]], e[others[1]] = ys[1], ys[2]
    a = ref.alpha.compose(e, 4, f.names)
    dl = ref.delta.compose(e, 4, f.names)
    expected = a * ys[3] ** 2 + dl if amb == 4 else a + dl * ys[3] ** 2
    assert f.subs({0: 0}) == expected


def test_invalid_chart(ref):
    with pytest.raises(ValueError):
        strict_transform_chart(ref, (2, 0))


@pytest.mark.parametrize("q", [11, 13])
def test_charts_smooth(ref, q):
    for chart in CHARTS:
        res = chart_smoothness_check(ref, chart, q)
        assert res["status"] == "pass", res


def test_charts_alpha_delta_control(alpha_delta):
    # alpha*(y3^2 + 1) is singular where alpha = 0 and y3^2 = -1, which needs q = 1 mod 4
    assert all(chart_smoothness_check(alpha_delta, c, 11)["status"] == "pass" for c in CHARTS)
    bad = [chart_smoothness_check(alpha_delta, c, 13) for c in CHARTS]
    assert all(r["status"] == "fail" and r["witness_points"] for r in bad)


def test_exceptional_surface(ref, alpha_delta):
    es = exceptional_surface(ref)
    assert es.degenerate_fibers == 6 and es.simple
    assert es.analysis.profile == ((6, 1),)
    es = exceptional_surface(alpha_delta)
    assert es.analysis.profile == ((2, 3),)
    assert not es.simple


# -- fibers ---------------------------------------------------------------------------


def test_fiber_type_table():
    assert FiberType.from_bits(False, False, False).tag == LINE
    for bits in [(True, False, False), (False, True, False), (False, False, True)]:
        assert FiberType.from_bits(*bits).tag == TWO_LINES
    assert FiberType.from_bits(True, False, True).tag == DOUBLE_LINE
    assert FiberType.from_bits(False, True, True).tag == DOUBLE_LINE
    assert FiberType.from_bits(True, True, False).tag == LSL


def test_classify_rational_points(ref):
    assert classify_fiber(ref, (1, 0, 0)).tag in FIBER_TAGS
    with pytest.raises(ValueError):
        classify_fiber(ref, (0, 0, 0))


@pytest.mark.parametrize("q", [11, 13])
def test_census_matches_membership(ref, q):
    census = fiber_census(ref, q)
    assert sum(census[t] for t in FIBER_TAGS) == q * q + q + 1
    assert census[LSL] == len(rational_nodes(ref, q))
    fld = field_for_q(q).field
    tally = dict.fromkeys(FIBER_TAGS, 0)
    for row in projective_points(q, 2):
        tally[classify_fiber(ref, [fld.from_code(int(x)) for x in row]).tag] += 1
    assert tally == {t: census[t] for t in FIBER_TAGS}


def _curve_points(ref, q, which):
    gf = GF(*{121: (11, 2), 169: (13, 2)}.get(q, (q, 1)))
    pts = projective_points(gf.q, 2)
    coords = [pts[:, i] for i in range(3)]
    mask = gf.evaluate(gf.compile(which), coords) == 0
    return gf, pts[mask]


def test_splitting_against_conic_counts(ref):
    rng = random.Random(11)
    for E in (ref.E1, ref.E2):
        gf, pts = _curve_points(ref, 121, E)
        sample = [pts[i] for i in rng.sample(range(len(pts)), 100)]
        q = gf.q
        for row in sample:
            a = [gf.field.from_code(int(x)) for x in row]
            ft = classify_fiber(ref, a)
            if ft.tag == LSL or not _eval(ref.alpha, a):
                continue
            ch = splitting_character(ref, a)
            n = fiber_conic_count(ref, a)
            if ch == "ramified":
                assert ft.in_D and n == q + 1
            elif ch == "split":
                assert not ft.in_D and n == 2 * q + 1
            else:
                assert not ft.in_D and n == 1


def _eval(f, a):
    from symforge.threefold import _eval_fq

    return _eval_fq(f, a[0].field, a)


def test_ramified_exactly_on_D(ref):
    for E in (ref.E1, ref.E2):
        gf, pts = _curve_points(ref, 121, E)
        for row in pts:
            a = [gf.field.from_code(int(x)) for x in row]
            if not _eval(ref.alpha, a) or classify_fiber(ref, a).tag == LSL:
                continue
            ramified = splitting_character(ref, a) == "ramified"
            assert ramified == (not _eval(ref.delta, a))


def test_splitting_character_needs_curve_point(ref):
    fld = field_for_q(11).field
    off = None
    for row in projective_points(11, 2):
        a = [fld.from_code(int(x)) for x in row]
        if classify_fiber(ref, a).tag == LINE:
            off = a
            break
    with pytest.raises(ValueError):
        splitting_character(ref, off)
    with pytest.raises(ValueError):
        splitting_character(ref, (1, 0, 0))
