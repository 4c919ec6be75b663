"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import json
import random
import time
from contextlib import contextmanager
from fractions import Fraction
from importlib import resources
from itertools import product

import numpy as np
import pytest

from symforge.arith import is_prime
from symforge.cli import EXIT_OK, main
from symforge.counting import (
    affine_conic_counts,
    count_bruteforce,
    count_V_fibered,
    count_W_strata,
)
from symforge.genericity import FAIL, PASS, tangency_certificate, transversality_certificate
from symforge.gf import GF, field_for_q, projective_points
from symforge.multipoly import MultiPoly
from symforge.search import regenerate
from symforge.symmetroid import generate_candidate, project_from_node, split_discriminant
from symforge.threefold import (
    CHARTS,
    DOUBLE_LINE,
    FIBER_TAGS,
    LSL,
    _eval_fq,
    chart_smoothness_check,
    classify_fiber,
    exceptional_surface,
    fiber_census,
    fiber_conic_count,
    line_points,
    node_scheme_census,
    rational_nodes,
    singular_points_bruteforce,
    splitting_character,
)

NAMES = ("z0", "z1", "z2")


@pytest.fixture
def criterion(request):
    @contextmanager
    def run(n, title):
        t0 = time.perf_counter()
        ok = False
        try:
            yield
            ok = True
        finally:
            line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title} ({time.perf_counter() - t0:.2f} s)"
            request.config.acceptance_results[n] = line
            print(line)

    return run


@pytest.fixture(scope="module")
def seed42():
    return regenerate(42, 0, 5)


def good_prime_powers(inst, bound):
    out = []
    for q in range(3, bound + 1):
        try:
            gf = field_for_q(q)
        except ValueError:
            continue
        if inst.is_good(gf.p):
            out.append(q)
    return out


def test_c01_split_identity(criterion):
    with criterion(1, "eps1*eps2 = beta^2 - 4*alpha*gamma on 100 seeded symmetroids"):
        t0 = time.perf_counter()
        for seed in range(100):
            ps = project_from_node(generate_candidate(seed, 5))
            sp = split_discriminant(ps)
            assert (sp.eps1 * sp.eps2 - ps.discriminant).is_zero()
        assert time.perf_counter() - t0 < 10


def test_c02_tangency(ref, criterion):
    with criterion(2, "A tangent to E1 and E2 at 3 points each; random conics are not"):
        for e in (ref.E1, ref.E2):
            c = tangency_certificate(ref.alpha, e)
            assert (c.status, c.count) == (PASS, 3)
        rng = random.Random(2)
        mons = [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]
        for _ in range(5):
            conic = MultiPoly({m: Fraction(rng.randint(-5, 5) or 1) for m in mons}, 3, NAMES)
            assert tangency_certificate(conic, ref.E1).status == FAIL


def test_c03_transversality(ref, criterion):
    with criterion(3, "E1, E2 meet transversely at 9 points; symmetroid nodes = 1 + 9"):
        c = transversality_certificate(ref.E1, ref.E2)
        assert (c.status, c.count) == (PASS, 9)
        # the projection center is a node of the quartic symmetroid: alpha is its tangent cone
        assert ref.certify().get("smooth A").passed
        quartic = ref.ps.quartic() * ref.scale
        for p in (11, 13, 17):
            sing = singular_points_bruteforce(quartic, p)
            lifted = sorted(pt[:4] for pt in rational_nodes(ref, p))
            assert sing == sorted([(0, 0, 0, 1)] + lifted)
            assert node_scheme_census(ref, p)["total_degree"] + 1 == 10


def test_c04_singular_locus(ref, criterion):
    with criterion(4, "Sing(V)(F_p) = L u rational nodes and node scheme degree 9, p = 11, 13, 17"):
        for p in (11, 13, 17):
            t0 = time.perf_counter()
            assert ref.is_good(p)
            brute = singular_points_bruteforce(ref.h, p)
            assert brute == sorted(set(line_points(p)) | set(rational_nodes(ref, p)))
            census = node_scheme_census(ref, p)
            assert census["total_degree"] == 9
            assert census["rational_points"] == census["scanned_rational_points"]
            assert time.perf_counter() - t0 < 60


def test_c05_ax_congruence(ref, criterion):
    with criterion(5, "#V(F_q) = 1 mod q for good primes < 100 and good p^2, p <= 13"):
        primes = [p for p in range(3, 100) if is_prime(p) and ref.is_good(p)]
        squares = [p * p for p in range(3, 14) if is_prime(p) and ref.is_good(p)]
        assert len(primes) >= 15 and squares
        for q in primes + squares:
            assert count_V_fibered(ref, q) % q == 1, q
        t0 = time.perf_counter()
        count_V_fibered(ref, 97)
        assert time.perf_counter() - t0 <= 2


def test_c06_oracle_equivalence(ref, seed42, criterion):
    with criterion(6, "fibered = brute-force count for all good q <= 13"):
        checked = 0
        for inst in (ref, seed42):
            for q in good_prime_powers(inst, 13):
                assert count_V_fibered(inst, q) == count_bruteforce(inst.h, q), q
                checked += 1
        assert checked >= 3


def test_c07_blowup_strata(ref, criterion):
    with criterion(7, "Vtilde = V - (q+1) + S and W = 1 mod q for good q <= 50"):
        qs = good_prime_powers(ref, 50)
        assert qs
        for q in qs:
            rep = count_W_strata(ref, q, brute_cap=13)
            assert rep.passed, (q, rep.checks)
            c = rep.counts
            assert c["Vtilde"] == c["V"] - (q + 1) + c["S"]
            assert c["W"] % q == 1


def test_c08_blowup_smooth(ref, criterion):
    with criterion(8, "all blowup charts smooth at q = 11, 13; S -> L has 6 simple degenerate fibers"):
        for q in (11, 13):
            for chart in CHARTS:
                assert chart_smoothness_check(ref, chart, q)["status"] == "pass"
        es = exceptional_surface(ref)
        assert es.degenerate_fibers == 6 and es.simple
        assert all(m == 1 for _, m in es.analysis.profile)


def test_c09_fiber_classification(ref, criterion):
    with criterion(9, "fiber census over F_11 matches scans; splitting matches conic counts"):
        q = 11
        census = fiber_census(ref, q)
        fld = field_for_q(q).field
        tally = dict.fromkeys(FIBER_TAGS, 0)
        on_both = on_e_and_d = 0
        for row in projective_points(q, 2):
            a = [fld.from_code(int(x)) for x in row]
            tally[classify_fiber(ref, a).tag] += 1
            e1 = not _eval_on_curve(ref, ref.E1, a)
            e2 = not _eval_on_curve(ref, ref.E2, a)
            dd = not _eval_fq(ref.delta, fld, a)
            on_both += e1 and e2
            on_e_and_d += (e1 or e2) and dd
        assert tally == {t: census[t] for t in FIBER_TAGS}
        assert census[LSL] == on_both == len(rational_nodes(ref, q))
        assert census[DOUBLE_LINE] == on_e_and_d

        # F_11 has few curve points, so the 200 samples come from E1 u E2 over F_121
        gf = GF(11, 2)
        pts = projective_points(gf.q, 2)
        coords = [pts[:, i] for i in range(3)]
        on_e = np.zeros(len(pts), dtype=bool)
        for E in (ref.E1, ref.E2):
            on_e |= gf.evaluate(gf.compile(E), coords) == 0
        pool = [pts[i] for i in np.nonzero(on_e)[0]]
        seen = set()
        for row in pool:
            a = [gf.field.from_code(int(x)) for x in row]
            if classify_fiber(ref, a).tag == LSL:
                continue
            assert _eval_fq(ref.alpha, gf.field, a)
            ch = splitting_character(ref, a)
            assert (ch == "ramified") == (not _eval_fq(ref.delta, gf.field, a))
        rng = random.Random(9)
        sample = rng.sample(pool, 200)
        for row in sample:
            a = [gf.field.from_code(int(x)) for x in row]
            if classify_fiber(ref, a).tag == LSL:
                continue
            ch = splitting_character(ref, a)
            n = fiber_conic_count(ref, a)
            expected = {"ramified": gf.q + 1, "split": 2 * gf.q + 1, "nonsplit": 1}[ch]
            assert n == expected, (ch, n)
            seen.add(ch)
        assert {"split", "nonsplit"} <= seen


def _eval_on_curve(inst, E, a):
    fld = a[0].field
    if not fld.has_sqrt_int(inst.d):
        fld = fld.extension()
        a = [fld.convert(x) for x in a]
    return _eval_fq(E, fld, a)


def test_c10_conic_formula(criterion):
    with criterion(10, "count_affine_conic = enumeration for all 4-tuples, q = 3, 5, 7"):
        for q in (3, 5, 7):
            gf = field_for_q(q)
            grid = np.array(list(product(range(q), repeat=4)))
            fast = affine_conic_counts(gf, *grid.T)
            xs = np.arange(q)
            x, y = (v.ravel() for v in np.meshgrid(xs, xs))
            for row, n in zip(grid, fast):
                A, B, C, D = (int(c) for c in row)
                vals = (A * x * x + B * x + C + D * y * y) % q
                assert n == np.count_nonzero(vals == 0)


def test_c11_search_liveness(tmp_path, criterion):
    with criterion(11, "search --seed 42 --bound 5 finds a certified instance within 10000 iterations"):
        out = tmp_path / "inst.json"
        stats_path = tmp_path / "stats.json"
        code = main(["search", "--seed", "42", "--bound", "5", "--out", str(out), "--stats-out", str(stats_path)])
        assert code == EXIT_OK
        stats = json.loads(stats_path.read_text())
        assert stats["found"] and stats["iterations"] <= 10000
        pinned = json.loads(resources.files("symforge").joinpath("data/search_seed42_bound5.json").read_text())
        assert stats == pinned
        assert main(["certify", "--instance", str(out), "--out", str(tmp_path / "certs.json")]) == EXIT_OK
