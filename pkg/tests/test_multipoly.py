import random
from fractions import Fraction

import numpy as np
import pytest

from symforge.gf import field_for_q, projective_points
from symforge.multipoly import (
    MultiPoly,
    analyze_binary_form,
    cofactor3,
    det,
    det_leibniz,
    det_sym4,
    form_resultant,
    resultant,
    sym_linear_matrix,
)

Z = MultiPoly.gens(4, ("z0", "z1", "z2", "z3"))
X, Y = MultiPoly.gens(2, ("x", "y"))


def random_sym4(rng, bound=3):
    return sym_linear_matrix([[rng.randint(-bound, bound) for _ in range(4)] for _ in range(10)])


def laplace_row(m, r):
    n = len(m)
    total = MultiPoly.const(0, 4)
    for c in range(n):
        minor = [[m[i][j] for j in range(n) if j != c] for i in range(n) if i != r]
        term = m[r][c] * det_leibniz(minor)
        total = total + (term if (r + c) % 2 == 0 else -term)
    return total


def test_canonical_form_and_zero_terms():
    f = Z[0] * Z[1] - Z[1] * Z[0]
    assert f.is_zero() and len(f) == 0
    g = Z[0] ** 2 + Z[1] * Z[2]
    assert g.to_json() == (Z[2] * Z[1] + Z[0] ** 2).to_json()
    assert MultiPoly.from_json(g.to_json()) == g


def test_homogeneity_flag_verified():
    (Z[0] ** 2 + Z[1] * Z[2]).assert_homogeneous(2)
    with pytest.raises(ValueError):
        (Z[0] ** 2 + Z[1]).assert_homogeneous()


def test_core_operations():
    a, b, c = Z[0] * Z[1], Z[0] ** 3, Z[2] ** 4
    f = a * Z[3] ** 2 + b * Z[3] + c
    assert f.diff(3) == 2 * a * Z[3] + b
    assert (Z[0] ** 2 * Z[1])(1, 2, 0, 0) == 2
    W = MultiPoly.gens(3, ("z0", "z1", "z2"))
    g = (W[0] ** 3 + W[1] ** 3 + W[2] ** 3).dehomogenize(0)
    y1, y2 = MultiPoly.gens(2, ("z1", "z2"))
    assert g == 1 + y1**3 + y2**3


def test_det_sym4_examples():
    z0, z1, z2, z3 = Z
    zero = z0 - z0
    m = [[z0, zero, zero, zero], [zero, z1, zero, zero], [zero, zero, z2, zero], [zero, zero, zero, z3]]
    assert det_sym4(m) == z0 * z1 * z2 * z3
    m = [[z0, zero, zero, zero], [zero, z1, zero, zero], [zero, zero, z2, z3], [zero, zero, z3, zero]]
    assert det_sym4(m) == -z0 * z1 * z3**2


def test_det_sym4_laplace_all_rows():
    rng = random.Random(5)
    for _ in range(100):
        m = random_sym4(rng)
        d = det_sym4(m)
        assert all(laplace_row(m, r) == d for r in range(4))


def test_cofactor3_examples():
    z0, z1, z2, _ = Z
    zero = z0 - z0
    m = [[z0, zero, zero, zero], [zero, z1, zero, zero], [zero, zero, z2, zero], [zero, zero, zero, z0]]
    assert cofactor3(m, 3, 3) == z0**2 * z1
    assert cofactor3(m, 4, 4) == z0 * z1 * z2


def test_adjugate_identity():
    rng = random.Random(11)
    for _ in range(10):
        m = random_sym4(rng)
        d = det_sym4(m)
        adj = [[cofactor3(m, i + 1, j + 1) for j in range(4)] for i in range(4)]
        for i in range(4):
            for j in range(4):
                s = adj[i][0] * m[0][j] + adj[i][1] * m[1][j] + adj[i][2] * m[2][j] + adj[i][3] * m[3][j]
                assert s == (d if i == j else d - d)


def test_jacobi_complement():
    # adj33*adj44 - adj34^2 = det(M) * (minor on rows/cols 1, 2)
    rng = random.Random(3)
    for _ in range(100):
        m = random_sym4(rng, bound=2)
        lhs = cofactor3(m, 3, 3) * cofactor3(m, 4, 4) - cofactor3(m, 3, 4) ** 2
        minor12 = det([[m[0][0], m[0][1]], [m[1][0], m[1][1]]])
        assert lhs == det_sym4(m) * minor12


def test_resultant_examples():
    x, y = MultiPoly.gens(2, ("x", "y"))
    assert resultant(y**2 - x, y - x, 1) == x**2 - x
    x, a, b = MultiPoly.gens(3, ("x", "a", "b"))
    assert resultant(x - a, x - b, 0) == a - b


def _common_zeros(f, g, q):
    gf = field_for_q(q)
    pts = projective_points(q, 2)
    cs = [pts[:, i] for i in range(3)]
    m = (gf.evaluate(gf.compile(f), cs) == 0) & (gf.evaluate(gf.compile(g), cs) == 0)
    return pts[m]


@pytest.mark.parametrize("p", [11, 13])
def test_form_resultant_vanishes_at_common_zeros(p):
    rng = random.Random(p)
    W = MultiPoly.gens(3, ("w0", "w1", "w2"))
    mons2 = [W[i] * W[j] for i in range(3) for j in range(i, 3)]
    mons3 = [W[i] * W[j] * W[k] for i in range(3) for j in range(i, 3) for k in range(j, 3)]
    hits = 0
    for _ in range(12):
        f = sum((rng.randint(-4, 4) * m for m in mons2), W[0] - W[0])
        g = sum((rng.randint(-4, 4) * m for m in mons3), W[0] - W[0])
        if not f.coeff((0, 0, 2)) or not g.coeff((0, 0, 3)):
            continue
        R = form_resultant(f, g)
        assert R.degree() == 6
        gf = field_for_q(p)
        comp = gf.compile(R)
        for pt in _common_zeros(f, g, p):
            hits += 1
            val = gf.evaluate(comp, [np.array(int(pt[0])), np.array(int(pt[1]))])
            assert int(val) == 0
    assert hits > 0


def test_analyze_binary_form_examples():
    a = analyze_binary_form((X - Y) ** 2 * X)
    assert a.content == 1
    assert a.profile == ((1, 2), (1, 1))
    assert a.squarefree_part == X * (X - Y) or a.squarefree_part == -(X * (X - Y))
    assert analyze_binary_form(X**4 + Y**4).profile == ((4, 1),)
    b = analyze_binary_form((X**2 + Y**2) ** 2)
    assert b.profile == ((2, 2),)
    assert b.squarefree_part == X**2 + Y**2


def test_analyze_binary_form_reconstructs():
    rng = random.Random(2)
    for _ in range(40):
        F = MultiPoly.const(rng.randint(1, 5), 2, ("x", "y"))
        for _ in range(rng.randint(1, 4)):
            lin = rng.randint(-3, 3) * X + rng.randint(-3, 3) * Y
            if not lin.is_zero():
                F = F * lin ** rng.randint(1, 3)
        assert analyze_binary_form(F).reconstruct() == F
