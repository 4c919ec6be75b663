"""Dense univariate polynomials over a field, as coefficient lists (low degree first).

Coefficients may be ``Fraction``, ``QuadExt`` or ``FqElem``; the zero polynomial
is the empty list.  Only field operations and ``bool()`` are used on
coefficients, so every routine here works unchanged over all three.
"""

from __future__ import annotations

__all__ = [
    "ddf",
    "deg",
    "derivative",
    "det_field",
    "evaluate",
    "interpolate",
    "is_squarefree",
    "pdivmod",
    "pgcd",
    "powmod",
    "resultant",
    "squarefree_decomposition",
]


def trim(f):
    f = list(f)
    while f and not f[-1]:
        f.pop()
    return f


def deg(f) -> int:
    return len(f) - 1


def _zero_like(c):
    return c - c


def _one_like(c):
    return c / c if c else c - c + 1


def add(f, g):
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        if i < len(f) and i < len(g):
            out.append(f[i] + g[i])
        elif i < len(f):
            out.append(f[i])
        else:
            out.append(g[i])
    return trim(out)


def sub(f, g):
    return add(f, [-c for c in g])


def mul(f, g):
    if not f or not g:
        return []
    out = [_zero_like(f[0])] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if not a:
            continue
        for j, b in enumerate(g):
            out[i + j] = out[i + j] + a * b
    return trim(out)


def scale(f, c):
    return trim([a * c for a in f])


def monic(f):
    if not f:
        return []
    lc = f[-1]
    return [c / lc for c in f]


def pdivmod(f, g):
    """Quotient and remainder of f by nonzero g."""
    g = trim(g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    r = trim(f)
    if len(r) < len(g):
        return [], r
    inv = _one_like(g[-1]) / g[-1]
    q = [_zero_like(g[-1])] * (len(r) - len(g) + 1)
    while len(r) >= len(g) and r:
        shift = len(r) - len(g)
        c = r[-1] * inv
        q[shift] = c
        for i, b in enumerate(g):
            r[shift + i] = r[shift + i] - c * b
        r.pop()
        r = trim(r)
    return trim(q), r


def pgcd(f, g):
    """Monic gcd (the zero polynomial if both inputs vanish)."""
    a, b = trim(f), trim(g)
    while b:
        a, b = b, pdivmod(a, b)[1]
    return monic(a)


def derivative(f):
    return trim([f[i] * i for i in range(1, len(f))])


def evaluate(f, x):
    if not f:
        return _zero_like(x)
    acc = f[-1]
    for c in reversed(f[:-1]):
        acc = acc * x + c
    return acc


def is_squarefree(f) -> bool:
    f = trim(f)
    if len(f) <= 1:
        return True
    return deg(pgcd(f, derivative(f))) == 0


def squarefree_decomposition(f):
    """Yun's algorithm (characteristic zero).

    Returns ``(lc, [(P_1, 1), (P_2, 2), ...])`` with monic, pairwise coprime,
    squarefree P_k such that f = lc * prod P_k^k; trivial pieces are omitted.
    """
    f = trim(f)
    if not f:
        raise ValueError("zero polynomial has no squarefree decomposition")
    lc = f[-1]
    f = monic(f)
    pieces = []
    if deg(f) == 0:
        return lc, pieces
    fp = derivative(f)
    a = pgcd(f, fp)
    b = pdivmod(f, a)[0]
    c = pdivmod(fp, a)[0]
    dd = sub(c, derivative(b))
    k = 1
    while deg(b) > 0:
        a = pgcd(b, dd)
        b = pdivmod(b, a)[0]
        c = pdivmod(dd, a)[0]
        if deg(a) > 0:
            pieces.append((monic(a), k))
        dd = sub(c, derivative(b))
        k += 1
    return lc, pieces


def powmod(base, e: int, mod):
    one = [_one_like(mod[-1])]
    result = pdivmod(one, mod)[1]
    b = pdivmod(base, mod)[1]
    while e:
        if e & 1:
            result = pdivmod(mul(result, b), mod)[1]
        b = pdivmod(mul(b, b), mod)[1]
        e >>= 1
    return result


def ddf(f, q: int):
    """Distinct-degree factorization of a squarefree polynomial over F_q.

    Returns ``{degree: number of irreducible factors of that degree}``.
    """
    f = monic(trim(f))
    if not is_squarefree(f):
        raise ValueError("ddf needs a squarefree polynomial")
    zero = _zero_like(f[-1])
    one = _one_like(f[-1])
    x = [zero, one]
    counts = {}
    h = x
    i = 0
    while deg(f) >= 2 * (i + 1):
        i += 1
        h = powmod(h, q, f)
        g = pgcd(f, sub(h, x))
        if deg(g) > 0:
            counts[i] = deg(g) // i
            f = pdivmod(f, g)[0]
            h = pdivmod(h, f)[1]
    if deg(f) > 0:
        counts[deg(f)] = counts.get(deg(f), 0) + 1
    return counts


def _bareiss(m, mul, sub, div, is_zero):
    """Fraction-free elimination; div must be exact division in the ring."""
    n = len(m)
    sign = 1
    prev = None
    for k in range(n - 1):
        piv = next((r for r in range(k, n) if not is_zero(m[r][k])), None)
        if piv is None:
            return None
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        pk = m[k][k]
        for i in range(k + 1, n):
            row, mik = m[i], m[i][k]
            for j in range(k + 1, n):
                v = sub(mul(pk, row[j]), mul(mik, m[k][j]))
                row[j] = v if prev is None else div(v, prev)
        prev = pk
    return sign, m[n - 1][n - 1]


def _det_int(m):
    res = _bareiss(m, lambda a, b: a * b, lambda a, b: a - b, lambda a, b: a // b, lambda a: a == 0)
    if res is None:
        return 0
    return res[0] * res[1]


def _det_quad(m, d):
    # entries are pairs (a, b) of ints meaning a + b*sqrt(d)
    def mul(x, y):
        return (x[0] * y[0] + d * x[1] * y[1], x[0] * y[1] + x[1] * y[0])

    def sub(x, y):
        return (x[0] - y[0], x[1] - y[1])

    def div(x, y):
        nrm = y[0] * y[0] - d * y[1] * y[1]
        a = x[0] * y[0] - d * x[1] * y[1]
        b = x[1] * y[0] - x[0] * y[1]
        return (a // nrm, b // nrm)

    res = _bareiss(m, mul, sub, div, lambda x: x[0] == 0 and x[1] == 0)
    if res is None:
        return (0, 0)
    s, v = res
    return (s * v[0], s * v[1])


def _integral_kind(m):
    """'int', ('quad', d) or None, depending on the entries of m."""
    from fractions import Fraction

    from .arith import QuadExt

    d = None
    for row in m:
        for x in row:
            if isinstance(x, int):
                continue
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    return None
            elif isinstance(x, QuadExt):
                if x.a.denominator != 1 or x.b.denominator != 1:
                    return None
                d = x.d
            else:
                return None
    return "int" if d is None else ("quad", d)


def det_field(rows):
    """Determinant by Gaussian elimination over a field.

    Matrices with entries in Z or Z[sqrt d] take a fraction-free (Bareiss)
    path on plain integers, which is much faster than Fraction arithmetic.
    """
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    kind = _integral_kind(m)
    if kind == "int":
        from fractions import Fraction

        return Fraction(_det_int([[int(x) for x in r] for r in m]))
    if kind is not None:
        from .arith import QuadExt

        dd = kind[1]
        pairs = [[(int(x.a), int(x.b)) if isinstance(x, QuadExt) else (int(x), 0) for x in r] for r in m]
        a, b = _det_quad(pairs, dd)
        return QuadExt(dd, a, b)
    det = None
    sign = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            return _zero_like(m[0][0])
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        pv = m[col][col]
        det = pv if det is None else det * pv
        inv = _one_like(pv) / pv
        for r in range(col + 1, n):
            if m[r][col]:
                factor = m[r][col] * inv
                row, prow = m[r], m[col]
                for c in range(col, n):
                    row[c] = row[c] - factor * prow[c]
    return det if sign == 1 else -det


def sylvester_rows(fc, gc):
    """Sylvester matrix from coefficient lists given high degree first."""
    m, e = len(fc) - 1, len(gc) - 1
    zero = _zero_like(fc[0])
    size = m + e
    rows = []
    for i in range(e):
        rows.append([zero] * i + list(fc) + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + list(gc) + [zero] * (size - e - 1 - i))
    return rows


def resultant(f, g, df: int | None = None, dg: int | None = None):
    """Resultant of f, g (low-first lists) with formal degrees df, dg."""
    df = deg(f) if df is None else df
    dg = deg(g) if dg is None else dg
    if df < 0 or dg < 0:
        raise ValueError("resultant of the zero polynomial")
    probe = (f or g)[0]
    zero = _zero_like(probe)
    fc = [f[i] if i < len(f) else zero for i in range(df, -1, -1)]
    gc = [g[i] if i < len(g) else zero for i in range(dg, -1, -1)]
    if df == 0 and dg == 0:
        return _one_like(probe)
    return det_field(sylvester_rows(fc, gc))


def interpolate(xs, ys):
    """Coefficients of the unique polynomial of degree < len(xs) through the points."""
    n = len(xs)
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    zero = _zero_like(ys[0])
    poly = [zero] * n
    poly_acc = [coef[n - 1]]
    for i in range(n - 2, -1, -1):
        # poly_acc = poly_acc * (t - xs[i]) + coef[i]
        shifted = [zero] + poly_acc
        for k in range(len(poly_acc)):
            shifted[k] = shifted[k] - poly_acc[k] * xs[i]
        shifted[0] = shifted[0] + coef[i]
        poly_acc = shifted
    for k, c in enumerate(poly_acc):
        poly[k] = c
    return trim(poly)
