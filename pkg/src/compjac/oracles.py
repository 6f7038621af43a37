"""Independent combinatorial oracles.

* rational Dyck / Young-diagram polynomial under the (q, p) triangle;
* the rational Catalan count;
* the closed-form Hilbert series of O_{q/p};
* fixed-point localization: the ring R_{ε=1,s=1} is the function algebra
  on the balanced modules, with e_j acting as (1/p)·(j-th elementary
  symmetric function of the p-basis).  Filtration dimensions then reduce to
  ranks of evaluation matrices.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .exactalg import rref
from .semigroups import enumerate_sigma, p_basis


def _check_coprime(p, q):
    if math.gcd(p, q) != 1:
        raise ValueError(f"({p},{q}) not coprime")


def catalan_count(p: int, q: int) -> int:
    _check_coprime(p, q)
    num = math.comb(p + q, p)
    if num % (p + q):
        raise ArithmeticError("rational Catalan number is not an integer")
    return num // (p + q)


def row_bounds(p: int, q: int) -> list:
    """Longest row at height r with every box strictly under the hypotenuse
    through (q, 0) and (0, p): p(x+1) + q(r+1) <= pq."""
    out = []
    for r in range(p):
        slack = p * q - q * (r + 1)
        out.append(max(slack // p, 0))
    return out


def dyck_poly(p: int, q: int) -> list:
    """Coefficients of sum over diagrams D in the triangle of t^{|D|}."""
    _check_coprime(p, q)
    bounds = row_bounds(p, q)
    counts: dict = {}

    # a diagram is a weakly decreasing sequence of row lengths
    def walk(r, cap, size):
        counts[size] = counts.get(size, 0) + 1
        if r == p:
            return
        for length in range(1, min(cap, bounds[r]) + 1):
            walk(r + 1, length, size + length)

    walk(0, bounds[0] if bounds else 0, 0)
    top = max(counts)
    return [counts.get(i, 0) for i in range(top + 1)]


def _series_mul(a, b, n):
    out = [0] * (n + 1)
    for i, x in enumerate(a[: n + 1]):
        if x:
            for j, y in enumerate(b[: n + 1 - i]):
                out[i + j] += x * y
    return out


def closed_hilbert_series(p: int, q: int, up_to: int | None = None) -> list:
    """prod_{i=1}^{p-1} (1 - T^{q+i}) / (1 - T^{i+1}), coefficientwise."""
    _check_coprime(p, q)
    delta = (p - 1) * (q - 1) // 2
    n = 2 * delta if up_to is None else up_to
    series = [1] + [0] * n
    for i in range(1, p):
        num = [0] * (n + 1)
        num[0] = 1
        if q + i <= n:
            num[q + i] = -1
        series = _series_mul(series, num, n)
        # divide by 1 - T^{i+1}: multiply by geometric series
        geo = [1 if k % (i + 1) == 0 else 0 for k in range(n + 1)]
        series = _series_mul(series, geo, n)
    return series


# ---------------------------------------------------------------------------
# fixed-point localization
# ---------------------------------------------------------------------------


def elementary_symmetric(values) -> list:
    """[e_0, e_1, ..., e_n] of the given numbers."""
    e = [Fraction(1)]
    for v in values:
        e = [Fraction(1)] + [e[k] + v * e[k - 1] for k in range(1, len(e))] + [v * e[-1]]
    return e


def fixed_point_coordinates(p: int, q: int) -> list:
    """For each balanced module, the values (e_1, ..., e_p) at that point."""
    pts = []
    for sigma in enumerate_sigma(p, q):
        a = p_basis(sigma, p).values
        es = elementary_symmetric(a)
        pts.append(tuple(es[j] / p for j in range(1, p + 1)))
    return pts


def _exponent_vectors(p: int, max_w1: int | None, max_w2: int | None):
    """Exponents of e_2..e_p with w1 = sum (i-1)α_i and w2 = sum i·α_i bounded."""
    k = p - 1
    out = []

    def rec(i, acc, w1, w2):
        if i == k:
            out.append(tuple(acc))
            return
        step1, step2 = i + 1, i + 2
        a = 0
        while (max_w1 is None or w1 + a * step1 <= max_w1) and (max_w2 is None or w2 + a * step2 <= max_w2):
            acc.append(a)
            rec(i + 1, acc, w1 + a * step1, w2 + a * step2)
            acc.pop()
            a += 1
            if max_w1 is None and max_w2 is None:
                raise ValueError("unbounded enumeration")

    rec(0, [], 0, 0)
    return out


def _eval_rank(points, exps) -> int:
    rows = []
    for ex in exps:
        row = {}
        for c, pt in enumerate(points):
            v = Fraction(1)
            for j, a in enumerate(ex):
                if a:
                    v *= pt[j + 1] ** a
            if v:
                row[c] = v
        rows.append(row)
    return len(rref(rows, len(points))[0])


def localization_filtration_dims(p: int, q: int, i_max: int, j_max: int) -> dict:
    """d(i, j) = dim(F^ε_{<=i} ∩ F^s_{<=j}) as the rank of evaluations of
    e-monomials with w1 <= i and w2 <= j at the fixed points."""
    pts = fixed_point_coordinates(p, q)
    out = {}
    for i in range(-1, i_max + 1):
        for j in range(-1, j_max + 1):
            if i < 0 or j < 0:
                out[(i, j)] = 0
                continue
            out[(i, j)] = _eval_rank(pts, _exponent_vectors(p, i, j))
    return out


def localization_table(p: int, q: int) -> dict:
    """Gr^{F^ε}_i Gr^{F^s}_j dimensions by inclusion-exclusion."""
    delta = (p - 1) * (q - 1) // 2
    top = 2 * delta
    d = localization_filtration_dims(p, q, top, top)
    table = {}
    for i in range(top + 1):
        for j in range(top + 1):
            v = d[(i, j)] - d[(i - 1, j)] - d[(i, j - 1)] + d[(i - 1, j - 1)]
            if v:
                table[(i, j)] = v
    return table


def localization_betti(p: int, q: int) -> list:
    """b_{2a} = dim F^ε_{<=a} - dim F^ε_{<=a-1}, using only the e-span."""
    pts = fixed_point_coordinates(p, q)
    delta = (p - 1) * (q - 1) // 2
    dims = []
    for a in range(delta + 1):
        exps = _exponent_vectors(p, a, None) if p > 1 else [()]
        dims.append(_eval_rank(pts, exps))
    assert dims[-1] == len(pts), "e-monomials of w1 <= delta must span all functions"
    return [dims[0]] + [dims[k] - dims[k - 1] for k in range(1, len(dims))]


def localization_hilbert(p: int, q: int) -> list:
    """dim O_{q/p}[j] = dim F^s_{<=j} - dim F^s_{<=j-1}."""
    pts = fixed_point_coordinates(p, q)
    delta = (p - 1) * (q - 1) // 2
    dims = [_eval_rank(pts, _exponent_vectors(p, None, j)) for j in range(2 * delta + 1)]
    return [dims[0]] + [dims[k] - dims[k - 1] for k in range(1, len(dims))]
