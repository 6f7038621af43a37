"""Artinian local rings of rigidified maps to a parametrized plane curve.

Pipeline: implicitize the curve, substitute a perturbed parametrization
(x(t) = t^a + sum e_i t^{a-i}, y(t) = t^b + sum f_i t^{b-i}), impose a
rigidification, locate the single support point, recentre, and measure the
m-adic associated graded ring by jet truncation.

Jet truncation: variables whose linear parts are independent are solved as
power series in the remaining ones (fixed-point iteration modulo m^N), then
A_N = Q[free] / (J + m^N) is computed by exact ranks.  When
dim A_N = dim A_{N+1} Nakayama gives m^N = 0 in the completed local ring,
which is then A_N itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .exactalg import SparsePoly, VariableContext, matrix_rank, poly_mul, rref, sparse_kernel
from .semigroups import NumericalSemigroup, gaps, minimal_generators


class ImplicitizationError(RuntimeError):
    pass


class SupportError(RuntimeError):
    pass


class JetStabilizationError(RuntimeError):
    pass


CONVENTIONS = ("paper", "strict")


# ---------------------------------------------------------------------------
# univariate helpers (coefficient lists, index = power of t)
# ---------------------------------------------------------------------------


def _umul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _ushift(a, c):
    """Coefficients of a(t + c)."""
    out = [Fraction(0)] * len(a)
    for k, x in enumerate(a):
        if x:
            for j in range(k + 1):
                out[j] += x * math.comb(k, j) * Fraction(c) ** (k - j)
    return out


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParamCurve:
    """t -> (x(t), y(t)) with monic x, y; ``x[k]`` is the coefficient of t^k."""

    x: tuple
    y: tuple
    tag: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(Fraction(c) for c in self.x))
        object.__setattr__(self, "y", tuple(Fraction(c) for c in self.y))
        if not self.x or self.x[-1] != 1 or not self.y or self.y[-1] != 1:
            raise ValueError("x and y must be monic")
        if math.gcd(self.deg_x, self.deg_y) != 1:
            raise ValueError("degrees of x and y must be coprime")

    @property
    def deg_x(self) -> int:
        return len(self.x) - 1

    @property
    def deg_y(self) -> int:
        return len(self.y) - 1

    @classmethod
    def monomial(cls, p: int, q: int) -> "ParamCurve":
        """(t^p, t^q)."""
        return cls(tuple([0] * p + [1]), tuple([0] * q + [1]), ("toric", p, q))

    @classmethod
    def family(cls, q: int, s: int) -> "ParamCurve":
        """(t^4, t^{2q} + t^s) with s > 2q > 4 and q, s odd."""
        if not (s > 2 * q > 4 and q % 2 == 1 and s % 2 == 1):
            raise ValueError("need s > 2q > 4 with q and s odd")
        y = [0] * (s + 1)
        y[s] = 1
        y[2 * q] = 1
        return cls((0, 0, 0, 0, 1), tuple(y), ("4,2q,s", q, s))

    def translate(self, c) -> "ParamCurve":
        return ParamCurve(tuple(_ushift(self.x, c)), tuple(_ushift(self.y, c)), self.tag)

    def to_json(self) -> dict:
        return {"x": [str(c) for c in self.x], "y": [str(c) for c in self.y], "tag": list(self.tag)}


def curve_semigroup(curve: ParamCurve) -> NumericalSemigroup:
    """Value semigroup of Q[[x(t), y(t)]] at t = 0 (requires x(0) = y(0) = 0)."""
    if curve.x[0] or curve.y[0]:
        raise ValueError("the branch must pass through the origin at t = 0")
    dx, dy = curve.deg_x, curve.deg_y
    K = (dx - 1) * (dy - 1) + dx + dy + 1
    ox = next(k for k, c in enumerate(curve.x) if c)
    oy = next(k for k, c in enumerate(curve.y) if c)
    rows = []
    xp = [Fraction(1)]
    a = 0
    while a * ox < K:
        yp = list(xp)
        b = 0
        while a * ox + b * oy < K:
            rows.append({k: v for k, v in enumerate(yp[:K]) if v})
            yp = _umul(yp, list(curve.y))[:K]
            b += 1
        xp = _umul(xp, list(curve.x))[:K]
        a += 1
    pivots, _ = rref(rows, K)
    values = sorted(pivots)
    gens = minimal_generators([v for v in values if v > 0])
    sg = gaps(gens)
    if any(n in sg and n not in values for n in range(K)):
        raise AssertionError("value set below the truncation is not a semigroup prefix")
    return sg


# ---------------------------------------------------------------------------
# implicitization
# ---------------------------------------------------------------------------


def _xy_context(curve: ParamCurve) -> VariableContext:
    return VariableContext(("x", "y"), (curve.deg_x, curve.deg_y))


@dataclass(frozen=True)
class Implicitization:
    poly: SparsePoly
    degree: int
    empty_below: int  # no relation of weighted degree < empty_below

    def to_json(self) -> dict:
        return {"poly": self.poly.to_str(), "degree": self.degree, "empty_below": self.empty_below}


def implicitize(curve: ParamCurve, max_degree: int | None = None) -> Implicitization:
    """Minimal weighted-degree F with F(x(t), y(t)) = 0, normalized so that
    the coefficient of y^{deg x} is 1."""
    dx, dy = curve.deg_x, curve.deg_y
    bound = dx * dy if max_degree is None else max_degree
    ctx = _xy_context(curve)
    powers: dict = {(0, 0): [Fraction(1)]}

    def image(a, b):
        if (a, b) not in powers:
            if b > 0:
                powers[(a, b)] = _umul(image(a, b - 1), list(curve.y))
            else:
                powers[(a, b)] = _umul(image(a - 1, 0), list(curve.x))
        return powers[(a, b)]

    for D in range(bound + 1):
        monos = [(a, b) for b in range(D // dy + 1) for a in range((D - b * dy) // dx + 1)]
        # columns are the candidate monomials; kernel of the evaluation map
        width = D + 1
        cols = [image(a, b) for a, b in monos]
        rows = [{j: col[k] for j, col in enumerate(cols) if k < len(col) and col[k]} for k in range(width)]
        kern = sparse_kernel([r for r in rows if r], len(monos))
        if not kern:
            continue
        if len(kern) != 1:
            raise AssertionError("minimal relation is not unique up to scale")
        vec = kern[0]
        terms = {m: vec[j] for j, m in enumerate(monos) if vec[j]}
        lead = terms.get((0, dx))
        if not lead:
            raise AssertionError("relation has no y^{deg x} term")
        F = SparsePoly(ctx, {m: c / lead for m, c in terms.items()})
        if implicit_residual(curve, F):
            raise AssertionError("implicitization residual is nonzero")
        return Implicitization(F, D, D)
    raise ImplicitizationError(f"no relation of weighted degree <= {bound}; try max_degree={2 * bound}")


def implicit_residual(curve: ParamCurve, F: SparsePoly) -> list:
    """Coefficients of F(x(t), y(t)); empty when the relation holds."""
    acc: list = [Fraction(0)]
    for (a, b), c in F.terms.items():
        v = [Fraction(1)]
        for _ in range(a):
            v = _umul(v, list(curve.x))
        for _ in range(b):
            v = _umul(v, list(curve.y))
        if len(v) > len(acc):
            acc += [Fraction(0)] * (len(v) - len(acc))
        for k, x in enumerate(v):
            acc[k] += c * x
    return [(k, x) for k, x in enumerate(acc) if x]


# ---------------------------------------------------------------------------
# rigidified maps
# ---------------------------------------------------------------------------


@dataclass
class LocalArtinianModel:
    """Generators recentred at the support point (all vanish at the origin)."""

    names: tuple
    generators: tuple
    center: dict
    convention: str
    curve: ParamCurve
    rigidification: dict
    implicit_degree: int
    delta: int
    notes: list = field(default_factory=list)
    truncation: int | None = None
    dims_trace: list = field(default_factory=list)

    @property
    def context(self) -> VariableContext:
        return VariableContext(self.names, tuple(1 for _ in self.names))

    def to_json(self) -> dict:
        return {
            "variables": list(self.names),
            "generator_count": len(self.generators),
            "center": {k: str(v) for k, v in sorted(self.center.items())},
            "convention": self.convention,
            "curve": self.curve.to_json(),
            "rigidification": {k: str(v) for k, v in sorted(self.rigidification.items())},
            "implicit_degree": self.implicit_degree,
            "delta": self.delta,
            "notes": list(self.notes),
            "truncation": self.truncation,
            "dims_trace": list(self.dims_trace),
        }


def _rigidification(curve: ParamCurve, convention: str) -> dict:
    """Values or linear relations for the killed coefficients, as
    name -> (constant, {name: coefficient}) meaning name = constant + sum."""
    dx, dy = curve.deg_x, curve.deg_y
    if convention == "strict":
        # phi*(x) - x and phi*(y) - y of degree <= n - 2
        return {"e1": (curve.x[dx - 1], {}), "f1": (curve.y[dy - 1], {})}
    if convention == "paper":
        if not (curve.tag and curve.tag[0] == "4,2q,s"):
            raise ValueError("the literal rigidification is defined for the (4, 2q, s) family only")
        _, q, s = curve.tag
        k0 = s - 2 * q
        if k0 == 1:
            # f_1 pinned twice: f_1 = 1 and 4 f_1 = s e_1
            return {"f1": (Fraction(1), {}), "e1": (Fraction(4, s), {})}
        return {f"f{k0}": (Fraction(1), {}), "f1": (Fraction(0), {"e1": Fraction(s, 4)})}
    raise ValueError(f"unknown convention {convention!r}")


def _translation_constraints(curve: ParamCurve, rig: dict) -> list:
    """Each rigidification condition as a polynomial in the translation c,
    evaluated on the reparametrized base curve t -> (x(t+c), y(t+c))."""
    dx, dy = curve.deg_x, curve.deg_y
    top = dx * dy + 1

    def coeff_poly(series, deg, i):
        # coefficient of t^{deg - i} in series(t + c) as a polynomial in c
        k = deg - i
        out = [Fraction(0)] * (deg + 1)
        for n, a in enumerate(series):
            if a and n >= k:
                out[n - k] += a * math.comb(n, k)
        return out

    def name_poly(name):
        i = int(name[1:])
        return coeff_poly(curve.x, dx, i) if name[0] == "e" else coeff_poly(curve.y, dy, i)

    polys = []
    for name, (const, lin) in rig.items():
        p = name_poly(name)
        p = p + [Fraction(0)] * (top - len(p))
        p[0] -= const
        for other, c in lin.items():
            o = name_poly(other)
            for k, v in enumerate(o):
                p[k] -= c * v
        polys.append(p)
    return polys


def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _upoly_rem(a, b):
    a = _trim(a)
    b = _trim(b)
    while len(a) >= len(b) and a:
        f = a[-1] / b[-1]
        sh = len(a) - len(b)
        for k, v in enumerate(b):
            a[sh + k] -= f * v
        a = _trim(a)
    return a


def _upoly_gcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _upoly_rem(a, b)
    return [c / a[-1] for c in a] if a else a


def _derivative(p):
    return [k * c for k, c in enumerate(p)][1:]


def support_translation(curve: ParamCurve, rig: dict) -> Fraction:
    """The unique translation c whose reparametrized curve satisfies the
    rigidification.  Every map in the family is a translate of the base
    parametrization (x is monic of degree deg_x and factors through the
    normalization), so the reduced support is cut out by these constraints."""
    g = []
    for p in _translation_constraints(curve, rig):
        g = _trim(p) if not g else _upoly_gcd(g, p)
    g = _trim(g)
    if not g:
        raise SupportError("rigidification does not cut the translation orbit to points")
    if len(g) == 1:
        raise SupportError("rigidification conditions conflict: the scheme has no point")
    radical_deg = len(g) - len(_trim(_upoly_gcd(g, _derivative(g))))
    if radical_deg != 1:
        raise SupportError(f"support is not a single point ({radical_deg} points)")
    # squarefree part is linear: root of g / gcd(g, g')
    sq = g
    while len(_trim(sq)) > 2:
        sq = _upoly_div(sq, _upoly_gcd(sq, _derivative(sq)))
    return -sq[0] / sq[1]


def _upoly_div(a, b):
    a, b = _trim(a), _trim(b)
    out = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        f = a[-1] / b[-1]
        sh = len(a) - len(b)
        out[sh] = f
        for k, v in enumerate(b):
            a[sh + k] -= f * v
        a = _trim(a)
    if a:
        raise ArithmeticError("inexact polynomial division")
    return out


def mrig_equations(curve: ParamCurve, convention: str = "strict",
                   implicit: Implicitization | None = None) -> LocalArtinianModel:
    """Coefficient equations of F(x(t), y(t)) for the perturbed
    parametrization, rigidified and recentred at the support point."""
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    imp = implicit or implicitize(curve)
    dx, dy = curve.deg_x, curve.deg_y
    rig = _rigidification(curve, convention)
    c = support_translation(curve, rig)
    point_curve = curve.translate(c)
    all_names = [f"e{i}" for i in range(1, dx + 1)] + [f"f{i}" for i in range(1, dy + 1)]
    free_names = tuple(n for n in all_names if n not in rig)
    ctx = VariableContext(free_names + ("t",), tuple(1 for _ in free_names) + (0,))
    point = {}
    for i in range(1, dx + 1):
        point[f"e{i}"] = point_curve.x[dx - i]
    for i in range(1, dy + 1):
        point[f"f{i}"] = point_curve.y[dy - i]

    # centred coordinates: name = point[name] + u_name for free names
    def coord(name):
        if name in rig:
            const, lin = rig[name]
            v = SparsePoly.const(ctx, const)
            for other, k in lin.items():
                v = v + coord(other) * k
            return v
        return SparsePoly.var(ctx, name) + point[name]

    for name in rig:
        if coord(name).constant_term() != point[name]:
            raise AssertionError(f"support point violates the rigidification at {name}")
    t = lambda k: SparsePoly.var(ctx, "t", k)
    X = t(dx)
    for i in range(1, dx + 1):
        X = X + coord(f"e{i}") * t(dx - i)
    Y = t(dy)
    for i in range(1, dy + 1):
        Y = Y + coord(f"f{i}") * t(dy - i)
    xp, yp = {0: SparsePoly.one(ctx)}, {0: SparsePoly.one(ctx)}
    for (a, b) in imp.poly.terms:
        for k in range(1, a + 1):
            if k not in xp:
                xp[k] = poly_mul(xp[k - 1], X)
        for k in range(1, b + 1):
            if k not in yp:
                yp[k] = poly_mul(yp[k - 1], Y)
    total = SparsePoly.zero(ctx)
    for (a, b), co in sorted(imp.poly.terms.items()):
        total = total + poly_mul(xp[a], yp[b]) * co
    by_t: dict = {}
    tpos = ctx.nvars - 1
    for m, co in total.terms.items():
        by_t.setdefault(m[tpos], {})[m[:tpos]] = co
    out_ctx = VariableContext(free_names, tuple(1 for _ in free_names))
    gens = []
    for k in sorted(by_t):
        g = SparsePoly(out_ctx, by_t[k])
        if g:
            if g.constant_term():
                raise SupportError("an equation does not vanish at the support point")
            gens.append(g)
    center = {n: point[n] for n in free_names}
    notes = [f"support translation c = {c}"]
    delta = curve_semigroup(curve).delta
    return LocalArtinianModel(free_names, tuple(gens), center, convention, curve,
                              {k: v[0] if not v[1] else f"{v[0]} + " + " + ".join(f"{b}*{a}" for a, b in v[1].items())
                               for k, v in rig.items()},
                              imp.degree, delta, notes)


def local_model(names, generators, center=None, delta=None) -> LocalArtinianModel:
    """Model from explicit generators already centred at the origin."""
    names = tuple(names)
    gens = tuple(generators)
    for g in gens:
        if g.constant_term():
            raise SupportError("generators must vanish at the origin")
    return LocalArtinianModel(names, gens, dict(center or {}), "explicit", None, {}, 0,
                              delta if delta is not None else -1)


# ---------------------------------------------------------------------------
# jet truncation
# ---------------------------------------------------------------------------


def _order_bound(N):
    return None if N is None else N - 1


def _linear_part(g: SparsePoly) -> dict:
    out = {}
    for m, c in g.terms.items():
        if sum(m) == 1:
            out[m.index(1)] = c
    return out


@dataclass(frozen=True)
class JetReduction:
    """Solved variables as power series in the free ones, modulo m^N."""

    free: tuple
    solved: dict
    ideal: tuple  # generators in the free variables, truncated below order N
    N: int


def reduce_to_free(model: LocalArtinianModel, N: int) -> JetReduction:
    ctx = model.context
    n = ctx.nvars
    gens = list(model.generators)
    # linear parts augmented by the generator index, eliminated together
    rows = []
    for k, g in enumerate(gens):
        row = dict(_linear_part(g))
        row[n + k] = Fraction(1)
        rows.append(row)
    pivots, red = rref(rows, n + len(gens), "python")
    solved_rows = [(p, r) for p, r in zip(pivots, red) if p < n]
    solved_idx = [p for p, _ in solved_rows]
    free = tuple(ctx.names[i] for i in range(n) if i not in solved_idx)
    fctx = VariableContext(free, tuple(1 for _ in free))
    trunc = ([1] * len(free), N - 1)
    # h_j = sum_k T_jk g_k = v_j + linear(free) + higher order terms
    combos = []
    for p, r in solved_rows:
        h = SparsePoly.zero(ctx)
        for col, v in r.items():
            if col >= n:
                h = h + gens[col - n] * v
        rest = SparsePoly(ctx, {m: c for m, c in h.terms.items() if m != tuple(1 if i == p else 0 for i in range(n))})
        lead = h.terms.get(tuple(1 if i == p else 0 for i in range(n)))
        if lead != 1:
            raise AssertionError("solved combination is not monic in its pivot")
        combos.append((ctx.names[p], rest))
    values = {name: SparsePoly.zero(fctx) for name, _ in combos}
    for _ in range(N + 1):
        mapping = dict(values)
        new = {name: -rest.subs(mapping, fctx, truncate=trunc) for name, rest in combos}
        if new == values:
            break
        values = new
    else:
        raise AssertionError("power-series elimination did not converge")
    ideal = []
    for g in gens:
        r = g.subs(values, fctx, truncate=trunc)
        if r:
            ideal.append(r)
    return JetReduction(free, values, tuple(ideal), N)


def _monomials_below(nvars: int, N: int) -> list:
    ctx = VariableContext(tuple(f"v{i}" for i in range(nvars)), tuple(1 for _ in range(nvars)))
    out = []
    for d in range(N):
        out.extend(ctx.monomials_of_degree(d))
    return out


def _truncated_ideal_rows(red: JetReduction) -> tuple:
    nf = len(red.free)
    monos = _monomials_below(nf, red.N)
    index = {m: i for i, m in enumerate(monos)}
    rows = []
    for g in red.ideal:
        og = g.order()
        for m in monos:
            if sum(m) + og >= red.N:
                continue
            row = {}
            for t, c in g.terms.items():
                mm = tuple(a + b for a, b in zip(t, m))
                if sum(mm) < red.N:
                    row[index[mm]] = c
            if row:
                rows.append(row)
    return monos, rows


@dataclass(frozen=True)
class ArtinianDims:
    total: int
    gr: tuple
    N: int
    trace: tuple

    def to_json(self) -> dict:
        return {"total": self.total, "gr_m": list(self.gr), "truncation": self.N,
                "dims_trace": [list(t) for t in self.trace]}


def _truncated_dims(red: JetReduction) -> tuple:
    monos, rows = _truncated_ideal_rows(red)
    total = len(monos) - matrix_rank(rows, len(monos))
    gr = []
    for i in range(red.N):
        # (m^i + I) / (m^{i+1} + I): columns of order >= i are dropped
        low = [k for k, m in enumerate(monos) if sum(m) < i]
        low1 = [k for k, m in enumerate(monos) if sum(m) < i + 1]
        r_i = _restricted_rank(rows, low)
        r_i1 = _restricted_rank(rows, low1)
        count_i = len(low1) - len(low)
        gr.append(count_i + r_i - r_i1)
    while gr and gr[-1] == 0:
        gr.pop()
    if sum(gr) != total:
        raise AssertionError("associated graded does not exhaust the truncated ring")
    return total, tuple(gr)


def _restricted_rank(rows, cols) -> int:
    if not cols:
        return 0
    pos = {c: i for i, c in enumerate(cols)}
    sub = []
    for r in rows:
        rr = {pos[c]: v for c, v in r.items() if c in pos}
        if rr:
            sub.append(rr)
    return matrix_rank(sub, len(cols))


def artinian_dims(model: LocalArtinianModel, start: int = 2, ceiling: int | None = None) -> ArtinianDims:
    """Total dimension and Gr_m dims, certified by dim A_N = dim A_{N+1}."""
    if ceiling is None:
        base = model.delta if model.delta and model.delta > 0 else len(model.names)
        ceiling = 2 * base + 4
    trace = []
    prev = None
    for N in range(start, ceiling + 2):
        red = reduce_to_free(model, N)
        total, gr = _truncated_dims(red)
        trace.append((N, total))
        if prev is not None and prev[1] == total:
            model.truncation = prev[0]
            model.dims_trace = [list(t) for t in trace]
            return ArtinianDims(total, prev[2], prev[0], tuple(trace))
        prev = (N, total, gr)
    raise JetStabilizationError(f"dims did not stabilize below N={ceiling + 1}: {trace}")


def fake_betti(model: LocalArtinianModel, dims: ArtinianDims) -> list:
    """Gr_m dims indexed i = 0..delta (zero-padded)."""
    if model.delta < 0:
        raise ValueError("delta unknown for this model")
    if len(dims.gr) > model.delta + 1:
        raise AssertionError("Gr_m is longer than delta + 1")
    return list(dims.gr) + [0] * (model.delta + 1 - len(dims.gr))
