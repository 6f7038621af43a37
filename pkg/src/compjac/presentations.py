"""Generator lists for the ideals of O_{q/p}, the two-parameter family, the
toric (monomial curve) rings and the parabolic fixed-point ideals."""
from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .exactalg import (
    SparsePoly,
    VariableContext,
    coeff_of,
    derivative,
    divide_by_variable,
    poly_mul,
    rational_power_series,
    transfer,
)
from .semigroups import gaps, is_minimal_generating_set

SCHEMA = "compjac.presentation/1"


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class IdealPresentation:
    context: VariableContext
    generators: tuple
    homogeneity: str = "graded"  # none | graded | bigraded
    labels: tuple = ()
    note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(g for g in self.generators))
        if self.homogeneity not in ("none", "graded", "bigraded"):
            raise PresentationError(f"unknown homogeneity {self.homogeneity!r}")
        if self.homogeneity == "bigraded" and not self.context.bigraded:
            raise PresentationError("bigraded presentation needs two weight vectors")
        for g in self.generators:
            if g.ctx != self.context:
                raise PresentationError("generator context differs from presentation context")

    def nonzero(self) -> "IdealPresentation":
        keep = [(g, l) for g, l in zip(self.generators, self._labels()) if g]
        return IdealPresentation(self.context, tuple(g for g, _ in keep), self.homogeneity,
                                 tuple(l for _, l in keep), self.note)

    def _labels(self):
        return self.labels if self.labels else tuple(str(i) for i in range(len(self.generators)))

    def audit_homogeneity(self) -> bool:
        """Term-by-term weight check; raises on the first offending generator."""
        if self.homogeneity == "none":
            return True
        for g, lab in zip(self.generators, self._labels()):
            if len(g.degrees()) > 1:
                raise PresentationError(f"generator {lab} is not homogeneous: {sorted(g.degrees())}")
        return True

    def degree_of(self, g: SparsePoly):
        return g.degree()

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "context": self.context.to_json(),
            "homogeneity": self.homogeneity,
            "labels": list(self._labels()),
            "generators": [g.to_json() for g in self.generators],
        }

    @classmethod
    def from_json(cls, data: dict) -> "IdealPresentation":
        if data.get("schema") != SCHEMA:
            raise PresentationError("unknown presentation schema")
        c = data["context"]
        ctx = VariableContext(tuple(c["names"]), tuple(c["weight1"]),
                              None if c["weight2"] is None else tuple(c["weight2"]))
        gens = tuple(SparsePoly.from_json(ctx, g) for g in data["generators"])
        return cls(ctx, gens, data["homogeneity"], tuple(data["labels"]))

    def content_hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def substitute(self, mapping: dict, target: VariableContext, homogeneity: str) -> "IdealPresentation":
        gens = tuple(g.subs(mapping, target) for g in self.generators)
        return IdealPresentation(target, gens, homogeneity, self._labels()).nonzero()


def _check_pq(p, q, minimum=2):
    if math.gcd(p, q) != 1:
        raise PresentationError(f"({p},{q}) not coprime")
    if p < minimum or q < minimum:
        raise PresentationError(f"need p, q >= {minimum}")


def _e_names(p):
    return [f"e{i}" for i in range(2, p + 1)]


def _f_names(q):
    return [f"f{j}" for j in range(2, q + 1)]


def o_context(p: int) -> VariableContext:
    """Q[e_2..e_p] with deg e_i = i."""
    return VariableContext(tuple(_e_names(p)), tuple(range(2, p + 1)))


def _series(ctx, names, var):
    """1 + sum name_i var^i for names indexed from 2."""
    out = SparsePoly.one(ctx)
    for i, n in enumerate(names, start=2):
        out = out + SparsePoly.var(ctx, n) * SparsePoly.var(ctx, var, i)
    return out


# ---------------------------------------------------------------------------
# O_{q/p}
# ---------------------------------------------------------------------------


def build_IO(p: int, q: int) -> IdealPresentation:
    """Coefficients of w^1..w^{p+q-2} in q e'(w) f(w) - p e(w) f'(w)."""
    _check_pq(p, q)
    en, fn = _e_names(p), _f_names(q)
    wctx = VariableContext(tuple(en + fn + ["w"]), tuple(range(2, p + 1)) + tuple(range(2, q + 1)) + (-1,))
    e = _series(wctx, en, "w")
    f = _series(wctx, fn, "w")
    expr = derivative(e, "w") * f * q - e * derivative(f, "w") * p
    if coeff_of(expr, "w", p + q - 1):
        raise AssertionError("top coefficient of q e'f - p e f' must vanish")
    ctx = VariableContext(tuple(en + fn), tuple(range(2, p + 1)) + tuple(range(2, q + 1)))
    gens, labels = [], []
    for k in range(1, p + q - 1):
        gens.append(transfer(coeff_of(expr, "w", k), ctx))
        labels.append(f"w^{k}")
    return IdealPresentation(ctx, tuple(gens), "graded", tuple(labels), f"I_O({p},{q})")


def build_g_ideal(p: int, q: int) -> IdealPresentation:
    """g_{q+i}, i = 1..p-1: coefficients of w^{q+i} in e(w)^{q/p}."""
    _check_pq(p, q)
    en = _e_names(p)
    wctx = VariableContext(tuple(en + ["w"]), tuple(range(2, p + 1)) + (-1,))
    e = _series(wctx, en, "w")
    ser = rational_power_series(e, Fraction(q, p), "w", p + q - 1)
    ctx = o_context(p)
    gens = tuple(transfer(coeff_of(ser, "w", q + i), ctx) for i in range(1, p))
    labels = tuple(f"g{q + i}" for i in range(1, p))
    return IdealPresentation(ctx, gens, "graded", labels, f"g-ideal({p},{q})")


# ---------------------------------------------------------------------------
# the two-parameter family
# ---------------------------------------------------------------------------


def family_context(p: int, q: int) -> VariableContext:
    en, fn = _e_names(p), _f_names(q)
    names = ["eps", "s"] + en + fn
    w1 = [1, 0] + list(range(1, p)) + list(range(1, q))
    w2 = [0, 1] + list(range(2, p + 1)) + list(range(2, q + 1))
    return VariableContext(tuple(names), tuple(w1), tuple(w2))


def _shifted_product(zctx, coeffs, n, m, step, trunc):
    """prod_{j<m} P(z + j*step) with P(z) = z^n + sum_i coeffs[i] z^{n-i}."""
    z = SparsePoly.var(zctx, "z")
    total = SparsePoly.one(zctx)
    for j in range(m):
        zz = z + step * j
        # Horner in the shifted variable
        val = SparsePoly.one(zctx)
        for i in range(1, n + 1):
            val = poly_mul(val, zz, truncate=trunc) + coeffs[i]
        total = poly_mul(total, val, truncate=trunc)
    return total


def build_F_family(p: int, q: int, max_k: int | None = None) -> IdealPresentation:
    """F_d = coefficient of z^d in prod_j A(z + j p s eps) - prod_i B(z + i q s eps).

    ``max_k`` keeps only F_{pq-k} with k <= max_k (all by default); the
    product is truncated accordingly, which is exact for the kept F_d."""
    _check_pq(p, q)
    ctx = family_context(p, q)
    zctx = VariableContext(ctx.names + ("z",), ctx.weight1 + (1,), ctx.weight2 + (1,))
    K = p * q if max_k is None else max_k
    trunc = (list(ctx.weight2) + [0], K)
    eps = SparsePoly.var(zctx, "eps")
    s = SparsePoly.var(zctx, "s")
    e = {1: s * Fraction(q * (p - 1), 2)}
    f = {1: s * Fraction(p * (q - 1), 2)}
    for i in range(2, p + 1):
        e[i] = SparsePoly.var(zctx, f"e{i}")
    for j in range(2, q + 1):
        f[j] = SparsePoly.var(zctx, f"f{j}")
    acoef = {i: eps * e[i] * p for i in range(1, p + 1)}
    bcoef = {j: eps * f[j] * q for j in range(1, q + 1)}
    lhs = _shifted_product(zctx, acoef, p, q, s * eps * p, trunc)
    rhs = _shifted_product(zctx, bcoef, q, p, s * eps * q, trunc)
    diff = lhs - rhs
    gens, labels = [], []
    for d in range(p * q, -1, -1):
        if p * q - d > K:
            break
        gens.append(transfer(coeff_of(diff, "z", d), ctx))
        labels.append(f"F{d}")
    return IdealPresentation(ctx, tuple(gens), "bigraded", tuple(labels), f"F-family({p},{q})")


def family_divided_by_eps(fam: IdealPresentation) -> IdealPresentation:
    """G_d = F_d / eps.  Every F_d vanishes at eps = 0 (both products are
    z^{pq} there), and G_d lies in the eps-saturation of (F)."""
    gens = tuple(divide_by_variable(g, "eps") if g else g for g in fam.generators)
    labels = tuple("G" + l[1:] for l in fam._labels())
    return IdealPresentation(fam.context, gens, fam.homogeneity, labels, fam.note + "/eps").nonzero()


def build_theorem_HSp_ideal(p: int, q: int) -> IdealPresentation:
    """The s = 1 specialization of the family, graded by the first weight."""
    fam = build_F_family(p, q)
    c = fam.context
    idx = [i for i, n in enumerate(c.names) if n != "s"]
    ctx = VariableContext(tuple(c.names[i] for i in idx), tuple(c.weight1[i] for i in idx))
    out = fam.substitute({"s": 1}, ctx, "graded")
    direct = _hsp_direct(p, q, ctx)
    if set(out.generators) != set(direct.generators):
        raise AssertionError("s = 1 specialization disagrees with the direct construction")
    return out


def _hsp_direct(p, q, ctx):
    """A(z) = z^p + (1/2)pq(p-1) eps z^{p-1} + sum_{i>=2} p eps e_i z^{p-i}, same for B."""
    zctx = VariableContext(ctx.names + ("z",), ctx.weight1 + (1,))
    eps = SparsePoly.var(zctx, "eps")
    acoef = {1: eps * Fraction(p * q * (p - 1), 2)}
    bcoef = {1: eps * Fraction(p * q * (q - 1), 2)}
    for i in range(2, p + 1):
        acoef[i] = eps * SparsePoly.var(zctx, f"e{i}") * p
    for j in range(2, q + 1):
        bcoef[j] = eps * SparsePoly.var(zctx, f"f{j}") * q
    diff = _shifted_product(zctx, acoef, p, q, eps * p, None) - _shifted_product(zctx, bcoef, q, p, eps * q, None)
    gens = [transfer(coeff_of(diff, "z", d), ctx) for d in range(p * q, -1, -1)]
    return IdealPresentation(ctx, tuple(gens), "graded").nonzero()


# ---------------------------------------------------------------------------
# linear elimination
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Elimination:
    """Result of solving generators for variables that occur linearly.

    ``solved[x]`` expresses an eliminated variable in the remaining ones, so
    the quotient ring is unchanged."""

    presentation: IdealPresentation
    solved: dict = field(default_factory=dict)
    order: tuple = ()


def _linear_solution(g: SparsePoly, idx: int):
    """If g = c*x + h with x not dividing any term of h, return (c, h)."""
    n = g.ctx.nvars
    unit = tuple(1 if k == idx else 0 for k in range(n))
    c = g.terms.get(unit)
    if not c:
        return None
    for m in g.terms:
        if m != unit and m[idx]:
            return None
    return c, g - SparsePoly.monomial(g.ctx, unit, c)


def eliminate_linear(pres: IdealPresentation, candidates) -> Elimination:
    """Eliminate each candidate variable (in order) using the first, lowest
    degree generator in which it occurs only as a linear monomial."""
    ctx = pres.context
    gens = list(pres.generators)
    labels = list(pres._labels())
    solved: dict = {}
    order = []
    for x in candidates:
        if x not in ctx.names:
            continue
        idx = ctx.index(x)
        best = None
        for k, g in enumerate(gens):
            sol = _linear_solution(g, idx)
            if sol is not None:
                key = (sum(ctx.total_weight()[i] * e for i, e in enumerate(next(iter(g.terms)))), k)
                if best is None or key < best[0]:
                    best = (key, k, sol)
        if best is None:
            continue
        _, k, (c, h) = best
        image = -h / c
        nctx = ctx.restrict([n for n in ctx.names if n != x])
        image_n = transfer(image, nctx)
        mapping = {x: image_n}
        new_gens, new_labels = [], []
        for j, g in enumerate(gens):
            if j == k:
                continue
            ng = g.subs(mapping, nctx)
            if ng:
                new_gens.append(ng)
                new_labels.append(labels[j])
        solved = {y: v.subs(mapping, nctx) for y, v in solved.items()}
        solved[x] = image_n
        gens, labels, ctx = new_gens, new_labels, nctx
        order.append(x)
    out = IdealPresentation(ctx, tuple(gens), pres.homogeneity, tuple(labels), pres.note + " (eliminated)")
    return Elimination(out, solved, tuple(order))


def reduced_family(p: int, q: int, max_k: int | None = None) -> Elimination:
    """The family in (eps, s, e_2..e_p): divide by eps, then solve G_{pq-k}
    for f_k, k = 2..q.  Defines the same eps-saturated ring as (F)."""
    fam = family_divided_by_eps(build_F_family(p, q, max_k))
    return eliminate_linear(fam, _f_names(q))


def eliminate_f(pres: IdealPresentation, q: int) -> Elimination:
    """Solve the (e, f) presentation of O_{q/p} for f_2..f_q degree by degree."""
    return eliminate_linear(pres, _f_names(q))


# ---------------------------------------------------------------------------
# monomial curves
# ---------------------------------------------------------------------------


def toric_default_bound(generators) -> int:
    g = gaps(generators)
    return 2 * max(generators) + g.conductor


def _toric_context(gens):
    names, w = [], []
    for g in gens:
        for i in range(2, g + 1):
            names.append(f"c{g}_{i}")
            w.append(i)
    return VariableContext(tuple(names), tuple(w))


def _exponents_of_degree(gens, D):
    out = []

    def rec(k, rem, acc):
        if k == len(gens) - 1:
            if rem % gens[k] == 0:
                out.append(tuple(acc + [rem // gens[k]]))
            return
        for a in range(rem // gens[k] + 1):
            rec(k + 1, rem - a * gens[k], acc + [a])

    rec(0, D, [])
    return out


def build_toric_equations(generators, degree_bound: int | None = None,
                          max_weight: int | None = None) -> IdealPresentation:
    """Coefficient equations of prod phi(t^g)^{u_g} - prod phi(t^g)^{v_g} for
    exponent vectors of equal semigroup degree D <= degree_bound, where
    phi(t^g) = t^g + sum_{i>=2} c_{g,i} t^{g-i}.

    For each D only the pairs (u_0, u) with u_0 the first exponent vector
    are emitted; their differences span all pairs of degree D.
    ``max_weight`` keeps only coefficient equations of weighted degree
    <= max_weight (exact, since the coefficient of t^{D-k} has degree k)."""
    gens = tuple(sorted(generators))
    if not is_minimal_generating_set(gens):
        raise PresentationError(f"{generators} is not a minimal generating set")
    gaps(gens)  # coprimality check
    bound = toric_default_bound(gens) if degree_bound is None else degree_bound
    ctx = _toric_context(gens)
    tctx = VariableContext(ctx.names + ("t",), ctx.weight1 + (-1,))
    t = lambda k: SparsePoly.var(tctx, "t", k)
    phi = {}
    for g in gens:
        v = t(g)
        for i in range(2, g + 1):
            v = v + SparsePoly.var(tctx, f"c{g}_{i}") * t(g - i)
        phi[g] = v
    trunc = None
    if max_weight is not None:
        trunc = (list(ctx.weight1) + [0], max_weight)
    powers: dict = {}

    def pw(g, a):
        if (g, a) not in powers:
            powers[(g, a)] = SparsePoly.one(tctx) if a == 0 else poly_mul(pw(g, a - 1), phi[g], truncate=trunc)
        return powers[(g, a)]

    def image(u):
        v = SparsePoly.one(tctx)
        for g, a in zip(gens, u):
            if a:
                v = poly_mul(v, pw(g, a), truncate=trunc)
        return v

    gens_out, labels = [], []
    seen = set()
    for D in range(1, bound + 1):
        exps = _exponents_of_degree(gens, D)
        if len(exps) < 2:
            continue
        base = image(exps[0])
        for u in exps[1:]:
            diff = base - image(u)
            for k in range(1, D + 1):
                c = transfer(coeff_of(diff, "t", D - k), ctx) if diff else None
                if c and c not in seen:
                    seen.add(c)
                    gens_out.append(c)
                    labels.append(f"D{D}:{exps[0]}-{u}:k{k}")
    return IdealPresentation(ctx, tuple(gens_out), "graded", tuple(labels),
                             f"toric{gens}<= {bound}")


def toric_elimination_order(generators) -> list:
    """Variables of the larger generators first, so the smallest generator's
    coefficients survive."""
    gens = sorted(generators, reverse=True)
    return [f"c{g}_{i}" for g in gens for i in range(2, g + 1)]


# ---------------------------------------------------------------------------
# parabolic ideal
# ---------------------------------------------------------------------------


def dehomogenized_e_ideal(p: int, q: int) -> IdealPresentation:
    """Generators of the eps = 1, s = 1 ideal in e_2..e_p (not homogeneous).

    Dehomogenizing the saturation gives the same ideal as dehomogenizing
    the family itself, so no saturation is needed here."""
    elim = reduced_family(p, q)
    pres = elim.presentation
    ctx = VariableContext(tuple(_e_names(p)), tuple(range(2, p + 1)))
    return pres.substitute({"eps": 1, "s": 1}, ctx, "none")


def xi_context(p: int) -> VariableContext:
    return VariableContext(tuple(f"xi{k}" for k in range(1, p + 1)), (1,) * p)


def _elementary(polys):
    e = [SparsePoly.one(polys[0].ctx)]
    for v in polys:
        e = [e[0]] + [e[k] + v * e[k - 1] for k in range(1, len(e))] + [v * e[-1]]
    return e


def parabolic_arguments(p: int, i: int, ctx: VariableContext) -> list:
    """(xi_i, ..., xi_1, xi_p + p, ..., xi_{i+1} + p), translated by -(p-i)
    so that Sigma^{(i)} points map to balanced modules."""
    xs = [SparsePoly.var(ctx, f"xi{k}") for k in range(1, p + 1)]
    args = list(reversed(xs[:i])) + [x + p for x in reversed(xs[i:])]
    return [a - (p - i) for a in args]


def build_parabolic_ideal(p: int, q: int) -> IdealPresentation:
    """For each i: the eps = 1 ideal with e_j -> (1/p) c_j(arguments), plus
    the trace condition (1/p) c_1(arguments) = q(p-1)/2."""
    _check_pq(p, q)
    base = dehomogenized_e_ideal(p, q)
    ctx = xi_context(p)
    gens, labels = [], []
    for i in range(1, p + 1):
        es = _elementary(parabolic_arguments(p, i, ctx))
        mapping = {f"e{j}": es[j] / p for j in range(2, p + 1)}
        trace = es[1] / p - Fraction(q * (p - 1), 2)
        if trace:
            gens.append(trace)
            labels.append(f"i{i}:trace")
        for g, lab in zip(base.generators, base._labels()):
            img = g.subs(mapping, ctx)
            if img:
                gens.append(img)
                labels.append(f"i{i}:{lab}")
    return IdealPresentation(ctx, tuple(gens), "none", tuple(labels), f"parabolic({p},{q})")


# ---------------------------------------------------------------------------
# direct triangular solve of the family
# ---------------------------------------------------------------------------


def solved_family(p: int, q: int, max_k: int | None = None, eps_one: bool = False) -> Elimination:
    """Same ring as :func:`reduced_family`, computed without repeated
    substitution.

    With P(z) = prod_j A(z + j p s eps), the coefficient of z^{pq-k} in
    prod_i B(z + i q s eps) is p q eps f_k plus terms in f_{<k}; so f_k is
    read off from P degree by degree, and the remaining generators are the
    coefficients of P - prod_i B for k > q, divided by eps.

    ``eps_one`` sets eps = 1 from the start; the result then lives in
    Q[s, e_2..e_p] graded by s:1, e_i:i."""
    _check_pq(p, q)
    K = p * q if max_k is None else max_k
    en = _e_names(p)
    if eps_one:
        names = ("s",) + tuple(en)
        ctx = VariableContext(names, (1,) + tuple(range(2, p + 1)))
        zctx = VariableContext(names + ("z",), ctx.weight1 + (1,))
        w2 = list(ctx.weight1) + [0]
        eps = SparsePoly.one(zctx)
        homog = "graded"
    else:
        full = family_context(p, q)
        keep = [n for n in full.names if not n.startswith("f")]
        ctx = full.restrict(keep)
        zctx = VariableContext(ctx.names + ("z",), ctx.weight1 + (1,), ctx.weight2 + (1,))
        w2 = list(ctx.weight2) + [0]
        eps = SparsePoly.var(zctx, "eps")
        homog = "bigraded"
    s = SparsePoly.var(zctx, "s")
    acoef = {1: eps * s * Fraction(p * q * (p - 1), 2)}
    for i in range(2, p + 1):
        acoef[i] = eps * SparsePoly.var(zctx, f"e{i}") * p
    trunc = (w2, K)
    P = _shifted_product(zctx, acoef, p, q, s * eps * p, trunc)
    pq = p * q

    def zcoef(poly, k):
        return coeff_of(poly, "z", pq - k)

    f: dict = {1: s * Fraction(p * (q - 1), 2)}
    for k in range(2, q + 1):
        bcoef = {j: eps * f[j] * q for j in range(1, k)}
        for j in range(k, q + 1):
            bcoef[j] = SparsePoly.zero(zctx)
        partial = _shifted_product(zctx, bcoef, q, p, s * eps * q, (w2, k))
        num = zcoef(P, k) - zcoef(partial, k)
        f[k] = (divide_by_variable(num, "eps") if not eps_one else num) / pq
    bcoef = {j: eps * f[j] * q for j in range(1, q + 1)}
    Q = _shifted_product(zctx, bcoef, q, p, s * eps * q, trunc)
    gens, labels = [], []
    for k in range(1, K + 1):
        if k <= q:
            c = zcoef(P, k) - zcoef(Q, k)
            if c:
                raise AssertionError(f"f_{k} solve left residue in degree {k}")
            continue
        c = zcoef(P, k) - zcoef(Q, k)
        if not eps_one:
            c = divide_by_variable(c, "eps")
        g = transfer(c, ctx)
        if g:
            gens.append(g)
            labels.append(f"G{pq - k}")
    solved = {f"f{k}": transfer(f[k], ctx) for k in range(2, q + 1)}
    pres = IdealPresentation(ctx, tuple(gens), homog, tuple(labels),
                             f"family({p},{q}){' eps=1' if eps_one else ''}")
    return Elimination(pres, solved, tuple(f"f{k}" for k in range(2, q + 1)))
