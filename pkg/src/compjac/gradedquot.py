"""Degreewise linear algebra on graded and bigraded quotient rings.

Every piece S_d / I_d is computed exactly.  The ideal piece is the span of
the generators of degree d together with x * I_{d - deg x} for each variable
x, so pieces are built bottom-up and memoized (in memory and optionally on
disk, keyed by presentation hash and degree).

The ring R (the eps-torsion-free quotient of the family) is handled two
ways:

* bigraded: slot (a, b) of R is the image of eps^K on slot (a, b) of the
  unsaturated ring with a + K >= b.  Multiplication by eps is bijective from
  slot (A, b) to (A+1, b) once A >= b, because every monomial and every
  ideal element of such a bidegree is divisible by eps; so the kernel chain
  stops there, and the code also checks ker eps^K = ker eps^{K+1}.
* dehomogenized: R[1/eps] in bidegree (a, b) is the degree-b piece of
  R_{eps=1}, so slot (a, b) of R is the span of s^n * mu with
  w1(mu) <= a inside R_{eps=1}[b].  For b >= 2 delta multiplication by s is
  an isomorphism onto V = R_{eps=1,s=1}.
"""
from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .exactalg import (
    SparsePoly,
    VariableContext,
    primitive_integer_row,
    matrix_rank,
    rref,
    span_rank,
    sparse_kernel,
    subspace_ops,
)
from .oracles import catalan_count
from .presentations import (
    IdealPresentation,
    build_g_ideal,
    build_IO,
    build_toric_equations,
    eliminate_f,
    eliminate_linear,
    reduced_family,
    solved_family,
    toric_elimination_order,
)

CACHE_ENV = "COMPJAC_CACHE_DIR"


class StabilizationError(RuntimeError):
    """A colimit did not stabilize inside the supplied window."""


class NotHomogeneous(ValueError):
    pass


# ---------------------------------------------------------------------------
# disk cache
# ---------------------------------------------------------------------------


class DiskCache:
    """One JSON file per (presentation hash, degree), written atomically."""

    def __init__(self, root):
        self.root = Path(root)

    @classmethod
    def from_env(cls, explicit=None):
        root = explicit or os.environ.get(CACHE_ENV)
        return cls(root) if root else None

    def _path(self, key: str, degree) -> Path:
        deg = "_".join(str(d) for d in degree)
        return self.root / key[:2] / key / f"{deg}.json"

    def load(self, key: str, degree):
        path = self._path(key, degree)
        if not path.exists():
            return None
        with open(path) as fh:
            return json.load(fh)

    def store(self, key: str, degree, payload: dict) -> None:
        path = self._path(key, degree)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
        os.replace(tmp, path)


# ---------------------------------------------------------------------------
# graded quotient
# ---------------------------------------------------------------------------


@dataclass
class Piece:
    degree: tuple
    monomials: tuple
    index: dict
    pivots: tuple
    rows: list  # ideal rows in reduced form, keyed by column

    def __post_init__(self):
        pset = set(self.pivots)
        self.standard = tuple(c for c in range(len(self.monomials)) if c not in pset)
        self.std_pos = {c: k for k, c in enumerate(self.standard)}
        self.row_of = dict(zip(self.pivots, self.rows))

    @property
    def ambient_dim(self) -> int:
        return len(self.monomials)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def dim(self) -> int:
        return len(self.standard)

    def standard_monomials(self) -> list:
        return [self.monomials[c] for c in self.standard]

    def normal_form(self, vec) -> dict:
        """Quotient coordinates of an ambient vector {column: coefficient}."""
        out: dict = {}
        for c, x in vec.items():
            if not x:
                continue
            row = self.row_of.get(c)
            if row is None:
                k = self.std_pos[c]
                out[k] = out.get(k, 0) + x
            else:
                for cc, vv in row.items():
                    if cc != c:
                        k = self.std_pos[cc]
                        out[k] = out.get(k, 0) - x * vv
        return {k: v for k, v in out.items() if v}

    def monomial_nf(self, mono) -> dict:
        return self.normal_form({self.index[tuple(mono)]: Fraction(1)})

    def to_payload(self) -> dict:
        return {
            "pivots": list(self.pivots),
            "rows": [[[c, str(v)] for c, v in sorted(r.items())] for r in self.rows],
            "n": len(self.monomials),
        }


class GradedQuotient:
    """Quotient of a weighted polynomial ring by a homogeneous ideal."""

    def __init__(self, presentation: IdealPresentation, cache: DiskCache | None = None,
                 backend: str = "auto"):
        if presentation.homogeneity == "none":
            raise NotHomogeneous("degreewise computation needs a homogeneous presentation")
        presentation.audit_homogeneity()
        self.presentation = presentation
        self.ctx = presentation.context
        self.bigraded = presentation.homogeneity == "bigraded"
        self.cache = cache
        self.backend = backend
        self._key = presentation.content_hash()
        self._pieces: dict = {}
        self._gens_by_degree: dict = {}
        for g in presentation.generators:
            if g:
                self._gens_by_degree.setdefault(self._deg(g.degree()), []).append(g)
        if self.bigraded:
            self._weights = list(zip(self.ctx.weight1, self.ctx.weight2))
        else:
            self._weights = [(w,) for w in self.ctx.weight1]

    def _deg(self, d) -> tuple:
        return tuple(d) if isinstance(d, tuple) else (d,)

    @property
    def key(self) -> str:
        return self._key

    def _ctx_degree(self, d: tuple):
        return d if self.bigraded else d[0]

    def piece(self, degree) -> Piece:
        d = self._deg(degree)
        if d in self._pieces:
            return self._pieces[d]
        # build lower pieces first (iteratively, to avoid deep recursion)
        stack = [d]
        order = []
        seen = set()
        while stack:
            cur = stack.pop()
            if cur in seen or cur in self._pieces:
                continue
            seen.add(cur)
            order.append(cur)
            for w in self._weights:
                lower = tuple(a - b for a, b in zip(cur, w))
                if all(x >= 0 for x in lower) and lower not in self._pieces:
                    stack.append(lower)
        order.sort(key=lambda t: (sum(t), t))
        for cur in order:
            if cur not in self._pieces:
                self._pieces[cur] = self._compute_piece(cur)
        return self._pieces[d]

    def _compute_piece(self, d: tuple) -> Piece:
        monos = self.ctx.monomials_of_degree(self._ctx_degree(d))
        index = {m: i for i, m in enumerate(monos)}
        if self.cache is not None:
            payload = self.cache.load(self._key, d)
            if payload is not None and payload.get("n") == len(monos):
                rows = [{c: Fraction(v) for c, v in r} for r in payload["rows"]]
                return Piece(d, monos, index, tuple(payload["pivots"]), rows)
        vectors = []
        for g in self._gens_by_degree.get(d, ()):
            vectors.append({index[m]: c for m, c in g.terms.items()})
        for k, w in enumerate(self._weights):
            lower = tuple(a - b for a, b in zip(d, w))
            if any(x < 0 for x in lower):
                continue
            lp = self._pieces[lower]
            if not lp.rows:
                continue
            shift = [0] * self.ctx.nvars
            shift[k] = 1
            col_map = [index[tuple(a + b for a, b in zip(m, shift))] for m in lp.monomials]
            for r in lp.rows:
                vectors.append({col_map[c]: v for c, v in r.items()})
        pivots, rows = rref(vectors, len(monos), self.backend)
        piece = Piece(d, monos, index, tuple(pivots), rows)
        if self.cache is not None:
            self.cache.store(self._key, d, piece.to_payload())
        return piece

    def dim(self, degree) -> int:
        return self.piece(degree).dim

    def normal_form(self, poly: SparsePoly) -> dict:
        if not poly:
            return {}
        pc = self.piece(self._deg(poly.degree()))
        return pc.normal_form({pc.index[m]: c for m, c in poly.terms.items()})


class MacaulayRanks:
    """Ranks of ideal pieces of a graded presentation, built directly from
    the multiplier rows m * g and never reduced.

    The reduced echelon form of a piece stores every monomial's normal form,
    whose coefficients grow with the degree; ranks need none of that.  A
    column filter restricts the ambient monomials, which is how spans of
    monomials modulo the ideal are measured:
    dim span(M) mod I_b = |M| + rank(I_b on the other columns) - rank(I_b)."""

    def __init__(self, presentation: IdealPresentation, cache: DiskCache | None = None,
                 backend: str = "auto"):
        if presentation.homogeneity != "graded":
            raise NotHomogeneous("Macaulay ranks need a singly graded presentation")
        presentation.audit_homogeneity()
        self.presentation = presentation
        self.ctx = presentation.context
        self.cache = cache
        self.backend = backend
        self._key = presentation.content_hash()
        self._gens = []
        for g in presentation.generators:
            if g:
                self._gens.append((g.degree(), list(primitive_integer_row(g.terms).items())))
        self._ranks: dict = {}

    def rank(self, b: int, keep=None, tag: str = "all") -> int:
        """Rank of I_b restricted to the monomials accepted by ``keep``;
        ``tag`` names the filter in the cache."""
        ck = (b, tag)
        if ck in self._ranks:
            return self._ranks[ck]
        slot = ("rank", b, tag)
        if self.cache is not None:
            payload = self.cache.load(self._key, slot)
            if payload is not None:
                self._ranks[ck] = payload["rank"]
                return payload["rank"]
        monos = [m for m in self.ctx.monomials_of_degree(b) if keep is None or keep(m)]
        index = {m: i for i, m in enumerate(monos)}
        rows = []
        for d, terms in self._gens:
            if d > b:
                continue
            for m in self.ctx.monomials_of_degree(b - d):
                row = {}
                for t, v in terms:
                    c = index.get(tuple(x + y for x, y in zip(t, m)))
                    if c is not None:
                        row[c] = v
                if row:
                    rows.append(row)
        r = matrix_rank(rows, len(monos), self.backend) if monos else 0
        self._ranks[ck] = r
        if self.cache is not None:
            self.cache.store(self._key, slot, {"rank": r, "ncols": len(monos)})
        return r

    def count(self, b: int, keep=None) -> int:
        return sum(1 for m in self.ctx.monomials_of_degree(b) if keep is None or keep(m))

    def dim(self, b: int) -> int:
        return self.count(b) - self.rank(b)

    def span_dim(self, b: int, inside, tag: str) -> int:
        """dim of the span of the monomials accepted by ``inside`` in S_b / I_b."""
        outside = lambda m: not inside(m)
        return self.count(b, inside) + self.rank(b, outside, "not-" + tag) - self.rank(b)


def hilbert_function(q: GradedQuotient, up_to: int) -> list:
    if q.bigraded:
        raise NotHomogeneous("hilbert_function expects a singly graded quotient")
    return [q.dim(d) for d in range(up_to + 1)]


def artinian_hilbert_function(q: GradedQuotient, max_degree: int = 400) -> tuple:
    """Hilbert function up to the last nonzero degree, certified by a run of
    max-weight consecutive zero degrees (every higher monomial is a
    multiple of one in the run)."""
    wmax = max(q.ctx.weight1)
    dims = []
    zeros = 0
    d = 0
    while zeros < wmax:
        if d > max_degree:
            raise StabilizationError(f"quotient not zero below degree {max_degree}")
        v = q.dim(d)
        dims.append(v)
        zeros = zeros + 1 if v == 0 else 0
        d += 1
    while dims and dims[-1] == 0:
        dims.pop()
    return dims, {"zero_run_start": len(dims), "zero_run_length": wmax}


# ---------------------------------------------------------------------------
# O_{q/p} by three routes
# ---------------------------------------------------------------------------


def o_presentation(p: int, q: int, route: str = "g") -> IdealPresentation:
    if route == "g":
        return build_g_ideal(p, q)
    if route == "IO":
        return eliminate_f(build_IO(p, q), q).presentation
    if route == "IO-full":
        return build_IO(p, q)
    if route == "toric":
        return toric_o_presentation((p, q))
    raise ValueError(f"unknown route {route!r}")


def toric_o_presentation(generators, degree_bound=None, max_weight=None) -> IdealPresentation:
    pres = build_toric_equations(generators, degree_bound, max_weight)
    return eliminate_linear(pres, toric_elimination_order(generators)).presentation


def o_quotient(p: int, q: int, route: str = "g", cache=None) -> GradedQuotient:
    return GradedQuotient(o_presentation(p, q, route), cache)


# ---------------------------------------------------------------------------
# m-adic filtration of a graded Artinian quotient
# ---------------------------------------------------------------------------


def _order_rank_table(q: GradedQuotient, top: int) -> dict:
    """r[(i, j)] = dim of the image of monomials of degree j and order >= i."""
    r = {}
    for j in range(top + 1):
        pc = q.piece(j)
        by_order: dict = {}
        for m in pc.monomials:
            by_order.setdefault(sum(m), []).append(m)
        max_order = max(by_order) if by_order else 0
        for i in range(0, max_order + 2):
            vecs = [pc.monomial_nf(m) for o, ms in by_order.items() if o >= i for m in ms]
            r[(i, j)] = len(rref(vecs, pc.dim)[0]) if pc.dim else 0
    return r


def gr_m_filtration(q: GradedQuotient, top: int | None = None) -> list:
    """dim (m^i + I)/(m^{i+1} + I) for i = 0, 1, ..."""
    if top is None:
        top = len(artinian_hilbert_function(q)[0]) - 1
    r = _order_rank_table(q, top)
    out = []
    i = 0
    while True:
        total = sum(r.get((i, j), 0) - r.get((i + 1, j), 0) for j in range(top + 1))
        if i > 0 and all(r.get((i, j), 0) == 0 for j in range(top + 1)):
            break
        out.append(total)
        i += 1
    while out and out[-1] == 0:
        out.pop()
    return out


def m_power_dims(q: GradedQuotient, top: int) -> dict:
    """dim(m^i ∩ O[j]) for the containment audit."""
    return _order_rank_table(q, top)


# ---------------------------------------------------------------------------
# the family and its eps = 1 specialization
# ---------------------------------------------------------------------------


def _delta(p, q):
    return (p - 1) * (q - 1) // 2


def reduced_family_presentation(p: int, q: int, max_k: int | None = None) -> IdealPresentation:
    return reduced_family(p, q, max_k).presentation


def eps1_presentation(p: int, q: int, max_degree: int) -> IdealPresentation:
    """R_{eps=1} in Q[s, e_2..e_p] graded by s:1, e_i:i; generators up to max_degree."""
    return solved_family(p, q, max_k=max_degree, eps_one=True).presentation


def eps1_s0_presentation(p: int, q: int) -> IdealPresentation:
    fam = reduced_family_presentation(p, q)
    ctx = VariableContext(tuple(f"e{i}" for i in range(2, p + 1)), tuple(range(2, p + 1)))
    return fam.substitute({"eps": 1, "s": 0}, ctx, "graded")


def _e_exponents(p: int, max_w1=None, max_w2=None) -> list:
    """Exponent vectors of e_2..e_p with w1 = sum (i-1)a_i, w2 = sum i a_i bounded."""
    out = []
    k = p - 1

    def rec(i, acc, w1, w2):
        if i == k:
            out.append(tuple(acc))
            return
        a = 0
        while True:
            nw1, nw2 = w1 + a * (i + 1), w2 + a * (i + 2)
            if (max_w1 is not None and nw1 > max_w1) or (max_w2 is not None and nw2 > max_w2):
                break
            rec(i + 1, acc + [a], nw1, nw2)
            a += 1

    rec(0, [], 0, 0)
    return out


def _w1(mu):
    return sum((i + 1) * a for i, a in enumerate(mu))


def _w2(mu):
    return sum((i + 2) * a for i, a in enumerate(mu))


@dataclass
class StableSpace:
    """V = R_{eps=1}[B] with the images of s^{B - w2(mu)} mu for every
    e-monomial mu with w2(mu) <= B."""

    p: int
    q: int
    B: int
    quotient: GradedQuotient
    vectors: dict  # mu -> dense vector in quotient coordinates
    dim: int
    certificate: dict

    def span(self, max_w1=None, max_w2=None) -> list:
        return [self.vectors[mu] for mu in sorted(self.vectors)
                if (max_w1 is None or _w1(mu) <= max_w1) and (max_w2 is None or _w2(mu) <= max_w2)]

    def rank(self, max_w1=None, max_w2=None) -> int:
        vecs = self.span(max_w1, max_w2)
        return span_rank(vecs, self.dim) if vecs else 0


def stable_space(p: int, q: int, B: int | None = None, cache=None) -> StableSpace:
    delta = _delta(p, q)
    B = 2 * delta + 2 if B is None else B
    if B < 2 * delta:
        raise StabilizationError(f"B={B} below 2*delta={2 * delta}; use B >= {2 * delta}")
    gq = GradedQuotient(eps1_presentation(p, q, B + 2), cache)
    pc = gq.piece(B)
    nxt = gq.piece(B + 1)
    # s is injective B -> B+1 and dims agree: the colimit has been reached
    s_images = []
    for c in pc.standard:
        m = pc.monomials[c]
        s_images.append(nxt.monomial_nf((m[0] + 1,) + m[1:]))
    s_rank = len(rref(s_images, nxt.dim)[0]) if s_images else 0
    expected = catalan_count(p, q)
    cert = {"B": B, "dim_B": pc.dim, "dim_B_plus_1": nxt.dim, "s_rank": s_rank,
            "expected": expected}
    if not (pc.dim == nxt.dim == s_rank):
        raise StabilizationError(f"R_eps=1 not stable at B={B}: {cert}; try B={B + 2}")
    vectors = {}
    for mu in _e_exponents(p, None, B):
        mono = (B - _w2(mu),) + tuple(mu)
        nf = pc.monomial_nf(mono)
        vec = [Fraction(0)] * pc.dim
        for k, v in nf.items():
            vec[k] = v
        vectors[tuple(mu)] = vec
    return StableSpace(p, q, B, gq, vectors, pc.dim, cert)


@dataclass
class BettiVector:
    values: list
    certificate: dict = field(default_factory=dict)

    def check(self, p: int, q: int) -> None:
        if sum(self.values) != catalan_count(p, q):
            raise AssertionError("Betti numbers do not sum to the fixed-point count")
        if self.values[0] != 1 or self.values[-1] < 1 or min(self.values) < 0:
            raise AssertionError(f"implausible Betti vector {self.values}")


def betti_J(p: int, q: int, B: int | None = None, cache=None, space: StableSpace | None = None,
            method: str = "ranks") -> BettiVector:
    """b_{2a} = dim aR_inf - dim (a-1)R_inf.

    ``method="ranks"`` measures aR_b as the span of {s^n mu : w1(mu) <= a}
    in R_{eps=1}[b] with b = 2a (every such monomial already lives there)
    and certifies the value at b = 2a + 1.  ``method="space"`` reads the
    same ranks off the stable space V = R_{eps=1}[B]."""
    if method == "space" or space is not None:
        return _betti_from_space(space or stable_space(p, q, B, cache))
    if method != "ranks":
        raise ValueError(f"unknown method {method!r}")
    delta = _delta(p, q)
    top = 2 * delta if B is None else B
    if top < 2 * delta:
        raise StabilizationError(f"B={top} below 2*delta={2 * delta}")
    mr = MacaulayRanks(eps1_presentation(p, q, top + 1), cache)
    ranks, trace = [], []
    for a in range(delta + 1):
        inside = lambda m, a=a: _w1(m[1:]) <= a
        here = [mr.span_dim(b, inside, f"w1le{a}") for b in (2 * a, 2 * a + 1)]
        trace.append(here)
        if here[0] != here[1]:
            raise StabilizationError(f"slot a={a} not stable between b={2 * a} and {2 * a + 1}: {here}")
        ranks.append(here[0])
    ring = [mr.dim(b) for b in range(top + 2)]
    s_image = [mr.span_dim(b + 1, lambda m: m[0] > 0, "s") for b in range(top + 1)]
    if s_image != ring[:-1]:
        raise StabilizationError("multiplication by s is not injective on R_eps=1 below the bound")
    if not (ring[top] == ring[top + 1] == ranks[-1]):
        raise StabilizationError(f"R_eps=1 not exhausted at B={top}: {ring[top:]} vs {ranks[-1]}")
    diffs = [ranks[0]] + [ranks[a] - ranks[a - 1] for a in range(1, delta + 1)]
    if any(x < 0 for x in diffs):
        raise AssertionError("negative Betti difference")
    cert = {"method": "ranks", "B": top, "cumulative": ranks, "slot_pairs": trace,
            "ring_dims": ring, "presentation": mr.presentation.content_hash()}
    bv = BettiVector(diffs, cert)
    bv.check(p, q)
    return bv


def _betti_from_space(sp: StableSpace) -> BettiVector:
    delta = _delta(sp.p, sp.q)
    ranks = [sp.rank(max_w1=a) for a in range(delta + 1)]
    diffs = [ranks[0]] + [ranks[a] - ranks[a - 1] for a in range(1, delta + 1)]
    if any(x < 0 for x in diffs):
        raise AssertionError("negative Betti difference")
    if ranks[-1] != sp.dim:
        raise StabilizationError("F^eps_{<=delta} does not exhaust V")
    bv = BettiVector(diffs, {"method": "space", "stable_space": sp.certificate, "cumulative": ranks})
    bv.check(sp.p, sp.q)
    return bv


@dataclass
class FiltrationTable:
    p: int
    q: int
    dims: dict  # (i, j) -> dimension, zeros omitted
    cumulative: dict = field(default_factory=dict, repr=False)

    @property
    def delta(self) -> int:
        return _delta(self.p, self.q)

    def get(self, i, j) -> int:
        return self.dims.get((i, j), 0)

    def row_sums(self) -> list:
        return [sum(self.get(i, j) for j in range(2 * self.delta + 1)) for i in range(self.delta + 1)]

    def col_sums(self) -> list:
        return [sum(self.get(i, j) for i in range(self.delta + 1)) for j in range(2 * self.delta + 1)]

    def support_ok(self) -> bool:
        return all(i <= j <= 2 * i for (i, j), v in self.dims.items() if v)

    def lefschetz_ok(self) -> bool:
        d = self.delta
        return all(self.get(i, j) == self.get(d - j + i, 2 * d - j) for (i, j) in self.dims)

    def to_json(self) -> dict:
        return {"entries": [[i, j, v] for (i, j), v in sorted(self.dims.items())],
                "row_sums": self.row_sums(), "col_sums": self.col_sums()}


def filtration_table(p: int, q: int, B: int | None = None, cache=None,
                     space: StableSpace | None = None) -> FiltrationTable:
    """dims(i, j) by inclusion-exclusion over d(i, j) = dim(F^eps_{<=i} ∩ F^s_{<=j})."""
    sp = space or stable_space(p, q, B, cache)
    delta = _delta(p, q)
    top = 2 * delta
    d = {}
    for i in range(-1, top + 1):
        for j in range(-1, top + 1):
            if i < 0 or j < 0:
                d[(i, j)] = 0
                continue
            U = sp.span(max_w1=i)
            W = sp.span(max_w2=j)
            d[(i, j)] = subspace_ops(U, W, sp.dim).dim_intersection if U and W else 0
    dims = {}
    for i in range(top + 1):
        for j in range(top + 1):
            v = d[(i, j)] - d[(i - 1, j)] - d[(i, j - 1)] + d[(i - 1, j - 1)]
            if v < 0:
                raise AssertionError("negative graded piece")
            if v:
                dims[(i, j)] = v
    return FiltrationTable(p, q, dims, d)


# ---------------------------------------------------------------------------
# bigraded route and saturation
# ---------------------------------------------------------------------------


def family_quotient(p: int, q: int, max_k: int | None = None, reduced: bool = True,
                    cache=None) -> GradedQuotient:
    if reduced:
        pres = reduced_family_presentation(p, q, max_k)
    else:
        from .presentations import build_F_family
        pres = build_F_family(p, q, max_k).nonzero()
    return GradedQuotient(pres, cache)


def _eps_power_rank(gq: GradedQuotient, a: int, b: int, K: int) -> int:
    src = gq.piece((a, b))
    if src.dim == 0:
        return 0
    dst = gq.piece((a + K, b))
    eps = gq.ctx.index("eps")
    vecs = []
    for c in src.standard:
        m = list(src.monomials[c])
        m[eps] += K
        vecs.append(dst.monomial_nf(tuple(m)))
    return len(rref(vecs, dst.dim)[0]) if dst.dim else 0


def saturate_and_dims(gq: GradedQuotient, window) -> dict:
    """dim of slot (a, b) of the eps-saturation for 0 <= a <= A, 0 <= b <= Bw.

    The slot is the image of eps^K with K = max(b - a, 0) + 1; the rank of
    eps^{K+1} must agree (kernel chain has stopped)."""
    if not gq.bigraded:
        raise NotHomogeneous("saturation needs a bigraded quotient")
    A, Bw = window
    out = {}
    for a in range(A + 1):
        for b in range(Bw + 1):
            K = max(b - a, 0) + 1
            r1 = _eps_power_rank(gq, a, b, K)
            r2 = _eps_power_rank(gq, a, b, K + 1)
            if r1 != r2:
                raise StabilizationError(f"eps-kernel still growing at slot {(a, b)}; enlarge K")
            out[(a, b)] = r1
    return out


def saturated_presentation(gq: GradedQuotient, window) -> IdealPresentation:
    """Generators of the saturated ideal in the window: kernel elements of
    eps^K on each slot, together with the original generators."""
    A, Bw = window
    eps = gq.ctx.index("eps")
    extra = []
    for a in range(A + 1):
        for b in range(Bw + 1):
            src = gq.piece((a, b))
            if src.dim == 0:
                continue
            K = max(b - a, 0) + 1
            dst = gq.piece((a + K, b))
            cols = []
            for c in src.standard:
                m = list(src.monomials[c])
                m[eps] += K
                cols.append(dst.monomial_nf(tuple(m)))
            rows = [dict() for _ in range(dst.dim)]
            for j, col in enumerate(cols):
                for k, v in col.items():
                    rows[k][j] = v
            for kv in sparse_kernel(rows, len(cols)) if dst.dim else [
                    [Fraction(int(i == j)) for i in range(len(cols))] for j in range(len(cols))]:
                terms = {src.monomials[c]: v for c, v in zip(src.standard, kv) if v}
                extra.append(SparsePoly(gq.ctx, terms))
    gens = tuple(gq.presentation.generators) + tuple(extra)
    return IdealPresentation(gq.ctx, gens, "bigraded", (), gq.presentation.note + " saturated")


# ---------------------------------------------------------------------------
# flatness probe
# ---------------------------------------------------------------------------


@dataclass
class FlatnessProbe:
    p: int
    q: int
    window: tuple
    slots: dict  # (a, b) -> (dim aR_b, dim image-intersection)
    strict: list

    def to_json(self) -> dict:
        return {"window": list(self.window),
                "slots": [[a, b, x, y] for (a, b), (x, y) in sorted(self.slots.items())],
                "strict_slots": [list(s) for s in self.strict]}


def flatness_probe(p: int, q: int, window=None, cache=None, B: int | None = None) -> FlatnessProbe:
    """Compare dim aR_b (bigraded saturation) with dim(F^eps_{<=a} ∩ F^s_{<=b})
    in V.  A strict slot means aR_b is smaller than the intersection."""
    delta = _delta(p, q)
    if window is None:
        window = (2 * delta + 2, 2 * delta + 2)
    A, Bw = window
    gq = family_quotient(p, q, max_k=A + Bw + 4, cache=cache)
    slots_R = saturate_and_dims(gq, (A, Bw))
    sp = stable_space(p, q, B, cache)
    slots = {}
    strict = []
    for a in range(A + 1):
        for b in range(Bw + 1):
            U = sp.span(max_w1=a)
            W = sp.span(max_w2=b)
            inter = subspace_ops(U, W, sp.dim).dim_intersection if U and W else 0
            x = slots_R[(a, b)]
            slots[(a, b)] = (x, inter)
            if x > inter:
                raise AssertionError(f"slot {(a, b)} larger than the intersection: impossible")
            if x < inter:
                strict.append((a, b))
    return FlatnessProbe(p, q, tuple(window), slots, strict)
