"""Numerical semigroups, their modules, and the torus fixed-point sets.

A module over a numerical semigroup G is stored 0-normalized: a set D with
G ⊆ D ⊆ Z_{>=0}, 0 in D and D + G ⊆ D, given by the gaps of G it adjoins.
Placing it in Z is a separate integer shift (``sigma = D - shift``).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, reduce


class SemigroupError(ValueError):
    pass


@dataclass(frozen=True)
class NumericalSemigroup:
    generators: tuple
    gaps: tuple
    conductor: int

    @property
    def delta(self) -> int:
        return len(self.gaps)

    @property
    def frobenius(self) -> int:
        return self.conductor - 1

    @cached_property
    def _gapset(self) -> frozenset:
        return frozenset(self.gaps)

    def __contains__(self, n: int) -> bool:
        return n >= 0 and n not in self._gapset

    def elements(self, upto: int) -> list:
        return [n for n in range(upto + 1) if n in self]

    def to_json(self) -> dict:
        return {"generators": list(self.generators), "gaps": list(self.gaps),
                "conductor": self.conductor, "delta": self.delta}


def gaps(generators) -> NumericalSemigroup:
    """Sieve the gap set; the sieve stops at a run of min(generators)
    consecutive members, after which every integer is a member."""
    gens = tuple(sorted(set(int(g) for g in generators)))
    if not gens or gens[0] <= 0:
        raise SemigroupError("generators must be positive")
    if reduce(math.gcd, gens) != 1:
        raise SemigroupError(f"generators {gens} are not coprime")
    m = gens[0]
    member = [True]
    run = 1 if m == 1 else 0
    n = 0
    while run < m:
        n += 1
        ok = any(n - g >= 0 and member[n - g] for g in gens)
        member.append(ok)
        run = run + 1 if ok else 0
    conductor = n - m + 1
    gap_list = tuple(k for k in range(conductor) if not member[k])
    return NumericalSemigroup(gens, gap_list, conductor)


def minimal_generators(gens) -> tuple:
    """Drop generators that are sums of the others."""
    gens = sorted(set(gens))
    keep = []
    for g in gens:
        others = [h for h in gens if h < g]
        reach = {0}
        for n in range(1, g + 1):
            if any(n - h in reach for h in others):
                reach.add(n)
        if g not in reach:
            keep.append(g)
    return tuple(keep)


def is_minimal_generating_set(gens) -> bool:
    return minimal_generators(gens) == tuple(sorted(set(gens))) and len(set(gens)) == len(gens)


@dataclass(frozen=True)
class GammaModule:
    base: NumericalSemigroup
    adjoined_gaps: frozenset

    def __post_init__(self):
        object.__setattr__(self, "adjoined_gaps", frozenset(self.adjoined_gaps))
        if not self.adjoined_gaps <= frozenset(self.base.gaps):
            raise SemigroupError("adjoined elements must be gaps of the semigroup")
        for x in self.adjoined_gaps:
            for g in self.base.generators:
                if x + g not in self:
                    raise SemigroupError(f"not closed: {x}+{g} missing")

    def __contains__(self, n: int) -> bool:
        return n in self.base or n in self.adjoined_gaps

    @property
    def size(self) -> int:
        """Number of adjoined gaps."""
        return len(self.adjoined_gaps)

    def missing(self) -> tuple:
        return tuple(g for g in self.base.gaps if g not in self.adjoined_gaps)

    def sort_key(self):
        return (self.size, tuple(sorted(self.adjoined_gaps)))

    def to_json(self) -> dict:
        return {"adjoined": sorted(self.adjoined_gaps), "missing": list(self.missing())}


def enumerate_modules(gamma: NumericalSemigroup) -> list:
    """All 0-normalized modules.  Gaps are decided in ascending order; a gap
    h is forced in when some h - g (g a generator) is already in."""
    gap_list = gamma.gaps
    gens = gamma.generators
    out = []
    chosen: list = []

    def inside(n):
        return n in gamma or n in chosen_set

    chosen_set: set = set()

    def dfs(k):
        if k == len(gap_list):
            out.append(GammaModule(gamma, frozenset(chosen)))
            return
        h = gap_list[k]
        forced = any(h - g >= 0 and inside(h - g) for g in gens)
        chosen.append(h)
        chosen_set.add(h)
        dfs(k + 1)
        chosen.pop()
        chosen_set.discard(h)
        if not forced:
            dfs(k + 1)

    dfs(0)
    out.sort(key=GammaModule.sort_key)
    return out


@dataclass(frozen=True)
class ShiftedModule:
    """The subset ``sigma = module - shift`` of Z."""

    module: GammaModule
    shift: int

    def __contains__(self, n: int) -> bool:
        return (n + self.shift) in self.module

    @property
    def minimum(self) -> int:
        return -self.shift

    def elements(self, upto: int) -> list:
        return [n for n in range(self.minimum, upto + 1) if n in self]

    def difference_sets(self) -> tuple:
        """(sigma minus Gamma, Gamma minus sigma), computed element by element."""
        gam = self.module.base
        hi = max(gam.conductor, self.module.base.conductor - self.shift) + abs(self.shift) + 1
        lo = min(0, self.minimum)
        extra = tuple(n for n in range(lo, hi) if n in self and n not in gam)
        lacking = tuple(n for n in range(lo, hi) if n in gam and n not in self)
        return extra, lacking

    @property
    def defect(self) -> int:
        extra, lacking = self.difference_sets()
        return len(extra) - len(lacking)

    def translate(self, k: int) -> "ShiftedModule":
        """sigma + k."""
        return ShiftedModule(self.module, self.shift - k)

    def residue_basis(self, m: int) -> tuple:
        """Smallest element of sigma in each residue class mod m."""
        out = []
        for r in range(m):
            n = self.minimum + ((r - self.minimum) % m)
            while n not in self:
                n += m
            out.append(n)
        return tuple(out)

    def to_json(self) -> dict:
        d = self.module.to_json()
        d["shift"] = self.shift
        return d


@dataclass(frozen=True)
class BalancedModule(ShiftedModule):
    def __post_init__(self):
        if self.defect != 0:
            raise SemigroupError("module is not balanced at this shift")


@dataclass(frozen=True)
class PBasis:
    values: tuple
    modulus: int

    def __post_init__(self):
        for i, a in enumerate(self.values):
            if a % self.modulus != i:
                raise SemigroupError("basis element in the wrong residue class")

    @property
    def total(self) -> int:
        return sum(self.values)


def balance(delta: GammaModule) -> BalancedModule:
    """Place the module so that it is balanced.  The defect of D + c is
    |adjoined| - c, so c = |adjoined| is the unique balancing translate."""
    c = delta.size
    placed = BalancedModule(delta, -c)
    extra, lacking = placed.difference_sets()
    assert len(extra) == len(lacking)
    for other in (c - 1, c + 1):
        assert ShiftedModule(delta, -other).defect != 0
    return placed


def normalize(sigma: ShiftedModule) -> GammaModule:
    return sigma.module


def p_basis(sigma: ShiftedModule, p: int) -> PBasis:
    return PBasis(sigma.residue_basis(p), p)


def q_basis(sigma: ShiftedModule, q: int) -> PBasis:
    return PBasis(sigma.residue_basis(q), q)


def semigroup_pq(p: int, q: int) -> NumericalSemigroup:
    if math.gcd(p, q) != 1:
        raise SemigroupError(f"({p},{q}) not coprime")
    return gaps((p, q))


def enumerate_sigma(p: int, q: int) -> list:
    return [balance(d) for d in enumerate_modules(semigroup_pq(p, q))]


def enumerate_sigma_i(p: int, q: int, i: int) -> list:
    """Modules whose defect is -(p - i); sigma = D + |adjoined| + (p - i)."""
    if not 1 <= i <= p:
        raise ValueError("need 1 <= i <= p")
    out = []
    for d in enumerate_modules(semigroup_pq(p, q)):
        placed = ShiftedModule(d, -(d.size + p - i))
        out.append(placed)
    return out


def module_from_generators(gens, gamma: NumericalSemigroup) -> ShiftedModule:
    """The Gamma-module generated by ``gens``, as a placed module."""
    gens = list(gens)
    lo = min(gens)
    span = set()
    top = max(gens) - lo + gamma.conductor
    for n in range(0, top + 1):
        if any(n - (g - lo) >= 0 and (n - (g - lo)) in gamma for g in gens):
            span.add(n)
    adj = frozenset(n for n in span if n < gamma.conductor and n not in gamma)
    missing = [n for n in range(top + 1) if n in gamma and n not in span]
    if missing:
        raise SemigroupError("generated set does not contain the semigroup after normalization")
    return ShiftedModule(GammaModule(gamma, adj), -lo)


# ---------------------------------------------------------------------------
# flag tuples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlagTuple:
    d: tuple

    def to_json(self) -> list:
        return list(self.d)


def flag_normalization(p: int, q: int) -> int:
    """Sum of entries pinned so that the module generated by d is balanced."""
    return p * q * (p - 1) // 2


def chain_bases(d, p: int) -> list:
    """p-tuples (d_k..d_1, d_p+p..d_{k+1}+p) for k = 0..p."""
    d = tuple(d)
    out = []
    for k in range(p + 1):
        out.append(tuple(reversed(d[:k])) + tuple(x + p for x in reversed(d[k:])))
    return out


def _in_p_span(n: int, gens, p: int) -> bool:
    return any(n >= g and (n - g) % p == 0 for g in gens)


def satisfies_flag_conditions(d, p: int, q: int) -> bool:
    d = tuple(d)
    if len(d) != p or len({x % p for x in d}) != p:
        return False
    for i in range(1, p + 1):
        gens = list(reversed(d[: i - 1])) + [x + p for x in reversed(d[i - 1:])]
        if not _in_p_span(d[i - 1] + q, gens, p):
            return False
    return True


def enumerate_tilde_sigma(p: int, q: int) -> list:
    """Orderings of p-bases of balanced modules that satisfy the flag
    conditions; the module generated by a valid tuple is always balanced."""
    out = []
    for sigma in enumerate_sigma(p, q):
        basis = p_basis(sigma, p).values
        for perm in itertools.permutations(basis):
            if satisfies_flag_conditions(perm, p, q):
                out.append(FlagTuple(tuple(perm)))
    out.sort(key=lambda f: f.d)
    return out


def tilde_sigma_window(p: int, q: int) -> tuple:
    gam = semigroup_pq(p, q)
    return (-p * q, p * q + gam.conductor)


def tilde_sigma_by_window(p: int, q: int) -> list:
    """Exhaustive search of the box window; raises if a solution touches
    the window boundary."""
    lo, hi = tilde_sigma_window(p, q)
    target = flag_normalization(p, q)
    out = []
    rng = range(lo, hi + 1)
    for head in itertools.product(rng, repeat=p - 1):
        last = target - sum(head)
        if not lo <= last <= hi:
            continue
        d = head + (last,)
        if satisfies_flag_conditions(d, p, q):
            if any(x in (lo, hi) for x in d):
                raise SemigroupError(f"solution {d} touches the search window {lo, hi}")
            out.append(FlagTuple(d))
    out.sort(key=lambda f: f.d)
    return out


def flag_chain(t: FlagTuple, p: int, q: int) -> list:
    """Modules tau_0 ⊂ tau_1 ⊂ ... ⊂ tau_p with p-bases from chain_bases.
    tau_k lies in Sigma^{(k)} for k >= 1 and tau_0 = tau_p + p."""
    gam = semigroup_pq(p, q)
    return [module_from_generators(b, gam) for b in chain_bases(t.d, p)]
