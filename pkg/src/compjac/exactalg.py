"""Exact arithmetic layer: rationals, weighted sparse polynomials, and exact
linear algebra over Q.

Rationals are :class:`fractions.Fraction` (always stored in lowest terms).
Polynomials are immutable maps from exponent tuples to nonzero rationals,
bound to a :class:`VariableContext` that fixes variable names and one or two
integer weight vectors.

Row reduction is done by fraction-free integer elimination.  Large systems
may optionally be handed to FLINT (``python-flint``); since the reduced row
echelon form of a row space is unique, both backends return identical
results.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

try:  # optional accelerated backend
    import flint as _flint
except ImportError:  # pragma: no cover - exercised only without flint
    _flint = None

Rational = Fraction
Monomial = tuple
Number = Union[int, Fraction]


class ContextMismatch(ValueError):
    """Raised when polynomials from different variable contexts are combined."""


class AmbientMismatch(ValueError):
    """Raised when spans live in spaces of different dimension."""


# ---------------------------------------------------------------------------
# variable contexts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VariableContext:
    """Variable names with fixed integer weights.

    ``weight2`` is given for bigraded rings.  The degree of a monomial is the
    dot product of its exponents with the weights (a pair when bigraded).
    """

    names: tuple
    weight1: tuple
    weight2: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "weight1", tuple(int(w) for w in self.weight1))
        if self.weight2 is not None:
            object.__setattr__(self, "weight2", tuple(int(w) for w in self.weight2))
            if len(self.weight2) != len(self.names):
                raise ValueError("weight2 length differs from variable count")
        if len(self.weight1) != len(self.names):
            raise ValueError("weight1 length differs from variable count")
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")

    @property
    def nvars(self) -> int:
        return len(self.names)

    @property
    def bigraded(self) -> bool:
        return self.weight2 is not None

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"variable {name!r} not in context {self.names}") from None

    def degree(self, mono: Sequence[int]):
        d1 = sum(e * w for e, w in zip(mono, self.weight1))
        if self.weight2 is None:
            return d1
        return (d1, sum(e * w for e, w in zip(mono, self.weight2)))

    def total_weight(self) -> tuple:
        """Per-variable positive weight used to bound enumerations."""
        if self.weight2 is None:
            return self.weight1
        return tuple(a + b for a, b in zip(self.weight1, self.weight2))

    def monomials_of_degree(self, deg) -> tuple:
        """All monomials of the given (bi)degree in descending lex order."""
        return _monomials(self, deg)

    def restrict(self, keep: Iterable[str]) -> "VariableContext":
        keep = set(keep)
        idx = [i for i, n in enumerate(self.names) if n in keep]
        return VariableContext(
            tuple(self.names[i] for i in idx),
            tuple(self.weight1[i] for i in idx),
            None if self.weight2 is None else tuple(self.weight2[i] for i in idx),
        )

    def to_json(self) -> dict:
        return {
            "names": list(self.names),
            "weight1": list(self.weight1),
            "weight2": None if self.weight2 is None else list(self.weight2),
        }


@lru_cache(maxsize=4096)
def _monomials(ctx: VariableContext, deg) -> tuple:
    n = ctx.nvars
    if ctx.weight2 is None:
        target = (int(deg),)
        weights = [(w,) for w in ctx.weight1]
    else:
        target = (int(deg[0]), int(deg[1]))
        weights = list(zip(ctx.weight1, ctx.weight2))
    if any(t < 0 for t in target):
        return ()
    for w in weights:
        if all(x <= 0 for x in w):
            raise ValueError("monomial enumeration needs a positive weight on every variable")
    out = []
    exps = [0] * n

    def rec(i, rem):
        if i == n:
            if all(r == 0 for r in rem):
                out.append(tuple(exps))
            return
        w = weights[i]
        k = 0
        cur = rem
        while all(c >= 0 for c in cur):
            exps[i] = k
            rec(i + 1, cur)
            k += 1
            cur = tuple(c - x for c, x in zip(cur, w))
        exps[i] = 0

    rec(0, target)
    out.sort(reverse=True)
    return tuple(out)


# ---------------------------------------------------------------------------
# sparse polynomials
# ---------------------------------------------------------------------------


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class SparsePoly:
    """Immutable multivariate polynomial with rational coefficients."""

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: VariableContext, terms: Mapping | None = None):
        self.ctx = ctx
        clean = {}
        if terms:
            n = ctx.nvars
            for m, c in terms.items():
                if c:
                    m = tuple(m)
                    if len(m) != n:
                        raise ValueError("monomial length differs from variable count")
                    clean[m] = _q(c)
        self.terms = clean
        self._hash = None

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, ctx):
        return cls(ctx)

    @classmethod
    def const(cls, ctx, c):
        return cls(ctx, {(0,) * ctx.nvars: c})

    @classmethod
    def one(cls, ctx):
        return cls.const(ctx, 1)

    @classmethod
    def var(cls, ctx, name, power=1):
        e = [0] * ctx.nvars
        e[ctx.index(name)] = power
        return cls(ctx, {tuple(e): 1})

    @classmethod
    def monomial(cls, ctx, mono, c=1):
        return cls(ctx, {tuple(mono): c})

    # basic protocol ------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, SparsePoly):
            return self.ctx == other.ctx and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == SparsePoly.const(self.ctx, other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx, frozenset(self.terms.items())))
        return self._hash

    def __len__(self):
        return len(self.terms)

    def _coerce(self, other) -> "SparsePoly":
        if isinstance(other, SparsePoly):
            if other.ctx != self.ctx:
                raise ContextMismatch(f"{self.ctx.names} vs {other.ctx.names}")
            return other
        if isinstance(other, (int, Fraction)):
            return SparsePoly.const(self.ctx, other)
        raise TypeError(f"cannot combine SparsePoly with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            v = t.get(m, 0) + c
            if v:
                t[m] = v
            else:
                t.pop(m, None)
        return SparsePoly(self.ctx, t)

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly(self.ctx, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return SparsePoly(self.ctx)
            return SparsePoly(self.ctx, {m: c * other for m, c in self.terms.items()})
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, c):
        c = _q(c)
        return SparsePoly(self.ctx, {m: v / c for m, v in self.terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = SparsePoly.one(self.ctx)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __repr__(self):
        return f"SparsePoly({self.to_str()})"

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (self.ctx.degree(m), m)):
            c = self.terms[m]
            mon = "*".join(
                n if e == 1 else f"{n}^{e}" for n, e in zip(self.ctx.names, m) if e
            )
            if not mon:
                parts.append(str(c))
            elif c == 1:
                parts.append(mon)
            elif c == -1:
                parts.append("-" + mon)
            else:
                parts.append(f"({c})*{mon}")
        return " + ".join(parts)

    # structure ------------------------------------------------------------
    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.ctx.nvars, Fraction(0))

    def degrees(self) -> set:
        return {self.ctx.degree(m) for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self):
        """The (bi)degree of a nonzero homogeneous polynomial."""
        ds = self.degrees()
        if len(ds) != 1:
            raise ValueError("degree of a zero or inhomogeneous polynomial")
        return next(iter(ds))

    def variables(self) -> set:
        used = set()
        for m in self.terms:
            used.update(i for i, e in enumerate(m) if e)
        return {self.ctx.names[i] for i in used}

    def order(self) -> int:
        """Smallest total (unweighted) exponent among the terms."""
        if not self.terms:
            raise ValueError("order of zero")
        return min(sum(m) for m in self.terms)

    def truncate(self, weights: Sequence[int], bound: int) -> "SparsePoly":
        return SparsePoly(
            self.ctx,
            {m: c for m, c in self.terms.items() if _dot(m, weights) <= bound},
        )

    def evaluate(self, values: Mapping[str, Number]) -> Fraction:
        vals = [_q(values[n]) for n in self.ctx.names]
        total = Fraction(0)
        for m, c in self.terms.items():
            t = c
            for v, e in zip(vals, m):
                if e:
                    t *= v**e
            total += t
        return total

    def subs(self, mapping: Mapping[str, object], target: VariableContext | None = None,
             truncate: tuple | None = None) -> "SparsePoly":
        """Substitute polynomials or numbers for variables.

        Variables not in ``mapping`` are carried over by name into ``target``
        (default: own context).  ``truncate=(weights, bound)`` drops terms of
        ``target``-weight above ``bound`` during expansion.
        """
        target = target or self.ctx
        images = []
        for n in self.ctx.names:
            if n in mapping:
                v = mapping[n]
                if isinstance(v, SparsePoly):
                    if v.ctx != target:
                        raise ContextMismatch(f"image of {n} lives in another context")
                else:
                    v = SparsePoly.const(target, v)
            else:
                v = SparsePoly.var(target, n)
            images.append(v)
        cache: dict = {}

        def power(i, e):
            key = (i, e)
            if key not in cache:
                if e == 1:
                    cache[key] = images[i]
                else:
                    cache[key] = poly_mul(power(i, e - 1), images[i], truncate=truncate)
            return cache[key]

        acc: dict = {}
        for m, c in self.terms.items():
            term = SparsePoly.const(target, c)
            for i, e in enumerate(m):
                if e:
                    term = poly_mul(term, power(i, e), truncate=truncate)
                    if not term:
                        break
            for mm, cc in term.terms.items():
                v = acc.get(mm, 0) + cc
                if v:
                    acc[mm] = v
                else:
                    acc.pop(mm, None)
        return SparsePoly(target, acc)

    def to_json(self) -> list:
        return [[list(m), str(self.terms[m])] for m in sorted(self.terms)]

    @classmethod
    def from_json(cls, ctx, data) -> "SparsePoly":
        return cls(ctx, {tuple(m): Fraction(c) for m, c in data})


def _dot(m, w) -> int:
    return sum(a * b for a, b in zip(m, w))


def poly_mul(a: SparsePoly, b: SparsePoly, truncate: tuple | None = None) -> SparsePoly:
    """Exact product; ``truncate=(weights, bound)`` drops heavier terms."""
    if a.ctx != b.ctx:
        raise ContextMismatch(f"{a.ctx.names} vs {b.ctx.names}")
    acc: dict = {}
    if truncate is None:
        for m1, c1 in a.terms.items():
            for m2, c2 in b.terms.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                v = acc.get(m, 0) + c1 * c2
                if v:
                    acc[m] = v
                else:
                    del acc[m]
    else:
        w, bound = truncate
        bw = [(m2, c2, _dot(m2, w)) for m2, c2 in b.terms.items()]
        for m1, c1 in a.terms.items():
            d1 = _dot(m1, w)
            if d1 > bound:
                continue
            for m2, c2, d2 in bw:
                if d1 + d2 > bound:
                    continue
                m = tuple(x + y for x, y in zip(m1, m2))
                v = acc.get(m, 0) + c1 * c2
                if v:
                    acc[m] = v
                else:
                    del acc[m]
    return SparsePoly(a.ctx, acc)


def coeff_of(p: SparsePoly, var: str, k: int) -> SparsePoly:
    """Coefficient of ``var**k``, as a polynomial in the same context."""
    i = p.ctx.index(var)
    out = {}
    for m, c in p.terms.items():
        if m[i] == k:
            mm = list(m)
            mm[i] = 0
            out[tuple(mm)] = c
    return SparsePoly(p.ctx, out)


def generalized_binomial(a: Fraction, k: int) -> Fraction:
    num = Fraction(1)
    for j in range(k):
        num *= a - j
    return num / math.factorial(k)


def rational_power_series(p: SparsePoly, exponent, var: str, truncation: int) -> SparsePoly:
    """Binomial expansion of ``p**exponent`` modulo ``var**(truncation+1)``."""
    if coeff_of(p, var, 0) != SparsePoly.one(p.ctx):
        raise ValueError(f"constant term in {var} must be 1")
    exponent = _q(exponent)
    idx = p.ctx.index(var)
    w = [0] * p.ctx.nvars
    w[idx] = 1
    trunc = (w, truncation)
    u = (p - 1).truncate(w, truncation)
    result = SparsePoly.one(p.ctx)
    upow = SparsePoly.one(p.ctx)
    for k in range(1, truncation + 1):
        upow = poly_mul(upow, u, truncate=trunc)
        if not upow:
            break
        b = generalized_binomial(exponent, k)
        if b:
            result = result + upow * b
    return result


# ---------------------------------------------------------------------------
# row reduction
# ---------------------------------------------------------------------------

FLINT_THRESHOLD = 4000  # rows*cols above which the flint backend is used


def flint_available() -> bool:
    return _flint is not None


def primitive_integer_row(row: Mapping[int, Fraction]) -> dict:
    den = 1
    for v in row.values():
        if isinstance(v, Fraction) and v.denominator != 1:
            den = den * v.denominator // math.gcd(den, v.denominator)
    out = {c: int(v * den) for c, v in row.items() if v}
    g = math.gcd(*out.values()) if out else 1
    if g > 1:
        out = {c: v // g for c, v in out.items()}
    return out


def _reduce_content(row: dict) -> dict:
    g = math.gcd(*row.values()) if row else 1
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


def _combine(r: dict, a: int, piv: dict, b: int) -> dict:
    """a*r - b*piv with zero entries removed."""
    out = {c: a * v for c, v in r.items()}
    for c, v in piv.items():
        nv = out.get(c, 0) - b * v
        if nv:
            out[c] = nv
        else:
            out.pop(c, None)
    return out


def _echelon_python(rows: list, ncols: int) -> list:
    """Fraction-free forward elimination; returns [(pivot column, row)]."""
    work = [(i, primitive_integer_row(r)) for i, r in enumerate(rows)]
    work = [(i, r) for i, r in work if r]
    pivots: list = []  # (col, row)
    active = work
    for c in range(ncols):
        if not active:
            break
        cand = [(i, r) for i, r in active if c in r]
        if not cand:
            continue
        pi, pr = min(cand, key=lambda t: (abs(t[1][c]).bit_length(), t[0]))
        lead = pr[c]
        nxt = []
        for i, r in active:
            if i == pi:
                continue
            if c in r:
                g = math.gcd(lead, r[c])
                r = _reduce_content(_combine(r, lead // g, pr, r[c] // g))
                if not r:
                    continue
            nxt.append((i, r))
        active = nxt
        pivots.append((c, pr))
    return pivots


def _rref_python(rows: list, ncols: int) -> tuple:
    pivots = _echelon_python(rows, ncols)
    # back substitution to reduced form
    for k in range(len(pivots) - 1, -1, -1):
        c, pr = pivots[k]
        lead = pr[c]
        for j in range(k):
            cj, rj = pivots[j]
            if c in rj:
                g = math.gcd(lead, rj[c])
                pivots[j] = (cj, _reduce_content(_combine(rj, lead // g, pr, rj[c] // g)))
    out_rows = []
    for c, r in pivots:
        lead = r[c]
        out_rows.append({k: Fraction(v, lead) for k, v in r.items()})
    return tuple(c for c, _ in pivots), out_rows


def _rref_flint(rows: list, ncols: int) -> tuple:
    m = _flint.fmpq_mat(len(rows), ncols)
    for i, r in enumerate(rows):
        for c, v in r.items():
            v = _q(v)
            m[i, c] = _flint.fmpq(v.numerator, v.denominator)
    red, rank = m.rref()
    pivs = []
    out = []
    for i in range(rank):
        row = {}
        lead = None
        for c in range(ncols):
            v = red[i, c]
            if v != 0:
                if lead is None:
                    lead = c
                row[c] = Fraction(int(v.p), int(v.q))
        pivs.append(lead)
        out.append(row)
    return tuple(pivs), out


def rref(rows: Sequence[Mapping[int, Number]], ncols: int, backend: str = "auto") -> tuple:
    """Reduced row echelon form of the span of sparse rows.

    Returns ``(pivot_columns, rows)`` where each returned row is a dict with a
    1 in its pivot column and zeros in all other pivot columns.
    """
    rows = [r for r in rows if any(r.values())]
    if not rows:
        return (), []
    if backend == "auto":
        backend = "flint" if (_flint is not None and len(rows) * ncols > FLINT_THRESHOLD) else "python"
    if backend == "flint":
        if _flint is None:
            raise RuntimeError("flint backend requested but python-flint is not installed")
        return _rref_flint(list(rows), ncols)
    if backend != "python":
        raise ValueError(f"unknown backend {backend!r}")
    return _rref_python(list(rows), ncols)


def _rank_flint(int_rows: list, ncols: int) -> int:
    # fraction-free LU cost grows with the row count; eliminate the shorter side
    if len(int_rows) > ncols:
        m = _flint.fmpz_mat(ncols, len(int_rows))
        for i, r in enumerate(int_rows):
            for c, v in r.items():
                m[c, i] = v
    else:
        m = _flint.fmpz_mat(len(int_rows), ncols)
        for i, r in enumerate(int_rows):
            for c, v in r.items():
                m[i, c] = v
    return m.rank()


def matrix_rank(rows: Sequence[Mapping[int, Number]], ncols: int, backend: str = "auto") -> int:
    """Exact rank of the span of sparse rows, without forming the reduced form.

    Rows are scaled to primitive integer vectors first; rank is invariant
    under that and the echelon entries stay integral."""
    int_rows = [primitive_integer_row({c: _q(v) for c, v in r.items()}) for r in rows]
    int_rows = [r for r in int_rows if r]
    if not int_rows:
        return 0
    if backend == "auto":
        backend = "flint" if (_flint is not None and len(int_rows) * ncols > FLINT_THRESHOLD) else "python"
    if backend == "flint":
        if _flint is None:
            raise RuntimeError("flint backend requested but python-flint is not installed")
        return _rank_flint(int_rows, ncols)
    if backend != "python":
        raise ValueError(f"unknown backend {backend!r}")
    return len(_echelon_python(int_rows, ncols))


def _dense_to_sparse(vec: Sequence[Number]) -> dict:
    return {i: _q(v) for i, v in enumerate(vec) if v}


def _sparse_to_dense(row: Mapping[int, Fraction], n: int) -> list:
    out = [Fraction(0)] * n
    for c, v in row.items():
        out[c] = v
    return out


@dataclass(frozen=True)
class ExactMatrix:
    """Dense exact rational matrix (row-major, immutable)."""

    rows: int
    cols: int
    entries: tuple

    @classmethod
    def from_rows(cls, data: Sequence[Sequence[Number]], cols: int | None = None) -> "ExactMatrix":
        data = [tuple(_q(x) for x in r) for r in data]
        if cols is None:
            cols = len(data[0]) if data else 0
        if any(len(r) != cols for r in data):
            raise ValueError("ragged matrix")
        return cls(len(data), cols, tuple(data))

    def _sparse_rows(self):
        return [_dense_to_sparse(r) for r in self.entries]

    def rref(self, backend: str = "auto") -> tuple:
        piv, rows = rref(self._sparse_rows(), self.cols, backend)
        return piv, [_sparse_to_dense(r, self.cols) for r in rows]

    def rank(self, backend: str = "auto") -> int:
        return len(rref(self._sparse_rows(), self.cols, backend)[0])

    def apply(self, vec: Sequence[Number]) -> list:
        if len(vec) != self.cols:
            raise AmbientMismatch("vector length differs from column count")
        return [sum((a * _q(b) for a, b in zip(r, vec)), Fraction(0)) for r in self.entries]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else ())


def _kernel_from_rref(piv: Sequence[int], rows: Sequence[Mapping[int, Fraction]], ncols: int) -> list:
    pset = set(piv)
    basis = []
    for f in range(ncols):
        if f in pset:
            continue
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for c, r in zip(piv, rows):
            x = r.get(f)
            if x:
                v[c] = -x
        basis.append(v)
    return basis


def kernel_basis(m: ExactMatrix, backend: str = "auto") -> list:
    """Basis of the right kernel ``{v : m v = 0}``."""
    if m.rows == 0:
        return [[Fraction(int(i == j)) for i in range(m.cols)] for j in range(m.cols)]
    piv, rows = rref(m._sparse_rows(), m.cols, backend)
    return _kernel_from_rref(piv, rows, m.cols)


def sparse_kernel(rows: Sequence[Mapping[int, Number]], ncols: int, backend: str = "auto") -> list:
    piv, red = rref(rows, ncols, backend)
    return _kernel_from_rref(piv, red, ncols)


# ---------------------------------------------------------------------------
# subspaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubspaceDims:
    dim_u: int
    dim_v: int
    dim_sum: int
    dim_intersection: int
    intersection_basis: tuple = field(default=(), repr=False)


def span_rank(vectors: Sequence[Sequence[Number]], ambient: int, backend: str = "auto") -> int:
    for v in vectors:
        if len(v) != ambient:
            raise AmbientMismatch("vector length differs from ambient dimension")
    return matrix_rank([_dense_to_sparse(v) for v in vectors], ambient, backend)


def subspace_ops(U: Sequence[Sequence[Number]], V: Sequence[Sequence[Number]], ambient: int,
                 backend: str = "auto") -> SubspaceDims:
    """Dimensions of U, V, U+V and an explicit basis of U∩V.

    The intersection is computed from the kernel of ``[U | -V]`` and its
    dimension is checked against inclusion-exclusion.
    """
    for v in list(U) + list(V):
        if len(v) != ambient:
            raise AmbientMismatch("vector length differs from ambient dimension")
    pu, bu = rref([_dense_to_sparse(v) for v in U], ambient, backend)
    pv, bv = rref([_dense_to_sparse(v) for v in V], ambient, backend)
    du, dv = len(pu), len(pv)
    ds = len(rref(list(bu) + list(bv), ambient, backend)[0])
    # columns: basis of U then basis of V (negated)
    cols = du + dv
    rows = [dict() for _ in range(ambient)]
    for j, r in enumerate(bu):
        for c, x in r.items():
            rows[c][j] = x
    for j, r in enumerate(bv):
        for c, x in r.items():
            rows[c][du + j] = -x
    ker = sparse_kernel(rows, cols, backend)
    inter = []
    for k in ker:
        vec = [Fraction(0)] * ambient
        for j, r in enumerate(bu):
            if k[j]:
                for c, x in r.items():
                    vec[c] += k[j] * x
        inter.append(vec)
    di = span_rank(inter, ambient, backend) if inter else 0
    if di != du + dv - ds:
        raise ArithmeticError("inclusion-exclusion violated; linear algebra is inconsistent")
    return SubspaceDims(du, dv, ds, di, tuple(tuple(v) for v in inter))


class RowSpace:
    """Incrementally grown row space kept in reduced echelon form."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self._rows: dict = {}  # pivot column -> row dict with 1 at pivot

    def __len__(self):
        return len(self._rows)

    @property
    def pivots(self) -> list:
        return sorted(self._rows)

    def reduce(self, vec: Mapping[int, Number]) -> dict:
        r = {c: _q(v) for c, v in vec.items() if v}
        for c in sorted(set(r) & set(self._rows)):
            x = r.get(c)
            if x:
                for cc, vv in self._rows[c].items():
                    nv = r.get(cc, 0) - x * vv
                    if nv:
                        r[cc] = nv
                    else:
                        r.pop(cc, None)
        return r

    def add(self, vec: Mapping[int, Number]) -> bool:
        """Insert ``vec``; return True when the dimension grew."""
        r = self.reduce(vec)
        if not r:
            return False
        c = min(r)
        lead = r[c]
        r = {k: v / lead for k, v in r.items()}
        for pc, pr in self._rows.items():
            x = pr.get(c)
            if x:
                for cc, vv in r.items():
                    nv = pr.get(cc, 0) - x * vv
                    if nv:
                        pr[cc] = nv
                    else:
                        pr.pop(cc, None)
        self._rows[c] = r
        return True

    def contains(self, vec: Mapping[int, Number]) -> bool:
        return not self.reduce(vec)

    def rows(self) -> list:
        return [dict(self._rows[c]) for c in sorted(self._rows)]


def derivative(p: SparsePoly, var: str) -> SparsePoly:
    i = p.ctx.index(var)
    out = {}
    for m, c in p.terms.items():
        if m[i]:
            mm = list(m)
            mm[i] -= 1
            out[tuple(mm)] = c * m[i]
    return SparsePoly(p.ctx, out)


def transfer(p: SparsePoly, target: VariableContext) -> SparsePoly:
    """Re-express ``p`` in ``target`` by variable name.  Variables missing
    from ``target`` must not occur in ``p``."""
    pos = []
    for i, n in enumerate(p.ctx.names):
        pos.append(target.names.index(n) if n in target.names else None)
    out = {}
    for m, c in p.terms.items():
        mm = [0] * target.nvars
        for i, e in enumerate(m):
            if e:
                if pos[i] is None:
                    raise ContextMismatch(f"variable {p.ctx.names[i]} not in target context")
                mm[pos[i]] = e
        out[tuple(mm)] = c
    return SparsePoly(target, out)


def divide_by_variable(p: SparsePoly, var: str, power: int = 1) -> SparsePoly:
    """Exact quotient p / var**power; raises if not divisible."""
    i = p.ctx.index(var)
    out = {}
    for m, c in p.terms.items():
        if m[i] < power:
            raise ArithmeticError(f"not divisible by {var}^{power}")
        mm = list(m)
        mm[i] -= power
        out[tuple(mm)] = c
    return SparsePoly(p.ctx, out)
