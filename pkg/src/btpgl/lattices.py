"""Lattices over the p-adic valuation ring.

Bases of full-rank lattices in K^n, valuation-pivoted triangularization,
invariant-factor exponents of lattice pairs, split submodules, saturation of
K-spans, direct-sum complements, and the dual-form transform under a
unimodular automorphism.

All operations are pure functions on immutable values and are therefore
thread-safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .errors import (
    NonIntegralEntry,
    NotSplitInside,
    NotUnimodular,
    SingularTransition,
)
from .padic import PAdicContext


def _to_fraction_vector(v, n: int):
    vec = tuple(Fraction(x) for x in v)
    if len(vec) != n:
        raise ValueError(f"expected vector of length {n}, got {len(vec)}")
    return vec


class LatticeBasis:
    """An ordered basis of a full-rank lattice in K^n.

    Basis vectors are stored column-wise in the standard coordinates of K^n;
    the basis matrix must have nonzero determinant.  Instances are immutable.
    """

    __slots__ = ("ctx", "dim", "columns", "_rows", "_inv_rows")

    def __init__(self, ctx: PAdicContext, columns):
        cols = tuple(_to_fraction_vector(c, len(columns)) for c in columns)
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "dim", len(cols))
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "_rows", None)
        object.__setattr__(self, "_inv_rows", None)
        if linalg.det(self.rows()) == 0:
            raise ValueError("columns do not span K^n")

    def __setattr__(self, name, value):
        raise AttributeError("LatticeBasis is immutable")

    @classmethod
    def standard(cls, ctx: PAdicContext, n: int) -> "LatticeBasis":
        return cls(ctx, [[1 if i == j else 0 for i in range(n)] for j in range(n)])

    @classmethod
    def from_rows(cls, ctx: PAdicContext, rows) -> "LatticeBasis":
        return cls(ctx, linalg.rows_to_columns(rows))

    @classmethod
    def diagonal(cls, ctx: PAdicContext, entries) -> "LatticeBasis":
        n = len(entries)
        return cls(ctx, [[entries[j] if i == j else 0 for i in range(n)] for j in range(n)])

    def rows(self):
        """Basis matrix as list of rows (entry [i][j] = i-th coordinate of vector j)."""
        if self._rows is None:
            object.__setattr__(
                self, "_rows", [[self.columns[j][i] for j in range(self.dim)] for i in range(self.dim)]
            )
        return self._rows

    def inverse_rows(self):
        if self._inv_rows is None:
            object.__setattr__(self, "_inv_rows", linalg.inv(self.rows()))
        return self._inv_rows

    def scale(self, scalar) -> "LatticeBasis":
        s = Fraction(scalar)
        if s == 0:
            raise ValueError("cannot scale a lattice by zero")
        return LatticeBasis(self.ctx, [[s * x for x in col] for col in self.columns])

    def right_multiply(self, u_rows) -> "LatticeBasis":
        """New basis with matrix self * U; spans the same lattice iff U is unimodular."""
        return LatticeBasis.from_rows(self.ctx, linalg.matmul(self.rows(), u_rows))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LatticeBasis)
            and self.ctx.p == other.ctx.p
            and self.columns == other.columns
        )

    def __hash__(self) -> int:
        return hash((self.ctx.p, self.columns))

    def __repr__(self) -> str:
        return f"LatticeBasis(p={self.ctx.p}, columns={self.columns!r})"


class SplitSubmodule:
    """A submodule of a lattice given by integral coordinates in its basis.

    The coordinate vectors must be K-linearly independent and p-integral;
    whether the submodule is actually split is tested by :func:`is_split`.
    Rank 0 (no columns) is a legal value.
    """

    __slots__ = ("ambient", "columns")

    def __init__(self, ambient: LatticeBasis, columns):
        n = ambient.dim
        cols = tuple(_to_fraction_vector(c, n) for c in columns)
        for c in cols:
            for x in c:
                if not ambient.ctx.is_integral(x):
                    raise NonIntegralEntry(f"coordinate {x} is not {ambient.ctx.p}-integral")
        if cols and linalg.rank(linalg.columns_to_rows(cols)) != len(cols):
            raise ValueError("coordinate columns are K-linearly dependent")
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "columns", cols)

    def __setattr__(self, name, value):
        raise AttributeError("SplitSubmodule is immutable")

    @property
    def rank(self) -> int:
        return len(self.columns)

    def standard_columns(self):
        """Basis vectors in the standard coordinates of K^n."""
        rows = self.ambient.rows()
        return [linalg.matvec(rows, list(c)) for c in self.columns]

    def reduction(self):
        """Coordinate columns mod p, as int vectors."""
        ctx = self.ambient.ctx
        return [[ctx.residue(x) for x in c] for c in self.columns]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SplitSubmodule)
            and self.ambient == other.ambient
            and self.columns == other.columns
        )

    def __hash__(self) -> int:
        return hash((self.ambient, self.columns))

    def __repr__(self) -> str:
        return f"SplitSubmodule(rank={self.rank}, columns={self.columns!r})"


@dataclass(frozen=True)
class DualForm:
    """A primitive linear form, as coefficients against the dual of the ambient basis.

    All coefficients lie in the valuation ring and at least one is a unit, so
    the form cuts out a hyperplane of the ambient lattice's projective model.
    """

    ambient: LatticeBasis
    coefficients: tuple

    def __post_init__(self):
        coeffs = _to_fraction_vector(self.coefficients, self.ambient.dim)
        object.__setattr__(self, "coefficients", coeffs)
        ctx = self.ambient.ctx
        has_unit = False
        for a in coeffs:
            if not ctx.is_integral(a):
                raise NonIntegralEntry(f"coefficient {a} is not {ctx.p}-integral")
            if ctx.is_unit(a):
                has_unit = True
        if not has_unit:
            raise ValueError("form is not primitive: no unit coefficient")

    def evaluate_coords(self, coords) -> Fraction:
        """Value of the form on a vector given in ambient coordinates."""
        return sum((a * Fraction(c) for a, c in zip(self.coefficients, coords)), Fraction(0))


@dataclass(frozen=True)
class TriangularizationResult:
    """Outcome of valuation-pivoted triangularization: B = C * A * D.

    C is unimodular over the valuation ring, D is a permutation matrix, and B
    is upper triangular with non-decreasing diagonal valuations, each diagonal
    entry dividing everything to its right in the same row.
    """

    C: tuple
    D: tuple
    B: tuple


def _freeze(rows) -> tuple:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def triangularize(ctx: PAdicContext, a) -> TriangularizationResult:
    """Reduce an integral square matrix to upper-triangular form.

    Repeatedly moves an entry of minimal valuation in the working submatrix
    to the pivot position (column permutations collected in D, row swaps and
    eliminations collected in C) and clears the column below it with
    multipliers from the valuation ring.  Ties are broken by smallest
    (row, column) index, so the output is deterministic.
    """
    n = len(a)
    b = linalg.copy_matrix(a)
    for row in b:
        for x in row:
            if not ctx.is_integral(x):
                raise NonIntegralEntry(f"entry {x} is not {ctx.p}-integral")
    c = linalg.identity(n)
    colorder = list(range(n))
    for t in range(n):
        best = None
        for i in range(t, n):
            for j in range(t, n):
                if b[i][j]:
                    v = ctx.val(b[i][j])
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            break
        _, bi, bj = best
        if bj != t:
            for row in b:
                row[t], row[bj] = row[bj], row[t]
            colorder[t], colorder[bj] = colorder[bj], colorder[t]
        if bi != t:
            b[t], b[bi] = b[bi], b[t]
            c[t], c[bi] = c[bi], c[t]
        piv = b[t][t]
        for i in range(t + 1, n):
            if b[i][t]:
                m = b[i][t] / piv
                b[i] = [x - m * y for x, y in zip(b[i], b[t])]
                c[i] = [x - m * y for x, y in zip(c[i], c[t])]
    d = [[Fraction(0)] * n for _ in range(n)]
    for j in range(n):
        d[colorder[j]][j] = Fraction(1)
    return TriangularizationResult(C=_freeze(c), D=_freeze(d), B=_freeze(b))


def _smith_exponents(ctx: PAdicContext, rows):
    """Sorted elementary-divisor exponents of a full-rank matrix over K."""
    a = linalg.copy_matrix(rows)
    n = len(a)
    exps = []
    for t in range(n):
        best = None
        for i in range(t, n):
            for j in range(t, n):
                if a[i][j]:
                    v = ctx.val(a[i][j])
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            raise SingularTransition("matrix is singular over K")
        v, bi, bj = best
        if bi != t:
            a[t], a[bi] = a[bi], a[t]
        if bj != t:
            for row in a:
                row[t], row[bj] = row[bj], row[t]
        piv = a[t][t]
        for i in range(t + 1, n):
            if a[i][t]:
                m = a[i][t] / piv
                a[i] = [x - m * y for x, y in zip(a[i], a[t])]
        for j in range(t + 1, n):
            if a[t][j]:
                m = a[t][j] / piv
                for i in range(t, n):
                    a[i][j] -= m * a[i][t]
        exps.append(v)
    return sorted(exps)


def invariant_exponents(ambient: LatticeBasis, other: LatticeBasis) -> tuple:
    """Exponents (k_1 <= ... <= k_n) with ambient = sum of p^{k_i} R w_i
    for a suitable basis w_i of the other lattice.

    Computed as the elementary-divisor exponents of the transition matrix
    other^{-1} * ambient.  Their sum equals the valuation of its determinant.
    """
    if ambient.ctx.p != other.ctx.p or ambient.dim != other.dim:
        raise ValueError("lattices live in different spaces")
    t = linalg.matmul(other.inverse_rows(), ambient.rows())
    return tuple(_smith_exponents(ambient.ctx, t))


def is_split(sub: SplitSubmodule) -> bool:
    """True iff the mod-p reduction of the coordinate matrix has full rank.

    Equivalently, the ambient lattice modulo the submodule is torsion free.
    """
    if sub.rank == 0:
        return True
    rows = linalg.columns_to_rows(sub.reduction())
    return linalg.rank_mod_p(rows, sub.ambient.ctx.p) == sub.rank


def saturate_coords(ambient: LatticeBasis, kvectors) -> SplitSubmodule:
    """Saturation (K-span intersected with the lattice) of vectors given in
    ambient coordinates.  Always returns a split submodule."""
    ctx = ambient.ctx
    n = ambient.dim
    vecs = [_to_fraction_vector(v, n) for v in kvectors]
    vecs = [v for v in vecs if any(v)]
    if not vecs:
        return SplitSubmodule(ambient, ())
    u = [[v[i] for v in vecs] for i in range(n)]
    ncols = len(vecs)
    # P tracks the inverse of the row operations; it stays unimodular over R,
    # and its first r columns end up spanning the saturation.
    p_cols = [[Fraction(1 if i == j else 0) for i in range(n)] for j in range(n)]
    t = 0
    while t < min(n, ncols):
        best = None
        for i in range(t, n):
            for j in range(t, ncols):
                if u[i][j]:
                    v = ctx.val(u[i][j])
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            break
        _, bi, bj = best
        if bi != t:
            u[t], u[bi] = u[bi], u[t]
            p_cols[t], p_cols[bi] = p_cols[bi], p_cols[t]
        if bj != t:
            for row in u:
                row[t], row[bj] = row[bj], row[t]
        piv = u[t][t]
        for i in range(t + 1, n):
            if u[i][t]:
                m = u[i][t] / piv
                u[i] = [x - m * y for x, y in zip(u[i], u[t])]
                p_cols[t] = [x + m * y for x, y in zip(p_cols[t], p_cols[i])]
        for j in range(t + 1, ncols):
            if u[t][j]:
                m = u[t][j] / piv
                for i in range(t, n):
                    u[i][j] -= m * u[i][t]
        t += 1
    return SplitSubmodule(ambient, tuple(tuple(c) for c in p_cols[:t]))


def saturate(ambient: LatticeBasis, vectors) -> SplitSubmodule:
    """Split submodule (K-span of the vectors) intersected with the lattice.

    Vectors are given in the standard coordinates of K^n; dependent inputs
    are reduced to an independent spanning set first.  Idempotent.
    """
    inv_rows = ambient.inverse_rows()
    coords = [linalg.matvec(inv_rows, [Fraction(x) for x in v]) for v in vectors]
    return saturate_coords(ambient, coords)


def intersect_spans(ambient: LatticeBasis, submodules) -> SplitSubmodule:
    """Saturation in the lattice of the intersection of the K-spans.

    A rank-0 result (transverse spans) is returned as an empty submodule.
    """
    subs = list(submodules)
    if not subs:
        raise ValueError("need at least one submodule")
    for s in subs:
        if s.ambient != ambient:
            raise ValueError("submodules must share the ambient lattice")
    cur = [list(c) for c in subs[0].columns]
    n = ambient.dim
    for sub in subs[1:]:
        nxt = [list(c) for c in sub.columns]
        if not cur or not nxt:
            cur = []
            break
        r1 = len(cur)
        rows = [[cur[j][i] for j in range(r1)] + [-nxt[j][i] for j in range(len(nxt))] for i in range(n)]
        null = linalg.nullspace(rows)
        cur = [
            [sum((vec[j] * cur[j][i] for j in range(r1)), Fraction(0)) for i in range(n)]
            for vec in null
        ]
    return saturate_coords(ambient, cur)


class _EchelonModP:
    """Incremental row-space membership over F_p."""

    def __init__(self, p: int, width: int):
        self.p = p
        self.width = width
        self.rows = []
        self.pivots = []

    def _reduce(self, vec):
        v = [x % self.p for x in vec]
        for row, piv in zip(self.rows, self.pivots):
            if v[piv]:
                f = v[piv]
                v = [(x - f * y) % self.p for x, y in zip(v, row)]
        return v

    def contains(self, vec) -> bool:
        return not any(self._reduce(vec))

    def add(self, vec) -> bool:
        v = self._reduce(vec)
        for j in range(self.width):
            if v[j]:
                f = pow(v[j], -1, self.p)
                v = [x * f % self.p for x in v]
                self.rows.append(v)
                self.pivots.append(j)
                return True
        return False


def complete_to_complement(outer: SplitSubmodule, inner: SplitSubmodule) -> SplitSubmodule:
    """Direct-sum complement of a split inner submodule inside an outer one.

    Extends a basis of the inner module to a basis of the outer one by
    greedily adding outer basis vectors whose reductions extend the reduced
    span, in index order; the added vectors form the complement.  The greedy
    choice makes the output deterministic.
    """
    if outer.ambient != inner.ambient:
        raise ValueError("submodules must share the ambient lattice")
    ctx = outer.ambient.ctx
    s, r = outer.rank, inner.rank
    if r == 0:
        return SplitSubmodule(outer.ambient, outer.columns)
    coords = []
    for col in inner.columns:
        x = linalg.solve_columns([list(c) for c in outer.columns], list(col))
        if x is None:
            raise NotSplitInside("inner submodule does not lie in the outer span")
        for entry in x:
            if not ctx.is_integral(entry):
                raise NotSplitInside("inner submodule is not contained in the outer module")
        coords.append([ctx.residue(entry) for entry in x])
    ech = _EchelonModP(ctx.p, s)
    for v in coords:
        ech.add(v)
    if len(ech.rows) != r:
        raise NotSplitInside("inner submodule is not split inside the outer one")
    chosen = []
    for j in range(s):
        if len(chosen) + r == s:
            break
        e_j = [1 if i == j else 0 for i in range(s)]
        if ech.add(e_j):
            chosen.append(j)
    return SplitSubmodule(outer.ambient, tuple(outer.columns[j] for j in chosen))


def same_submodule(a: SplitSubmodule, b: SplitSubmodule) -> bool:
    """True iff the two submodules are equal as R-modules."""
    if a.ambient != b.ambient or a.rank != b.rank:
        return False
    if a.rank == 0:
        return True
    ctx = a.ambient.ctx
    for src, dst in ((a, b), (b, a)):
        for col in src.columns:
            x = linalg.solve_columns([list(c) for c in dst.columns], list(col))
            if x is None or not all(ctx.is_integral(e) for e in x):
                return False
    return True


def transform_dual_form(b_rows, form: DualForm) -> DualForm:
    """Equation of the image hyperplane under the lattice automorphism B.

    If the form cuts out H, the result cuts out B(H); its coefficient vector
    is transpose(B)^{-1} applied to the old one.  B must be unimodular over
    the valuation ring.
    """
    ctx = form.ambient.ctx
    n = form.ambient.dim
    rows = linalg.copy_matrix(b_rows)
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"expected a {n}x{n} matrix")
    for row in rows:
        for x in row:
            if not ctx.is_integral(x):
                raise NotUnimodular(f"entry {x} is not {ctx.p}-integral")
    d = linalg.det(rows)
    if d == 0 or ctx.val(d) != 0:
        raise NotUnimodular(f"determinant {d} is not a unit")
    bt_inv = linalg.inv(linalg.transpose(rows))
    coeffs = linalg.matvec(bt_inv, list(form.coefficients))
    return DualForm(form.ambient, tuple(coeffs))
