"""Vertices of the lattice-class building for PGL(V).

Homothety classes of full-rank lattices are the vertices; two distinct
classes are adjacent when representatives satisfy pN < M < N.  This module
provides canonical class keys, class equality, adjacency, the invariant-factor
distance formula, apartment membership, neighbor enumeration over F_p, a BFS
distance oracle, and DOT export of BFS balls.

Distances in production code always go through the invariant-factor formula;
BFS exists purely as an independent oracle.  Internally the BFS propagates
integer transition matrices (class keys are homothety invariant, so clearing
denominators is free), which keeps the oracle usable at desk scale.

All functions are pure and the BFS keeps only local state, so everything here
is safe to run concurrently.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import lcm

from . import linalg
from .errors import EnumerationTooLarge
from .lattices import LatticeBasis, invariant_exponents
from .padic import PAdicContext, int_val

DEFAULT_ENUMERATION_CAP = 10**6
ENUMERATION_CAP_ENV = "BTPGL_ENUM_CAP"
_TRANSFORM_CACHE_LIMIT = 20000


@dataclass(frozen=True, order=True)
class ClassKey:
    """Canonical encoding of a lattice homothety class relative to a reference.

    Two lattices get the same key iff they differ by a scalar of K^x.  The
    encoding is the sorted elementary-divisor exponents (shifted so the
    minimum is 0) together with the unique column-reduced triangular basis
    matrix of the rescaled transition: p-power diagonal, entries above each
    diagonal reduced to [0, p^{e_row}).
    """

    dim: int
    exponents: tuple
    hnf: tuple

    def to_hex(self) -> str:
        return repr((self.dim, self.exponents, self.hnf)).encode("ascii").hex()


def _val_of_residue(x: int, p: int) -> int | None:
    """Valuation of a residue; None when the residue is zero."""
    if x == 0:
        return None
    return int_val(x, p)


def _column_hnf_mod(p: int, rows, total: int):
    """Canonical column Hermite form over Z_(p) of an integral matrix whose
    determinant has valuation `total`, computed modulo a large p-power.

    Precision bookkeeping: triangularization and the off-diagonal reduction
    cascade each consume at most `total` digits, so 3*total + 4 digits leave
    every extracted residue exact.
    """
    n = len(rows)
    q = p ** (3 * total + 4)
    cols = [[rows[i][j] % q for i in range(n)] for j in range(n)]
    order = [0] * n
    active = list(range(n))
    diag_exp = [0] * n
    for i in range(n - 1, -1, -1):
        best = None
        for j in active:
            e = _val_of_residue(cols[j][i], p)
            if e is not None and (best is None or e < best[0]):
                best = (e, j)
        e, jstar = best
        pe = p**e
        unit = cols[jstar][i] // pe
        uinv = pow(unit, -1, q)
        cols[jstar] = [x * uinv % q for x in cols[jstar]]
        active.remove(jstar)
        order[i] = jstar
        diag_exp[i] = e
        for j in active:
            c = cols[j][i] // pe
            if c:
                pivot = cols[jstar]
                cols[j] = [(a - c * b) % q for a, b in zip(cols[j], pivot)]
    h = [[cols[order[j]][i] for j in range(n)] for i in range(n)]
    for j in range(1, n):
        for i in range(j - 1, -1, -1):
            pe = p ** diag_exp[i]
            r = h[i][j] % pe
            c = (h[i][j] - r) // pe
            if c:
                for i2 in range(i + 1):
                    h[i2][j] = (h[i2][j] - c * h[i2][i]) % q
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        pe = p ** diag_exp[i]
        out[i][i] = pe
        for j in range(i + 1, n):
            out[i][j] = h[i][j] % pe
    return out


def _smith_exponents_mod(p: int, rows, total: int):
    """Sorted elementary-divisor exponents of an integral matrix, mod p-power."""
    n = len(rows)
    q = p ** (3 * total + 4)
    a = [[x % q for x in row] for row in rows]
    exps = []
    for t in range(n):
        best = None
        for i in range(t, n):
            for j in range(t, n):
                e = _val_of_residue(a[i][j], p)
                if e is not None and (best is None or e < best[0]):
                    best = (e, i, j)
        e, bi, bj = best
        if bi != t:
            a[t], a[bi] = a[bi], a[t]
        if bj != t:
            for row in a:
                row[t], row[bj] = row[bj], row[t]
        pe = p**e
        unit = a[t][t] // pe
        uinv = pow(unit, -1, q)
        a[t] = [x * uinv % q for x in a[t]]
        for i in range(t + 1, n):
            c = a[i][t] // pe
            if c:
                a[i] = [(x - c * y) % q for x, y in zip(a[i], a[t])]
        for j in range(t + 1, n):
            c = a[t][j] // pe
            if c:
                for i in range(t, n):
                    a[i][j] = (a[i][j] - c * a[i][t]) % q
        exps.append(e)
    return sorted(exps)


def _int_matmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        arow = a[i]
        orow = out[i]
        for t in range(k):
            x = arow[t]
            if x:
                brow = b[t]
                for j in range(m):
                    orow[j] += x * brow[j]
    return out


def _normalize_p_power(rows, p):
    """Divide an integer matrix by the largest common p-power."""
    shift = None
    for row in rows:
        for x in row:
            if x:
                v = int_val(x, p)
                if shift is None or v < shift:
                    shift = v
                if shift == 0:
                    return rows
    pm = p**shift
    return [[x // pm for x in row] for row in rows]


def _integer_transition(reference: LatticeBasis, lattice: LatticeBasis):
    """Transition matrix reference^{-1} * lattice, scaled to integers and
    normalized by the common p-power (both scalings are homotheties)."""
    t = linalg.matmul(reference.inverse_rows(), lattice.rows())
    denom = lcm(*(x.denominator for row in t for x in row))
    tz = [[int(x * denom) for x in row] for row in t]
    return _normalize_p_power(tz, reference.ctx.p)


def _key_from_integer_rows(p: int, tz) -> ClassKey:
    """Class key of the lattice spanned by the columns of an integer matrix
    already normalized to minimal entry valuation 0."""
    n = len(tz)
    total = int_val(linalg.int_det(tz), p)
    if total == 0:
        hnf = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
        return ClassKey(dim=n, exponents=(0,) * n, hnf=hnf)
    hnf = _column_hnf_mod(p, tz, total)
    # the canonical form is column-equivalent to tz over the valuation ring,
    # so it has the same elementary divisors and far smaller entries
    exps = _smith_exponents_mod(p, hnf, total)
    return ClassKey(dim=n, exponents=tuple(exps), hnf=tuple(tuple(r) for r in hnf))


def class_key(reference: LatticeBasis, lattice: LatticeBasis) -> ClassKey:
    """Canonical key of the homothety class of `lattice` relative to `reference`.

    Keys computed against the same reference agree exactly when the classes
    coincide; keys from different references are not comparable.
    """
    if reference.ctx.p != lattice.ctx.p or reference.dim != lattice.dim:
        raise ValueError("lattices live in different spaces")
    return _key_from_integer_rows(reference.ctx.p, _integer_transition(reference, lattice))


def class_equal(l1: LatticeBasis, l2: LatticeBasis) -> bool:
    """True iff the lattices differ by a scalar of K^x.

    Criterion: with m the minimal entry valuation of the transition matrix T,
    the determinant valuation equals n*m, i.e. p^{-m} T is unimodular.
    """
    if l1.ctx.p != l2.ctx.p or l1.dim != l2.dim:
        raise ValueError("lattices live in different spaces")
    ctx = l1.ctx
    t = linalg.matmul(l1.inverse_rows(), l2.rows())
    m = min(ctx.val(x) for row in t for x in row if x)
    return ctx.val(linalg.det(t)) == l1.dim * m


def adjacent(l1: LatticeBasis, l2: LatticeBasis) -> bool:
    """True iff the classes are distinct and have representatives with
    pN < M < N; equivalently the normalized invariant exponents are {0, 1}."""
    exps = invariant_exponents(l1, l2)
    return exps[-1] - exps[0] == 1


def dist(l1: LatticeBasis, l2: LatticeBasis) -> int:
    """Combinatorial distance between the two lattice classes.

    Computed as max - min of the invariant-factor exponents, which equals the
    minimal number of edges of a path between the classes.
    """
    exps = invariant_exponents(l1, l2)
    return exps[-1] - exps[0]


@dataclass(frozen=True)
class Apartment:
    """A frame of n independent lines; its vertex classes are the lattices
    diagonalizable with respect to the frame."""

    ctx: PAdicContext
    lines: tuple

    def __post_init__(self):
        n = len(self.lines)
        lines = tuple(tuple(Fraction(x) for x in v) for v in self.lines)
        object.__setattr__(self, "lines", lines)
        if any(len(v) != n for v in lines):
            raise ValueError("need n spanning vectors of length n")
        if linalg.det(linalg.columns_to_rows(lines)) == 0:
            raise ValueError("spanning vectors are linearly dependent")

    def frame_rows(self):
        return linalg.columns_to_rows(self.lines)


def in_apartment(ap: Apartment, lattice: LatticeBasis):
    """Exponent witness (k_1, ..., k_n), normalized to min 0, when the class
    of the lattice is diagonalizable in the apartment's frame; None otherwise.

    Criterion: scaling each row of the frame-coordinate transition matrix to
    minimal valuation 0 must leave a unimodular matrix.
    """
    if ap.ctx.p != lattice.ctx.p:
        raise ValueError("mismatched contexts")
    ctx = ap.ctx
    t = linalg.matmul(linalg.inv(ap.frame_rows()), lattice.rows())
    mins = [min(ctx.val(x) for x in row if x) for row in t]
    if ctx.val(linalg.det(t)) != sum(mins):
        return None
    lo = min(mins)
    return tuple(m - lo for m in mins)


def gaussian_binomial(n: int, k: int, p: int) -> int:
    """Number of k-dimensional subspaces of F_p^n."""
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (k - i) - 1
    return num // den


def neighbor_count(n: int, p: int) -> int:
    """Number of classes adjacent to any vertex: proper nonzero subspaces of F_p^n."""
    return sum(gaussian_binomial(n, k, p) for k in range(1, n))


def enumeration_cap() -> int:
    raw = os.environ.get(ENUMERATION_CAP_ENV)
    if raw is None:
        return DEFAULT_ENUMERATION_CAP
    return int(raw)


def _rref_representatives(n: int, k: int, p: int):
    """One reduced-row-echelon basis per k-dimensional subspace of F_p^n."""
    for pivots in combinations(range(n), k):
        free = [
            (i, j)
            for i in range(k)
            for j in range(pivots[i] + 1, n)
            if j not in pivots
        ]
        for assignment in product(range(p), repeat=len(free)):
            rows = [[0] * n for _ in range(k)]
            for i, pc in enumerate(pivots):
                rows[i][pc] = 1
            for (i, j), value in zip(free, assignment):
                rows[i][j] = value
            yield rows, pivots


def _neighbor_transform_list(n: int, p: int):
    """Integer basis-change matrices (as rows): right-multiplying a lattice
    basis by each of them yields one representative per adjacent class.

    Columns are the lifted echelon basis of a subspace of L/pL followed by p
    times a completion."""
    out = []
    for k in range(1, n):
        for rows, pivots in _rref_representatives(n, k, p):
            cols = [list(r) for r in rows]
            cols += [[p if i == j else 0 for i in range(n)] for j in range(n) if j not in pivots]
            out.append(linalg.columns_to_rows(cols))
    return out


@lru_cache(maxsize=32)
def _cached_transforms(n: int, p: int):
    return tuple(_neighbor_transform_list(n, p))


def _neighbor_transforms(n: int, p: int, cap: int | None = None):
    total = neighbor_count(n, p)
    limit = cap if cap is not None else enumeration_cap()
    if total > limit:
        raise EnumerationTooLarge(
            f"{total} proper subspaces of F_{p}^{n} exceed the cap of {limit}"
        )
    if total <= _TRANSFORM_CACHE_LIMIT:
        return _cached_transforms(n, p)
    return _neighbor_transform_list(n, p)


def neighbors(reference: LatticeBasis, lattice: LatticeBasis, cap: int | None = None):
    """All classes adjacent to the given one, one representative lattice each.

    Sublattices between pL and L correspond to nonzero proper subspaces of
    L/pL; each echelon representative is lifted and padded with p times a
    completion.  Keys are computed defensively: a duplicate class would be a
    bug, so it trips an assertion.
    """
    ctx = lattice.ctx
    rows = lattice.rows()
    out = []
    seen = set()
    for w in _neighbor_transforms(lattice.dim, ctx.p, cap):
        nb = LatticeBasis.from_rows(ctx, linalg.matmul(rows, w))
        key = class_key(reference, nb)
        assert key not in seen, "duplicate neighbor class"
        seen.add(key)
        out.append(nb)
    return out


def bfs_dist(
    reference: LatticeBasis,
    start: LatticeBasis,
    targets,
    radius_cap: int,
) -> int | None:
    """Breadth-first distance from the start class to a set of target keys.

    Explores classes layer by layer through the neighbor enumeration,
    deduplicating by class key, and returns the first depth at which a target
    key appears; None when no target shows up within radius_cap.  This is the
    slow independent oracle for the invariant-factor distance.
    """
    if radius_cap < 0:
        raise ValueError("radius_cap must be non-negative")
    targets = set(targets)
    p = reference.ctx.p
    t0 = _integer_transition(reference, start)
    start_key = _key_from_integer_rows(p, t0)
    if start_key in targets:
        return 0
    transforms = _neighbor_transforms(reference.dim, p)
    seen = {start_key}
    frontier = [t0]
    depth = 0
    while frontier and depth < radius_cap:
        depth += 1
        nxt = []
        for t in frontier:
            for w in transforms:
                nt = _normalize_p_power(_int_matmul(t, w), p)
                key = _key_from_integer_rows(p, nt)
                if key in targets:
                    return depth
                if key not in seen:
                    seen.add(key)
                    nxt.append(nt)
        frontier = nxt
    return None


def bfs_ball(reference: LatticeBasis, center: LatticeBasis, radius: int):
    """All classes within the given radius of the center, in BFS discovery
    order, together with the adjacency edges among them.

    Returns (nodes, edges) where nodes is a list of (ClassKey, LatticeBasis)
    pairs (the lattice is a class representative) and edges is a list of key
    pairs in deterministic discovery order.
    """
    ctx = reference.ctx
    p = ctx.p
    t0 = _integer_transition(reference, center)
    transforms = _neighbor_transforms(reference.dim, p)
    center_key = _key_from_integer_rows(p, t0)
    reps = [(center_key, t0)]
    index = {center_key: 0}
    frontier = [t0]
    for _ in range(radius):
        nxt = []
        for t in frontier:
            for w in transforms:
                nt = _normalize_p_power(_int_matmul(t, w), p)
                key = _key_from_integer_rows(p, nt)
                if key not in index:
                    index[key] = len(reps)
                    reps.append((key, nt))
                    nxt.append(nt)
        frontier = nxt
    edges = []
    edge_seen = set()
    for key, t in reps:
        for w in transforms:
            nb_key = _key_from_integer_rows(p, _normalize_p_power(_int_matmul(t, w), p))
            if nb_key not in index:
                continue
            pair = (key, nb_key) if index[key] < index[nb_key] else (nb_key, key)
            if pair not in edge_seen:
                edge_seen.add(pair)
                edges.append(pair)
    ref_rows = reference.rows()
    nodes = [
        (key, LatticeBasis.from_rows(ctx, linalg.matmul(ref_rows, t))) for key, t in reps
    ]
    return nodes, edges


def render_dot(nodes, edges, highlighted=None) -> str:
    """DOT text for a BFS ball: one node per hex-encoded class key, one edge
    per adjacency.  Highlighted keys are drawn filled."""
    highlighted = highlighted or set()
    lines = ["graph building {", "  node [shape=circle];"]
    for key, _ in nodes:
        hexname = key.to_hex()
        attrs = " [style=filled, fillcolor=lightblue]" if key in highlighted else ""
        lines.append(f'  "{hexname}"{attrs};')
    for a, b in edges:
        lines.append(f'  "{a.to_hex()}" -- "{b.to_hex()}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
