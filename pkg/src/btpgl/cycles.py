"""Linear cycles on the projective model of a lattice.

A split rank-r submodule N of a lattice M cuts out a linear cycle of
codimension n - r on the projective model of M.  This module computes
intersection numbers of properly meeting cycles (the determinant valuation of
an assembled form matrix), builds the vertex family generated by the partial
intersections L_j of the cycles, and checks the identity between the
intersection number and the combinatorial distance from {M} to that family.
For cycles meeting properly in positive dimension it computes the
decomposition of the intersection cycle into the closure of the generic-fibre
component (multiplicity one) and a special-fibre component whose multiplicity
is again a distance to a vertex family.

Everything is pure computation on immutable values; a campaign driver may
evaluate instances concurrently without shared state.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import product

from . import linalg
from .building import class_key
from .errors import (
    GenerationExhausted,
    ImproperGenericIntersection,
    ProperFail,
    RankMismatch,
)
from .lattices import (
    DualForm,
    LatticeBasis,
    SplitSubmodule,
    complete_to_complement,
    intersect_spans,
    is_split,
    same_submodule,
    saturate,
    saturate_coords,
)
from .padic import PAdicContext


class Properness(Enum):
    PROPER_0DIM = "proper_0dim"
    PROPER_HIGHER_DIM = "proper_higher_dim"
    IMPROPER = "improper"
    EMPTY_INTERSECTION = "empty_intersection"


@dataclass(frozen=True)
class PropernessReport:
    """Classification of how a cycle configuration meets on the model.

    generic_dim is the dimension of the common K-intersection of the spans,
    special_dim the dimension of the common F_p-intersection of the
    reductions.  r0 is the expected generic dimension when the codimensions
    sum to less than n, else 0.
    """

    kind: Properness
    r0: int
    generic_dim: int
    special_dim: int


class CycleConfiguration:
    """A lattice M together with d >= 2 split submodules defining linear cycles."""

    __slots__ = ("ambient", "submodules")

    def __init__(self, ambient: LatticeBasis, submodules):
        subs = tuple(submodules)
        if len(subs) < 2:
            raise ValueError("need at least two cycles")
        n = ambient.dim
        for s in subs:
            if s.ambient != ambient:
                raise ValueError("cycles must share the ambient lattice")
            if not 0 < s.rank < n:
                raise ValueError(f"cycle rank must be strictly between 0 and {n}")
            if not is_split(s):
                raise ValueError("cycle submodule is not split")
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "submodules", subs)

    def __setattr__(self, name, value):
        raise AttributeError("CycleConfiguration is immutable")

    @property
    def d(self) -> int:
        return len(self.submodules)

    def codim_sum(self) -> int:
        n = self.ambient.dim
        return sum(n - s.rank for s in self.submodules)


class VertexFamily:
    """Generators whose p-power-scaled direct sums enumerate a vertex set.

    The generators' K-spans are independent and sum to V, so every scaled
    direct sum is a full-rank lattice.
    """

    __slots__ = ("ambient", "generators")

    def __init__(self, ambient: LatticeBasis, generators):
        gens = tuple(generators)
        if not gens:
            raise ValueError("family needs at least one generator")
        n = ambient.dim
        cols = []
        for g in gens:
            if g.ambient != ambient:
                raise ValueError("generators must share the ambient lattice")
            cols.extend(list(c) for c in g.columns)
        if len(cols) != n:
            raise ValueError("generator ranks must sum to the dimension")
        if linalg.det(linalg.columns_to_rows(cols)) == 0:
            raise ValueError("generator spans are not independent")
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "generators", gens)

    def __setattr__(self, name, value):
        raise AttributeError("VertexFamily is immutable")

    def concatenated_columns(self):
        cols = []
        for g in self.generators:
            cols.extend(list(c) for c in g.columns)
        return cols

    def member_lattice(self, exponents) -> LatticeBasis:
        """The lattice obtained by scaling each generator by p^{k_j}."""
        if len(exponents) != len(self.generators):
            raise ValueError("need one exponent per generator")
        p = self.ambient.ctx.p
        cols = []
        for g, k in zip(self.generators, exponents):
            scale = Fraction(p) ** k
            for c in g.standard_columns():
                cols.append([scale * x for x in c])
        return LatticeBasis(self.ambient.ctx, cols)


@dataclass(frozen=True)
class CycleDecomposition:
    """Intersection cycle of cycles meeting properly in positive dimension.

    The generic component (closure of the generic-fibre intersection) always
    carries multiplicity one; the special component is the reduced
    intersection on the special fibre, weighted by the distance from the
    model's vertex to the associated vertex family.
    """

    generic_component: SplitSubmodule
    generic_multiplicity: int
    special_component: tuple
    special_multiplicity: int


@dataclass(frozen=True)
class IdentityReport:
    lhs: int
    rhs: int
    agree: bool
    properness: PropernessReport


@dataclass(frozen=True)
class ApartmentReport:
    dist_to_apartment: int
    intersection_number: int


@dataclass(frozen=True)
class InstanceSample:
    config: CycleConfiguration
    forms: tuple | None
    rejections: int


def hyperplane_kernel(form: DualForm) -> SplitSubmodule:
    """The split rank n-1 submodule on which a primitive form vanishes."""
    null = linalg.nullspace([list(form.coefficients)])
    return saturate_coords(form.ambient, null)


def _coefficient_matrix(forms):
    forms = list(forms)
    if not forms:
        raise ValueError("need at least one form")
    ambient = forms[0].ambient
    n = ambient.dim
    if len(forms) != n:
        raise ValueError(f"need exactly {n} forms, got {len(forms)}")
    for f in forms:
        if f.ambient != ambient:
            raise ValueError("forms must share the ambient lattice")
    return ambient, [[forms[j].coefficients[i] for j in range(n)] for i in range(n)]


def intersect_hyperplanes(forms) -> int:
    """Intersection number of n hyperplanes meeting properly on the generic
    fibre: the valuation of the determinant of their coefficient matrix."""
    ambient, a = _coefficient_matrix(forms)
    d = linalg.det(a)
    if d == 0:
        raise ImproperGenericIntersection("coefficient matrix is singular")
    return ambient.ctx.val(d)


def _special_intersection_rows(cfg: CycleConfiguration):
    """Reduced echelon basis of the intersection of the reduced spans in F_p^n."""
    p = cfg.ambient.ctx.p
    cur = None
    for s in cfg.submodules:
        rows = linalg.echelon_mod_p([list(c) for c in s.reduction()], p)[0]
        cur = rows if cur is None else linalg.intersect_mod_p(cur, rows, p)
        if not cur:
            return ()
    return tuple(tuple(r) for r in cur)


def properness_check(cfg: CycleConfiguration) -> PropernessReport:
    """Classify the configuration by its generic and special intersections.

    With c the sum of the codimensions: for c = n the cycles meet properly
    exactly when the K-spans meet in 0 and the reductions meet in dimension
    at most 1 (dimension 0 is the empty case); for c < n the expected
    dimension r0 = n - c must be attained over K and the reduced intersection
    may exceed it by at most one.  Everything else is improper on the model.
    """
    n = cfg.ambient.dim
    c = cfg.codim_sum()
    generic_dim = intersect_spans(cfg.ambient, cfg.submodules).rank
    special_dim = len(_special_intersection_rows(cfg))
    if c > n:
        kind = Properness.EMPTY_INTERSECTION if special_dim == 0 else Properness.IMPROPER
        r0 = 0
    elif c == n:
        r0 = 0
        if generic_dim == 0 and special_dim == 0:
            kind = Properness.EMPTY_INTERSECTION
        elif generic_dim == 0 and special_dim == 1:
            kind = Properness.PROPER_0DIM
        else:
            kind = Properness.IMPROPER
    else:
        r0 = n - c
        if generic_dim == r0 and special_dim <= r0 + 1:
            kind = Properness.PROPER_HIGHER_DIM
        else:
            kind = Properness.IMPROPER
    return PropernessReport(kind=kind, r0=r0, generic_dim=generic_dim, special_dim=special_dim)


def vertex_family(cfg: CycleConfiguration) -> VertexFamily:
    """Family generated by the partial intersections L_j of all cycles but one.

    Only defined when the codimensions sum to n and the configuration is
    proper (possibly with empty special-fibre intersection); each L_j then
    has rank n - r_j and their direct sum is all of V.
    """
    n = cfg.ambient.dim
    if cfg.codim_sum() != n:
        raise ProperFail("codimensions do not sum to the dimension")
    report = properness_check(cfg)
    if report.kind not in (Properness.PROPER_0DIM, Properness.EMPTY_INTERSECTION):
        raise ProperFail(f"configuration is {report.kind.value}")
    subs = cfg.submodules
    gens = []
    for j in range(len(subs)):
        others = [subs[i] for i in range(len(subs)) if i != j]
        lj = intersect_spans(cfg.ambient, others)
        if lj.rank != n - subs[j].rank:
            raise RankMismatch(
                f"partial intersection {j} has rank {lj.rank}, expected {n - subs[j].rank}"
            )
        gens.append(lj)
    return VertexFamily(cfg.ambient, tuple(gens))


class _MinorValuationProfile:
    """Valuations of the minors of the fixed transition matrix T0, organized
    so that the distance from {M} to any scaled family member is a handful of
    integer operations.

    Scaling generator j by p^{k_j} multiplies each minor with row set I by
    p^{-sum of k over I}, and the extreme invariant-factor exponents are
    partial minima of minor valuations, so only row subsets of sizes 1, n-1
    and n matter.
    """

    def __init__(self, ctx, t0_rows, row_block):
        n = len(t0_rows)
        self.n = n
        nblocks = max(row_block) + 1
        masks_by_size = [[] for _ in range(n + 1)]
        for mask in range(1, 1 << n):
            masks_by_size[mask.bit_count()].append(mask)
        dets = {}
        for i in range(n):
            for j in range(n):
                dets[(1 << i, 1 << j)] = Fraction(t0_rows[i][j])
        for size in range(2, n + 1):
            for rmask in masks_by_size[size]:
                r = rmask.bit_length() - 1
                rrest = rmask ^ (1 << r)
                row = t0_rows[r]
                for cmask in masks_by_size[size]:
                    cols = [c for c in range(n) if cmask >> c & 1]
                    acc = Fraction(0)
                    sign = 1 if (size - 1) % 2 == 0 else -1
                    for idx, c in enumerate(cols):
                        a = row[c]
                        if a:
                            sub = dets[(rrest, cmask ^ (1 << c))]
                            if sub:
                                acc += sign * a * sub if idx % 2 == 0 else -sign * a * sub
                    dets[(rmask, cmask)] = acc

        def mask_counts(mask):
            counts = [0] * nblocks
            for i in range(n):
                if mask >> i & 1:
                    counts[row_block[i]] += 1
            return tuple(counts)

        def row_entries(size):
            entries = []
            for rmask in masks_by_size[size]:
                vals = [
                    ctx.val(dets[(rmask, cmask)])
                    for cmask in masks_by_size[size]
                    if dets[(rmask, cmask)]
                ]
                if vals:
                    entries.append((min(vals), mask_counts(rmask)))
            return entries

        self.singles = row_entries(1)
        self.co_singles = row_entries(n - 1) if n > 1 else []
        full = (1 << n) - 1
        self.total_val = ctx.val(dets[(full, full)])
        self.block_sizes = mask_counts(full)

    def distance(self, kvec) -> int:
        """max - min of the invariant exponents of the row-scaled transition."""
        m1 = min(v - sum(c * k for c, k in zip(counts, kvec)) for v, counts in self.singles)
        if self.n == 1:
            mn1 = 0
        else:
            mn1 = min(v - sum(c * k for c, k in zip(counts, kvec)) for v, counts in self.co_singles)
        mn = self.total_val - sum(c * k for c, k in zip(self.block_sizes, kvec))
        return (mn - mn1) - m1


def _family_profile(lattice: LatticeBasis, family: VertexFamily) -> _MinorValuationProfile:
    ambient = family.ambient
    cols = family.concatenated_columns()
    t0 = linalg.inv(linalg.columns_to_rows(cols))
    if lattice != ambient:
        rel = linalg.matmul(ambient.inverse_rows(), lattice.rows())
        t0 = linalg.matmul(t0, rel)
    row_block = []
    for b, g in enumerate(family.generators):
        row_block.extend([b] * g.rank)
    return _MinorValuationProfile(ambient.ctx, t0, row_block)


def _tuples_with_spread(nfree: int, spread: int):
    """All integer tuples of length nfree+1 ending in 0 whose max - min,
    including the trailing 0, equals the given spread."""
    if spread == 0:
        yield (0,) * (nfree + 1)
        return
    for lo in range(-spread, 1):
        hi = lo + spread
        for tup in product(range(lo, hi + 1), repeat=nfree):
            vals = tup + (0,)
            if min(vals) == lo and max(vals) == hi:
                yield vals


def distance_to_family(lattice: LatticeBasis, family: VertexFamily) -> int:
    """Exact minimal distance from the lattice class to the family's vertices.

    With B0 the distance to the all-zero member, the distance between the
    all-zero member and any scaled member equals the exponent spread, so the
    triangle inequality confines every minimizer to spreads at most 2*B0.
    Candidates are scanned in order of increasing spread with the last
    exponent pinned to 0 (homothety), stopping once no remaining spread can
    beat the best value found; the result is the exact minimum.
    """
    profile = _family_profile(lattice, family)
    m = len(family.generators)
    b0 = profile.distance((0,) * m)
    if b0 == 0:
        return 0
    best = b0
    for spread in range(1, 2 * b0 + 1):
        if spread - b0 > best:
            break
        for kvec in _tuples_with_spread(m - 1, spread):
            d = profile.distance(kvec)
            if d < best:
                best = d
                if best == 0:
                    return 0
    return best


def family_window_keys(reference: LatticeBasis, family: VertexFamily):
    """Class keys of every family member in the exactness window around the
    reference, for use as a BFS target set.  No pruning is applied: the whole
    window of exponent tuples with spread at most 2*B0 is enumerated."""
    profile = _family_profile(reference, family)
    m = len(family.generators)
    b0 = profile.distance((0,) * m)
    keys = set()
    for spread in range(0, 2 * b0 + 1):
        for kvec in _tuples_with_spread(m - 1, spread):
            keys.add(class_key(reference, family.member_lattice(kvec)))
    return keys


def realized_forms(cfg: CycleConfiguration):
    """Primitive forms cutting out each cycle as an intersection of hyperplanes.

    For each cycle the basis is completed to a basis of the lattice and the
    dual vectors of the completion are taken; the determinant valuation of the
    assembled matrix does not depend on the choice of completion.
    """
    ambient = cfg.ambient
    n = ambient.dim
    full = SplitSubmodule(ambient, [[1 if i == j else 0 for i in range(n)] for j in range(n)])
    forms = []
    for s in cfg.submodules:
        comp = complete_to_complement(full, s)
        u_cols = [list(c) for c in s.columns] + [list(c) for c in comp.columns]
        u_inv = linalg.inv(linalg.columns_to_rows(u_cols))
        for pos in range(s.rank, n):
            forms.append(DualForm(ambient, tuple(u_inv[pos])))
    return forms


def verify_intersection_identity(cfg: CycleConfiguration) -> IdentityReport:
    """Check that the algebraic intersection number equals the distance from
    the model's vertex to the vertex family of partial intersections.

    The left side is the determinant valuation of an assembled form matrix;
    the right side is the exact family distance.  Both are computed
    independently.
    """
    report = properness_check(cfg)
    if report.kind not in (Properness.PROPER_0DIM, Properness.EMPTY_INTERSECTION):
        raise ProperFail(f"configuration is {report.kind.value}")
    lhs = intersect_hyperplanes(realized_forms(cfg))
    rhs = distance_to_family(cfg.ambient, vertex_family(cfg))
    return IdentityReport(lhs=lhs, rhs=rhs, agree=lhs == rhs, properness=report)


def apartment_lines(forms):
    """The n lines obtained by intersecting the kernels of all forms but one.

    Requires the coefficient matrix to be nonsingular; the lines then span V
    and define the apartment attached to the generic-fibre hyperplanes.
    """
    ambient, a = _coefficient_matrix(forms)
    if linalg.det(a) == 0:
        raise ImproperGenericIntersection("coefficient matrix is singular")
    forms = list(forms)
    n = ambient.dim
    lines = []
    for j in range(n):
        rows = [list(forms[i].coefficients) for i in range(n) if i != j]
        null = linalg.nullspace(rows)
        assert len(null) == 1, "kernel of n-1 independent forms must be a line"
        lines.append(saturate_coords(ambient, null))
    return lines


def apartment_distance_report(forms) -> ApartmentReport:
    """Distance from the model's vertex to the apartment of the generic-fibre
    hyperplanes, next to the intersection number of the forms.

    The two agree when the forms meet properly on the whole model; when they
    meet properly only on the generic fibre the distance can be strictly
    smaller (it is the largest diagonal valuation after triangularization,
    while the intersection number is the sum).
    """
    ambient, a = _coefficient_matrix(forms)
    d = linalg.det(a)
    if d == 0:
        raise ImproperGenericIntersection("coefficient matrix is singular")
    family = VertexFamily(ambient, tuple(apartment_lines(forms)))
    return ApartmentReport(
        dist_to_apartment=distance_to_family(ambient, family),
        intersection_number=ambient.ctx.val(d),
    )


def _higherdim_parts(cfg: CycleConfiguration, complements=None):
    n = cfg.ambient.dim
    report = properness_check(cfg)
    if report.kind is not Properness.PROPER_HIGHER_DIM:
        raise ProperFail(f"configuration is {report.kind.value}")
    r0 = report.r0
    l0 = intersect_spans(cfg.ambient, cfg.submodules)
    if l0.rank != r0:
        raise RankMismatch(f"common intersection has rank {l0.rank}, expected {r0}")
    subs = cfg.submodules
    ljs = []
    for j in range(len(subs)):
        others = [subs[i] for i in range(len(subs)) if i != j]
        lj = intersect_spans(cfg.ambient, others)
        if lj.rank != n - subs[j].rank + r0:
            raise RankMismatch(
                f"partial intersection {j} has rank {lj.rank}, "
                f"expected {n - subs[j].rank + r0}"
            )
        ljs.append(lj)
    if complements is None:
        comps = [complete_to_complement(lj, l0) for lj in ljs]
    else:
        comps = list(complements)
        if len(comps) != len(ljs):
            raise ValueError("need one complement per cycle")
        for lj, comp in zip(ljs, comps):
            combined = SplitSubmodule(cfg.ambient, tuple(l0.columns) + tuple(comp.columns))
            if not same_submodule(combined, lj):
                raise ValueError("supplied complement does not complement the intersection")
    family = VertexFamily(cfg.ambient, (*comps, l0))
    return l0, family


def higherdim_vertex_family(cfg: CycleConfiguration, complements=None) -> VertexFamily:
    """Family generated by complements of the common intersection inside each
    partial intersection, with the common intersection as the last generator.

    The complements default to the deterministic greedy completion; any valid
    choice of complements may be supplied instead.
    """
    return _higherdim_parts(cfg, complements)[1]


def decompose_intersection(cfg: CycleConfiguration, complements=None) -> CycleDecomposition:
    """Intersection cycle of cycles meeting properly in positive dimension.

    The generic component is the saturation of the common K-intersection and
    always has multiplicity one.  The special component is the common
    intersection of the reductions over F_p; it carries the distance from the
    model's vertex to the complement family as its multiplicity, which does
    not depend on the choice of complements.
    """
    l0, family = _higherdim_parts(cfg, complements)
    return CycleDecomposition(
        generic_component=l0,
        generic_multiplicity=1,
        special_component=_special_intersection_rows(cfg),
        special_multiplicity=distance_to_family(cfg.ambient, family),
    )


# ---------------------------------------------------------------------------
# seeded random instances for verification campaigns

MODES = ("hyperplanes", "submodules", "higherdim")


def _random_scalar(rng: random.Random, p: int, max_val: int) -> Fraction:
    """Entry sampler: zero sometimes, otherwise a unit times a p-power whose
    exponent is geometric with cutoff max_val."""
    if rng.random() < 0.15:
        return Fraction(0)
    e = 0
    while e < max_val and rng.random() < 0.45:
        e += 1
    u = rng.randrange(1, 3 * p)
    while u % p == 0:
        u = rng.randrange(1, 3 * p)
    if rng.random() < 0.5:
        u = -u
    return Fraction(u * p**e)


def _random_form(rng: random.Random, ambient: LatticeBasis, max_val: int) -> DualForm:
    ctx = ambient.ctx
    while True:
        coeffs = [_random_scalar(rng, ctx.p, max_val) for _ in range(ambient.dim)]
        if not any(coeffs):
            continue
        shift = min(ctx.val(c) for c in coeffs if c)
        scale = Fraction(ctx.p) ** shift
        return DualForm(ambient, tuple(c / scale for c in coeffs))


def _random_split(rng: random.Random, ambient: LatticeBasis, rank: int, max_val: int) -> SplitSubmodule:
    ctx = ambient.ctx
    while True:
        vecs = [
            [_random_scalar(rng, ctx.p, max_val) for _ in range(ambient.dim)]
            for _ in range(rank)
        ]
        sat = saturate(ambient, vecs)
        if sat.rank == rank:
            return sat


def _compositions(total: int, parts: int, n: int):
    """All tuples of `parts` codimensions in [1, n-1] summing to `total`."""
    if parts == 1:
        return [(total,)] if 1 <= total <= n - 1 else []
    out = []
    for first in range(1, n):
        if first < total:
            out.extend((first,) + rest for rest in _compositions(total - first, parts - 1, n))
    return out


def random_instance(
    seed: int,
    n: int,
    p: int,
    d: int,
    max_val: int,
    mode: str,
    max_attempts: int = 2000,
) -> InstanceSample:
    """Deterministic seeded configuration of the requested properness class.

    Rejection-samples until the properness check passes: hyperplane and
    submodule modes produce proper zero-dimensional configurations, higherdim
    mode produces proper positive-dimensional ones.  The rejection count is
    reported alongside the instance.
    """
    if not 2 <= n <= 5:
        raise ValueError("n must be between 2 and 5")
    if not 2 <= d <= n:
        raise ValueError("d must be between 2 and n")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if mode == "hyperplanes" and d != n:
        raise ValueError("hyperplane mode needs d == n")
    if mode == "higherdim" and d >= n:
        raise ValueError("higherdim mode needs d < n")
    ctx = PAdicContext(p)
    ambient = LatticeBasis.standard(ctx, n)
    rng = random.Random(seed)
    target = Properness.PROPER_HIGHER_DIM if mode == "higherdim" else Properness.PROPER_0DIM
    rejections = 0
    for _ in range(max_attempts):
        forms = None
        if mode == "hyperplanes":
            forms = tuple(_random_form(rng, ambient, max_val) for _ in range(n))
            subs = [hyperplane_kernel(f) for f in forms]
        else:
            total = n if mode == "submodules" else rng.randrange(d, n)
            codims = rng.choice(_compositions(total, d, n))
            subs = [_random_split(rng, ambient, n - m, max_val) for m in codims]
        try:
            cfg = CycleConfiguration(ambient, subs)
        except ValueError:
            rejections += 1
            continue
        if properness_check(cfg).kind is target:
            return InstanceSample(config=cfg, forms=forms, rejections=rejections)
        rejections += 1
    raise GenerationExhausted(f"no {target.value} instance after {max_attempts} attempts")
