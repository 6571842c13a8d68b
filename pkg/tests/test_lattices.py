import random
from fractions import Fraction

import pytest

from btpgl import linalg
from btpgl.errors import NonIntegralEntry, NotSplitInside, NotUnimodular
from btpgl.lattices import (
    DualForm,
    LatticeBasis,
    SplitSubmodule,
    complete_to_complement,
    intersect_spans,
    invariant_exponents,
    is_split,
    same_submodule,
    saturate,
    transform_dual_form,
    triangularize,
)
from btpgl.padic import INFINITY, PAdicContext

from helpers import random_unimodular, sympy_invariant_exponents

ctx2 = PAdicContext(2)
ctx3 = PAdicContext(3)
ctx5 = PAdicContext(5)


def diag_vals(ctx, res):
    return [ctx.val(res.B[i][i]) for i in range(len(res.B))]


def assert_valid_triangularization(ctx, a, res):
    n = len(a)
    recomposed = linalg.matmul(linalg.matmul(list(map(list, res.C)), a), list(map(list, res.D)))
    assert [list(r) for r in res.B] == recomposed
    # C unimodular over the valuation ring
    assert ctx.val(linalg.det(res.C)) == 0
    assert all(ctx.is_integral(x) for row in res.C for x in row)
    # D is a permutation matrix
    for row in res.D:
        assert sorted(row) == [0] * (n - 1) + [1]
    for col in zip(*res.D):
        assert sorted(col) == [0] * (n - 1) + [1]
    # B upper triangular with the divisibility pattern
    for i in range(n):
        for j in range(i):
            assert res.B[i][j] == 0
        for j in range(i, n):
            assert ctx.val(res.B[i][i]) <= ctx.val(res.B[i][j])
    dv = diag_vals(ctx, res)
    assert all(dv[i] <= dv[i + 1] for i in range(n - 1))


def test_triangularize_identity():
    res = triangularize(ctx2, linalg.identity(3))
    assert res.B == res.C == res.D == tuple(tuple(r) for r in linalg.identity(3))


def test_triangularize_unit_pivot_first():
    a = [[2, 1], [1, 1]]
    res = triangularize(ctx2, a)
    assert_valid_triangularization(ctx2, a, res)
    assert diag_vals(ctx2, res) == [0, 0]
    assert ctx2.val(linalg.det(res.B)) == ctx2.val(linalg.det(a)) == 0


def test_triangularize_worked_example():
    a = [[3, 3], [3, 12]]
    res = triangularize(ctx3, a)
    assert_valid_triangularization(ctx3, a, res)
    # elementary-divisor exponents of this matrix are (1, 2)
    assert sorted(diag_vals(ctx3, res)) == [1, 2]
    assert ctx3.val(linalg.det(res.B)) == 3


def test_triangularize_rejects_non_integral():
    with pytest.raises(NonIntegralEntry):
        triangularize(ctx2, [[Fraction(1, 2), 0], [0, 1]])


def test_triangularize_singular_matrix():
    a = [[2, 4], [1, 2]]
    res = triangularize(ctx2, a)
    assert_valid_triangularization(ctx2, a, res)
    assert diag_vals(ctx2, res)[-1] is INFINITY


@pytest.mark.parametrize("p", [2, 3, 5])
def test_triangularize_matches_smith_oracle(p):
    ctx = PAdicContext(p)
    rng = random.Random(p * 17)
    for _ in range(40):
        n = rng.randrange(2, 5)
        a = [[rng.randrange(-20, 21) for _ in range(n)] for _ in range(n)]
        res = triangularize(ctx, a)
        assert_valid_triangularization(ctx, a, res)
        dv = diag_vals(ctx, res)
        finite = sorted(v for v in dv if v is not INFINITY)
        zeros = sum(1 for v in dv if v is INFINITY)
        assert (finite, zeros) == sympy_invariant_exponents(a, p)


def test_invariant_exponents_examples():
    std = LatticeBasis.standard(ctx2, 2)
    assert invariant_exponents(std, std) == (0, 0)
    halved = LatticeBasis.diagonal(ctx2, [1, Fraction(1, 2)])
    assert invariant_exponents(std, halved) == (0, 1)
    std3 = LatticeBasis.standard(ctx3, 2)
    other = LatticeBasis(ctx3, [(1, 0), (1, Fraction(1, 9))])
    assert invariant_exponents(std3, other) == (0, 2)


def test_invariant_exponents_match_smith_oracle():
    rng = random.Random(11)
    for p in (2, 3):
        ctx = PAdicContext(p)
        for _ in range(20):
            n = rng.randrange(2, 4)
            std = LatticeBasis.standard(ctx, n)
            other = LatticeBasis.from_rows(
                ctx,
                linalg.matmul(
                    random_unimodular(rng, n, p),
                    [[Fraction(p) ** rng.randrange(-2, 3) if i == j else 0 for j in range(n)] for i in range(n)],
                ),
            )
            t = linalg.matmul(other.inverse_rows(), std.rows())
            oracle, zeros = sympy_invariant_exponents(t, p)
            assert zeros == 0
            assert list(invariant_exponents(std, other)) == oracle


def test_invariant_exponents_antisymmetry_and_invariance():
    rng = random.Random(23)
    for p in (2, 3):
        ctx = PAdicContext(p)
        for _ in range(15):
            n = rng.randrange(2, 4)
            a = LatticeBasis.from_rows(
                ctx, linalg.matmul(random_unimodular(rng, n, p), linalg.identity(n))
            )
            exps_d = [Fraction(p) ** rng.randrange(0, 4) for _ in range(n)]
            b = LatticeBasis.from_rows(
                ctx,
                linalg.matmul(random_unimodular(rng, n, p), [[exps_d[i] if i == j else 0 for j in range(n)] for i in range(n)]),
            )
            ab = invariant_exponents(a, b)
            ba = invariant_exponents(b, a)
            assert list(ab) == sorted(-x for x in ba)
            u = random_unimodular(rng, n, p)
            assert invariant_exponents(a, b.right_multiply(u)) == ab
            assert invariant_exponents(a.right_multiply(u), b) == ab
            c = rng.randrange(1, 3)
            shifted = invariant_exponents(a, b.scale(Fraction(p) ** c))
            assert list(shifted) == [x - c for x in ab]


def test_is_split_examples():
    std = LatticeBasis.standard(ctx2, 2)
    assert is_split(SplitSubmodule(std, [(1, 0)]))
    assert not is_split(SplitSubmodule(std, [(2, 0)]))
    std3 = LatticeBasis.standard(ctx3, 3)
    assert is_split(SplitSubmodule(std3, [(1, 0, 0), (0, 1, 3)]))
    assert is_split(SplitSubmodule(std3, ()))


def test_submodule_rejects_non_integral_coords():
    std = LatticeBasis.standard(ctx2, 2)
    with pytest.raises(NonIntegralEntry):
        SplitSubmodule(std, [(Fraction(1, 2), 0)])


def test_saturate_examples():
    std = LatticeBasis.standard(ctx5, 2)
    sat = saturate(std, [(5, 0)])
    assert sat.columns == ((1, 0),)
    full = saturate(LatticeBasis.standard(ctx3, 2), [(1, 0), (0, 2), (1, 1)])
    assert full.rank == 2

    std3 = LatticeBasis.standard(ctx2, 3)
    sat = saturate(std3, [(1, 1, 0), (1, 1, 2)])
    assert sat.rank == 2
    assert is_split(sat)
    # saturation contains (0,0,1) = ((1,1,2)-(1,1,0))/2
    coeffs = linalg.solve_columns([list(c) for c in sat.columns], [0, 0, 1])
    assert coeffs is not None and all(ctx2.is_integral(x) for x in coeffs)
    # same K-span as the input
    stacked = [list(c) for c in sat.columns] + [[1, 1, 0], [1, 1, 2]]
    assert linalg.rank(linalg.columns_to_rows(stacked)) == 2


def test_saturate_is_idempotent_and_split():
    rng = random.Random(3)
    for p in (2, 3):
        ctx = PAdicContext(p)
        std = LatticeBasis.standard(ctx, 3)
        for _ in range(15):
            vecs = [
                [Fraction(rng.randrange(-8, 9), rng.choice([1, 1, p])) for _ in range(3)]
                for _ in range(rng.randrange(1, 3))
            ]
            if all(not any(v) for v in vecs):
                continue
            sat = saturate(std, vecs)
            assert is_split(sat)
            again = saturate(std, sat.standard_columns())
            assert same_submodule(sat, again)


def test_intersect_spans_examples():
    std3 = LatticeBasis.standard(ctx3, 3)
    n1 = SplitSubmodule(std3, [(1, 0, 0), (0, 1, 0)])
    n2 = SplitSubmodule(std3, [(1, 0, 0), (0, 1, 9)])
    single = intersect_spans(std3, [n1])
    assert same_submodule(single, n1)
    inter = intersect_spans(std3, [n1, n2])
    assert inter.rank == 1
    assert same_submodule(inter, SplitSubmodule(std3, [(1, 0, 0)]))

    std2 = LatticeBasis.standard(ctx2, 2)
    h1 = SplitSubmodule(std2, [(1, 0)])
    h2 = SplitSubmodule(std2, [(0, 1)])
    assert intersect_spans(std2, [h1, h2]).rank == 0


def test_complete_to_complement_trivial_cases():
    std = LatticeBasis.standard(ctx3, 3)
    outer = SplitSubmodule(std, [(1, 0, 0), (0, 1, 9)])
    assert complete_to_complement(outer, outer).rank == 0
    zero = SplitSubmodule(std, ())
    assert same_submodule(complete_to_complement(outer, zero), outer)


def test_complete_to_complement_worked_example():
    std = LatticeBasis.standard(ctx3, 3)
    outer = SplitSubmodule(std, [(1, 0, 0), (0, 1, 9)])
    inner = SplitSubmodule(std, [(1, 0, 0)])
    comp = complete_to_complement(outer, inner)
    assert comp.columns == ((0, 1, 9),)
    combined = SplitSubmodule(std, tuple(inner.columns) + tuple(comp.columns))
    assert same_submodule(combined, outer)


def test_complete_to_complement_direct_sum_oracle():
    rng = random.Random(9)
    for p in (2, 3):
        ctx = PAdicContext(p)
        std = LatticeBasis.standard(ctx, 3)
        full = SplitSubmodule(std, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
        for _ in range(15):
            vecs = [[rng.randrange(-6, 7) for _ in range(3)] for _ in range(rng.randrange(1, 3))]
            if all(not any(v) for v in vecs):
                continue
            inner = saturate(std, vecs)
            comp = complete_to_complement(full, inner)
            cols = tuple(inner.columns) + tuple(comp.columns)
            recombined = LatticeBasis(ctx, [list(c) for c in cols])
            assert invariant_exponents(std, recombined) == (0,) * 3


def test_complete_to_complement_rejects_non_split_inner():
    std = LatticeBasis.standard(ctx2, 2)
    full = SplitSubmodule(std, [(1, 0), (0, 1)])
    inner = SplitSubmodule(std, [(2, 0)])
    with pytest.raises(NotSplitInside):
        complete_to_complement(full, inner)
    outside = SplitSubmodule(std, [(1, 1)])
    narrow = SplitSubmodule(std, [(1, 0)])
    with pytest.raises(NotSplitInside):
        complete_to_complement(narrow, outside)


def test_dual_form_validation():
    std = LatticeBasis.standard(ctx2, 2)
    with pytest.raises(ValueError):
        DualForm(std, (2, 4))
    with pytest.raises(NonIntegralEntry):
        DualForm(std, (Fraction(1, 2), 1))
    DualForm(std, (1, 2))


def test_transform_dual_form_examples():
    std = LatticeBasis.standard(ctx2, 2)
    f = DualForm(std, (1, 0))
    assert transform_dual_form(linalg.identity(2), f).coefficients == f.coefficients
    perm = [[0, 1], [1, 0]]
    assert transform_dual_form(perm, f).coefficients == (0, 1)
    b = [[1, 1], [0, 1]]
    assert transform_dual_form(b, f).coefficients == (1, -1)


def test_transform_dual_form_rejects_non_unimodular():
    std = LatticeBasis.standard(ctx2, 2)
    f = DualForm(std, (1, 0))
    with pytest.raises(NotUnimodular):
        transform_dual_form([[2, 0], [0, 1]], f)
    with pytest.raises(NotUnimodular):
        transform_dual_form([[Fraction(1, 2), 0], [0, 1]], f)


def test_transform_dual_form_preserves_vanishing():
    rng = random.Random(31)
    std = LatticeBasis.standard(ctx3, 3)
    f = DualForm(std, (1, 3, 2))
    for _ in range(10):
        u = random_unimodular(rng, 3, 3)
        g = transform_dual_form(u, f)
        for col in [(-3, 1, 0), (-2, 0, 1)]:
            image = linalg.matvec(u, list(col))
            assert g.evaluate_coords(image) == f.evaluate_coords(col) == 0
