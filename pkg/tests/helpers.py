"""Shared test helpers: independent oracles and randomized constructions."""

from __future__ import annotations

import random
from fractions import Fraction
from math import lcm

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from btpgl import linalg
from btpgl.cycles import CycleConfiguration
from btpgl.lattices import LatticeBasis, SplitSubmodule
from btpgl.padic import int_val


def sympy_invariant_exponents(rows, p):
    """Elementary-divisor p-exponents via sympy's Smith form over ZZ.

    Independent of the library's valuation-pivoted elimination.  Rational
    entries are cleared to integers first and the scaling shift subtracted.
    Returns (sorted finite exponents, number of zero divisors).
    """
    fr = [[Fraction(x) for x in row] for row in rows]
    n = len(fr)
    denom = lcm(*(x.denominator for row in fr for x in row))
    m = Matrix(n, n, lambda i, j: int(fr[i][j] * denom))
    snf = smith_normal_form(m, domain=ZZ)
    shift = int_val(denom, p)
    finite = []
    zeros = 0
    for i in range(n):
        d = int(snf[i, i])
        if d == 0:
            zeros += 1
        else:
            finite.append(int_val(d, p) - shift)
    return sorted(finite), zeros


def random_unimodular(rng: random.Random, n: int, p: int, steps: int = 6):
    """Random integer matrix, unimodular over the valuation ring."""
    m = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i = rng.randrange(n)
        j = rng.randrange(n)
        while j == i:
            j = rng.randrange(n)
        op = rng.randrange(3)
        if op == 0:
            c = rng.randrange(-2, 3)
            m[i] = [x + c * y for x, y in zip(m[i], m[j])]
        elif op == 1:
            m[i], m[j] = m[j], m[i]
        else:
            u = rng.randrange(1, 2 * p)
            while u % p == 0:
                u = rng.randrange(1, 2 * p)
            if rng.random() < 0.5:
                u = -u
            m[i] = [u * x for x in m[i]]
    return m


def random_lattice(rng: random.Random, ctx, n: int, spread: int) -> LatticeBasis:
    """Random lattice at the given invariant-exponent spread from the standard one."""
    exps = [0, spread] + [rng.randrange(0, spread + 1) for _ in range(n - 2)]
    rng.shuffle(exps)
    diag = [[Fraction(ctx.p) ** exps[i] if i == j else 0 for j in range(n)] for i in range(n)]
    u = random_unimodular(rng, n, ctx.p)
    rows = linalg.matmul(u, diag)
    shift = rng.randrange(-2, 3)
    scale = Fraction(ctx.p) ** shift
    return LatticeBasis.from_rows(ctx, [[scale * x for x in row] for row in rows])


def apply_automorphism(cfg: CycleConfiguration, u_rows) -> CycleConfiguration:
    """Image configuration under the lattice automorphism with matrix U."""
    subs = [
        SplitSubmodule(cfg.ambient, [linalg.matvec(u_rows, list(c)) for c in s.columns])
        for s in cfg.submodules
    ]
    return CycleConfiguration(cfg.ambient, subs)


def rebase(cfg: CycleConfiguration, u_rows) -> CycleConfiguration:
    """Same configuration expressed in the basis M*U of the same lattice."""
    amb2 = cfg.ambient.right_multiply(u_rows)
    uinv = linalg.inv(u_rows)
    subs = [
        SplitSubmodule(amb2, [linalg.matvec(uinv, list(c)) for c in s.columns])
        for s in cfg.submodules
    ]
    return CycleConfiguration(amb2, subs)
