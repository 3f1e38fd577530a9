from itertools import combinations
from math import gcd

import pytest
import sympy
from hypothesis import given, strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from toricstack import intlin
from toricstack.errors import InfiniteCokernel


def matrices(max_rows=5, max_cols=7):
    return st.integers(1, max_rows).flatmap(
        lambda m: st.integers(1, max_cols).flatmap(
            lambda n: st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n), min_size=m, max_size=m)
        )
    )


def minor_gcd(A, k):
    m, n = len(A), len(A[0])
    g = 0
    for rows in combinations(range(m), k):
        for cols in combinations(range(n), k):
            g = gcd(g, int(sympy.Matrix([[A[r][c] for c in cols] for r in rows]).det()))
    return g


def test_snf_small():
    snf = intlin.smith_normal_form([[2, 0], [0, 3]])
    assert snf.invariant_factors == [1, 6]
    assert intlin.smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]).invariant_factors == [2, 6, 12]


@given(matrices())
def test_snf_transforms_and_divisibility(A):
    snf = intlin.smith_normal_form(A)
    assert intlin.matmul(intlin.matmul(snf.left, A), snf.right) == snf.diag
    assert abs(intlin.det(snf.left)) == 1 and abs(intlin.det(snf.right)) == 1
    d = snf.invariant_factors
    assert all(x >= 0 for x in d)
    nz = [x for x in d if x]
    assert d[: len(nz)] == nz
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    for i, row in enumerate(snf.diag):
        for j, x in enumerate(row):
            assert i == j or x == 0


@given(matrices(4, 5))
def test_snf_matches_minor_gcds(A):
    d = intlin.smith_normal_form(A).invariant_factors
    prod = 1
    for k in range(1, len(d) + 1):
        prod *= d[k - 1]
        assert prod == minor_gcd(A, k)


@given(matrices(4, 5))
def test_snf_agrees_with_sympy(A):
    ours = intlin.smith_normal_form(A).invariant_factors
    theirs = sympy_snf(sympy.Matrix(A), domain=sympy.ZZ)
    theirs = [abs(int(theirs[i, i])) for i in range(min(theirs.shape))]
    assert sorted(ours) == sorted(theirs)


def test_kernel_examples():
    assert intlin.kernel_basis([[1, -1]]) in ([[1], [1]], [[-1], [-1]])
    K = intlin.kernel_basis([[1, 0, -1], [0, 1, -2]])
    assert [r[0] for r in K] in ([1, 2, 1], [-1, -2, -1])


@given(matrices())
def test_kernel_is_saturated_basis(A):
    n = len(A[0])
    K = intlin.kernel_basis(A, n)
    k = intlin.ncols(K)
    assert k == n - int(sympy.Matrix(A).rank())
    if k:
        assert all(not any(row) for row in intlin.matmul(A, K))
        assert intlin.smith_normal_form(K).invariant_factors == [1] * k


def test_cokernel_examples():
    G = intlin.cokernel([[2, 0], [0, 3]])
    assert G.free_rank == 0 and G.order_of_torsion == 6
    G = intlin.cokernel([[1], [1]])
    assert G.free_rank == 1 and G.order_of_torsion == 1


def test_gale_dual_p1_and_p121():
    g = intlin.gale_dual([[1, -1]])
    assert g.dual_image([1, 0]) in ((1,), (-1,))
    g = intlin.gale_dual([[1, 0, -1], [0, 1, -2]])
    imgs = [g.dual_image(e) for e in ([1, 0, 0], [0, 1, 0], [0, 0, 1])]
    assert imgs in ([(1,), (2,), (1,)], [(-1,), (-2,), (-1,)])


def test_gale_dual_rejects_infinite_cokernel():
    with pytest.raises(InfiniteCokernel):
        intlin.gale_dual([[1, 1], [2, 2]])


def test_gale_dual_with_torsion():
    G = intlin.FinAbGroup(1, (2,))
    g = intlin.gale_dual([[1, 1], [0, 1]], G)
    assert [r[0] for r in g.kernel_basis] in ([2, -2], [-2, 2])
