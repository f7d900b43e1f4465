import random
from fractions import Fraction as F

from hypothesis import given, settings, strategies as st

from stokes_gaussian.linalg import (
    Matrix,
    Subspace,
    intersect,
    kernel,
    sparse_from_blocks,
    sparse_kernel_basis,
    sparse_rank,
    subspace_sum,
)


def _m(rows):
    return Matrix([[F(x) for x in r] for r in rows])


def test_kernel_example():
    assert kernel(_m([[1, 1], [1, 1]])).rows == [[F(1), F(-1)]]


def test_rank_identity():
    assert Matrix.identity(3).rank() == 3


def test_intersect_example():
    U = Subspace.from_vectors([[F(1), F(0)]], 2)
    V = Subspace.from_vectors([[F(0), F(1)]], 2)
    assert intersect(U, V).dim == 0


def test_solve_and_inverse():
    A = _m([[2, 1], [1, 1]])
    x = A.solve([F(3), F(2)])
    assert A.apply(x) == [F(3), F(2)]
    assert A * A.inverse() == Matrix.identity(2)
    assert _m([[1, 1], [1, 1]]).solve([F(1), F(0)]) is None


def _rand_matrix(rng, m, n):
    return Matrix([[F(rng.randint(-4, 4)) for _ in range(n)] for _ in range(m)], ncols=n)


def test_rank_nullity_random():
    rng = random.Random(0)
    for _ in range(25):
        m, n = rng.randint(1, 5), rng.randint(1, 5)
        A = _rand_matrix(rng, m, n)
        assert A.rank() + len(A.kernel_basis()) == n


def test_dim_formula_random():
    rng = random.Random(1)
    for _ in range(25):
        n = rng.randint(1, 5)
        U = Subspace.from_vectors(_rand_matrix(rng, rng.randint(0, n), n).rows, n)
        V = Subspace.from_vectors(_rand_matrix(rng, rng.randint(0, n), n).rows, n)
        assert U.dim + V.dim == intersect(U, V).dim + subspace_sum(U, V).dim


def test_rref_canonical():
    rng = random.Random(2)
    for _ in range(10):
        n = rng.randint(2, 4)
        A = _rand_matrix(rng, 3, n)
        S1 = Subspace.from_vectors(A.rows, n)
        shuffled = list(A.rows)
        rng.shuffle(shuffled)
        scaled = [[F(3) * x for x in shuffled[0]]] + shuffled[1:]
        S2 = Subspace.from_vectors(scaled, n)
        assert S1 == S2


def test_quotient_map():
    W = Subspace.from_vectors([[F(1), F(1), F(0)]], 3)
    Q = W.quotient_map()
    assert Q.nrows == 2
    assert all(not x for x in Q.apply([F(2), F(2), F(0)]))
    assert any(Q.apply([F(1), F(0), F(0)]))


def test_sparse_matches_dense():
    rng = random.Random(3)
    for _ in range(20):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        A = _rand_matrix(rng, m, n)
        rows = sparse_from_blocks([(0, 0, A)], m, n)
        assert sparse_rank(rows) == A.rank()
        dense_kernel = Subspace.from_vectors(A.kernel_basis(), n)
        sparse_kernel = Subspace.from_vectors(sparse_kernel_basis(rows, n), n)
        assert dense_kernel == sparse_kernel
