import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ambient_jets.linalg import (
    Inconsistent,
    QMatrix,
    nullspace,
    rank,
    rref,
    solve,
    sparse_nullspace,
    sparse_rank,
)
from ambient_jets.rationals import QQ, ZERO


def qmat(rows):
    return QMatrix.from_rows([[QQ(e) for e in r] for r in rows])


def test_rref_identity():
    m = qmat([[1, 0], [0, 1]])
    r, rk, piv = rref(m)
    assert r == m
    assert rk == 2
    assert piv == [0, 1]


def test_rref_proportional_rows():
    m = qmat([[1, 2], [2, 4]])
    r, rk, piv = rref(m)
    assert rk == 1
    assert r.entries == ((QQ(1), QQ(2)), (ZERO, ZERO))


def minor_rank(m: QMatrix) -> int:
    """Oracle: rank as the largest k with a nonvanishing k x k minor."""
    from itertools import combinations

    def det(rows, cols):
        k = len(rows)
        if k == 0:
            return QQ(1)
        if k == 1:
            return m.entries[rows[0]][cols[0]]
        total = ZERO
        sign = QQ(1)
        for j in range(k):
            sub = det(rows[1:], cols[:j] + cols[j + 1 :])
            total += sign * m.entries[rows[0]][cols[j]] * sub
            sign = -sign
        return total

    best = 0
    for k in range(1, min(m.rows, m.cols) + 1):
        found = False
        for rows in combinations(range(m.rows), k):
            for cols in combinations(range(m.cols), k):
                if det(rows, cols):
                    found = True
                    break
            if found:
                break
        if found:
            best = k
    return best


def test_random_rank_vs_minor_oracle():
    rng = random.Random(7)
    m = qmat([[rng.randint(-3, 3) for _ in range(7)] for _ in range(5)])
    assert rank(m) == minor_rank(m)


def test_rank_vs_minor_oracle_degenerate():
    rng = random.Random(11)
    base = [rng.randint(-2, 2) for _ in range(6)]
    rows = [base, [2 * e for e in base], [rng.randint(-2, 2) for _ in range(6)], base]
    m = qmat(rows)
    assert rank(m) == minor_rank(m)


def test_solve_identity():
    a = qmat([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    part, ns = solve(a, [QQ(1), QQ(2), QQ(3)])
    assert part == (QQ(1), QQ(2), QQ(3))
    assert ns == []


def test_solve_free_variable():
    a = qmat([[1, 1]])
    part, ns = solve(a, [QQ(2)])
    assert part == (QQ(2), ZERO)
    assert ns == [(QQ(-1), QQ(1))]


def test_solve_inconsistent():
    a = qmat([[1], [1]])
    with pytest.raises(Inconsistent):
        solve(a, [QQ(1), QQ(2)])


def test_nullspace_zero_matrix():
    m = QMatrix.zero(2, 3)
    assert len(nullspace(m)) == 3


def test_nullspace_identity():
    assert nullspace(QMatrix.identity(3)) == []


def test_nullspace_dimension_random():
    rng = random.Random(3)
    m = qmat([[rng.randint(-3, 3) for _ in range(6)] for _ in range(4)])
    ns = nullspace(m)
    assert len(ns) == 6 - rank(m)
    for v in ns:
        for i in range(m.rows):
            s = sum((m.entries[i][j] * v[j] for j in range(6)), ZERO)
            assert s == 0


@st.composite
def small_matrices(draw):
    nr = draw(st.integers(1, 4))
    nc = draw(st.integers(1, 5))
    rows = [
        [QQ(draw(st.integers(-3, 3))) for _ in range(nc)] for _ in range(nr)
    ]
    return QMatrix.from_rows(rows)


@settings(max_examples=40, deadline=None)
@given(small_matrices())
def test_rank_nullity(m):
    assert rank(m) + len(nullspace(m)) == m.cols


@settings(max_examples=25, deadline=None)
@given(small_matrices())
def test_rref_idempotent(m):
    r1, k1, p1 = rref(m)
    r2, k2, p2 = rref(r1)
    assert r1 == r2 and k1 == k2 and p1 == p2


@settings(max_examples=25, deadline=None)
@given(small_matrices())
def test_sparse_matches_dense(m):
    rows = [
        {j: m.entries[i][j] for j in range(m.cols) if m.entries[i][j]}
        for i in range(m.rows)
    ]
    assert sparse_rank(rows, m.cols) == rank(m)
    dense_ns = nullspace(m)
    sparse_ns = sparse_nullspace(rows, m.cols)
    as_tuples = [
        tuple(v.get(j, ZERO) for j in range(m.cols)) for v in sparse_ns
    ]
    assert sorted(as_tuples) == sorted(dense_ns)


def test_exact_reciprocal():
    a = QQ(22, 7)
    assert a * (1 / a) == 1
