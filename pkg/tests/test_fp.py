import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from classtwo.errors import BudgetExceeded, EvenPrimeError, NotPrimeError, SingularMatrixError
from classtwo.fp import (
    FpMatrix,
    Subspace,
    batch_rank,
    enumerate_gl,
    gl_generators,
    gl_order,
    invert,
    kernel,
    projective_points,
    rank,
)


def closure_size(gens):
    """Plain BFS closure of a matrix generating set."""
    seen = {g for g in gens}
    frontier = list(seen)
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = a @ g
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return len(seen)


def brute_rank(rows, p):
    """Rank as log_p of the number of distinct vectors in the row span."""
    rows = [tuple(r) for r in rows]
    span = set()
    for coeffs in itertools.product(range(p), repeat=len(rows)):
        v = tuple(sum(c * r[j] for c, r in zip(coeffs, rows)) % p for j in range(len(rows[0])))
        span.add(v)
    k = 0
    while p**k < len(span):
        k += 1
    return k


def test_modulus_validation():
    with pytest.raises(EvenPrimeError):
        FpMatrix([[1]], 2)
    with pytest.raises(NotPrimeError):
        FpMatrix([[1]], 9)
    with pytest.raises(NotPrimeError):
        FpMatrix([[1]], 257)
    assert FpMatrix([[-1, 7]], 5).tolist() == [[4, 2]]


def test_rank_examples():
    assert rank(FpMatrix.zeros(3, 3, 3)) == 0
    assert rank(FpMatrix.identity(4, 5)) == 4
    assert rank(FpMatrix([[0, 1, 0], [2, 0, 0], [0, 0, 0]], 3)) == 2


def test_rank_matches_span_count():
    rng = np.random.default_rng(0)
    for p in (3, 5):
        for _ in range(40):
            m = rng.integers(0, p, size=(3, 4))
            assert rank(FpMatrix(m, p)) == brute_rank(m.tolist(), p)


def test_kernel_examples():
    assert kernel(FpMatrix.identity(3, 3)).dim == 0
    assert kernel(FpMatrix.zeros(2, 2, 5)) == Subspace.full(2, 5)
    # second structure matrix of 5.3.1: [x1, y2] = z2
    a2 = FpMatrix([[0, 0, 1], [0, 0, 0], [2, 0, 0]], 3)
    ker = kernel(a2)
    assert ker.dim == 1
    assert ker == Subspace([[0, 1, 0]], 3, 3)


def test_invert_examples():
    assert invert(FpMatrix.identity(3, 7)) == FpMatrix.identity(3, 7)
    assert invert(FpMatrix.diag([2, 1], 3)) == FpMatrix.diag([2, 1], 3)
    rng = np.random.default_rng(1)
    done = 0
    while done < 10:
        m = FpMatrix(rng.integers(0, 7, size=(4, 4)), 7)
        if m.rank() < 4:
            with pytest.raises(SingularMatrixError):
                invert(m)
            continue
        assert m @ invert(m) == FpMatrix.identity(4, 7)
        done += 1


def test_gl_generators_close_to_full_group():
    assert len(gl_generators(1, 3)) == 1
    assert gl_generators(1, 3)[0].tolist() == [[2]]
    assert closure_size(gl_generators(1, 3)) == 2
    assert closure_size(gl_generators(2, 3)) == 48
    assert closure_size(gl_generators(2, 5)) == gl_order(2, 5) == 480
    assert closure_size(gl_generators(3, 3)) == 11232
    for d in range(1, 5):
        gens = gl_generators(d, 7)
        assert len(gens) <= 3
        assert all(g.is_invertible() for g in gens)


@pytest.mark.parametrize("d,p", [(1, 3), (2, 3), (1, 7), (2, 5), (2, 7), (3, 3)])
def test_enumerate_gl_counts(d, p):
    mats = list(enumerate_gl(d, p))
    assert len(mats) == gl_order(d, p)
    assert len(set(mats)) == len(mats)
    assert all(m.is_invertible() for m in mats[:: max(1, len(mats) // 200)])


def test_enumerate_gl_budget():
    # product of (3^4 - 3^i) for i < 4
    assert gl_order(4, 3) == 80 * 78 * 72 * 54 == 24261120
    with pytest.raises(BudgetExceeded):
        enumerate_gl(4, 3)
    head = list(itertools.islice(enumerate_gl(4, 3, max_count=3 * 10**7), 500))
    assert len(set(head)) == 500
    assert all(m.is_invertible() for m in head)


def test_subspace_canonical_form():
    a = Subspace([[1, 2, 0], [0, 1, 1]], 3, 3)
    b = Subspace([[1, 0, 1], [1, 1, 2], [2, 0, 2]], 3, 3)
    assert a == b and hash(a) == hash(b)
    assert a.dim == 2
    assert [1, 0, 1] in a
    assert [1, 0, 0] not in a


def test_subspace_intersection_and_sum():
    p = 5
    u = Subspace([[1, 0, 0, 0], [0, 1, 0, 0]], p, 4)
    v = Subspace([[0, 1, 0, 0], [0, 0, 1, 0]], p, 4)
    assert u.intersect(v) == Subspace([[0, 1, 0, 0]], p, 4)
    assert (u + v).dim == 3
    assert u.intersect(Subspace.zero(4, p)).dim == 0


def test_projective_point_counts():
    assert len(projective_points(3, 3)) == 13
    assert len(projective_points(2, 5)) == 6


def random_antisymmetric(rng, n, p):
    m = rng.integers(0, p, size=(n, n))
    m = np.triu(m, 1)
    return (m - m.T) % p


@settings(max_examples=1000, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(1, 7), st.integers(0, 2**32 - 1))
def test_antisymmetric_rank_is_even(p, n, seed):
    m = random_antisymmetric(np.random.default_rng(seed), n, p)
    assert rank(FpMatrix(m, p)) % 2 == 0


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(1, 5), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_rank_nullity(p, rows, cols, seed):
    m = FpMatrix(np.random.default_rng(seed).integers(0, p, size=(rows, cols)), p)
    ker = kernel(m)
    assert ker.dim + rank(m) == cols
    for v in ker.basis:
        assert not (m.array @ v % p).any()


def test_batch_rank_agrees_with_single():
    rng = np.random.default_rng(3)
    for p in (3, 5, 7):
        stack = rng.integers(0, p, size=(300, 4, 6))
        stack[::7] = 0
        stack[1::5, 2] = stack[1::5, 0] * 2 % p
        got = batch_rank(stack, p)
        want = [rank(FpMatrix(m, p)) for m in stack]
        assert got.tolist() == want
