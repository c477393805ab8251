import numpy as np
import pytest

from classtwo.catalog import NAMES, build
from classtwo.errors import BudgetExceeded, ZeroVectorError
from classtwo.fp import rank_of
from classtwo.invariants import (
    center_preimage_profile,
    central_lines,
    frequency_vector,
    preimage_multiset,
    quotient_structure,
    quotient_type,
    rank_signature,
    small_centralizer_properties,
    vector_ranks,
)
from classtwo.fdg import FlowDigraph
from classtwo.structure import CommutatorStructure, from_digraph, change_of_basis, is_special

from conftest import random_alternating, random_invertible

RANK2 = [n for n in NAMES if build(n, 3).r == 2]


def test_central_lines():
    assert central_lines(3, 2).tolist() == [[1, 0], [1, 1], [1, 2], [0, 1]]
    assert len(central_lines(5, 2)) == 6
    assert len(central_lines(3, 1)) == 1
    assert len(central_lines(3, 3)) == 13


def test_quotient_examples():
    cs = build("5.3.1", 3)
    q = quotient_structure(cs, (1, 0))
    assert q.r == 1 and rank_of(q.forms[0], 3) == 2
    assert all(quotient_type(cs, z).n == 1 for z in central_lines(3, 2))
    q = quotient_structure(build("6.4.2", 3), (1, 0))
    assert rank_of(q.forms[0], 3) == 2
    with pytest.raises(ZeroVectorError):
        quotient_type(cs, (0, 0))


def test_full_quotient_is_abelian():
    cs = build("6.4.3", 3)
    q = quotient_structure(quotient_structure(cs, (1, 0)), (1,))
    assert q.r == 0 and q.d == 4


def test_generic_line_of_642():
    # the annihilator of z = (1, 1) is (1, -1): both coordinates nonzero
    assert quotient_type(build("6.4.2", 3), (1, 1)).n == 2


def test_zero_structure_quotients():
    cs = CommutatorStructure(np.zeros((2, 2, 2)), 3)
    assert quotient_type(cs, (1, 0)).n == 0
    assert frequency_vector(cs).zero == 4


def test_frequency_examples():
    assert frequency_vector(build("5.3.1", 3)).counts == (4,)
    assert frequency_vector(build("8.6.8", 5)).counts == (0, 3, 3)
    assert frequency_vector(build("A", 3)).counts == (0, 1, 3)


def test_rank_signature_examples():
    assert rank_signature(CommutatorStructure(np.zeros((2, 3, 3)), 3)) == {0: 13}
    # GF(3)^2 has four projective points, every one of rank 1
    assert rank_signature(build("E3", 3)) == {1: 4}
    assert vector_ranks(build("E3", 3), np.eye(2, dtype=np.int64)).tolist() == [1, 1]
    # path digraph x1 -> x2 -> x3: the plane <x1, x3> has rank <= 1
    path = from_digraph(FlowDigraph("5.3.1", 3, 2, 3, ((1, 2, (1, 0)), (2, 3, (0, 1)))))
    assert rank_signature(path) == {1: 4, 2: 9}
    plane = np.array([[a, 0, b] for a in range(3) for b in range(3) if (a, b) != (0, 0)])
    assert (vector_ranks(path, plane) <= 1).all()
    # in the Scharlau layout the same plane is <y1, y2>
    assert (vector_ranks(build("5.3.1", 3), plane[:, [1, 0, 2]]) <= 1).all()
    assert rank_signature(build("5.3.1", 3)) == rank_signature(path)


def test_rank_signature_budget():
    with pytest.raises(BudgetExceeded):
        rank_signature(build("A", 3), cap=100)


def test_small_centralizer_examples():
    assert small_centralizer_properties(build("D", 3))[0] is True
    assert small_centralizer_properties(build("F", 3))[0] is False
    assert small_centralizer_properties(build("8.6.13", 3))[1] is True
    assert small_centralizer_properties(build("8.6.11", 3))[1] is False


def _half_rank_two_record(name):
    recs = [r for r in center_preimage_profile(build(name, 3)) if r.n == 2]
    assert len(recs) == 1
    return recs[0]


def test_preimage_examples():
    assert _half_rank_two_record("E").abelian is True
    assert _half_rank_two_record("A").abelian is False
    rec = center_preimage_profile(build("5.3.1", 3))[0]
    assert rec.line == (1, 0) and rec.n == 1 and rec.abelian


@pytest.mark.parametrize("p", [3, 5, 7])
def test_line_counts_sum(p, rng):
    for name in RANK2:
        assert frequency_vector(build(name, p)).total == p + 1
    for _ in range(20):
        cs = CommutatorStructure(random_alternating(2, int(rng.integers(1, 7)), p, rng), p)
        assert frequency_vector(cs).total == p + 1


@pytest.mark.parametrize("p", [3, 5, 7])
def test_quotient_paths_agree(p, rng):
    for name in ("6.4.4", "8.6.14", "B"):
        cs = build(name, p)
        for z in central_lines(p, 2):
            q = quotient_structure(cs, z)
            assert q.r == 1
            assert quotient_type(cs, z).n == rank_of(q.forms[0], p) // 2
    for _ in range(20):
        cs = CommutatorStructure(random_alternating(2, 5, p, rng), p)
        if is_special(cs):
            z = central_lines(p, 2)[int(rng.integers(0, p + 1))]
            assert quotient_structure(cs, z).forms.any()


# the p = 3 sweep with 100 changes per group lives in the acceptance suite
@pytest.mark.parametrize("p,trials", [(5, 5), (7, 2)])
def test_invariance_under_basis_change(p, trials, rng):
    for name in RANK2:
        cs = build(name, p)
        ref = (frequency_vector(cs), rank_signature(cs), small_centralizer_properties(cs), preimage_multiset(cs))
        for _ in range(trials):
            moved = change_of_basis(cs, random_invertible(cs.d, p, rng), random_invertible(2, p, rng))
            got = (
                frequency_vector(moved),
                rank_signature(moved),
                small_centralizer_properties(moved),
                preimage_multiset(moved),
            )
            assert got == ref, name
