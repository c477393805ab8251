import numpy as np
import pytest

from classtwo.catalog import build, e3
from classtwo.errors import SingularMatrixError
from classtwo.fdg import FlowDigraph
from classtwo.isomorphism import is_isomorphic
from classtwo.structure import (
    CommutatorStructure,
    ScharlauPair,
    change_of_basis,
    commutator,
    from_digraph,
    from_scharlau,
    is_special,
    radical,
    strip_abelian_part,
    to_digraph,
)

from conftest import random_alternating, random_invertible

P531 = FlowDigraph("5.3.1", 3, 2, 3, ((1, 2, (1, 0)), (2, 3, (0, 1))))


def test_from_scharlau_531():
    cs = from_scharlau(ScharlauPair.of([[1, 0]], [[0, 1]], 3))
    assert (cs.d, cs.r) == (3, 2)
    assert cs.upper_entries() == {(1, 2): (1, 0), (1, 3): (0, 1)}
    assert is_special(cs)


def test_zero_pair_is_abelian():
    cs = from_scharlau(ScharlauPair.of([[0]], [[0]], 3))
    assert cs.d == 2 and not cs.forms.any()
    assert not is_special(cs)


def test_group_a_has_five_upper_entries():
    cs = build("A", 3)
    assert (cs.d, cs.r) == (7, 2)
    assert len(cs.upper_entries()) == 5


def test_scharlau_pair_shape_mismatch():
    with pytest.raises(ValueError):
        ScharlauPair.of([[1, 0]], [[1]], 3)


def test_normalized_flag():
    assert ScharlauPair.of([[1, 0]], [[0, 1]], 3).is_normalized()
    assert not ScharlauPair.of([[1, 0, 0]], [[0, 1, 0]], 3).is_normalized()


def test_from_digraph_e3():
    cs = from_digraph(FlowDigraph("E3", 3, 1, 2, ((1, 2, (1,)),)))
    assert cs == e3(3)


def test_path_digraph_is_531():
    assert is_isomorphic(from_digraph(P531), build("5.3.1", 3)).is_iso


def test_edgeless_digraph():
    cs = from_digraph(FlowDigraph("Z", 3, 2, 3))
    assert not cs.forms.any() and cs.d == 3


def test_to_digraph_counts():
    assert len(to_digraph(build("5.3.1", 3)).edges) == 2
    assert len(to_digraph(build("F", 3)).edges) == 6
    assert to_digraph(CommutatorStructure(np.zeros((2, 4, 4)), 5)).edges == ()


@pytest.mark.parametrize("p", [3, 5, 7])
def test_digraph_round_trip(p, rng):
    for _ in range(50):
        d = int(rng.integers(1, 8))
        r = int(rng.integers(1, 4))
        cs = CommutatorStructure(random_alternating(r, d, p, rng), p)
        assert from_digraph(to_digraph(cs)) == cs


def test_non_alternating_rejected():
    with pytest.raises(ValueError):
        CommutatorStructure([[[1, 0], [0, 0]]], 3)
    with pytest.raises(ValueError):
        CommutatorStructure([[[0, 1], [1, 0]]], 3)


def test_change_of_basis_identity():
    cs = build("6.4.3", 5)
    assert change_of_basis(cs, np.eye(4, dtype=int), np.eye(2, dtype=int)) == cs


def test_change_of_basis_singular():
    with pytest.raises(SingularMatrixError):
        change_of_basis(build("5.3.1", 3), np.zeros((3, 3), dtype=int))


def test_x2_to_x1x2_keeps_flows():
    cs = from_digraph(P531)
    S = np.eye(3, dtype=int)
    S[0, 1] = 1  # new x2 = x1 x2
    assert change_of_basis(cs, S) == cs


@pytest.mark.parametrize("a,b", [(1, 1), (2, 1), (1, 2), (0, 2)])
def test_x3_substitution_changes_z2(a, b):
    p = 3
    cs = from_digraph(P531)
    S = np.eye(3, dtype=int)
    S[:, 2] = (a, 0, b)  # new x3 = x1^a x3^b
    out = change_of_basis(cs, S)
    assert out.upper_entries()[2, 3] == ((-a) % p, b % p)
    assert out.upper_entries()[1, 2] == (1, 0)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_action_composes(p, rng):
    for _ in range(20):
        d = int(rng.integers(2, 7))
        cs = CommutatorStructure(random_alternating(2, d, p, rng), p)
        S1, S2 = random_invertible(d, p, rng), random_invertible(d, p, rng)
        T1, T2 = random_invertible(2, p, rng), random_invertible(2, p, rng)
        two_steps = change_of_basis(change_of_basis(cs, S1, T1), S2, T2)
        assert two_steps == change_of_basis(cs, S1 @ S2 % p, T2 @ T1 % p)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_special_and_radical_invariant(p, rng):
    for name in ("5.3.1", "6.4.2", "7.5.5", "8.6.14", "C"):
        cs = build(name, p)
        for _ in range(5):
            moved = change_of_basis(cs, random_invertible(cs.d, p, rng), random_invertible(2, p, rng))
            assert is_special(moved)
    for _ in range(20):
        d = int(rng.integers(2, 8))
        cs = CommutatorStructure(random_alternating(2, d, p, rng), p)
        moved = change_of_basis(cs, random_invertible(d, p, rng), random_invertible(2, p, rng))
        assert is_special(moved) == is_special(cs)
        assert radical(moved).dim == radical(cs).dim


def test_commutator_bilinear(rng):
    p = 7
    cs = build("8.6.12", p)
    for _ in range(100):
        u, u2, v = (rng.integers(0, p, size=cs.d) for _ in range(3))
        lhs = commutator(cs, (u + u2) % p, v)
        assert np.array_equal(lhs, (commutator(cs, u, v) + commutator(cs, u2, v)) % p)
        assert np.array_equal(commutator(cs, u, v), -commutator(cs, v, u) % p)


def test_strip_abelian_part():
    cs = from_digraph(FlowDigraph("G", 3, 2, 5, ((1, 2, (1, 0)), (2, 3, (0, 1)))))
    special, ab = strip_abelian_part(cs)
    assert ab == 2 and special.d == 3 and is_special(special)
