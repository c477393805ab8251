import itertools

import numpy as np
import pytest

from classtwo.catalog import NAMES, build, entries_by_order
from classtwo.errors import BudgetExceeded
from classtwo.isomorphism import (
    SearchBudget,
    Verdict,
    classify_all,
    distinguish,
    group_order_bound,
    is_isomorphic,
    random_basis_change,
    structures_from_codes,
)
from classtwo.structure import CommutatorStructure
from classtwo.verify import replay_start, replay_uniqueness_of_a

from conftest import random_alternating

SMALL = [n for n in NAMES if build(n, 3).d <= 4]


def test_self_iso_identity():
    cs = build("6.4.2", 3)
    res = is_isomorphic(cs, cs)
    assert res.is_iso
    assert res.witness.S.array.tolist() == np.eye(4, dtype=int).tolist()
    assert res.witness.T.array.tolist() == np.eye(2, dtype=int).tolist()


def test_643_vs_644():
    assert is_isomorphic(build("6.4.3", 3), build("6.4.4", 3)).verdict is Verdict.NOT_ISO


def test_replayed_product_is_a():
    cs = replay_start(3)
    res = is_isomorphic(cs, build("A", 3))
    assert res.is_iso and res.witness.check(cs, build("A", 3))
    assert all(it.verdict == "pass" for it in replay_uniqueness_of_a(3))


def test_distinguish_examples(rng):
    assert distinguish(build("8.6.7", 3), build("8.6.8", 3)) == "frequency"
    assert distinguish(build("8.6.11", 3), build("8.6.13", 3)) == "is_commuting"
    cs = build("7.5.5", 3)
    assert distinguish(cs, random_basis_change(cs, rng)[0]) is None


@pytest.mark.parametrize("p", [3, 5])
def test_symmetry_small_catalog(p):
    for a, b in itertools.product(SMALL, repeat=2):
        x, y = build(a, p), build(b, p)
        r1, r2 = is_isomorphic(x, y), is_isomorphic(y, x)
        assert r1.verdict == r2.verdict
        assert r1.is_iso == (a == b)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_soundness_random_images(p, rng):
    for name in NAMES:
        cs = build(name, p)
        if p == 7 and cs.d > 6:
            continue
        moved, S, T = random_basis_change(cs, rng)
        res = is_isomorphic(cs, moved)
        assert res.is_iso, name
        assert res.witness.check(cs, moved)


def test_catalog_pairs_not_isomorphic():
    for names in entries_by_order().values():
        for a, b in itertools.combinations(names, 2):
            x, y = build(a, 3), build(b, 3)
            assert distinguish(x, y) is not None
            assert is_isomorphic(x, y).verdict is Verdict.NOT_ISO


def test_distinguish_never_contradicts_witness(rng):
    p = 3
    for _ in range(1000):
        d = int(rng.integers(2, 6))
        cs = CommutatorStructure(random_alternating(2, d, p, rng), p)
        moved, S, T = random_basis_change(cs, rng)
        assert distinguish(cs, moved) is None


def test_budget_surfaces_as_exhausted(rng):
    cs = build("C", 3)
    moved, _, _ = random_basis_change(cs, rng)
    res = is_isomorphic(cs, moved, SearchBudget(max_nodes=1))
    assert res.verdict is Verdict.EXHAUSTED and res.witness is None


@pytest.mark.parametrize("d,p,special", [(3, 3, 1), (3, 5, 1), (4, 3, 3)])
def test_classify_special_counts(d, p, special):
    cl = classify_all(d, p)
    assert len(cl.special_orbits) == special
    assert sum(o.size for o in cl.orbits) == cl.total == p ** (d * (d - 1))
    bound = group_order_bound(d, p)
    assert all(bound % o.size == 0 for o in cl.orbits)


def test_classify_special_reps_match_catalog():
    cl = classify_all(4, 3)
    reps = [o.representative for o in cl.special_orbits]
    for name in ("6.4.2", "6.4.3", "6.4.4"):
        assert sum(is_isomorphic(r, build(name, 3)).is_iso for r in reps) == 1


def test_classify_agrees_with_search(rng):
    p, d = 3, 3
    cl = classify_all(d, p)
    codes = rng.integers(0, cl.total, size=(150, 2))
    forms = structures_from_codes(codes.ravel(), d, p).reshape(150, 2, 2, d, d)
    for (c1, c2), (f1, f2) in zip(codes, forms):
        same = cl.labels[c1] == cl.labels[c2]
        res = is_isomorphic(CommutatorStructure(f1, p), CommutatorStructure(f2, p))
        assert res.is_iso == same


def test_classify_budget():
    with pytest.raises(BudgetExceeded):
        classify_all(5, 3)
