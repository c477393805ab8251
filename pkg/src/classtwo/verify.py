"""Mechanical checks of the tabulated facts about the catalog groups.

Each procedure returns a list of ``Item`` records and never raises on a
mismatch; a failing comparison is reported with verdict ``fail``.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import asdict, dataclass

import numpy as np

from .catalog import CATALOG, E3_NAME, NAMES, build, drawn_digraph, entries_by_order
from .central import INDECOMPOSABLE, GluingMap, central_product, factor_multiset, find_central_decomposition
from .errors import BudgetExceeded
from .fdg import FlowDigraph
from .fp import inverse_of
from .invariants import frequency_vector
from .isomorphism import differing_invariants, is_isomorphic
from .structure import CommutatorStructure, change_of_basis, from_digraph, to_digraph

PASS, FAIL, UNKNOWN = "pass", "fail", "unknown"

# pairs the central-quotient frequencies cannot separate, and the test that does
TIE_BREAKERS = {
    ("8.6.11", "8.6.13"): "is_commuting",
    ("D", "F"): "is_subspace",
    ("A", "E"): "preimage_profile",
}


@dataclass
class Item:
    check: str
    names: tuple[str, ...]
    computed: object
    expected: object
    verdict: str
    note: str = ""

    def as_dict(self) -> dict:
        d = asdict(self)
        d["names"] = list(self.names)
        return d


def _verdict(ok: bool) -> str:
    return PASS if ok else FAIL


def verify_frequencies(p: int) -> list[Item]:
    items = []
    for name, entry in CATALOG.items():
        got = frequency_vector(build(name, p)).counts
        want = entry.expected_frequency(p)
        items.append(Item("frequency", (name,), list(got), list(want), _verdict(got == want), entry.formula_text()))
    return items


def verify_pairwise_distinct(p: int) -> list[Item]:
    """Every pair of equal order is told apart, by the frequencies unless a
    tie-breaker is listed for it, in which case the frequencies must agree
    and the named test must separate the pair."""
    items = []
    cs = {n: build(n, p) for n in NAMES}
    for order, names in sorted(entries_by_order().items()):
        for a, b in itertools.combinations(names, 2):
            diff = differing_invariants(cs[a], cs[b])
            reason = TIE_BREAKERS.get((a, b), "frequency")
            if reason == "frequency":
                ok = "frequency" in diff
            else:
                ok = reason in diff and "frequency" not in diff
            items.append(Item("distinct", (a, b), diff, reason, _verdict(ok), reason if ok else ""))
    return items


# ---------------------------------------------------------------------------
# the substitution chain proving that 7.5.6 glued to E3 along <z1 z2> is A


def _edges(cs: CommutatorStructure) -> dict[tuple[int, int], tuple[int, ...]]:
    return cs.upper_entries()


def _expected(pairs, p: int) -> dict[tuple[int, int], tuple[int, ...]]:
    return {(i, j): tuple(x % p for x in f) for (i, j), f in pairs}


REPLAY_START = (((1, 2), (1, 0)), ((2, 3), (0, 1)), ((3, 4), (1, 0)), ((4, 5), (0, 1)), ((6, 7), (1, 1)))

# (description, column substitutions {new generator: old combination}, T, expected edges after)
REPLAY_STEPS = (
    (
        "x3' = x3 x1^-1 x5^-1, z1' = z1 z2",
        {3: {3: 1, 1: -1, 5: -1}},
        ((1, 0), (-1, 1)),
        (((1, 2), (1, -1)), ((2, 3), (1, 0)), ((3, 4), (1, 0)), ((4, 5), (0, 1)), ((6, 7), (1, 0))),
    ),
    (
        "x4' = x4 x2",
        {4: {4: 1, 2: 1}},
        None,
        (((1, 2), (1, -1)), ((1, 4), (1, -1)), ((2, 3), (1, 0)), ((4, 5), (0, 1)), ((6, 7), (1, 0))),
    ),
    (
        "x1' = x1 x3 x5^-1, x3' = x3^-1",
        {1: {1: 1, 3: 1, 5: -1}, 3: {3: -1}},
        None,
        (((1, 2), (0, -1)), ((1, 4), (1, 0)), ((2, 3), (-1, 0)), ((4, 5), (0, 1)), ((6, 7), (1, 0))),
    ),
    (
        "swap x1 and x3",
        {1: {3: 1}, 3: {1: 1}},
        None,
        (((1, 2), (1, 0)), ((2, 3), (0, 1)), ((3, 4), (1, 0)), ((4, 5), (0, 1)), ((6, 7), (1, 0))),
    ),
)

# columns of the relabeling carrying build("A") onto the drawn digraph of A
# (0-based: x1, x2, x3, y1, .., y4 of the Scharlau ordering)
DRAWN_A_RELABEL = ((4, -1), (1, 1), (5, 1), (2, -1), (6, -1), (0, 1), (3, 1))


def _substitution(subs: dict, d: int, p: int) -> np.ndarray:
    S = np.eye(d, dtype=np.int64)
    for new, combo in subs.items():
        col = np.zeros(d, dtype=np.int64)
        for old, coeff in combo.items():
            col[old - 1] = coeff
        S[:, new - 1] = col
    return S % p


def drawn_a_relabel(p: int) -> np.ndarray:
    S = np.zeros((7, 7), dtype=np.int64)
    for col, (row, sign) in enumerate(DRAWN_A_RELABEL):
        S[row, col] = sign
    return S % p


def replay_start(p: int) -> CommutatorStructure:
    """7.5.6 (as its path digraph) glued to E3 along the line <z1 z2>."""
    path = FlowDigraph("7.5.6", p, 2, 5, tuple((i, j, f) for (i, j), f in REPLAY_START[:4]))
    glue = [GluingMap.of(((1, 0), (0, 1)), p), GluingMap.of(((1,), (1,)), p)]
    return central_product([from_digraph(path), build(E3_NAME, p)], glue, 2)


def replay_uniqueness_of_a(p: int) -> list[Item]:
    items = []
    cs = replay_start(p)
    start_ok = _edges(cs) == _expected(REPLAY_START, p)
    items.append(Item("replay", ("start",), _edges_text(cs), _pairs_text(REPLAY_START, p), _verdict(start_ok)))
    path = from_digraph(FlowDigraph("7.5.6", p, 2, 5, tuple((i, j, f) for (i, j), f in REPLAY_START[:4])))
    iso = is_isomorphic(path, build("7.5.6", p))
    items.append(Item("replay", ("path is 7.5.6",), iso.verdict.value, "iso", _verdict(iso.is_iso)))
    for n, (label, subs, T, expected) in enumerate(REPLAY_STEPS, 1):
        S = _substitution(subs, cs.d, p)
        cs = change_of_basis(cs, S, None if T is None else np.array(T) % p)
        ok = _edges(cs) == _expected(expected, p)
        items.append(Item("replay", (f"step {n}",), _edges_text(cs), _pairs_text(expected, p), _verdict(ok), label))
    drawn = from_digraph(drawn_digraph("A", p))
    items.append(Item("replay", ("drawn A",), _edges_text(cs), _edges_text(drawn), _verdict(cs == drawn)))
    final = change_of_basis(cs, inverse_of(drawn_a_relabel(p), p))
    items.append(Item("replay", ("build A",), _edges_text(final), _edges_text(build("A", p)), _verdict(final == build("A", p))))
    return items


def _edges_text(cs: CommutatorStructure) -> str:
    return emit_edges(to_digraph(cs))


def _pairs_text(pairs, p: int) -> str:
    return " ".join(f"{i}{j}:{','.join(map(str, f))}" for (i, j), f in sorted(_expected(pairs, p).items()))


def emit_edges(g: FlowDigraph) -> str:
    return " ".join(f"{i}{j}:{','.join(map(str, f))}" for i, j, f in g.edges)


def verify_partition_exhaustion(p: int) -> list[Item]:
    items = []
    for name in ("A", "B", "C", "D", "E", "F"):
        entry = CATALOG[name]
        cs = build(name, p)
        try:
            dec = find_central_decomposition(cs)
            factors = factor_multiset(cs, decomposition=dec)
        except BudgetExceeded as exc:
            items.append(Item("partition", (name,), None, entry.part_dims, UNKNOWN, str(exc)))
            continue
        dims = "indecomposable" if dec is INDECOMPOSABLE else sorted(dec.dims, reverse=True)
        want_dims = "indecomposable" if entry.part_dims is None else sorted(entry.part_dims, reverse=True)
        want_factors = Counter(entry.factors or (name,))
        ok = dims == want_dims and factors == want_factors
        items.append(
            Item(
                "partition",
                (name,),
                {"dims": dims, "factors": sorted(factors.elements())},
                {"dims": want_dims, "factors": sorted(want_factors.elements())},
                _verdict(ok),
            )
        )
    return items


def verify_all(p: int) -> list[Item]:
    return (
        verify_frequencies(p)
        + verify_pairwise_distinct(p)
        + verify_partition_exhaustion(p)
        + replay_uniqueness_of_a(p)
    )
