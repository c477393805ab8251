"""Isomorphism invariants computed from central quotients and centralizers."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BudgetExceeded, ZeroVectorError
from .fp import all_vectors, batch_rank, mul_mod, nullspace, projective_points, rank_of
from .structure import CommutatorStructure

DEFAULT_POINT_CAP = 10**6
_CHUNK = 1 << 16


@dataclass(frozen=True)
class QuotientType:
    """G/<z> is Z_p^abelian_rank x E_{2n+1}."""

    n: int
    abelian_rank: int


@dataclass(frozen=True)
class FrequencyVector:
    """How many central quotients have E_{2n+1} factor, for n = 1 .. d // 2.

    ``zero`` counts quotients that are elementary abelian (n = 0); it stays
    zero for special inputs.
    """

    counts: tuple[int, ...]
    zero: int = 0

    @property
    def total(self) -> int:
        return self.zero + sum(self.counts)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.counts)) + ")"


class PreimageRecord(NamedTuple):
    line: tuple[int, ...]
    n: int
    abelian: bool


def central_lines(p: int, r: int) -> np.ndarray:
    """Normalized representatives of the lines of GF(p)^r.

    Ordered by position of the leading 1, then lexicographically, so for
    r = 2 the list is (1,0), (1,1), ..., (1,p-1), (0,1).
    """
    if r < 1:
        raise ValueError("central lines need r >= 1")
    blocks = []
    for lead in range(r):
        tail = all_vectors(r - lead - 1, p)
        block = np.zeros((len(tail), r), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1 :] = tail
        blocks.append(block)
    return np.vstack(blocks)


def _line(z, r: int) -> np.ndarray:
    z = np.asarray(z, dtype=np.int64)
    if z.shape != (r,):
        raise ValueError(f"line vector must have length {r}")
    if not z.any():
        raise ZeroVectorError("a central line needs a nonzero vector")
    return z


def quotient_forms(cs: CommutatorStructure, z) -> np.ndarray:
    z = _line(z, cs.r) % cs.p
    ann = nullspace(z[None, :], cs.p)
    return np.einsum("ql,lij->qij", ann, cs.forms) % cs.p


def quotient_structure(cs: CommutatorStructure, z) -> CommutatorStructure:
    return CommutatorStructure(quotient_forms(cs, z), cs.p, d=cs.d)


def quotient_type(cs: CommutatorStructure, z) -> QuotientType:
    if cs.r != 2:
        raise ValueError("quotient types are defined here for derived rank 2")
    form = quotient_forms(cs, z)[0]
    n = rank_of(form, cs.p) // 2
    return QuotientType(n, cs.d - 2 * n)


def frequency_vector(cs: CommutatorStructure) -> FrequencyVector:
    if cs.r != 2:
        raise ValueError("frequency vectors are defined for derived rank 2")
    tally = Counter(quotient_type(cs, z).n for z in central_lines(cs.p, 2))
    return FrequencyVector(tuple(tally.get(n, 0) for n in range(1, cs.d // 2 + 1)), tally.get(0, 0))


def point_ranks(cs: CommutatorStructure, cap: int = DEFAULT_POINT_CAP, points=None) -> tuple[np.ndarray, np.ndarray]:
    """Rank of u -> [v, u] for every projective point v of V."""
    if points is None:
        count = (cs.p**cs.d - 1) // (cs.p - 1)
        if count > cap:
            raise BudgetExceeded(f"{count} projective points exceed cap {cap}")
        points = projective_points(cs.d, cs.p)
    return points, vector_ranks(cs, points)


def vector_ranks(cs: CommutatorStructure, vecs: np.ndarray) -> np.ndarray:
    out = np.zeros(len(vecs), dtype=np.int64)
    if cs.r == 0:
        return out
    d, r = cs.d, cs.r
    flat = cs.forms.transpose(1, 0, 2).reshape(d, r * d)
    for start in range(0, len(vecs), _CHUNK):
        chunk = vecs[start : start + _CHUNK]
        ads = mul_mod(chunk, flat, cs.p).reshape(len(chunk), r, d)
        out[start : start + len(chunk)] = batch_rank(ads, cs.p)
    return out


def rank_signature(cs: CommutatorStructure, cap: int = DEFAULT_POINT_CAP) -> Counter:
    """Multiset of centralizer codimensions over projective points."""
    _, ranks = point_ranks(cs, cap)
    return Counter(ranks.tolist())


def small_centralizer_properties(cs: CommutatorStructure, cap: int = DEFAULT_POINT_CAP) -> tuple[bool, bool]:
    """(is_subspace, is_commuting) for the points whose centralizer has index <= p."""
    points, ranks = point_ranks(cs, cap)
    small = points[ranks <= 1]
    if len(small) == 0:
        return True, True
    k = rank_of(small, cs.p)
    is_subspace = len(small) == (cs.p**k - 1) // (cs.p - 1)
    gram = np.einsum("ai,kij,bj->kab", small, cs.forms, small) % cs.p
    return is_subspace, not gram.any()


def center_preimage_profile(cs: CommutatorStructure) -> list[PreimageRecord]:
    """For each central line z: the half-rank of G/<z> and whether the
    preimage of its center is abelian."""
    if cs.r != 2:
        raise ValueError("preimage profiles are defined for derived rank 2")
    out = []
    for z in central_lines(cs.p, 2):
        form = quotient_forms(cs, z)[0]
        n = rank_of(form, cs.p) // 2
        U = nullspace(form, cs.p, cs.d)
        gram = np.einsum("ai,kij,bj->kab", U, cs.forms, U) % cs.p
        out.append(PreimageRecord(tuple(int(c) for c in z), n, not gram.any()))
    return out


def preimage_multiset(cs: CommutatorStructure) -> Counter:
    return Counter((rec.n, rec.abelian) for rec in center_preimage_profile(cs))
