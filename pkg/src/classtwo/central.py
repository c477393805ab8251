"""Central products and the search for central decompositions.

A central decomposition of a special structure is a splitting
V = V_1 + ... + V_k into independent subspaces that commute with each
other.  Two searches find one:

* enumerating candidate subspaces V_1 in echelon order, which is simple
  and exact but only feasible for small p^d;
* looking for idempotents E with E^T A_l = A_l E for every form.  Such an
  E projects onto one side of an orthogonal splitting, and every splitting
  arises this way, so a structure is indecomposable exactly when these
  idempotents are only 0 and 1.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded, RankMismatchError, SpanDeficientError, UnknownFactorError
from .fp import FpMatrix, Subspace, all_vectors, batch_rank, check_prime, nullspace, rank_of
from .structure import CommutatorStructure, radical, restrict, strip_abelian_part

DEFAULT_SUBSPACE_CAP = 10**7
_CHUNK = 1 << 15


@dataclass(frozen=True)
class GluingMap:
    """Embedding of a factor's derived space into the shared one (r x r_i)."""

    matrix: FpMatrix

    def __post_init__(self):
        if self.matrix.rank() != self.matrix.cols:
            raise RankMismatchError("a gluing map must be injective")

    @classmethod
    def of(cls, rows, p: int) -> GluingMap:
        a = np.asarray(rows, dtype=np.int64)
        return cls(FpMatrix(a.reshape(a.shape[0], -1), p))

    @property
    def source_rank(self) -> int:
        return self.matrix.cols

    @property
    def target_rank(self) -> int:
        return self.matrix.rows


def central_product(factors: list[CommutatorStructure], glue: list[GluingMap], target_rank: int) -> CommutatorStructure:
    if not factors:
        raise ValueError("need at least one factor")
    if len(glue) != len(factors):
        raise ValueError("one gluing map per factor")
    p = factors[0].p
    for cs, g in zip(factors, glue):
        if cs.p != p or g.matrix.p != p:
            raise ValueError("factors and gluing maps must share p")
        if g.target_rank != target_rank or g.source_rank != cs.r:
            raise RankMismatchError(
                f"gluing map is {g.target_rank} x {g.source_rank}, factor needs {target_rank} x {cs.r}"
            )
    images = np.hstack([g.matrix.array for g in glue])
    if rank_of(images, p) < target_rank:
        raise SpanDeficientError("glued derived spaces do not span the target")
    d = sum(cs.d for cs in factors)
    forms = np.zeros((target_rank, d, d), dtype=np.int64)
    at = 0
    for cs, g in zip(factors, glue):
        block = np.einsum("kl,lij->kij", g.matrix.array, cs.forms) % p
        forms[:, at : at + cs.d, at : at + cs.d] = block
        at += cs.d
    return CommutatorStructure(forms, p, d=d)


class Indecomposable:
    """Marker returned when no proper central decomposition exists."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INDECOMPOSABLE"


INDECOMPOSABLE = Indecomposable()


@dataclass(frozen=True)
class Decomposition:
    parts: tuple[Subspace, ...]
    factor_structures: tuple[CommutatorStructure, ...]

    def __post_init__(self):
        if not self.parts:
            raise ValueError("empty decomposition")
        p, d = self.parts[0].p, self.parts[0].ambient_dim
        stacked = np.vstack([s.basis for s in self.parts])
        if len(stacked) != d or rank_of(stacked, p) != d:
            raise ValueError("parts must be independent and span V")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.parts)

    def check(self, cs: CommutatorStructure) -> bool:
        """Cross-part commutators vanish."""
        for a, b in itertools.combinations(self.parts, 2):
            if (np.einsum("ai,kij,bj->kab", a.basis, cs.forms, b.basis) % cs.p).any():
                return False
        return True


# ---------------------------------------------------------------------------
# echelon enumeration of candidate subspaces


def gaussian_binomial(n: int, k: int, p: int) -> int:
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (i + 1) - 1
    return num // den


def subspace_count(d: int, p: int) -> int:
    return sum(gaussian_binomial(d, k, p) for k in range(1, d // 2 + 1))


def echelon_batches(d: int, k: int, p: int):
    """All k-dimensional subspaces as reduced echelon bases, in lexicographic
    pivot order, yielded as arrays of shape (n, k, d)."""
    for pivots in itertools.combinations(range(d), k):
        free = [(i, c) for i, pc in enumerate(pivots) for c in range(pc + 1, d) if c not in pivots]
        base = np.zeros((k, d), dtype=np.int64)
        base[np.arange(k), pivots] = 1
        values = all_vectors(len(free), p)
        rows = np.array([i for i, _ in free], dtype=np.int64)
        cols = np.array([c for _, c in free], dtype=np.int64)
        for start in range(0, len(values), _CHUNK):
            chunk = values[start : start + _CHUNK]
            out = np.broadcast_to(base, (len(chunk), k, d)).copy()
            if free:
                out[:, rows, cols] = chunk
            yield out


def _split_by_enumeration(cs: CommutatorStructure) -> np.ndarray | None:
    """Echelon basis of the first subspace V1 with V = V1 + V1^perp, or None.

    The first hit lies in the smallest dimension that admits one, so the
    structure restricted to it is indecomposable.
    """
    p, d, r = cs.p, cs.d, cs.r
    for k in range(1, d // 2 + 1):
        for batch in echelon_batches(d, k, p):
            n = len(batch)
            # rows u A_l for u in V1: V1^perp has codimension k iff rank k
            ads = np.einsum("nai,lij->nlaj", batch, cs.forms).reshape(n, r * k, d) % p
            gram = np.einsum("nlaj,nbj->nlab", ads.reshape(n, r, k, d), batch).reshape(n, r * k, k) % p
            ok = (batch_rank(gram, p) == k) & (batch_rank(ads, p) == k)
            hits = np.flatnonzero(ok)
            if hits.size:
                return batch[hits[0]]
    return None


# ---------------------------------------------------------------------------
# self-adjoint idempotents


def self_adjoint_basis(cs: CommutatorStructure) -> np.ndarray:
    """Basis (n, d, d) of {X : X^T A_l = A_l X for all l}."""
    p, d = cs.p, cs.d
    units = np.eye(d * d, dtype=np.int64).reshape(d * d, d, d)
    # column c of the system is the residual for X = unit c
    blocks = [
        (np.transpose(units, (0, 2, 1)) @ A - A @ units).reshape(d * d, d * d).T % p for A in cs.forms
    ]
    if not blocks:
        return units
    return nullspace(np.vstack(blocks), p, d * d).reshape(-1, d, d)


def _matpow(M: np.ndarray, e: int, p: int) -> np.ndarray:
    out = np.eye(len(M), dtype=np.int64)
    while e:
        if e & 1:
            out = out @ M % p
        M = M @ M % p
        e >>= 1
    return out


def _monic_irreducibles(p: int, degree: int):
    """Coefficients, highest first; below degree 4 irreducible means rootless."""
    for tail in itertools.product(range(p), repeat=degree):
        coeffs = (1, *tail)
        if degree == 1 or all(np.polyval(coeffs, x) % p for x in range(p)):
            yield coeffs


def _poly_at(coeffs, M: np.ndarray, p: int) -> np.ndarray:
    out = np.zeros_like(M)
    eye = np.eye(len(M), dtype=np.int64)
    for c in coeffs:
        out = (out @ M + c * eye) % p
    return out


def _idempotent_from(X: np.ndarray, p: int) -> np.ndarray | None:
    """A nontrivial idempotent in GF(p)[X], if its separating part shows one."""
    d = len(X)
    e = 1
    while p**e < d:
        e += 1
    Y = _matpow(X, p**e, p)  # semisimple part of X, up to Frobenius
    big = p ** int(np.lcm.reduce(np.arange(1, d + 1)))
    for degree in (1, 2, 3):
        for coeffs in _monic_irreducibles(p, degree):
            H = _poly_at(coeffs, Y, p)
            k = rank_of(H, p)
            if 0 < k < d:
                # H is semisimple, so H^(q-1) projects onto its support
                return _matpow(H, big - 1, p)
    return None


def _is_nontrivial_idempotent(E: np.ndarray, p: int) -> np.ndarray:
    """Vectorized over a stack (n, d, d)."""
    d = E.shape[-1]
    square = E @ E % p
    flat = E.reshape(len(E), -1)
    eye = np.eye(d, dtype=np.int64).ravel()
    return (square == E).all(axis=(1, 2)) & flat.any(axis=1) & (flat != eye).any(axis=1)


def _split_by_idempotents(cs: CommutatorStructure, cap: int, trials: int = 256) -> np.ndarray | None:
    """Basis of one side of an orthogonal splitting, or None when none exists.

    Exhaustive over the self-adjoint space when it has at most ``cap``
    elements; otherwise random elements are tried, and failing to find a
    split raises rather than claiming indecomposability.
    """
    p, d = cs.p, cs.d
    basis = self_adjoint_basis(cs)
    n = len(basis)
    if n == 1:
        return None  # only scalars, whose idempotents are 0 and 1
    flat = basis.reshape(n, d * d)
    E = None
    if p**n <= cap:
        coeffs = all_vectors(n, p)
        for start in range(0, len(coeffs), _CHUNK):
            X = (coeffs[start : start + _CHUNK] @ flat % p).reshape(-1, d, d)
            hits = np.flatnonzero(_is_nontrivial_idempotent(X, p))
            if hits.size:
                E = X[hits[0]]
                break
        if E is None:
            return None
    else:
        rng = np.random.default_rng(0)
        for _ in range(trials):
            X = (rng.integers(0, p, size=n) @ flat % p).reshape(d, d)
            E = _idempotent_from(X, p)
            if E is not None:
                break
        if E is None:
            raise BudgetExceeded(f"self-adjoint space of size {p}^{n} too large to certify indecomposability")
    # image of E as rows
    return Subspace(E.T, p, d).basis


def find_central_decomposition(cs: CommutatorStructure, cap: int = DEFAULT_SUBSPACE_CAP) -> Decomposition | Indecomposable:
    """Maximal central decomposition of a structure with zero radical."""
    check_prime(cs.p)
    if radical(cs).dim:
        raise ValueError("structure has an abelian direct factor; strip it first")
    bases = _decompose(cs, cap)
    if len(bases) == 1:
        return INDECOMPOSABLE
    parts = tuple(Subspace(b, cs.p, cs.d) for b in bases)
    dec = Decomposition(parts, tuple(restrict(cs, s.basis) for s in parts))
    if not dec.check(cs):
        raise AssertionError("decomposition parts fail to commute")
    return dec


def _decompose(cs: CommutatorStructure, cap: int) -> list[np.ndarray]:
    """Bases (rows in cs coordinates) of indecomposable parts."""
    p, d = cs.p, cs.d
    if d <= 2:
        return [np.eye(d, dtype=np.int64)]
    if subspace_count(d, p) <= cap:
        V1 = _split_by_enumeration(cs)
        if V1 is None:
            return [np.eye(d, dtype=np.int64)]
        pieces = [V1]
    else:
        V1 = _split_by_idempotents(cs, cap)
        if V1 is None:
            return [np.eye(d, dtype=np.int64)]
        pieces = _decompose(restrict(cs, V1), cap)
        pieces = [b @ V1 % p for b in pieces]
    perp = nullspace(np.einsum("ai,lij->laj", V1, cs.forms).reshape(-1, d) % p, p, d)
    rest = _decompose(restrict(cs, perp), cap)
    return pieces + [b @ perp % p for b in rest]


# ---------------------------------------------------------------------------
# naming factors


def name_factor(cs: CommutatorStructure) -> str:
    """Catalog name of an indecomposable factor, matched up to isomorphism."""
    from .catalog import INDECOMPOSABLES, build
    from .isomorphism import is_isomorphic

    special, _ = strip_abelian_part(cs)
    for name in INDECOMPOSABLES:
        ref = build(name, cs.p)
        if (ref.d, ref.r) == (special.d, special.r) and is_isomorphic(special, ref).is_iso:
            return name
    raise UnknownFactorError(f"factor with d={special.d}, r={special.r} matches no indecomposable entry")


def factor_multiset(cs: CommutatorStructure, cap: int = DEFAULT_SUBSPACE_CAP, decomposition=None) -> Counter:
    """Names of the indecomposable central factors, with multiplicity.

    ``decomposition`` may pass in a result of find_central_decomposition
    for the stripped structure to avoid searching twice.
    """
    special, _ = strip_abelian_part(cs)
    dec = find_central_decomposition(special, cap) if decomposition is None else decomposition
    if dec is INDECOMPOSABLE:
        return Counter([name_factor(special)])
    return Counter(name_factor(f) for f in dec.factor_structures)
