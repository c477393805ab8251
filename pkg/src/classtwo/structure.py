"""Commutator structures: class-two, exponent-p groups in coordinates.

A group G with |G/G'| = p^d and |G'| = p^r is stored as r alternating
d x d matrices over GF(p); entry (i, j) of the k-th matrix is the exponent
of z_k in [x_i, x_j].  Vectors of V = G/G' and W = G' are numpy integer
arrays of length d and r.

Change of basis uses one convention throughout.  A pair (S, T) produces
forms ``A'_k = sum_l T[k, l] * S^T A_l S``: the columns of S express the
new generators in the old ones, and T carries old derived coordinates to
new ones.  Applying (S1, T1) and then (S2, T2) equals applying
(S1 @ S2, T2 @ T1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularMatrixError
from .fdg import FlowDigraph
from .fp import FpMatrix, Subspace, check_prime, rank_of


@dataclass(frozen=True)
class ScharlauPair:
    """Matrices (A, B) with [x_i, y_j] = z1^A[i,j] z2^B[i,j]."""

    A: FpMatrix
    B: FpMatrix

    def __post_init__(self):
        if self.A.p != self.B.p or self.A.shape != self.B.shape:
            raise ValueError("Scharlau matrices must share shape and modulus")

    @classmethod
    def of(cls, A, B, p: int) -> ScharlauPair:
        A, B = np.asarray(A, dtype=np.int64), np.asarray(B, dtype=np.int64)
        return cls(FpMatrix(A.reshape(A.shape[0], -1), p), FpMatrix(B.reshape(B.shape[0], -1), p))

    @property
    def p(self) -> int:
        return self.A.p

    @property
    def m(self) -> int:
        return self.A.rows

    @property
    def n(self) -> int:
        return self.A.cols

    def is_normalized(self) -> bool:
        return abs(self.m - self.n) <= 1


class CommutatorStructure:
    """Structure constants of a group of exponent p and class at most two."""

    __slots__ = ("p", "forms")

    def __init__(self, forms, p: int, d: int | None = None):
        p = check_prime(p)
        a = np.array(forms, dtype=np.int64)
        if a.size == 0:
            r = a.shape[0] if a.ndim == 3 else 0
            n = d if d is not None else (a.shape[1] if a.ndim == 3 else 0)
            a = np.zeros((r, n, n), dtype=np.int64)
        if a.ndim != 3 or a.shape[1] != a.shape[2]:
            raise ValueError("forms must have shape (r, d, d)")
        a %= p
        if ((a + a.transpose(0, 2, 1)) % p).any() or np.einsum("kii->ki", a).any():
            raise ValueError("structure matrices must be alternating")
        a.setflags(write=False)
        self.p = p
        self.forms = a

    @property
    def d(self) -> int:
        return self.forms.shape[1]

    @property
    def r(self) -> int:
        return self.forms.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CommutatorStructure):
            return NotImplemented
        return self.p == other.p and self.forms.shape == other.forms.shape and np.array_equal(self.forms, other.forms)

    def __hash__(self) -> int:
        return hash((self.p, self.forms.shape, self.forms.tobytes()))

    def __repr__(self) -> str:
        return f"CommutatorStructure(p={self.p}, d={self.d}, r={self.r}, edges={self.upper_entries()})"

    def key(self) -> bytes:
        return self.forms.astype(np.uint8).tobytes()

    def upper_entries(self) -> dict[tuple[int, int], tuple[int, ...]]:
        """Nonzero commutators [x_i, x_j], i < j, keyed by 1-based indices."""
        out = {}
        for i in range(self.d):
            for j in range(i + 1, self.d):
                v = self.forms[:, i, j]
                if v.any():
                    out[i + 1, j + 1] = tuple(int(x) for x in v)
        return out

    def ad(self, v) -> np.ndarray:
        """The r x d matrix of u -> [v, u]."""
        v = np.asarray(v, dtype=np.int64)
        return np.einsum("i,kij->kj", v, self.forms) % self.p


def from_scharlau(sp: ScharlauPair) -> CommutatorStructure:
    m, n, p = sp.m, sp.n, sp.p
    d = m + n
    forms = np.zeros((2, d, d), dtype=np.int64)
    for k, M in enumerate((sp.A.array, sp.B.array)):
        forms[k, :m, m:] = M
        forms[k, m:, :m] = -M.T
    return CommutatorStructure(forms, p)


def from_digraph(g: FlowDigraph) -> CommutatorStructure:
    forms = np.zeros((g.r, g.d, g.d), dtype=np.int64)
    for i, j, flow in g.edges:
        f = np.asarray(flow, dtype=np.int64)
        forms[:, i - 1, j - 1] = f
        forms[:, j - 1, i - 1] = -f
    return CommutatorStructure(forms, g.p, d=g.d)


def to_digraph(cs: CommutatorStructure, name: str = "G") -> FlowDigraph:
    edges = tuple((i, j, f) for (i, j), f in cs.upper_entries().items())
    return FlowDigraph(name, cs.p, cs.r, cs.d, edges)


def _square(M, n: int, p: int, what: str) -> np.ndarray:
    a = M.array if isinstance(M, FpMatrix) else np.asarray(M, dtype=np.int64) % p
    if isinstance(M, FpMatrix) and M.p != p:
        raise ValueError(f"{what} is over GF({M.p}), expected GF({p})")
    if a.shape != (n, n):
        raise ValueError(f"{what} must be {n} x {n}, got {a.shape}")
    if rank_of(a, p) < n:
        raise SingularMatrixError(f"{what} is singular")
    return a


def change_of_basis(cs: CommutatorStructure, S, T=None) -> CommutatorStructure:
    p = cs.p
    S = _square(S, cs.d, p, "S")
    T = np.eye(cs.r, dtype=np.int64) if T is None else _square(T, cs.r, p, "T")
    moved = np.einsum("ai,kab,bj->kij", S, cs.forms, S) % p
    return CommutatorStructure(np.einsum("kl,lij->kij", T, moved) % p, p, d=cs.d)


def commutator(cs: CommutatorStructure, u, v) -> np.ndarray:
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    if u.shape != (cs.d,) or v.shape != (cs.d,):
        raise ValueError(f"vectors must have length {cs.d}")
    return np.einsum("i,kij,j->k", u, cs.forms, v) % cs.p


def radical(cs: CommutatorStructure) -> Subspace:
    """Vectors commuting with everything: Z(G)/G' in coordinates."""
    stacked = cs.forms.reshape(cs.r * cs.d, cs.d)
    ker = Subspace.full(cs.d, cs.p)
    if cs.r and stacked.any():
        ker = FpMatrix(stacked, cs.p).kernel()
    return ker


def derived_span(cs: CommutatorStructure) -> Subspace:
    iu = np.triu_indices(cs.d, 1)
    values = cs.forms[:, iu[0], iu[1]].T
    return Subspace(values, cs.p, cs.r)


def is_special(cs: CommutatorStructure) -> bool:
    return radical(cs).dim == 0 and derived_span(cs).dim == cs.r


def restrict(cs: CommutatorStructure, basis) -> CommutatorStructure:
    """Structure induced on the span of ``basis`` (rows), derived space unchanged."""
    B = np.asarray(basis, dtype=np.int64).reshape(-1, cs.d)
    return CommutatorStructure(np.einsum("ai,kij,bj->kab", B, cs.forms, B) % cs.p, cs.p, d=B.shape[0])


def trim_derived(cs: CommutatorStructure) -> CommutatorStructure:
    """Shrink W to the span of the commutator values."""
    span = derived_span(cs)
    if span.dim == cs.r:
        return cs
    # on the span, coordinates w.r.t. the echelon basis are the pivot entries
    return CommutatorStructure(cs.forms[list(span.pivots)], cs.p, d=cs.d)


def strip_abelian_part(cs: CommutatorStructure) -> tuple[CommutatorStructure, int]:
    """Split off the elementary abelian direct factor.

    Returns the special part and the rank of the abelian factor.
    """
    cs = trim_derived(cs)
    rad = radical(cs)
    if rad.dim == 0:
        return cs, 0
    keep = rad.complement_basis()
    return restrict(cs, keep), rad.dim
