"""Isomorphism testing and exhaustive orbit classification.

``is_isomorphic`` looks for (S, T) with ``change_of_basis(cs1, S, T) == cs2``.
T ranges over GL(r, p), pruned by matching the ranks of the combined
forms phi . forms on both sides.  For each surviving T the columns of S
(the images in cs1 of the basis vectors of cs2) are fixed one at a time.
Every placed column turns the remaining ones into solutions of linear
systems, so the search branches on the column with the fewest solutions.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import BudgetExceeded
from .fp import (
    FpMatrix,
    Subspace,
    all_vectors,
    batch_rank,
    check_prime,
    encode,
    gl_generators,
    enumerate_gl,
    gl_order,
    inverse_of,
    inverse_table,
    mul_mod,
    span_table,
    nullspace,
    projective_points,
    rank_of,
    rref,
    span_elements,
)
from .invariants import (
    DEFAULT_POINT_CAP,
    frequency_vector,
    preimage_multiset,
    rank_signature,
    small_centralizer_properties,
    vector_ranks,
)
from .structure import CommutatorStructure, change_of_basis, is_special, radical, restrict


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: int = 10**8
    max_gl_size: int = 10**7
    # largest p^d for which vector classes are refined by centralizer profiles
    refine_limit: int = 10**4
    # largest product of two domain sizes checked for pairwise consistency
    pair_limit: int = 1000000


@dataclass(frozen=True)
class IsoWitness:
    """(S, T) carrying the first structure onto the second."""

    S: FpMatrix
    T: FpMatrix

    def check(self, cs1: CommutatorStructure, cs2: CommutatorStructure) -> bool:
        return change_of_basis(cs1, self.S, self.T) == cs2

    @classmethod
    def verified(cls, cs1, cs2, S, T) -> IsoWitness:
        w = cls(FpMatrix(S, cs1.p, shape=(cs1.d, cs1.d)), FpMatrix(T, cs1.p, shape=(cs1.r, cs1.r)))
        if not w.check(cs1, cs2):
            raise ValueError("witness does not carry cs1 onto cs2")
        return w


class Verdict(enum.Enum):
    ISO = "iso"
    NOT_ISO = "not-iso"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class IsoResult:
    verdict: Verdict
    witness: IsoWitness | None = None
    nodes: int = 0

    @property
    def is_iso(self) -> bool:
        return self.verdict is Verdict.ISO


# ---------------------------------------------------------------------------
# invariant-based distinction

INVARIANT_ORDER = ("shape", "frequency", "rank_signature", "is_subspace", "is_commuting", "preimage_profile")


@lru_cache(maxsize=512)
def _invariants(cs: CommutatorStructure, cap: int) -> dict:
    out: dict = {"shape": (cs.d, cs.r, is_special(cs))}
    if cs.r == 2:
        out["frequency"] = frequency_vector(cs)
        out["preimage_profile"] = preimage_multiset(cs)
    try:
        out["rank_signature"] = rank_signature(cs, cap)
        out["is_subspace"], out["is_commuting"] = small_centralizer_properties(cs, cap)
    except BudgetExceeded:
        pass
    return out


def invariants(cs: CommutatorStructure, cap: int = DEFAULT_POINT_CAP) -> dict:
    return dict(_invariants(cs, cap))


def differing_invariants(cs1: CommutatorStructure, cs2: CommutatorStructure, cap: int = DEFAULT_POINT_CAP) -> list[str]:
    if cs1.p != cs2.p:
        raise ValueError("structures over different primes")
    a, b = _invariants(cs1, cap), _invariants(cs2, cap)
    if a["shape"] != b["shape"]:
        return ["shape"]
    return [k for k in INVARIANT_ORDER if k in a and k in b and a[k] != b[k]]


def distinguish(cs1: CommutatorStructure, cs2: CommutatorStructure, cap: int = DEFAULT_POINT_CAP) -> str | None:
    """Name of the first invariant separating the two structures, or None.

    A name means the groups are certainly not isomorphic; None means the
    invariants could not tell them apart.
    """
    diff = differing_invariants(cs1, cs2, cap)
    return diff[0] if diff else None


# ---------------------------------------------------------------------------
# backtracking search


class _OutOfBudget(Exception):
    pass


def _centralizer_profiles(cs: CommutatorStructure, vecs: np.ndarray, ranks_by_code: np.ndarray) -> list[tuple]:
    """(rank of ad v, rank multiset over the centralizer of v) for each vector."""
    p = cs.p
    out = []
    for v in vecs:
        ad = cs.ad(v)
        ker = nullspace(ad, p, cs.d) if ad.any() else np.eye(cs.d, dtype=np.int64)
        elems = span_elements(ker, p)
        counts = np.bincount(ranks_by_code[encode(elems, p)], minlength=cs.r + 1)
        out.append((rank_of(ad, p), tuple(counts.tolist())))
    return out


def vector_classes(cs1: CommutatorStructure, cs2: CommutatorStructure, refine_limit: int) -> tuple[np.ndarray, np.ndarray]:
    """Class ids for every vector of cs1 and for the basis vectors of cs2.

    An isomorphism can only send a basis vector of cs2 to a vector of cs1
    in the same class.  Classes are the rank of u -> [v, u], refined when
    p^d is small by the ranks found in the centralizer of v.
    """
    p, d = cs1.p, cs1.d
    vecs = all_vectors(d, p)
    eye = np.eye(d, dtype=np.int64)
    r1, r2 = _all_vector_data(cs1)[0], vector_ranks(cs2, eye)
    if len(vecs) > refine_limit or cs1.r == 0:
        return r1, r2
    pts = projective_points(d, p)
    ranks2_all = _all_vector_data(cs2)[0]
    prof1 = _centralizer_profiles(cs1, pts, r1)
    prof2 = _centralizer_profiles(cs2, eye, ranks2_all)
    ids = {key: n for n, key in enumerate(sorted(set(prof1)))}
    by_code = np.full(len(vecs), -1, dtype=np.int64)
    by_code[encode(pts, p)] = [ids[k] for k in prof1]
    # every nonzero vector shares the class of its normalized multiple
    nz = vecs != 0
    has = nz.any(axis=1)
    lead = vecs[np.arange(len(vecs)), np.argmax(nz, axis=1)]
    normed = vecs * inverse_table(p)[lead][:, None] % p
    classes1 = np.where(has, by_code[encode(normed, p)], -1)
    classes2 = np.array([ids.get(k, -2) for k in prof2], dtype=np.int64)
    return classes1, classes2


def _functional_profiles(cs: CommutatorStructure, phis: np.ndarray) -> np.ndarray:
    """Codes for (rank of phi . forms, whether its kernel commutes) per functional."""
    p = cs.p
    combined = np.einsum("nk,kij->nij", phis, cs.forms) % p
    ranks = batch_rank(combined, p)
    commuting = np.zeros(len(phis), dtype=np.int64)
    for n, form in enumerate(combined):
        K = nullspace(form, p, cs.d) if form.any() else np.eye(cs.d, dtype=np.int64)
        gram = np.einsum("ai,kij,bj->kab", K, cs.forms, K) % p
        commuting[n] = not gram.any()
    return 2 * ranks + commuting


_MAX_PATTERN_BITS = 24


def _kernel_codes(cs: CommutatorStructure, vecs: np.ndarray) -> np.ndarray:
    """Bit m of entry n is set when vecs[n] lies in the kernel of phi_m . forms,
    phi_m running over the projective points of W."""
    p, d = cs.p, cs.d
    phis = projective_points(cs.r, p)
    combined = np.einsum("mk,kij->mij", phis, cs.forms) % p
    flat = combined.transpose(1, 0, 2).reshape(d, len(phis) * d)
    bits = np.int64(1) << np.arange(len(phis), dtype=np.int64)
    out = np.zeros(len(vecs), dtype=np.int64)
    for start in range(0, len(vecs), 1 << 16):
        chunk = vecs[start : start + (1 << 16)]
        prod = mul_mod(chunk, flat, p).reshape(len(chunk), len(phis), d)
        out[start : start + len(chunk)] = (~prod.any(axis=2)) @ bits
    return out


@lru_cache(maxsize=8)
def _all_vector_data(cs: CommutatorStructure) -> tuple[np.ndarray, np.ndarray | None]:
    """Rank of ad v and kernel codes for every vector, in all_vectors order."""
    p, d, r = cs.p, cs.d, cs.r
    phis = projective_points(r, p) if r else np.zeros((0, 0), dtype=np.int64)
    if not 0 < len(phis) <= _MAX_PATTERN_BITS:
        return vector_ranks(cs, all_vectors(d, p)), None
    combined = np.einsum("mk,kij->mij", phis, cs.forms) % p
    table = span_table(combined.transpose(1, 0, 2).reshape(d, len(phis) * d), p)
    zero = ~table.reshape(len(table), len(phis), d).any(axis=2)
    codes = np.zeros(len(table), dtype=np.int64)
    for m in range(len(phis)):
        codes |= zero[:, m].astype(np.int64) << m
    # phi . ad(v) = 0 on a subspace of dimension r - rank, i.e. on (p^k - 1)/(p - 1) points
    killed = zero.sum(axis=1)
    k = np.zeros(len(table), dtype=np.int64)
    for j in range(1, r + 1):
        k[killed == (p**j - 1) // (p - 1)] = j
    return r - k, codes


def _permute_bits(codes: np.ndarray, perm: np.ndarray) -> np.ndarray:
    """Bit m of the result is bit perm[m] of the input."""
    out = np.zeros_like(codes)
    for m, src in enumerate(perm):
        out |= ((codes >> int(src)) & 1) << m
    return out


def _normalize_rows(vecs: np.ndarray, p: int) -> np.ndarray:
    nz = vecs != 0
    lead = vecs[np.arange(len(vecs)), np.argmax(nz, axis=1)]
    return vecs * inverse_table(p)[lead][:, None] % p


def _similarity_signature(M: np.ndarray, p: int) -> tuple:
    """Traces of powers and eigenvalue ranks: invariant under conjugation."""
    d = len(M)
    traces, P = [], np.eye(d, dtype=np.int64)
    for _ in range(d):
        P = P @ M % p
        traces.append(int(np.trace(P) % p))
    eye = np.eye(d, dtype=np.int64)
    ranks = [rank_of((M - t * eye) % p, p) for t in range(p)]
    return tuple(traces), tuple(ranks)


def _wong_dims(F0: np.ndarray, F1: np.ndarray, p: int) -> tuple[int, ...]:
    """Dimensions of W_0 = 0, W_{i+1} = {x : F0 x in F1 W_i} until stable."""
    d = len(F0)
    dims = []
    basis = np.zeros((0, d), dtype=np.int64)
    while True:
        # x with F0 x = F1 w for some w in the current subspace
        M = np.hstack([F0, -(F1 @ basis.T) % p]) % p
        sol = nullspace(M, p)
        new = Subspace(sol[:, :d], p, d)
        dims.append(new.dim)
        if new.dim == len(basis):
            return tuple(dims)
        basis = new.basis


def _pencil_signatures(cs: CommutatorStructure, phis: np.ndarray) -> tuple:
    """Congruence invariants of the forms combined along each functional.

    For the pencil of the first functional with each later one: the Wong
    sequence dimensions both ways, and when the first form is
    nondegenerate the similarity signature of F_0^-1 F_k.
    """
    p = cs.p
    forms = np.einsum("nk,kij->nij", phis, cs.forms) % p
    F0 = forms[0]
    regular = rank_of(F0, p) == cs.d
    inv0 = inverse_of(F0, p) if regular else None
    out = []
    for F in forms[1:]:
        sim = _similarity_signature(inv0 @ F % p, p) if regular else None
        out.append((_wong_dims(F0, F, p), _wong_dims(F, F0, p), sim))
    return tuple(out)


def _regular_core(cs: CommutatorStructure) -> CommutatorStructure:
    """Canonical piece where the singular part of the pencil is cut away.

    U is spanned by the kernels of all combined forms; the core is the
    space orthogonal to U under every form, modulo its own radical.
    """
    p, d = cs.p, cs.d
    phis = projective_points(cs.r, p)
    kernels = [nullspace(np.einsum("k,kij->ij", phi, cs.forms) % p, p) for phi in phis]
    kernels = [k for k in kernels if len(k)]
    if not kernels:
        return cs
    U = Subspace(np.vstack(kernels), p, d)
    ortho = nullspace(np.einsum("ai,kij->kaj", U.basis, cs.forms).reshape(-1, d) % p, p)
    if len(ortho) == 0:
        return CommutatorStructure(np.zeros((cs.r, 0, 0), dtype=np.int64), p, d=0)
    part = restrict(cs, ortho)
    rad = radical(part)
    if rad.dim:
        part = restrict(part, rad.complement_basis())
    return part


def _pencil_basis(cs: CommutatorStructure) -> np.ndarray:
    """A basis of functionals on W, led by one of largest rank."""
    p, r = cs.p, cs.r
    phis = projective_points(r, p)
    ranks = batch_rank(np.einsum("nk,kij->nij", phis, cs.forms) % p, p)
    phi = phis[int(np.argmax(ranks))]
    return np.vstack([phi, Subspace([phi], p, r).complement_basis()])


def _adapted_basis(cs: CommutatorStructure, budget: SearchBudget) -> np.ndarray:
    """Columns of a basis built from the rarest vectors of ``cs``.

    Searching against this basis means each column has few possible images.
    Vectors tied by a nonzero commutator to ones already picked come first,
    so placed columns constrain the next.
    """
    p, d = cs.p, cs.d
    keys, _ = vector_classes(cs, cs, budget.refine_limit)
    codes = _all_vector_data(cs)[1]
    if codes is not None:
        keys = keys * (np.int64(1) << len(projective_points(cs.r, p))) + codes
    # keys are scale invariant, so projective points suffice
    pts = projective_points(d, p)
    keys = keys[encode(pts, p)]
    _, inv, counts = np.unique(keys, return_inverse=True, return_counts=True)
    rarity = counts[inv]
    chosen: list[np.ndarray] = []
    linked = np.zeros(len(pts), dtype=bool)
    for _ in range(d):
        score = rarity * 2 + (~linked if chosen else 0)
        for n in np.argsort(score, kind="stable"):
            v = pts[n]
            if rank_of(np.array([*chosen, v]), p) > len(chosen):
                break
        chosen.append(v)
        if cs.r:
            linked |= mul_mod(pts, cs.ad(v).T, p).any(axis=1)
    return np.array(chosen).T


def _independent_of(cand: np.ndarray, chosen: list[np.ndarray], p: int) -> np.ndarray:
    if not chosen:
        return cand.any(axis=1)
    R, piv = rref(np.array(chosen), p)
    w = cand.copy()
    for row, pc in zip(R[: len(piv)], piv):
        w = (w - w[:, pc : pc + 1] * row) % p
    return w.any(axis=1)


@dataclass
class _Search:
    cs1: CommutatorStructure
    cs2: CommutatorStructure
    budget: SearchBudget
    nodes: int = 0

    def __post_init__(self):
        cs1, cs2 = self.cs1, self.cs2
        self.p, self.d, self.r = cs1.p, cs1.d, cs1.r
        self.vecs = all_vectors(self.d, self.p)
        self.classes1, self.classes2 = vector_classes(cs1, cs2, self.budget.refine_limit)
        # values [e_i, e_j] in cs2, indexed [i, j] -> r-vector
        self.c2 = np.transpose(cs2.forms, (1, 2, 0))
        self.order = self._column_order()
        self.phis = projective_points(self.r, self.p) if self.r else np.zeros((0, 0), dtype=np.int64)
        self.key1, self.key2 = self.classes1, self.classes2
        if 0 < len(self.phis) <= _MAX_PATTERN_BITS:
            self.kern1 = _all_vector_data(cs1)[1]
            self.kern2 = _kernel_codes(cs2, np.eye(self.d, dtype=np.int64))

    def _fix_transform(self, T: np.ndarray) -> None:
        """Refine classes by which pulled-back kernels contain each vector.

        With T fixed, e_i lies in the kernel of phi . forms_2 exactly when
        its image lies in the kernel of (phi @ T) . forms_1.
        """
        if not 0 < len(self.phis) <= _MAX_PATTERN_BITS:
            return
        p = self.p
        index = np.zeros(p**self.r, dtype=np.int64)
        index[encode(self.phis, p)] = np.arange(len(self.phis))
        perm = index[encode(_normalize_rows(self.phis @ T % p, p), p)]
        shift = np.int64(1) << len(self.phis)
        self.key1 = self.classes1 * shift + _permute_bits(self.kern1, perm)
        self.key2 = self.classes2 * shift + self.kern2

    def _column_order(self) -> list[int]:
        """Rarest class first, preferring columns tied to those already placed."""
        rarity = Counter(self.classes1[self.classes1 >= 0].tolist())
        rare = lambda i: rarity.get(int(self.classes2[i]), 0)  # noqa: E731
        remaining = list(range(self.d))
        order: list[int] = []
        while remaining:
            links = lambda i: sum(bool(self.c2[j, i].any()) for j in order)  # noqa: E731
            nxt = min(remaining, key=lambda i: (order != [] and links(i) == 0, rare(i), -links(i), i))
            order.append(nxt)
            remaining.remove(nxt)
        return order

    def _transforms(self):
        """Every T compatible with the functional profiles of both structures.

        Row vectors phi on W_2 pull back to phi @ T on W_1, and
        phi . forms_2 is congruent to (phi @ T) . forms_1.
        """
        p, r = self.p, self.r
        phis = projective_points(r, p)
        prof1 = np.full(p**r, -1, dtype=np.int64)
        prof1[encode(phis, p)] = _functional_profiles(self.cs1, phis)
        prof2 = _functional_profiles(self.cs2, phis)
        if sorted(prof1[prof1 >= 0].tolist()) != sorted(prof2.tolist()):
            return
        core1, core2 = _regular_core(self.cs1), _regular_core(self.cs2)
        if core1.d != core2.d:
            return
        basis = _pencil_basis(core2)
        pencil2 = _pencil_signatures(core2, basis) if core2.d else None
        for g in enumerate_gl(r, p, max_count=self.budget.max_gl_size):
            T = g.array
            self.nodes += 1
            if self.nodes > self.budget.max_nodes:
                raise _OutOfBudget
            pulled = _normalize_rows(phis @ T % p, p)
            if not np.array_equal(prof1[encode(pulled, p)], prof2):
                continue
            if pencil2 is not None and _pencil_signatures(core1, basis @ T % p) != pencil2:
                continue
            yield T

    def run(self) -> IsoResult:
        try:
            if self.r == 0:
                found = self._extend({}, np.zeros((0, 0), dtype=np.int64))
            else:
                found = None
                for T in self._transforms():
                    self._fix_transform(T)
                    found = self._extend({}, T)
                    if found is not None:
                        break
        except (_OutOfBudget, BudgetExceeded):
            return IsoResult(Verdict.EXHAUSTED, None, self.nodes)
        if found is None:
            return IsoResult(Verdict.NOT_ISO, None, self.nodes)
        return IsoResult(Verdict.ISO, found, self.nodes)

    def _independent(self, cand: np.ndarray, chosen: list[np.ndarray]) -> np.ndarray:
        return _independent_of(cand, chosen, self.p)

    def _domains(self, assigned: dict, T: np.ndarray) -> dict[int, np.ndarray] | None:
        """Solution sets of every unplaced column; None if one is empty.

        Column i must satisfy T [v_j, x]_1 = [e_j, e_i]_2 for each placed j.
        """
        p, d = self.p, self.d
        keys = list(assigned)
        chosen = list(assigned.values())
        free_targets = [i for i in range(d) if i not in assigned]
        if chosen and self.r:
            A = np.concatenate([T @ self.cs1.ad(v) % p for v in chosen])
            rhs = np.array([np.concatenate([self.c2[j, i] for j in keys]) for i in free_targets]).T
            R, piv = rref(np.hstack([A, rhs]), p, pivot_cols=d)
        else:
            R, piv = np.zeros((0, d + len(free_targets)), dtype=np.int64), []
        k = len(piv)
        if R[k:, d:].any():
            return None
        free = [c for c in range(d) if c not in piv]
        K = np.zeros((len(free), d), dtype=np.int64)
        for t, f in enumerate(free):
            K[t, f] = 1
            for row, pc in enumerate(piv):
                K[t, pc] = -R[row, f] % p
        combos = all_vectors(len(free), p) @ K % p
        out = {}
        for col, i in enumerate(free_targets):
            x0 = np.zeros(d, dtype=np.int64)
            x0[list(piv)] = R[:k, d + col]
            sols = (combos + x0) % p
            sols = sols[self.key1[encode(sols, p)] == self.key2[i]]
            sols = sols[self._independent(sols, chosen)]
            if len(sols) == 0:
                return None
            out[i] = sols[np.argsort(encode(sols, p), kind="stable")]
        return self._prune_pairs(out, T)

    def _prune_pairs(self, domains: dict[int, np.ndarray], T: np.ndarray) -> dict[int, np.ndarray] | None:
        """Drop candidates for column i that no candidate for column j can
        accompany, repeating until nothing changes."""
        if self.r == 0 or len(domains) < 2:
            return domains
        p = self.p
        forms = np.einsum("kl,lij->kij", T, self.cs1.forms) % p
        weights = p ** np.arange(self.r, dtype=np.int64)
        changed = True
        while changed:
            changed = False
            for i in domains:
                for j in domains:
                    Di, Dj = domains[i], domains[j]
                    if i == j or len(Di) * len(Dj) > self.budget.pair_limit:
                        continue
                    vals = (Di @ forms % p) @ Dj.T % p  # (r, |Di|, |Dj|)
                    codes = np.tensordot(weights, vals, axes=1)
                    ok = (codes == int(weights @ self.c2[i, j])).any(axis=1)
                    if not ok.all():
                        if not ok.any():
                            return None
                        domains[i] = Di[ok]
                        changed = True
        return domains

    def _extend(self, assigned: dict, T: np.ndarray):
        if len(assigned) == self.d:
            return self._witness(assigned, T)
        if not assigned:
            target = self.order[0]
            cand = self.vecs[self.key1 == self.key2[target]]
            # T is enumerated in full, so columns only need fixing up to scalars
            cand = cand[(cand == _normalize_rows(cand, self.p)).all(axis=1)]
        else:
            domains = self._domains(assigned, T)
            if domains is None:
                return None
            # columns tied to placed ones first: their constraints carry scale along chains
            linked = lambda i: any(self.c2[j, i].any() for j in assigned)  # noqa: E731
            target = min(domains, key=lambda i: (not linked(i), len(domains[i]), self.order.index(i)))
            cand = domains[target]
        for v in cand:
            self.nodes += 1
            if self.nodes > self.budget.max_nodes:
                raise _OutOfBudget
            found = self._extend({**assigned, target: v}, T)
            if found is not None:
                return found
        return None

    def _witness(self, assigned: dict, T: np.ndarray) -> IsoWitness | None:
        p, r, d = self.p, self.r, self.d
        S = np.zeros((d, d), dtype=np.int64)
        for i, v in assigned.items():
            S[:, i] = v
        w = IsoWitness(FpMatrix(S, p), FpMatrix(T, p, shape=(r, r)))
        return w if w.check(self.cs1, self.cs2) else None


def is_isomorphic(cs1: CommutatorStructure, cs2: CommutatorStructure, budget: SearchBudget | None = None) -> IsoResult:
    budget = budget or SearchBudget()
    if cs1.p != cs2.p:
        raise ValueError("structures over different primes")
    if (cs1.d, cs1.r) != (cs2.d, cs2.r):
        return IsoResult(Verdict.NOT_ISO)
    if cs1 == cs2:
        eye = lambda n: FpMatrix.identity(n, cs1.p) if n else FpMatrix(np.zeros((0, 0)), cs1.p)  # noqa: E731
        return IsoResult(Verdict.ISO, IsoWitness(eye(cs1.d), eye(cs1.r)))
    if cs1.p**cs1.d > budget.max_gl_size:
        return IsoResult(Verdict.EXHAUSTED)
    B = _adapted_basis(cs2, budget)
    res = _Search(cs1, change_of_basis(cs2, B), budget).run()
    if res.witness is None:
        return res
    # cs1 -> cs2 B -> cs2
    S = res.witness.S.array @ inverse_of(B, cs1.p) % cs1.p
    return IsoResult(res.verdict, IsoWitness.verified(cs1, cs2, S, res.witness.T.array), res.nodes)


def random_basis_change(cs: CommutatorStructure, rng: np.random.Generator) -> tuple[CommutatorStructure, FpMatrix, FpMatrix]:
    """Apply a uniformly random (S, T); returns the image and the pair."""
    p = cs.p

    def rand_gl(n):
        while True:
            m = rng.integers(0, p, size=(n, n))
            if rank_of(m, p) == n:
                return FpMatrix(m, p, shape=(n, n))

    S, T = rand_gl(cs.d), rand_gl(cs.r)
    return change_of_basis(cs, S, T), S, T


# ---------------------------------------------------------------------------
# exhaustive orbit classification


@dataclass(frozen=True)
class Orbit:
    representative: CommutatorStructure
    size: int
    special: bool


@dataclass(frozen=True)
class Classification:
    d: int
    p: int
    total: int
    orbits: tuple[Orbit, ...]
    labels: np.ndarray = field(repr=False, compare=False)

    @property
    def special_orbits(self) -> list[Orbit]:
        return [o for o in self.orbits if o.special]


def _upper_pairs(d: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(d, 1)


def structures_from_codes(codes: np.ndarray, d: int, p: int) -> np.ndarray:
    """Decode orbit-table indices into (N, 2, d, d) form stacks."""
    iu = _upper_pairs(d)
    m = len(iu[0])
    digits = np.zeros((len(codes), 2 * m), dtype=np.int64)
    rest = np.array(codes, dtype=np.int64)
    for pos in range(2 * m - 1, -1, -1):
        digits[:, pos] = rest % p
        rest //= p
    forms = np.zeros((len(codes), 2, d, d), dtype=np.int64)
    for k in range(2):
        forms[:, k, iu[0], iu[1]] = digits[:, k * m : (k + 1) * m]
    return (forms - forms.transpose(0, 1, 3, 2)) % p


def structure_code(cs: CommutatorStructure) -> int:
    iu = _upper_pairs(cs.d)
    digits = np.concatenate([cs.forms[k][iu] for k in range(cs.r)])
    return int(encode(digits, cs.p))


def _action_matrix(d: int, p: int, S: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Matrix of (S, T) acting on the coordinate vector of a structure."""
    iu = _upper_pairs(d)
    m = len(iu[0])
    basis = np.eye(2 * m, dtype=np.int64)
    forms = structures_from_codes(encode(basis, p), d, p)
    moved = np.einsum("ai,nkab,bj->nkij", S, forms, S) % p
    moved = np.einsum("kl,nlij->nkij", T, moved) % p
    return np.concatenate([moved[:, 0][:, iu[0], iu[1]], moved[:, 1][:, iu[0], iu[1]]], axis=1)


def classify_all(d: int, p: int, budget: SearchBudget | None = None) -> Classification:
    """Partition every derived-rank-2 structure on d generators into orbits.

    Orbits are grown by BFS under generators of GL(d, p) x GL(2, p); a
    label array serves as the visited set.
    """
    budget = budget or SearchBudget()
    p = check_prime(p)
    m = d * (d - 1) // 2
    total = p ** (2 * m)
    if total > budget.max_gl_size:
        raise BudgetExceeded(f"{total} structures exceed cap {budget.max_gl_size}")
    eye_d, eye_2 = np.eye(d, dtype=np.int64), np.eye(2, dtype=np.int64)
    actions = [(g.array, eye_2) for g in gl_generators(d, p)] + [(eye_d, g.array) for g in gl_generators(2, p)]
    weights = p ** np.arange(2 * m - 1, -1, -1, dtype=np.int64)
    codes = np.arange(total, dtype=np.int64)
    coords = np.zeros((total, 2 * m), dtype=np.int64)
    rest = codes.copy()
    for pos in range(2 * m - 1, -1, -1):
        coords[:, pos] = rest % p
        rest //= p
    images = []
    for S, T in actions:
        M = _action_matrix(d, p, S, T)
        images.append(((coords @ M) % p) @ weights)
    del coords

    labels = np.full(total, -1, dtype=np.int64)
    sizes: list[int] = []
    reps: list[int] = []
    seed = 0
    while True:
        free = np.flatnonzero(labels[seed:] < 0)
        if free.size == 0:
            break
        seed += int(free[0])
        k = len(sizes)
        labels[seed] = k
        frontier = np.array([seed])
        size = 1
        while frontier.size:
            nxt = np.unique(np.concatenate([img[frontier] for img in images]))
            nxt = nxt[labels[nxt] < 0]
            labels[nxt] = k
            size += nxt.size
            frontier = nxt
        sizes.append(size)
        reps.append(seed)
    rep_forms = structures_from_codes(np.array(reps), d, p)
    orbits = []
    for code, size, forms in zip(reps, sizes, rep_forms):
        cs = CommutatorStructure(forms, p, d=d)
        orbits.append(Orbit(cs, size, is_special(cs)))
    return Classification(d, p, total, tuple(orbits), labels)


def group_order_bound(d: int, p: int) -> int:
    return gl_order(d, p) * gl_order(2, p)
