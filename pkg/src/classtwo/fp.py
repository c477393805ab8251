"""Exact linear algebra over the prime field GF(p), p an odd prime.

Two layers live here.  The array helpers (``rref``, ``nullspace``,
``batch_rank`` ...) work on plain ``int64`` numpy arrays and are what the
search code uses in its inner loops.  :class:`FpMatrix` and
:class:`Subspace` wrap them as immutable, hashable values.

Echelon forms always take the smallest available pivot column and scale
pivots to 1, so a reduced basis is a canonical name for its row space.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from .errors import BudgetExceeded, EvenPrimeError, NotPrimeError, SingularMatrixError

MAX_PRIME = 251
DEFAULT_GL_CAP = 10**6


def check_prime(p: int) -> int:
    """Validate ``p`` as a supported modulus and return it as ``int``."""
    if isinstance(p, bool) or int(p) != p:
        raise NotPrimeError(f"modulus must be an integer, got {p!r}")
    p = int(p)
    if p == 2:
        raise EvenPrimeError("p = 2 is not supported; the modulus must be odd")
    if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
        raise NotPrimeError(f"{p} is not prime")
    if p > MAX_PRIME:
        raise NotPrimeError(f"p = {p} exceeds the supported maximum {MAX_PRIME}")
    return p


@lru_cache(maxsize=None)
def inverse_table(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, p - 2, p)
    inv.setflags(write=False)
    return inv


@lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    if p == 3:
        return 2
    factors = {q for q in range(2, p) if (p - 1) % q == 0 and all(q % s for s in range(2, q))}
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in factors):
            return g
    raise AssertionError("unreachable for prime p")


def as_array(a, p: int) -> np.ndarray:
    return np.asarray(a, dtype=np.int64) % p


# ---------------------------------------------------------------------------
# array-level routines


def rref(a: np.ndarray, p: int, pivot_cols: int | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form of ``a`` over GF(p).

    Returns ``(R, pivots)`` where ``R`` has the same shape as ``a`` (zero
    rows at the bottom) and ``pivots`` lists the pivot column of each
    nonzero row.  With ``pivot_cols`` only the leading columns are
    eligible as pivots; row operations still span the full width, which
    reduces an augmented system ``[A | B]``.
    """
    R = np.array(a, dtype=np.int64) % p
    if R.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    m, n = R.shape
    inv = inverse_table(p)
    pivots: list[int] = []
    row = 0
    for col in range(n if pivot_cols is None else pivot_cols):
        if row == m:
            break
        nz = np.flatnonzero(R[row:, col])
        if nz.size == 0:
            continue
        k = row + int(nz[0])
        if k != row:
            R[[row, k]] = R[[k, row]]
        R[row] = R[row] * inv[R[row, col]] % p
        factors = R[:, col].copy()
        factors[row] = 0
        if factors.any():
            R = (R - np.outer(factors, R[row])) % p
        pivots.append(col)
        row += 1
    return R, pivots


def rank_of(a: np.ndarray, p: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(rref(a, p)[1])


def nullspace(a: np.ndarray, p: int, ncols: int | None = None) -> np.ndarray:
    """Basis (rows, reduced echelon) of the right null space of ``a``."""
    a = np.asarray(a, dtype=np.int64)
    if a.ndim != 2 or a.shape[0] == 0:
        n = ncols if ncols is not None else (a.shape[1] if a.ndim == 2 else 0)
        return np.eye(n, dtype=np.int64)
    n = a.shape[1]
    R, pivots = rref(a, p)
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for t, f in enumerate(free):
        basis[t, f] = 1
        for i, pc in enumerate(pivots):
            basis[t, pc] = (-R[i, f]) % p
    if len(free) == 0:
        return basis
    return rref(basis, p)[0]


def inverse_of(a: np.ndarray, p: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64) % p
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse requires a square matrix")
    R, pivots = rref(np.hstack([a, np.eye(n, dtype=np.int64)]), p)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError(f"matrix of size {n} is singular mod {p}")
    return R[:, n:].copy()


def solve_left(rows: np.ndarray, targets: np.ndarray, p: int) -> np.ndarray | None:
    """Find ``X`` with ``X @ rows == targets`` or return ``None``."""
    # X rows = coefficient vectors: rows^T x^T = targets^T
    sol = []
    A = np.asarray(rows, dtype=np.int64).T % p
    for t in np.atleast_2d(targets):
        aug = np.hstack([A, (t % p)[:, None]])
        R, piv = rref(aug, p)
        if A.shape[1] in piv:
            return None
        x = np.zeros(A.shape[1], dtype=np.int64)
        for i, c in enumerate(piv):
            x[c] = R[i, -1]
        sol.append(x)
    return np.array(sol, dtype=np.int64)


def mul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """``a @ b % p`` through float64 BLAS, exact while every sum is below 2^53."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape[-1] * (p - 1) ** 2 >= 2**53:
        return a.astype(np.int64) @ b.astype(np.int64) % p
    return (a.astype(np.float64) @ b.astype(np.float64) % p).astype(np.int64)


def _rank_two_rows(M: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a stack of 2 x n matrices from their 2 x 2 minors."""
    a, b = M[:, 0], M[:, 1]
    nonzero = a.any(axis=1) | b.any(axis=1)
    minors = (a[:, :, None] * b[:, None, :] - a[:, None, :] * b[:, :, None]) % p
    return nonzero.astype(np.int64) + minors.reshape(len(M), -1).any(axis=1)


def batch_rank(a: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a stack of matrices, shape ``(N, m, n)`` -> ``(N,)``."""
    M = np.array(a, dtype=np.int64) % p
    N, m, n = M.shape
    if m == 1:
        return M.any(axis=(1, 2)).astype(np.int64)
    if m == 2:
        return _rank_two_rows(M, p)
    inv = inverse_table(p)
    rank = np.zeros(N, dtype=np.int64)
    rows = np.arange(m)
    for col in range(n):
        live = np.flatnonzero(rank < m)
        if live.size == 0:
            break
        sub = M[live]
        mask = (sub[:, :, col] != 0) & (rows[None, :] >= rank[live][:, None])
        has = mask.any(axis=1)
        if not has.any():
            continue
        idx = live[has]
        sub = sub[has]
        r0 = rank[idx]
        piv = np.argmax(mask[has], axis=1)
        k = np.arange(idx.size)
        top = sub[k, r0].copy()
        sub[k, r0] = sub[k, piv]
        sub[k, piv] = top
        prow = sub[k, r0] * inv[sub[k, r0, col]][:, None] % p
        sub[k, r0] = prow
        factors = sub[:, :, col].copy()
        factors[k, r0] = 0
        sub = (sub - factors[:, :, None] * prow[:, None, :]) % p
        M[idx] = sub
        rank[idx] += 1
    return rank


@lru_cache(maxsize=None)
def all_vectors(n: int, p: int) -> np.ndarray:
    """Every vector of GF(p)^n, lexicographic with coordinate 0 most significant."""
    if n == 0:
        out = np.zeros((1, 0), dtype=np.int64)
    else:
        out = np.stack(np.unravel_index(np.arange(p**n, dtype=np.int64), (p,) * n), axis=1).astype(np.int64)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def projective_points(n: int, p: int) -> np.ndarray:
    """One representative per 1-dimensional subspace: first nonzero entry is 1."""
    vecs = all_vectors(n, p)
    nz = vecs != 0
    keep = nz.any(axis=1)
    first = np.argmax(nz, axis=1)
    keep &= vecs[np.arange(len(vecs)), first] == 1
    out = vecs[keep]
    out.setflags(write=False)
    return out


def span_table(M: np.ndarray, p: int) -> np.ndarray:
    """``all_vectors(d, p) @ M % p`` built one coordinate at a time.

    Entries fit in 16 bits, which keeps the table small and the work to
    one addition per entry.
    """
    M = np.asarray(M, dtype=np.int64) % p
    d, c = M.shape
    out = np.zeros((1, c), dtype=np.int16)
    steps = np.arange(p, dtype=np.int64)[:, None]
    for row in M[::-1]:
        mult = (steps * row[None, :] % p).astype(np.int16)
        out = (mult[:, None, :] + out[None, :, :]).reshape(-1, c)
        out[out >= p] -= p
    return out


def encode(vecs: np.ndarray, p: int) -> np.ndarray:
    vecs = np.asarray(vecs, dtype=np.int64)
    n = vecs.shape[-1]
    weights = p ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return vecs @ weights


def span_elements(basis: np.ndarray, p: int) -> np.ndarray:
    basis = np.asarray(basis, dtype=np.int64)
    k = basis.shape[0]
    return all_vectors(k, p) @ basis % p


# ---------------------------------------------------------------------------
# value types


class FpMatrix:
    """An immutable matrix over GF(p)."""

    __slots__ = ("p", "_a")

    def __init__(self, entries, p: int, shape: tuple[int, int] | None = None):
        p = check_prime(p)
        a = np.array(entries, dtype=np.int64)
        if shape is not None:
            a = a.reshape(shape)
        if a.ndim != 2:
            raise ValueError("FpMatrix entries must be two-dimensional")
        a %= p
        a.setflags(write=False)
        self.p = p
        self._a = a

    @classmethod
    def identity(cls, n: int, p: int) -> FpMatrix:
        return cls(np.eye(n, dtype=np.int64), p)

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> FpMatrix:
        return cls(np.zeros((rows, cols), dtype=np.int64), p)

    @classmethod
    def diag(cls, values: Iterable[int], p: int) -> FpMatrix:
        return cls(np.diag(list(values)), p)

    @property
    def array(self) -> np.ndarray:
        return self._a

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def T(self) -> FpMatrix:
        return FpMatrix(self._a.T, self.p)

    def __getitem__(self, idx):
        out = self._a[idx]
        return int(out) if np.ndim(out) == 0 else out

    def tolist(self) -> list[list[int]]:
        return self._a.tolist()

    def _other(self, other) -> np.ndarray:
        if isinstance(other, FpMatrix):
            if other.p != self.p:
                raise ValueError(f"moduli differ: {self.p} vs {other.p}")
            return other._a
        return np.asarray(other, dtype=np.int64)

    def __matmul__(self, other):
        b = self._other(other)
        out = self._a @ b % self.p
        return FpMatrix(out, self.p) if out.ndim == 2 else out

    def __add__(self, other) -> FpMatrix:
        return FpMatrix(self._a + self._other(other), self.p)

    def __sub__(self, other) -> FpMatrix:
        return FpMatrix(self._a - self._other(other), self.p)

    def __neg__(self) -> FpMatrix:
        return FpMatrix(-self._a, self.p)

    def __mul__(self, scalar: int) -> FpMatrix:
        return FpMatrix(self._a * int(scalar), self.p)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return self.p == other.p and self.shape == other.shape and bool(np.array_equal(self._a, other._a))

    def __hash__(self) -> int:
        return hash((self.p, self.shape, self._a.tobytes()))

    def __repr__(self) -> str:
        return f"FpMatrix({self._a.tolist()}, p={self.p})"

    def is_antisymmetric(self) -> bool:
        a = self._a
        return a.shape[0] == a.shape[1] and not ((a + a.T) % self.p).any() and not np.diag(a).any()

    def rank(self) -> int:
        return rank(self)

    def kernel(self) -> Subspace:
        return kernel(self)

    def inverse(self) -> FpMatrix:
        return invert(self)

    def is_invertible(self) -> bool:
        return self.rows == self.cols and rank(self) == self.rows


class Subspace:
    """A subspace of GF(p)^n held by its reduced row-echelon basis.

    Construction canonicalizes whatever spanning set is passed in, so
    ``==`` is equality of subspaces.
    """

    __slots__ = ("p", "ambient_dim", "basis", "pivots")

    def __init__(self, vectors, p: int, ambient_dim: int):
        p = check_prime(p)
        v = np.array(vectors, dtype=np.int64).reshape(-1, ambient_dim) % p
        if v.shape[0]:
            R, piv = rref(v, p)
            v = R[: len(piv)]
        else:
            piv = []
        v.setflags(write=False)
        self.p = p
        self.ambient_dim = ambient_dim
        self.basis = v
        self.pivots = tuple(piv)

    @classmethod
    def zero(cls, n: int, p: int) -> Subspace:
        return cls(np.zeros((0, n)), p, n)

    @classmethod
    def full(cls, n: int, p: int) -> Subspace:
        return cls(np.eye(n, dtype=np.int64), p, n)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __len__(self) -> int:
        return self.dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.p == other.p
            and self.ambient_dim == other.ambient_dim
            and np.array_equal(self.basis, other.basis)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.ambient_dim, self.basis.tobytes()))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, p={self.p}, basis={self.basis.tolist()})"

    def __contains__(self, v) -> bool:
        v = np.asarray(v, dtype=np.int64) % self.p
        w = v.copy()
        for row, c in zip(self.basis, self.pivots):
            if w[c]:
                w = (w - w[c] * row) % self.p
        return not w.any()

    def __add__(self, other: Subspace) -> Subspace:
        self._check(other)
        return Subspace(np.vstack([self.basis, other.basis]), self.p, self.ambient_dim)

    def __le__(self, other: Subspace) -> bool:
        self._check(other)
        return all(v in other for v in self.basis)

    def _check(self, other: Subspace) -> None:
        if (self.p, self.ambient_dim) != (other.p, other.ambient_dim):
            raise ValueError("subspaces live in different spaces")

    def annihilator(self) -> np.ndarray:
        """Rows spanning {x : x . v = 0 for every v in self}."""
        if self.dim == 0:
            return np.eye(self.ambient_dim, dtype=np.int64)
        return nullspace(self.basis, self.p)

    def intersect(self, other: Subspace) -> Subspace:
        self._check(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient_dim, self.p)
        ann = other.annihilator()
        if ann.shape[0] == 0:
            return self
        coeffs = nullspace(ann @ self.basis.T % self.p, self.p)
        return Subspace(coeffs @ self.basis % self.p, self.p, self.ambient_dim)

    def complement_basis(self) -> np.ndarray:
        """Unit vectors on the non-pivot coordinates; together with ``basis`` they span everything."""
        free = [c for c in range(self.ambient_dim) if c not in self.pivots]
        return np.eye(self.ambient_dim, dtype=np.int64)[free]

    def coordinates(self, v) -> np.ndarray:
        """Coefficients of ``v`` on ``basis``; ``v`` must lie in the subspace."""
        v = np.asarray(v, dtype=np.int64) % self.p
        if v not in self:
            raise ValueError("vector not in subspace")
        return v[list(self.pivots)]

    def elements(self) -> np.ndarray:
        return span_elements(self.basis, self.p)


# ---------------------------------------------------------------------------
# operations


def rank(M: FpMatrix) -> int:
    return rank_of(M.array, M.p)


def kernel(M: FpMatrix) -> Subspace:
    return Subspace(nullspace(M.array, M.p, M.cols), M.p, M.cols)


def invert(M: FpMatrix) -> FpMatrix:
    if M.rows != M.cols:
        raise ValueError("only square matrices can be inverted")
    return FpMatrix(inverse_of(M.array, M.p), M.p)


def gl_order(d: int, p: int) -> int:
    out = 1
    for i in range(d):
        out *= p**d - p**i
    return out


def gl_generators(d: int, p: int) -> list[FpMatrix]:
    """At most three generators of GL(d, p).

    A primitive-root scaling of the first coordinate reaches every
    determinant; the cyclic coordinate shift conjugates the transvection
    ``I + E_01`` onto every ``I + E_{i,i+1 mod d}``, and those generate SL.
    """
    p = check_prime(p)
    if d < 1:
        raise ValueError("d must be positive")
    scale = np.eye(d, dtype=np.int64)
    scale[0, 0] = primitive_root(p)
    gens = [FpMatrix(scale, p)]
    if d == 1:
        return gens
    cycle = np.roll(np.eye(d, dtype=np.int64), 1, axis=0)
    trans = np.eye(d, dtype=np.int64)
    trans[0, 1] = 1
    gens += [FpMatrix(cycle, p), FpMatrix(trans, p)]
    return gens


def enumerate_gl(d: int, p: int, max_count: int = DEFAULT_GL_CAP) -> Iterator[FpMatrix]:
    """Yield every invertible d x d matrix once.

    Columns are chosen left to right, each from the vectors outside the
    span of the columns already fixed, so singular matrices are never
    generated.
    """
    p = check_prime(p)
    total = gl_order(d, p)
    if total > max_count:
        raise BudgetExceeded(f"|GL({d},{p})| = {total} exceeds cap {max_count}")
    return _gl_columns(d, p)


def _gl_columns(d: int, p: int) -> Iterator[FpMatrix]:
    vecs = all_vectors(d, p)
    codes = encode(vecs, p)
    cols = np.zeros((d, d), dtype=np.int64)

    def rec(k: int) -> Iterator[FpMatrix]:
        if k == d:
            yield FpMatrix(cols, p)
            return
        taken = set(encode(span_elements(cols[:, :k].T, p), p).tolist())
        for v, c in zip(vecs, codes.tolist()):
            if c in taken:
                continue
            cols[:, k] = v
            yield from rec(k + 1)

    yield from rec(0)
