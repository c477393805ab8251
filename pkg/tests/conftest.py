import numpy as np
import pytest

from classtwo.fp import FpMatrix, rank_of


def random_invertible(n: int, p: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        M = rng.integers(0, p, size=(n, n))
        if rank_of(M, p) == n:
            return M


def random_alternating(r: int, d: int, p: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.integers(0, p, size=(r, d, d))
    a = np.triu(a, 1)
    return (a - a.transpose(0, 2, 1)) % p


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


__all__ = ["FpMatrix", "random_alternating", "random_invertible"]
