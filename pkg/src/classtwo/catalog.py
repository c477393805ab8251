"""The named special groups with |G'| <= p^2 and |G| <= p^9.

Matrices are the Scharlau pairs as tabulated in the literature, with the
symbols ``nu`` (a quadratic nonresidue) and ``a``, ``b``, ``c`` (last row
of the companion matrix of an irreducible cubic) resolved per prime.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import UnknownNameError
from .fdg import FlowDigraph
from .fp import check_prime
from .structure import CommutatorStructure, ScharlauPair, from_digraph, from_scharlau

Matrix = tuple[tuple[object, ...], ...]

# (const, slope) per frequency coordinate: (0, 3, p - 2) -> ((0,0), (3,0), (-2,1))
Formula = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    order_exponent: int
    A: Matrix
    B: Matrix
    factors: tuple[str, ...] | None
    frequency: Formula
    gluing: tuple[tuple[str, tuple[tuple[int, ...], ...]], ...] = ()
    part_dims: tuple[int, ...] | None = None
    digraph: tuple[tuple[int, int, tuple[object, ...]], ...] = ()
    erratum: str = ""
    aliases: tuple[str, ...] = field(default=())

    @property
    def indecomposable(self) -> bool:
        return self.factors is None

    def expected_frequency(self, p: int) -> tuple[int, ...]:
        return tuple(c + s * p for c, s in self.frequency)

    def formula_text(self) -> str:
        parts = []
        for c, s in self.frequency:
            if s == 0:
                parts.append(str(c))
            else:
                lin = "p" if s == 1 else f"{s}p"
                parts.append(lin if c == 0 else f"{lin}{c:+d}")
        return "(" + ",".join(parts) + ")"


def _f(*coords) -> Formula:
    out = []
    for c in coords:
        out.append(c if isinstance(c, tuple) else (c, 0))
    return tuple(out)


P = (0, 1)  # p
P1 = (1, 1)  # p + 1
PM1 = (-1, 1)  # p - 1
PM2 = (-2, 1)  # p - 2

Z1 = ((1,), (0,))
Z2 = ((0,), (1,))
Z12 = ((1,), (1,))
I2 = ((1, 0), (0, 1))

_ENTRIES = [
    CatalogEntry("5.3.1", 5, ((1, 0),), ((0, 1),), None, _f(P1)),
    CatalogEntry(
        "6.4.2", 6, ((1, 0), (0, 0)), ((0, 0), (0, 1)), ("E3", "E3"), _f(2, PM1),
        gluing=(("E3", Z1), ("E3", Z2)),
    ),
    CatalogEntry("6.4.3", 6, ((1, 0), (0, 1)), ((0, 1), (0, 0)), None, _f(1, P)),
    CatalogEntry("6.4.4", 6, ((1, 0), (0, 1)), ((0, 1), ("nu", 0)), None, _f(0, P1)),
    CatalogEntry(
        "7.5.5", 7, ((1, 0, 0), (0, 0, 1)), ((0, 1, 0), (0, 0, 0)), ("E3", "5.3.1"), _f(1, P),
        gluing=(("5.3.1", I2), ("E3", Z1)),
    ),
    CatalogEntry("7.5.6", 7, ((1, 0, 0), (0, 1, 0)), ((0, 1, 0), (0, 0, 1)), None, _f(0, P1)),
    CatalogEntry(
        "8.6.7", 8, ((1, 0, 0), (0, 1, 0), (0, 0, 0)), ((0, 0, 0), (0, 0, 0), (0, 0, 1)),
        ("E3", "E3", "E3"), _f(1, 1, PM1),
        gluing=(("E3", Z1), ("E3", Z1), ("E3", Z2)),
    ),
    CatalogEntry(
        "8.6.8", 8, ((1, 0, 0), (0, 1, 0), (0, 0, 0)), ((0, 0, 0), (0, 1, 0), (0, 0, 1)),
        ("E3", "E3", "E3"), _f(0, 3, PM2),
        gluing=(("E3", Z1), ("E3", Z12), ("E3", Z2)),
    ),
    CatalogEntry(
        "8.6.9", 8, ((1, 0, 0), (0, 1, 0), (0, 0, 1)), ((0, 1, 0), (0, 0, 0), (0, 0, 1)),
        ("E3", "6.4.3"), _f(0, 2, PM1),
        gluing=(("6.4.3", I2), ("E3", Z12)),
    ),
    CatalogEntry(
        "8.6.10", 8, ((1, 0, 0), (0, 1, 0), (0, 0, 1)), ((0, 1, 0), (0, 0, 0), (0, 0, 0)),
        ("E3", "6.4.3"), _f(1, 0, P),
        gluing=(("6.4.3", I2), ("E3", Z1)),
        erratum=(
            "printed A has a zero (3,3) entry, which leaves x3 and y3 central; "
            "the entry is 1 here so the group is special, E3 x 6.4.3 and of frequency (1,0,p)"
        ),
    ),
    CatalogEntry(
        "8.6.11", 8, ((1, 0, 0), (0, 1, 0), (0, 0, 1)), ((0, 1, 0), ("nu", 0, 0), (0, 0, 0)),
        ("E3", "6.4.4"), _f(0, 1, P),
        gluing=(("6.4.4", I2), ("E3", Z1)),
    ),
    CatalogEntry(
        "8.6.12", 8, ((1, 0, 0), (0, 0, 1), (0, 0, 0)), ((0, 1, 0), (0, 0, 0), (0, 0, 1)),
        ("5.3.1", "5.3.1"), _f(0, P1, 0),
        gluing=(("5.3.1", I2), ("5.3.1", I2)),
    ),
    CatalogEntry("8.6.13", 8, ((1, 0, 0), (0, 1, 0), (0, 0, 1)), ((0, 1, 0), (0, 0, 1), (0, 0, 0)), None, _f(0, 1, P)),
    CatalogEntry("8.6.14", 8, ((1, 0, 0), (0, 1, 0), (0, 0, 1)), ((0, 1, 0), (0, 0, 1), ("c", "b", "a")), None, _f(0, 0, P1)),
    CatalogEntry(
        "A", 9, ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)), ((0, 0, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)),
        ("E3", "7.5.6"), _f(0, 1, P),
        gluing=(("7.5.6", I2), ("E3", Z1)), part_dims=(5, 2),
        digraph=((1, 2, (1, 0)), (2, 3, (0, 1)), (3, 4, (1, 0)), (4, 5, (0, 1)), (6, 7, (1, 0))),
    ),
    CatalogEntry(
        "B", 9, ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)), ((0, 0, 0, 0), (0, 0, 0, 0), (0, 0, 0, 1)),
        ("E3", "E3", "5.3.1"), _f(1, 0, P),
        gluing=(("E3", Z1), ("E3", Z1), ("5.3.1", I2)), part_dims=(3, 2, 2),
        digraph=((1, 2, (1, 0)), (2, 3, (0, 1)), (4, 5, (1, 0)), (6, 7, (1, 0))),
    ),
    CatalogEntry(
        "C", 9, ((1, 0, 0, 0), (0, 0, 0, 0), (0, 0, 1, 0)), ((0, 0, 0, 0), (0, 1, 0, 0), (0, 0, 0, 1)),
        ("E3", "E3", "5.3.1"), _f(0, 2, PM1),
        gluing=(("E3", Z1), ("E3", Z2), ("5.3.1", I2)), part_dims=(3, 2, 2),
        digraph=((1, 2, (1, 0)), (2, 3, (0, 1)), (4, 5, (1, 0)), (6, 7, (0, 1))),
    ),
    CatalogEntry(
        "D", 9, ((1, 0, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)), ((0, 1, 0, 0), (0, 0, 0, 1), (0, 0, "nu", 0)),
        ("5.3.1", "6.4.4"), _f(0, 0, P1),
        gluing=(("5.3.1", I2), ("6.4.4", I2)), part_dims=(4, 3),
        digraph=(
            (1, 2, (1, 0)), (1, 3, (0, 1)), (2, 4, (0, 1)), (3, 4, ("nu", 0)),
            (5, 6, (1, 0)), (6, 7, (0, 1)),
        ),
    ),
    CatalogEntry(
        "E", 9, ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)), ((0, 1, 0, 0), (0, 0, 0, 0), (0, 0, 0, 1)),
        ("5.3.1", "6.4.3"), _f(0, 1, P),
        gluing=(("5.3.1", I2), ("6.4.3", I2)), part_dims=(4, 3),
        digraph=((1, 2, (1, 0)), (2, 3, (0, 1)), (3, 4, (1, 0)), (5, 6, (1, 0)), (6, 7, (0, 1))),
    ),
    CatalogEntry(
        "F", 9, ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)), ((0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)),
        None, _f(0, 0, P1),
        digraph=(
            (1, 2, (1, 0)), (2, 3, (0, 1)), (3, 4, (1, 0)), (4, 5, (0, 1)), (5, 6, (1, 0)), (6, 7, (0, 1)),
        ),
    ),
]

E3_NAME = "E3"
CATALOG: dict[str, CatalogEntry] = {e.name: e for e in _ENTRIES}
NAMES: tuple[str, ...] = (E3_NAME, *CATALOG)
ALIASES = {"3.2.1": E3_NAME, "E_3": E3_NAME}
INDECOMPOSABLES: tuple[str, ...] = (E3_NAME, "5.3.1", "6.4.3", "6.4.4", "7.5.6", "8.6.13", "8.6.14", "F")


def canonical_name(name: str) -> str:
    name = ALIASES.get(name, name)
    if name != E3_NAME and name not in CATALOG:
        raise UnknownNameError(f"no catalog group named {name!r}")
    return name


def order_exponent(name: str) -> int:
    name = canonical_name(name)
    return 3 if name == E3_NAME else CATALOG[name].order_exponent


@lru_cache(maxsize=None)
def nonresidues(p: int) -> tuple[int, ...]:
    p = check_prime(p)
    return tuple(a for a in range(1, p) if pow(a, (p - 1) // 2, p) == p - 1)


def least_nonresidue(p: int) -> int:
    return nonresidues(p)[0]


@lru_cache(maxsize=None)
def irreducible_cubics(p: int) -> tuple[tuple[int, int, int], ...]:
    """All (a, b, c) with x^3 - a x^2 - b x - c irreducible mod p, lexicographic.

    A cubic is irreducible over a field iff it has no root.
    """
    p = check_prime(p)
    out = []
    for a, b, c in itertools.product(range(p), repeat=3):
        if all((x**3 - a * x * x - b * x - c) % p for x in range(p)):
            out.append((a, b, c))
    return tuple(out)


def least_cubic(p: int) -> tuple[int, int, int]:
    return irreducible_cubics(p)[0]


def _resolve(rows: Matrix, symbols: dict[str, int], p: int) -> np.ndarray:
    return np.array([[symbols[x] if isinstance(x, str) else x for x in row] for row in rows], dtype=np.int64) % p


def _symbols(p: int, nu: int | None, cubic: tuple[int, int, int] | None) -> dict[str, int]:
    nu = least_nonresidue(p) if nu is None else nu % p
    if pow(nu, (p - 1) // 2, p) != p - 1:
        raise ValueError(f"{nu} is a quadratic residue mod {p}")
    a, b, c = least_cubic(p) if cubic is None else tuple(x % p for x in cubic)
    if any((x**3 - a * x * x - b * x - c) % p == 0 for x in range(p)):
        raise ValueError(f"x^3 - {a}x^2 - {b}x - {c} has a root mod {p}")
    return {"nu": nu, "a": a, "b": b, "c": c}


def scharlau_pair(name: str, p: int, nu: int | None = None, cubic=None) -> ScharlauPair:
    name = canonical_name(name)
    if name == E3_NAME:
        raise ValueError("E3 has cyclic derived group; it has no Scharlau pair")
    entry = CATALOG[name]
    p = check_prime(p)
    sym = _symbols(p, nu, cubic)
    return ScharlauPair.of(_resolve(entry.A, sym, p), _resolve(entry.B, sym, p), p)


def e3(p: int) -> CommutatorStructure:
    return CommutatorStructure([[[0, 1], [-1, 0]]], p)


def build(name: str, p: int, nu: int | None = None, cubic=None) -> CommutatorStructure:
    """Structure of a catalog group at prime ``p``.

    ``nu`` and ``cubic`` override the default choices (least nonresidue,
    lexicographically least irreducible cubic).
    """
    name = canonical_name(name)
    if name == E3_NAME:
        return e3(p)
    return from_scharlau(scharlau_pair(name, p, nu, cubic))


def drawn_digraph(name: str, p: int, nu: int | None = None) -> FlowDigraph:
    """The drawn digraph of an order-p^9 group, flows resolved at ``p``."""
    name = canonical_name(name)
    entry = CATALOG.get(name)
    if entry is None or not entry.digraph:
        raise UnknownNameError(f"no drawn digraph for {name!r}")
    sym = _symbols(p, nu, None)
    edges = tuple((i, j, tuple(sym[x] if isinstance(x, str) else x for x in f)) for i, j, f in entry.digraph)
    return FlowDigraph(name, p, 2, 7, edges)


def drawn_structure(name: str, p: int, nu: int | None = None) -> CommutatorStructure:
    return from_digraph(drawn_digraph(name, p, nu))


def entries_by_order(names=None) -> dict[int, list[str]]:
    out: dict[int, list[str]] = {}
    for n in names or NAMES:
        out.setdefault(order_exponent(n), []).append(n)
    return out


def glued_product(name: str, p: int) -> CommutatorStructure:
    """The tabulated factors of a decomposable entry, glued as listed."""
    from .central import GluingMap, central_product

    name = canonical_name(name)
    entry = CATALOG.get(name)
    if entry is None or not entry.gluing:
        raise UnknownNameError(f"{name!r} has no tabulated central factors")
    factors = [build(f, p) for f, _ in entry.gluing]
    glue = [GluingMap.of(m, p) for _, m in entry.gluing]
    return central_product(factors, glue, 2)
