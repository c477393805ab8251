"""Flow digraphs and their ``.fdg`` text format.

A flow digraph has one vertex per generator and an edge ``i -> j`` (i < j)
labelled by the exponent vector of ``[x_i, x_j]`` over the derived basis.
Commuting pairs have no edge.  The text format is line oriented::

    group 5.3.1
    p 3
    derived 2
    gens 3
    edge 1 2 1 0
    edge 2 3 0 1

``#`` starts a comment.  An edge may be written backwards (``edge 2 1 ...``);
it is stored forwards with the flow negated.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import (
    DuplicateEdgeError,
    EvenPrimeError,
    FdgEvenPrimeError,
    FdgNotPrimeError,
    FdgSyntaxError,
    IndexOutOfRangeError,
    NotPrimeError,
    ZeroFlowError,
)
from .fp import check_prime

Edge = tuple[int, int, tuple[int, ...]]

_NAME = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_.\-]*$")
_HEADER = ("group", "p", "derived", "gens")


@dataclass(frozen=True)
class FlowDigraph:
    name: str
    p: int
    r: int
    d: int
    edges: tuple[Edge, ...] = field(default=())

    def __post_init__(self):
        check_prime(self.p)
        if self.r < 0 or self.d < 0:
            raise ValueError("derived rank and generator count must be non-negative")
        canon: dict[tuple[int, int], tuple[int, ...]] = {}
        for i, j, flow in self.edges:
            flow = tuple(int(e) % self.p for e in flow)
            if len(flow) != self.r:
                raise ValueError(f"edge {i}-{j}: flow has {len(flow)} exponents, expected {self.r}")
            if not (1 <= i <= self.d and 1 <= j <= self.d) or i == j:
                raise ValueError(f"edge {i}-{j} out of range for {self.d} generators")
            if i > j:
                i, j, flow = j, i, tuple(-e % self.p for e in flow)
            if not any(flow):
                raise ValueError(f"edge {i}-{j} has zero flow")
            if (i, j) in canon:
                raise ValueError(f"duplicate edge {i}-{j}")
            canon[i, j] = flow
        object.__setattr__(self, "edges", tuple((i, j, f) for (i, j), f in sorted(canon.items())))

    def flow(self, i: int, j: int) -> tuple[int, ...]:
        """Exponents of ``[x_i, x_j]``; zero for commuting pairs."""
        if i > j:
            return tuple(-e % self.p for e in self.flow(j, i))
        for a, b, f in self.edges:
            if (a, b) == (i, j):
                return f
        return (0,) * self.r

    def edge_map(self) -> dict[tuple[int, int], tuple[int, ...]]:
        return {(i, j): f for i, j, f in self.edges}

    def renamed(self, name: str) -> FlowDigraph:
        return FlowDigraph(name, self.p, self.r, self.d, self.edges)


def parse(text: str) -> FlowDigraph:
    header: dict[str, object] = {}
    edges: dict[tuple[int, int], tuple[int, ...]] = {}
    p = r = d = 0
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        key = words[0]
        if len(header) < len(_HEADER):
            expected = _HEADER[len(header)]
            if key != expected:
                raise FdgSyntaxError(f"expected '{expected}', found '{key}'", lineno)
            if len(words) != 2:
                raise FdgSyntaxError(f"'{key}' takes exactly one value", lineno)
            value = words[1]
            if key == "group":
                if not _NAME.match(value):
                    raise FdgSyntaxError(f"bad group identifier {value!r}", lineno)
                header[key] = value
                continue
            n = _int(value, lineno)
            if key == "p":
                try:
                    p = check_prime(n)
                except EvenPrimeError as exc:
                    raise FdgEvenPrimeError(str(exc), lineno) from None
                except NotPrimeError as exc:
                    raise FdgNotPrimeError(str(exc), lineno) from None
            elif n < 0:
                raise FdgSyntaxError(f"'{key}' must be non-negative", lineno)
            elif key == "derived":
                r = n
            else:
                d = n
            header[key] = n
            continue
        if key != "edge":
            raise FdgSyntaxError(f"expected 'edge', found '{key}'", lineno)
        if len(words) != 3 + r:
            raise FdgSyntaxError(f"edge needs 2 endpoints and {r} exponents", lineno)
        i, j = _int(words[1], lineno), _int(words[2], lineno)
        flow = tuple(_int(w, lineno) % p for w in words[3:])
        if not (1 <= i <= d and 1 <= j <= d):
            raise IndexOutOfRangeError(f"edge {i} {j} outside generators 1..{d}", lineno)
        if i == j:
            raise IndexOutOfRangeError("an edge needs two distinct endpoints", lineno)
        if i > j:
            i, j, flow = j, i, tuple(-e % p for e in flow)
        if not any(flow):
            raise ZeroFlowError(f"edge {i} {j} has zero flow; omit commuting pairs", lineno)
        if (i, j) in edges:
            raise DuplicateEdgeError(f"second edge between {i} and {j}", lineno)
        edges[i, j] = flow
    if len(header) < len(_HEADER):
        raise FdgSyntaxError(f"missing '{_HEADER[len(header)]}' line", lineno + 1)
    return FlowDigraph(str(header["group"]), p, r, d, tuple((i, j, f) for (i, j), f in edges.items()))


def _int(word: str, lineno: int) -> int:
    try:
        return int(word)
    except ValueError:
        raise FdgSyntaxError(f"expected an integer, found {word!r}", lineno) from None


def emit(g: FlowDigraph) -> str:
    lines = [f"group {g.name}", f"p {g.p}", f"derived {g.r}", f"gens {g.d}"]
    for i, j, flow in g.edges:
        lines.append(" ".join(["edge", str(i), str(j), *map(str, flow)]))
    return "\n".join(lines) + "\n"


def flow_label(flow) -> str:
    """``(1, 2)`` -> ``"z1 z2^2"``; the zero flow renders as ``"1"``."""
    terms = []
    for k, e in enumerate(flow, start=1):
        if e == 0:
            continue
        terms.append(f"z{k}" if e == 1 else f"z{k}^{e}")
    return " ".join(terms) or "1"


def to_dot(g: FlowDigraph) -> str:
    lines = [f'digraph "{g.name}" {{']
    for v in range(1, g.d + 1):
        lines.append(f'  x{v} [label="x{v}"];')
    for i, j, flow in g.edges:
        lines.append(f'  x{i} -> x{j} [label="{flow_label(flow)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
