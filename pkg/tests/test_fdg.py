import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from classtwo.catalog import build, drawn_digraph
from classtwo.errors import (
    DuplicateEdgeError,
    FdgEvenPrimeError,
    FdgNotPrimeError,
    FdgSyntaxError,
    IndexOutOfRangeError,
    ZeroFlowError,
)
from classtwo.fdg import FlowDigraph, emit, flow_label, parse, to_dot
from classtwo.isomorphism import is_isomorphic
from classtwo.structure import from_digraph, to_digraph

E3_TEXT = "group E3\np 3\nderived 1\ngens 2\nedge 1 2 1\n"


def test_parse_e3():
    g = parse(E3_TEXT)
    assert g == FlowDigraph("E3", 3, 1, 2, ((1, 2, (1,)),))


def test_comments_and_blank_lines():
    g = parse("# header\n\ngroup E3  # name\np 3\nderived 1\ngens 2\n\nedge 1 2 4 # reduced\n")
    assert g.edges == ((1, 2, (1,)),)


def test_reversed_edge_negated():
    g = parse("group G\np 3\nderived 2\ngens 2\nedge 2 1 1 0\n")
    assert g.edges == ((1, 2, (2, 0)),)


def test_group_a_digraph_file():
    text = "group A\np 3\nderived 2\ngens 7\n" + "".join(
        f"edge {i} {j} {a} {b}\n" for i, j, a, b in [(1, 2, 1, 0), (2, 3, 0, 1), (3, 4, 1, 0), (4, 5, 0, 1), (6, 7, 1, 0)]
    )
    g = parse(text)
    assert g == drawn_digraph("A", 3).renamed("A")
    assert is_isomorphic(from_digraph(g), build("A", 3)).is_iso


def test_emit_sorts_edges():
    text = "group G\np 5\nderived 2\ngens 3\nedge 2 3 0 1\nedge 1 2 1 0\n"
    assert emit(parse(text)) == "group G\np 5\nderived 2\ngens 3\nedge 1 2 1 0\nedge 2 3 0 1\n"


def test_emit_f_is_path():
    lines = [ln for ln in emit(to_digraph(build("F", 3), name="F")).splitlines() if ln.startswith("edge")]
    assert len(lines) == 6
    ends = sorted(tuple(map(int, ln.split()[1:3])) for ln in lines)
    degree = {}
    for i, j in ends:
        degree[i] = degree.get(i, 0) + 1
        degree[j] = degree.get(j, 0) + 1
    assert sorted(degree.values()) == [1, 1, 2, 2, 2, 2, 2]


def test_emit_header_only():
    assert emit(FlowDigraph("Z", 3, 2, 4)) == "group Z\np 3\nderived 2\ngens 4\n"


@pytest.mark.parametrize(
    "text,exc,line",
    [
        ("grp E3\np 3\nderived 1\ngens 2\n", FdgSyntaxError, 1),
        ("group E3\np 4\nderived 1\ngens 2\n", FdgNotPrimeError, 2),
        ("group E3\np 2\nderived 1\ngens 2\n", FdgEvenPrimeError, 2),
        ("group E3\np 3\nderived x\ngens 2\n", FdgSyntaxError, 3),
        ("group E3\np 3\nderived 1\n", FdgSyntaxError, 4),
        (E3_TEXT + "edge 1 3 1\n", IndexOutOfRangeError, 6),
        (E3_TEXT + "edge 1 1 1\n", IndexOutOfRangeError, 6),
        (E3_TEXT + "edge 2 1 1\n", DuplicateEdgeError, 6),
        ("group E3\np 3\nderived 1\ngens 2\nedge 1 2 3\n", ZeroFlowError, 5),
        (E3_TEXT + "edge 1 2\n", FdgSyntaxError, 6),
        (E3_TEXT + "vertex 3\n", FdgSyntaxError, 6),
    ],
)
def test_rejections_carry_line_numbers(text, exc, line):
    with pytest.raises(exc) as info:
        parse(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_to_dot():
    dot = to_dot(parse(E3_TEXT))
    assert 'x1 -> x2 [label="z1"]' in dot
    assert "x1 -> x2" in dot and dot.count("->") == 1
    assert to_dot(FlowDigraph("Z", 3, 1, 3)).count("->") == 0
    d = to_dot(drawn_digraph("D", 3))
    assert d.count("->") == 6 and 'label="z1^2"' in d
    assert flow_label((1, 2)) == "z1 z2^2"


@st.composite
def digraphs(draw):
    p = draw(st.sampled_from([3, 5, 7]))
    d = draw(st.integers(0, 7))
    r = draw(st.integers(1, 3))
    pairs = [(i, j) for i in range(1, d + 1) for j in range(i + 1, d + 1)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    edges = []
    for i, j in chosen:
        flow = draw(st.tuples(*[st.integers(0, p - 1)] * r).filter(any))
        if draw(st.booleans()):
            i, j, flow = j, i, tuple(-e % p for e in flow)
        edges.append((i, j, flow))
    return FlowDigraph("g", p, r, d, tuple(edges))


@settings(max_examples=1000, deadline=None)
@given(digraphs())
def test_round_trip(g):
    assert parse(emit(g)) == g
    assert to_digraph(from_digraph(g), name="g") == g


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 2), st.integers(1, 2))
def test_reversal_normalization(i, j, a, b):
    if i == j:
        return
    hdr = "group G\np 3\nderived 2\ngens 6\n"
    assert parse(hdr + f"edge {j} {i} {a} {b}\n") == parse(hdr + f"edge {i} {j} {-a} {-b}\n")
