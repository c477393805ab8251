"""Command-line interface: ``classtwo <command> ...``.

Exit codes: 0 success, 1 a verification failed, 2 usage or input error,
3 a search ran out of budget.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from collections import Counter

import numpy as np

from . import catalog, fdg
from .central import INDECOMPOSABLE, factor_multiset, find_central_decomposition
from .errors import BudgetExceeded, ClassTwoError, UnknownFactorError
from .invariants import center_preimage_profile, frequency_vector, rank_signature, small_centralizer_properties
from .isomorphism import SearchBudget, Verdict, classify_all, is_isomorphic
from .structure import from_digraph, strip_abelian_part, to_digraph
from .verify import FAIL, PASS, UNKNOWN, Item, verify_all

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


def _prime_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of primes: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="classtwo", description="Groups of exponent p and class two as alternating forms.")
    ap.add_argument("--json", action="store_true", help="print a structured report")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="check the catalog tables and the uniqueness argument for A")
    v.add_argument("--p", type=_prime_list, action="extend", default=None, help="primes, e.g. 3,5,7")

    i = sub.add_parser("invariants", help="invariants of a .fdg file")
    i.add_argument("file")

    s = sub.add_parser("iso", help="test two .fdg files for isomorphism")
    s.add_argument("file1")
    s.add_argument("file2")
    s.add_argument("--budget", type=int, default=SearchBudget().max_nodes, help="maximum search nodes")

    c = sub.add_parser("classify", help="orbits of all derived-rank-2 structures")
    c.add_argument("--d", type=int, required=True)
    c.add_argument("--p", type=int, required=True)

    d = sub.add_parser("decompose", help="central decomposition of a .fdg file")
    d.add_argument("file")

    k = sub.add_parser("catalog", help="list or export catalog groups")
    k.add_argument("--name")
    k.add_argument("--p", type=int, default=3)
    k.add_argument("--emit", choices=("fdg", "dot"), default="fdg")
    k.add_argument("--drawn", action="store_true", help="use the drawn digraph (groups A-F) instead of the Scharlau layout")
    return ap


def _read(path: str) -> fdg.FlowDigraph:
    with open(path, encoding="utf-8") as fh:
        return fdg.parse(fh.read())


def _summary(items: list[Item]) -> dict:
    counts = Counter(it.verdict for it in items)
    return {PASS: counts[PASS], FAIL: counts[FAIL], UNKNOWN: counts[UNKNOWN]}


def _exit_code(items: list[Item]) -> int:
    verdicts = {it.verdict for it in items}
    if FAIL in verdicts:
        return EXIT_FAIL
    if UNKNOWN in verdicts:
        return EXIT_BUDGET
    return EXIT_OK


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    return x


# ---------------------------------------------------------------------------
# commands: each returns (items, text lines)


def cmd_verify(args) -> tuple[list[Item], list[str]]:
    primes = args.p or [3, 5, 7]
    items: list[Item] = []
    lines = []
    for p in primes:
        batch = verify_all(p)
        for it in batch:
            it.names = (f"p={p}", *it.names)
        items += batch
        lines.append(f"p = {p}")
        for it in batch:
            lines.append(f"  {it.verdict:7} {it.check:10} {' '.join(it.names[1:]):18} {_short(it.computed)}")
    return items, lines


def _short(x) -> str:
    if isinstance(x, dict):
        return " ".join(f"{k}={v}" for k, v in x.items())
    if isinstance(x, list):
        return "(" + ",".join(map(str, x)) + ")"
    return str(x)


def cmd_invariants(args):
    g = _read(args.file)
    cs = from_digraph(g)
    values: dict = {"d": cs.d, "r": cs.r}
    if cs.r == 2:
        fv = frequency_vector(cs)
        values["frequency"] = list(fv.counts)
        values["abelian_quotients"] = fv.zero
        values["preimage_profile"] = [
            {"line": list(rec.line), "n": rec.n, "abelian": rec.abelian} for rec in center_preimage_profile(cs)
        ]
    values["rank_signature"] = dict(sorted(rank_signature(cs).items()))
    values["is_subspace"], values["is_commuting"] = small_centralizer_properties(cs)
    lines = [f"{g.name}: d = {cs.d}, r = {cs.r}"]
    for key, val in values.items():
        if key == "preimage_profile":
            for rec in val:
                lines.append(f"  line {tuple(rec['line'])}: n = {rec['n']}, abelian preimage = {rec['abelian']}")
        elif key not in ("d", "r"):
            lines.append(f"  {key}: {_short(val)}")
    return [Item("invariants", (g.name,), values, None, PASS)], lines


def cmd_iso(args):
    g1, g2 = _read(args.file1), _read(args.file2)
    if g1.p != g2.p:
        raise ClassTwoError("the two files use different primes")
    (s1, a1), (s2, a2) = strip_abelian_part(from_digraph(g1)), strip_abelian_part(from_digraph(g2))
    names = (g1.name, g2.name)
    if a1 != a2 or (s1.d, s1.r) != (s2.d, s2.r):
        return [Item("iso", names, Verdict.NOT_ISO.value, None, PASS, "shapes differ")], ["not-iso (shapes differ)"]
    res = is_isomorphic(s1, s2, SearchBudget(max_nodes=args.budget))
    computed: dict = {"verdict": res.verdict.value, "nodes": res.nodes}
    lines = [f"{res.verdict.value} ({res.nodes} nodes)"]
    if res.witness is not None:
        computed["S"] = res.witness.S.array.tolist()
        computed["T"] = res.witness.T.array.tolist()
        lines.append("S =")
        lines += ["  " + " ".join(map(str, row)) for row in computed["S"]]
        lines.append("T =")
        lines += ["  " + " ".join(map(str, row)) for row in computed["T"]]
        if a1:
            lines.append(f"(after removing an abelian factor of rank {a1} from each)")
    verdict = UNKNOWN if res.verdict is Verdict.EXHAUSTED else PASS
    return [Item("iso", names, computed, None, verdict)], lines


def cmd_classify(args):
    cl = classify_all(args.d, args.p)
    special = cl.special_orbits
    lines = [f"structures: {cl.total}", f"orbits: {len(cl.orbits)}", f"special orbits: {len(special)}"]
    reps = []
    for n, orb in enumerate(cl.orbits, 1):
        text = fdg.emit(to_digraph(orb.representative, name=f"orbit{n}"))
        reps.append({"size": orb.size, "special": orb.special, "fdg": text})
        lines.append(f"# orbit {n}: size {orb.size}{', special' if orb.special else ''}")
        lines.append(text.rstrip("\n"))
    computed = {"total": cl.total, "orbits": len(cl.orbits), "special_orbits": len(special), "representatives": reps}
    return [Item("classify", (f"d={args.d}", f"p={args.p}"), computed, None, PASS)], lines


def cmd_decompose(args):
    g = _read(args.file)
    special, abelian = strip_abelian_part(from_digraph(g))
    dec = find_central_decomposition(special)
    try:
        names = sorted(factor_multiset(special, decomposition=dec).elements())
    except UnknownFactorError:
        names = None
    dims = None if dec is INDECOMPOSABLE else list(dec.dims)
    computed = {"dims": dims, "factors": names, "abelian_rank": abelian}
    lines = [f"{g.name}: " + ("indecomposable" if dims is None else "parts " + " + ".join(map(str, dims)))]
    lines.append("factors: " + (", ".join(names) if names else "unnamed"))
    if abelian:
        lines.append(f"abelian direct factor of rank {abelian}")
    return [Item("decompose", (g.name,), computed, None, PASS)], lines


def cmd_catalog(args):
    p = args.p
    if args.name:
        name = catalog.canonical_name(args.name)
        g = catalog.drawn_digraph(name, p) if args.drawn else to_digraph(catalog.build(name, p), name=name)
        text = fdg.emit(g) if args.emit == "fdg" else fdg.to_dot(g)
        return [Item("catalog", (name,), text, None, PASS)], [text.rstrip("\n")]
    items, lines = [], [f"{'group':8} {'factors':22} frequencies"]
    for name in catalog.NAMES:
        entry = catalog.CATALOG.get(name)
        factors = "indec." if entry is None or entry.factors is None else " ".join(entry.factors)
        formula = entry.formula_text() if entry else "-"
        lines.append(f"{name:8} {factors:22} {formula}")
        items.append(Item("catalog", (name,), {"factors": factors, "frequency": formula}, None, PASS))
    return items, lines


COMMANDS = {
    "verify": cmd_verify,
    "invariants": cmd_invariants,
    "iso": cmd_iso,
    "classify": cmd_classify,
    "decompose": cmd_decompose,
    "catalog": cmd_catalog,
}


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    start = time.perf_counter()
    try:
        items, lines = COMMANDS[args.command](args)
    except BudgetExceeded as exc:
        items, lines = [Item(args.command, (), None, None, UNKNOWN, str(exc))], [f"budget exceeded: {exc}"]
    except (ClassTwoError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    elapsed = round((time.perf_counter() - start) * 1000, 1)
    if args.json:
        report = {
            "command": " ".join(argv if argv is not None else sys.argv[1:]),
            "items": [_jsonable(it.as_dict()) for it in items],
            "summary": _summary(items),
            "elapsed_ms": elapsed,
        }
        out.write(json.dumps(report, indent=2) + "\n")
    else:
        out.write("\n".join(lines) + "\n")
        if args.command == "verify":
            s = _summary(items)
            out.write(f"{s[PASS]} passed, {s[FAIL]} failed, {s[UNKNOWN]} unknown\n")
    return _exit_code(items)


def main() -> None:
    sys.exit(run())
