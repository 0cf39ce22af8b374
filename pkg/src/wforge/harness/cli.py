"""Command-line entry point: synth, simulate, verify, level, count, plan.

Exit codes: 0 success, 1 check failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from ..circuit import ParseError, count_resources, expand, load, serialize
from ..core import InvalidArgument, WForgeError, get_tol
from ..gates import GateSpec, gate_matrix, hierarchy_level
from ..sim import ImpossibleOutcome, PureState, apply_circuit, fidelity, make_state, post_select_many
from ..synth import plan_postselected_w
from .catalogue import KINDS, build
from .suites import SUITE_NAMES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _state_spec(text: str, reg, default_sparse: bool = True) -> PureState:
    """kind[:params]; basis:1,0,2 | plus[:wire] | resource[:wire] | w_qubit[:N] | w_qudit[:N] | zero."""
    kind, _, arg = text.partition(":")
    params: dict = {}
    if kind == "basis":
        params["digits"] = _ints(arg)
    elif kind in ("plus", "resource") and arg:
        params["wire"] = int(arg)
    elif kind in ("w_qubit", "w_qudit") and arg:
        n = int(arg)
        if not 1 <= n <= len(reg):
            raise UsageError(f"{kind}:{n} needs 1 <= N <= {len(reg)} wires")
        params["wires"] = list(range(n))
    elif kind not in ("zero", "plus", "resource", "w_qubit", "w_qudit"):
        raise UsageError(f"unknown state kind {kind!r}")
    return make_state(kind, reg, sparse=default_sparse, **params)


def _postselect_spec(text: str) -> dict[int, int]:
    out = {}
    for part in text.split(","):
        if not part.strip():
            continue
        w, sep, v = part.partition("=")
        if not sep:
            raise UsageError(f"post-selection entries look like wire=value, got {part!r}")
        out[int(w)] = int(v)
    return out


def _fmt_amp(a: complex) -> str:
    return f"{a.real:+.6f}{a.imag:+.6f}j"


def cmd_synth(args) -> int:
    params = {"d": args.d, "n": args.n, "k": args.k, "p": args.p, "exact": args.exact, "mode": args.mode}
    if args.factors:
        params["factors"] = _ints(args.factors)
    if args.kind == "mixed" and not args.factors:
        raise UsageError("--factors is required for kind 'mixed'")
    if args.kind != "mixed" and args.d is None:
        raise UsageError("--d is required")
    res = build(args.kind, **params)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(serialize(res.circuit if args.macro else res.expanded))
    summary = res.summary()
    summary["spread_gates"] = res.census.get("SPREAD", 0) + res.census.get("WPRIME", 0)
    summary["qudit_spread_gates"] = res.census.get("QSPREAD", 0)
    text = json.dumps(summary, indent=2, sort_keys=True) + "\n"
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    circ = load(args.file)
    state = _state_spec(args.input, circ.register)
    out = apply_circuit(state, expand(circ, lower=False))
    lines = []
    prob = 1.0
    if args.postselect:
        prob, out = post_select_many(out, _postselect_spec(args.postselect))
        lines.append(f"postselect probability: {prob:.12g}")
    items = out.items()
    lines.append(f"support: {len(items)}")
    for cfg, a in items[: args.max_terms]:
        lines.append(f"  {''.join(str(x) if x < 10 else f'[{x}]' for x in cfg)}  {_fmt_amp(a)}")
    if len(items) > args.max_terms:
        lines.append(f"  ... {len(items) - args.max_terms} more")
    status = EXIT_OK
    if args.expect:
        target = _state_spec(args.expect, circ.register)
        f = fidelity(out, target)
        tol = args.tol if args.tol is not None else get_tol()
        lines.append(f"fidelity: {f:.12f}")
        status = EXIT_OK if f >= 1 - tol else EXIT_FAIL
    sys.stdout.write("\n".join(lines) + "\n")
    return status


def cmd_verify(args) -> int:
    rep = run_suite(args.suite)
    sys.stdout.write(rep.to_json() if args.json else rep.to_text())
    return EXIT_OK if rep.passed else EXIT_FAIL


_LEVEL_GATES = {"x": "X", "z": "Z", "s": "S", "h": "H", "cx": "CX", "sqrtz": "SQRTZ", "t2": "T2", "p1": "P1", "uma": "UMA"}


def cmd_level(args) -> int:
    name = _LEVEL_GATES.get(args.gate.lower())
    if name is None:
        raise UsageError(f"unknown gate {args.gate!r}; choose from {sorted(_LEVEL_GATES)}")
    params = {}
    if name == "P1":
        params["k"] = args.k if args.k is not None else 0
    if name == "UMA":
        params["m"], params["a"] = args.m, args.a
    U = gate_matrix(GateSpec.make(name, args.d, **params))
    lvl = hierarchy_level(U, max_level=args.max_level, d=args.d)
    sys.stdout.write(f"{lvl if lvl is not None else f'> {args.max_level}'}\n")
    return EXIT_OK


def cmd_count(args) -> int:
    circ = load(args.file)
    rep = count_resources(expand(circ))
    sys.stdout.write(json.dumps(rep.to_dict(), indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_plan(args) -> int:
    plan = plan_postselected_w(args.N, args.d)
    sys.stdout.write(json.dumps(plan.to_dict(), indent=2) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wforge", description="Qudit W-state synthesis and verification.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="build a construction and write its circuit document")
    p.add_argument("--kind", required=True, choices=sorted(KINDS))
    p.add_argument("--d", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--mode", choices=["subspace", "full"])
    p.add_argument("--factors")
    p.add_argument("--exact", action="store_true")
    p.add_argument("--macro", action="store_true", help="write the macro-level circuit instead of the expansion")
    p.add_argument("--out")
    p.add_argument("--report", help="also write the report to this file")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("simulate", help="run a circuit document on an input state")
    p.add_argument("file")
    p.add_argument("--input", default="zero")
    p.add_argument("--postselect")
    p.add_argument("--expect")
    p.add_argument("--tol", type=float)
    p.add_argument("--max-terms", type=int, default=64)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run a named acceptance suite")
    p.add_argument("--suite", required=True, choices=list(SUITE_NAMES))
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("level", help="Clifford-hierarchy level of a primitive gate")
    p.add_argument("--gate", required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--max-level", type=int, default=8)
    p.set_defaults(func=cmd_level)

    p = sub.add_parser("count", help="resource report of a circuit document")
    p.add_argument("file")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("plan", help="post-selection plan for an N-qubit W state")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_plan)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, InvalidArgument, ParseError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except ImpossibleOutcome as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAIL
    except WForgeError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
