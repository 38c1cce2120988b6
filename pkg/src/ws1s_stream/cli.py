"""Command-line front end.

Exit codes: 0 all steps verdicted, 2 parse or kind error, 3 budget
exceeded, 4 incremental vs from-scratch disagreement.  The environment
variable ``WS1S_STATE_BUDGET`` overrides both the session exploration
cap and the determinization cap.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import TextIO

from . import __version__
from .automata import dump, find_witness
from .bench import BenchConfig, run_bench
from .compiler import MemoCache, TrackRegistry, compile_formula
from .errors import (
    EnumerationBudgetExceeded,
    KindConflict,
    KindError,
    ModeDisagreement,
    ParseError,
    StateBudgetExceeded,
    UnboundVariableError,
    WsError,
)
from .oracle import sat_bounded
from .stream import FROM_SCRATCH, INCREMENTAL, StreamSession
from .syntax import free_vars, parse

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_DISAGREEMENT = 4

_PARSE_ERRORS = (ParseError, KindError, KindConflict, UnboundVariableError)
_BUDGET_ERRORS = (StateBudgetExceeded, EnumerationBudgetExceeded)


def _state_budget() -> int | None:
    raw = os.environ.get("WS1S_STATE_BUDGET")
    return int(raw) if raw else None


def _session() -> StreamSession:
    budget = _state_budget()
    kwargs = {}
    if budget is not None:
        kwargs["state_budget"] = budget
        kwargs["determinize_budget"] = budget
    return StreamSession(**kwargs)


def _compile_once(text: str, no_memo: bool):
    formula = parse(text)
    registry = TrackRegistry()
    for v in free_vars(formula):
        registry.register(v)
    cache = None if no_memo else MemoCache()
    budget = _state_budget()
    kwargs = {} if budget is None else {"determinize_budget": budget}
    return formula, compile_formula(formula, registry, cache, **kwargs), registry


def cmd_check(args) -> int:
    _, dfa, registry = _compile_once(args.formula, no_memo=False)
    witness = find_witness(dfa)
    if witness is None:
        print("unsat")
    else:
        names = [registry.name_of(t.index) for t in dfa.tracks]
        encoded = [dict(zip(names, sym)) for sym in witness]
        print(f"sat witness={json.dumps(encoded, separators=(',', ':'))}")
    return EXIT_OK


def cmd_compile(args) -> int:
    _, dfa, _ = _compile_once(args.formula, no_memo=args.no_memo)
    text = dump(dfa)
    if args.dump_automaton:
        with open(args.dump_automaton, "w") as fh:
            fh.write(text)
    print(f"states={dfa.num_states} tracks={len(dfa.tracks)} "
          f"accepting={len(dfa.accepting)} empty={find_witness(dfa) is None}")
    if not args.dump_automaton:
        sys.stdout.write(text)
    return EXIT_OK


def stream_command(
    lines: TextIO,
    out: TextIO,
    err: TextIO,
    *,
    skip_bad_lines: bool = False,
    log_jsonl: bool = False,
) -> int:
    """One formula per input line, one verdict per output line, flushed live."""
    session = _session()
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text:
            continue
        try:
            formula = parse(text)
        except _PARSE_ERRORS as exc:
            print(f"line {lineno}: {exc}", file=err)
            err.flush()
            if skip_bad_lines:
                continue
            return EXIT_PARSE
        try:
            report = session.push(formula)
        except (KindConflict, KindError) as exc:
            print(f"line {lineno}: {exc}", file=err)
            return EXIT_PARSE
        except _BUDGET_ERRORS as exc:
            print(f"line {lineno}: {exc}", file=err)
            return EXIT_BUDGET
        verdict = report.verdict
        witness = session.witness_maps(verdict)
        if log_jsonl:
            record = {
                "step": report.step,
                "mode": report.mode,
                "verdict": verdict.status,
                "compile_ms": round(report.compile_ns / 1e6, 3),
                "process_ms": round(report.process_ns / 1e6, 3),
                "explored_step": report.states_explored_step,
                "explored_total": report.states_explored_total,
            }
            if witness is not None:
                record["witness"] = witness
            print(json.dumps(record, separators=(",", ":")), file=out)
        else:
            line = f"step={report.step} verdict={verdict.status}"
            if witness is not None:
                line += f" witness={json.dumps(witness, separators=(',', ':'))}"
            print(line, file=out)
        out.flush()
    return EXIT_OK


def cmd_stream(args) -> int:
    if args.input and args.input != "-":
        with open(args.input) as fh:
            return stream_command(fh, sys.stdout, sys.stderr,
                                  skip_bad_lines=args.skip_bad_lines,
                                  log_jsonl=args.log == "jsonl")
    return stream_command(sys.stdin, sys.stdout, sys.stderr,
                          skip_bad_lines=args.skip_bad_lines,
                          log_jsonl=args.log == "jsonl")


def cmd_bench(args) -> int:
    mode_names = {"inc": INCREMENTAL, "scratch": FROM_SCRATCH}
    try:
        modes = tuple(mode_names[m.strip()] for m in args.modes.split(","))
    except KeyError as exc:
        print(f"unknown mode {exc}", file=sys.stderr)
        return EXIT_PARSE
    cfg = BenchConfig(
        family=args.family,
        n_max=args.n,
        modes=modes,
        repetitions=args.reps,
        out_path=args.out,
        state_budget=_state_budget(),
    )
    rows = run_bench(cfg)
    summary = [r for r in rows if r["rep"] == "median"]
    for row in summary:
        print(f"family={row['family']} mode={row['mode']} step={row['step']} "
              f"total_ms={row['cum_total_ms']} explored={row['explored_total']} "
              f"verdict={row['verdict']}")
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    formula = parse(args.formula)
    model = sat_bounded(formula, args.k)
    if model is None:
        print(f"no model with at most {args.k} positions")
    else:
        fo = {name: pos for name, pos in sorted(model.first_order.items())}
        so = {name: sorted(s) for name, s in sorted(model.second_order.items())}
        print(f"sat k={model.length} first_order={fo} second_order={so}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ws1s-stream",
        description="Incremental WS1S satisfiability over streams of conjuncts.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide satisfiability of one formula")
    p.add_argument("formula")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("compile", help="compile one formula to its automaton")
    p.add_argument("formula")
    p.add_argument("--dump-automaton", metavar="PATH")
    p.add_argument("--no-memo", action="store_true")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("stream", help="read conjuncts line by line, emit verdicts")
    p.add_argument("input", nargs="?", default="-", help="input file, '-' for stdin")
    p.add_argument("--skip-bad-lines", action="store_true")
    p.add_argument("--log", choices=["jsonl"], help="emit JSONL session records")
    p.set_defaults(func=cmd_stream)

    p = sub.add_parser("bench", help="benchmark the two evaluation modes")
    p.add_argument("--family", type=int, choices=[1, 2], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--modes", default="inc,scratch")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--out", metavar="CSV", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle", help="brute-force semantics for debugging")
    oracle_sub = p.add_subparsers(dest="oracle_command", required=True)
    pc = oracle_sub.add_parser("check", help="bounded model search")
    pc.add_argument("formula")
    pc.add_argument("--k", type=int, required=True)
    pc.set_defaults(func=cmd_oracle_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _PARSE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except _BUDGET_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ModeDisagreement as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DISAGREEMENT
    except WsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
