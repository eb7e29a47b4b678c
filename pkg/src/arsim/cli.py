"""Command-line front end: ``arsim run | check | explore``.

Exit status is 0 when a check passes, 1 when it fails or runs out of budget,
and 2 for usage, validation or state-bound errors.  ``AR_SIM_SEED``, when
set, overrides the scenario's seed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import io
from .checker import traces
from .checker.explore import (ENV_EVENTS, check_closure, enumerate_states, explore)
from .checker.predicates import Pred, in_s1
from .checker.report import StateBoundExceeded
from .model import Configuration
from .simulator import init_config, inject, run

PROPERTIES = ("s1-convergence", "two-phase", "closure-T", "notify-lemma", "unison", "as-window")
SEED_ENV = "AR_SIM_SEED"


class UsageError(Exception):
    pass


def load_scenario(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read scenario: {e}") from None
    try:
        sc = io.parse_scenario(text)
    except io.ScenarioError as e:
        raise UsageError(f"{path}: {e}") from None
    override = os.environ.get(SEED_ENV)
    if override:
        try:
            seed = int(override, 0)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {override!r}") from None
        if not 0 <= seed < 2 ** 64:
            raise UsageError(f"{SEED_ENV} must fit in 64 unsigned bits")
        sc = dataclasses.replace(sc, seed=seed)
    return sc


def _emit(text: str, path=None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_doc(prop: str, report, scenario) -> dict:
    doc = report.to_dict()
    doc["property"] = prop
    doc["seed"] = scenario.seed
    return doc


def _emit_report(doc: dict, fmt: str) -> int:
    if fmt == "json":
        _emit(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    else:
        _emit(io.render_report_text(doc))
    return 0 if doc["verdict"] == "pass" else 1


def command_run(args) -> int:
    sc = load_scenario(args.scenario)
    doc = io.trace_to_dict(run(sc))
    if args.trace_out:
        _emit(json.dumps(doc, sort_keys=True, indent=1) + "\n", args.trace_out)
    if args.format == "json":
        _emit(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    else:
        _emit(io.render_trace_text(doc))
    return 0


def command_check(args) -> int:
    sc = load_scenario(args.scenario)
    prop = args.property
    if prop == "closure-T":
        report = check_closure(sc.topology, Pred.T, sc.mode, with_faults=True,
                               max_states=args.max_states)
    else:
        trace = run(sc)
        if prop == "s1-convergence":
            report = traces.check_convergence(trace, Pred.S1)
        elif prop == "two-phase":
            report = traces.check_two_phase(trace)
        elif prop == "notify-lemma":
            report = traces.check_notify(trace)
        elif prop == "unison":
            report = traces.check_unison(trace, burn_in=args.burn_in)
        else:
            report = traces.check_as_window(trace)
    return _emit_report(_report_doc(prop, report, sc), args.format)


def _explore_init(sc, kind: str, tree: str, max_states: int) -> list:
    if kind == "scenario":
        rng = np.random.default_rng(sc.seed)
        config = init_config(sc, rng)
        for ev in sc.injections:
            if ev.at_step == 0:
                config, _ = inject(config, ev, rng)
        return [config]
    if kind in ("all", "AS"):
        return enumerate_states(sc.topology, sc.mode, None if kind == "all" else Pred.AS,
                                tree=tree, pending=(False, True), max_states=max_states)
    pending = (False, True) if kind == "T+ae" else (False,)
    states = enumerate_states(sc.topology, sc.mode, Pred.T, tree=tree, pending=pending,
                              max_states=max_states)
    if kind == "T+ae":
        states = [s for s in states if sum(p.pending_ae for p in s) == 1]
    return states


def _settled_s1(config: Configuration) -> bool:
    return in_s1(config) and not any(p.pending_ae for p in config.procs if p.alive)


def command_explore(args) -> int:
    sc = load_scenario(args.scenario)
    init = _explore_init(sc, args.init, args.tree, args.max_states)
    target = Pred.parse(args.target)
    # S2 is only meaningful as "S2 before S1": reaching S1 first is a failure
    forbidden = _settled_s1 if target == Pred.S2 else None
    result = explore(sc.topology, sc.mode, init, target, forbidden=forbidden,
                     env=tuple(args.env), max_states=args.max_states)
    doc = _report_doc(f"explore-{target.value}", result.report, sc)
    doc["init"] = args.init
    return _emit_report(doc, args.format)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="arsim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="simulate a scenario and print its trace")
    r.add_argument("--scenario", required=True)
    r.add_argument("--trace-out", help="also write the JSON trace to this file")
    r.add_argument("--format", choices=("json", "text"), default="text")
    r.set_defaults(func=command_run)

    c = sub.add_parser("check", help="check one property on a scenario")
    c.add_argument("--scenario", required=True)
    c.add_argument("--property", required=True, choices=PROPERTIES)
    c.add_argument("--burn-in", type=int, default=0, help="protocol steps skipped by the unison check")
    c.add_argument("--max-states", type=int, default=2_000_000)
    c.add_argument("--format", choices=("json", "text"), default="text")
    c.set_defaults(func=command_check)

    e = sub.add_parser("explore", help="exhaustively explore a small instance")
    e.add_argument("--scenario", required=True)
    e.add_argument("--target", required=True, choices=("S1", "S2"))
    e.add_argument("--max-states", type=int, default=2_000_000)
    e.add_argument("--init", choices=("scenario", "T", "T+ae", "AS", "all"), default="scenario")
    e.add_argument("--tree", choices=("free", "fixpoint"), default="fixpoint")
    e.add_argument("--env", nargs="*", choices=ENV_EVENTS, default=["authorize_on_s2"])
    e.add_argument("--format", choices=("json", "text"), default="text")
    e.set_defaults(func=command_explore)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "max_states", 1) <= 0:
            raise UsageError("--max-states must be positive")
        return args.func(args)
    except UsageError as e:
        print(f"arsim: error: {e}", file=sys.stderr)
        return 2
    except StateBoundExceeded as e:
        print(f"arsim: refused: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"arsim: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
