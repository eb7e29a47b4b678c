"""JSON scenarios, traces and reports, plus the text views derived from them.

Trace documents keep a full snapshot of the process states every
``SNAPSHOT_EVERY`` records and per-process field deltas in between.  A
snapshot record after the first also carries its delta, so a reader can
confirm that replaying deltas reproduces each stored snapshot.
"""

from __future__ import annotations

import json

from .model import (BOOL_FIELDS, INT_FIELDS, Configuration, Mode, ModelError, ProcState,
                    Status, Topology)
from .simulator import (INJECTION_KINDS, Injection, InjectionError, Scenario, StepRecord,
                        Trace, check_injection)

TRACE_FORMAT = "arsim-trace"
TRACE_VERSION = 1
SNAPSHOT_EVERY = 64

SCENARIO_KEYS = {"topology", "mode", "init", "injections", "scheduler", "seed", "max_steps",
                 "stop", "authorize", "gd", "n", "edges"}
REQUIRED_KEYS = {"topology", "mode", "init", "seed", "max_steps"}
INJECTION_KEYS = {"step", "kind", "pid", "field", "value"}
PROC_KEYS = {"pid", "parent", "leader", "dist", "status", "sn", "otsn", "ctsn", "res",
             "alive", "pending_ae", "authorized"}


class ScenarioError(ValueError):
    """A scenario document that fails schema or domain validation."""


class TraceFormatError(ValueError):
    """A trace document that is malformed or does not replay."""


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{where}: expected an integer, got {value!r}")
    return value


def _unknown(obj: dict, allowed: set, where: str) -> None:
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ScenarioError(f"{where}: unknown key(s) {', '.join(map(repr, extra))}")


# -- process states -----------------------------------------------------------

def proc_to_dict(p: ProcState) -> dict:
    d = {f: int(getattr(p, f)) for f in INT_FIELDS}
    d.update({f: bool(getattr(p, f)) for f in BOOL_FIELDS})
    d["pid"] = p.pid
    d["status"] = p.status.name
    return d


def proc_from_dict(d: dict, pid: int, where: str = "process") -> ProcState:
    if not isinstance(d, dict):
        raise ScenarioError(f"{where}: expected an object")
    _unknown(d, PROC_KEYS, where)
    missing = sorted((PROC_KEYS - set(BOOL_FIELDS) - {"pid"}) - set(d))
    if missing:
        raise ScenarioError(f"{where}: missing key(s) {', '.join(missing)}")
    if "pid" in d and d["pid"] != pid:
        raise ScenarioError(f"{where}: pid {d['pid']} at position {pid}")
    try:
        status = Status.parse(d["status"])
    except ValueError as e:
        raise ScenarioError(f"{where}.status: {e}") from None
    ints = {f: _int(d[f], f"{where}.{f}") for f in INT_FIELDS}
    flags = {}
    for f in BOOL_FIELDS:
        v = d.get(f, f == "alive")
        if not isinstance(v, bool):
            raise ScenarioError(f"{where}.{f}: expected true or false")
        flags[f] = v
    return ProcState(pid=pid, status=status, **ints, **flags)


# -- scenarios ----------------------------------------------------------------

def scenario_to_dict(sc: Scenario) -> dict:
    d = {
        "topology": {"n": sc.topology.n, "edges": [list(e) for e in sorted(sc.topology.edges)]},
        "mode": sc.mode.kind,
        "gd": "strict" if sc.mode.strict_gd else "printed",
        "init": sc.init if isinstance(sc.init, str) else {"explicit": [proc_to_dict(p) for p in sc.init]},
        "injections": [_injection_to_dict(i) for i in sc.injections],
        "scheduler": sc.scheduler,
        "seed": sc.seed,
        "max_steps": sc.max_steps,
        "stop": sc.stop,
        "authorize": sc.authorize,
    }
    return d


def _injection_to_dict(i: Injection) -> dict:
    d = {"step": i.at_step, "kind": i.kind}
    for k in ("pid", "field", "value"):
        v = getattr(i, k)
        if v is not None:
            d[k] = v
    return d


def scenario_from_dict(doc) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario: expected a JSON object")
    _unknown(doc, SCENARIO_KEYS, "scenario")
    if "n" in doc or "edges" in doc:
        # flat shorthand: n and edges at the top level
        if "topology" in doc:
            raise ScenarioError("scenario: give either topology or top-level n/edges, not both")
        doc = dict(doc)
        doc["topology"] = {"n": doc.pop("n", None), "edges": doc.pop("edges", [])}
    missing = sorted(REQUIRED_KEYS - set(doc))
    if missing:
        raise ScenarioError(f"scenario: missing key(s) {', '.join(missing)}")
    topo = doc["topology"]
    if not isinstance(topo, dict):
        raise ScenarioError("topology: expected an object with n and edges")
    _unknown(topo, {"n", "edges"}, "topology")
    n = _int(topo.get("n"), "topology.n")
    edges = topo.get("edges", [])
    if not isinstance(edges, list) or not all(isinstance(e, list) and len(e) == 2 for e in edges):
        raise ScenarioError("topology.edges: expected a list of [a, b] pairs")
    try:
        topology = Topology(n, frozenset(tuple(_int(x, "topology.edges") for x in e) for e in edges))
    except ModelError as e:
        raise ScenarioError(f"topology: {e}") from None
    if doc["mode"] not in ("unbounded", "bounded"):
        raise ScenarioError(f"mode: expected 'unbounded' or 'bounded', got {doc['mode']!r}")
    gd = doc.get("gd", "strict")
    if gd not in ("strict", "printed"):
        raise ScenarioError(f"gd: expected 'strict' or 'printed', got {gd!r}")
    mode = Mode(doc["mode"], n, strict_gd=gd == "strict")
    init = doc["init"]
    if isinstance(init, dict):
        _unknown(init, {"explicit"}, "init")
        procs = init.get("explicit")
        if not isinstance(procs, list):
            raise ScenarioError("init.explicit: expected a list of process states")
        if len(procs) != n:
            raise ScenarioError(f"init.explicit: {len(procs)} processes for a topology of {n}")
        init = tuple(proc_from_dict(p, i, f"init.explicit[{i}]") for i, p in enumerate(procs))
    elif init not in ("legitimate", "random", "t_random"):
        raise ScenarioError(f"init: expected 'legitimate', 'random', 't_random' or "
                            f"{{'explicit': [...]}}, got {init!r}")
    injections = []
    raw = doc.get("injections", [])
    if not isinstance(raw, list):
        raise ScenarioError("injections: expected a list")
    for k, ev in enumerate(raw):
        where = f"injections[{k}]"
        if not isinstance(ev, dict):
            raise ScenarioError(f"{where}: expected an object")
        _unknown(ev, INJECTION_KEYS, where)
        if ev.get("kind") not in INJECTION_KINDS:
            raise ScenarioError(f"{where}.kind: expected one of {', '.join(INJECTION_KINDS)}")
        try:
            inj = Injection(
                _int(ev.get("step"), f"{where}.step"), ev["kind"],
                None if ev.get("pid") is None else _int(ev["pid"], f"{where}.pid"),
                ev.get("field"),
                None if ev.get("value") is None else _int(ev["value"], f"{where}.value"))
            check_injection(inj, mode, n)
            injections.append(inj)
        except InjectionError as e:
            raise ScenarioError(f"{where}: {e}") from None
    seed = _int(doc["seed"], "seed")
    if not 0 <= seed < 2 ** 64:
        raise ScenarioError("seed: expected an unsigned 64-bit integer")
    try:
        return Scenario(topology, mode, init, tuple(injections),
                        scheduler=doc.get("scheduler", "uniform"), seed=seed,
                        max_steps=_int(doc["max_steps"], "max_steps"),
                        stop=doc.get("stop", "none"), authorize=doc.get("authorize", "scheduled"))
    except InjectionError as e:
        raise ScenarioError(f"injections: {e}") from None
    except ModelError as e:
        raise ScenarioError(f"init.explicit: {e}") from None
    except ValueError as e:
        raise ScenarioError(f"scenario: {e}") from None


def parse_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    return scenario_from_dict(doc)


# -- traces -------------------------------------------------------------------

def _delta(before: tuple, after: tuple) -> dict:
    out = {}
    for p, q in zip(before, after):
        if p != q:
            a, b = proc_to_dict(p), proc_to_dict(q)
            out[str(q.pid)] = {k: v for k, v in b.items() if a[k] != v}
    return out


def trace_to_dict(trace: Trace) -> dict:
    records = []
    prev = None
    for i, r in enumerate(trace.records):
        d = {"step": r.step, "tick": r.tick, "actor": r.actor, "label": r.label,
             "restore_complete": r.restore_complete, "entered_s1": r.entered_s1,
             "entered_s2": r.entered_s2}
        if r.detail:
            d["detail"] = r.detail
        procs = r.config.procs
        if prev is not None:
            d["delta"] = _delta(prev, procs)
        if i % SNAPSHOT_EVERY == 0:
            d["snapshot"] = [proc_to_dict(p) for p in procs]
        records.append(d)
        prev = procs
    return {"format": TRACE_FORMAT, "version": TRACE_VERSION, "snapshot_every": SNAPSHOT_EVERY,
            "scenario": scenario_to_dict(trace.scenario), "records": records}


def dump_trace(trace: Trace) -> str:
    return json.dumps(trace_to_dict(trace), sort_keys=True, indent=1) + "\n"


def _apply_delta(procs: tuple, delta: dict, where: str) -> tuple:
    out = list(procs)
    for key, fields in delta.items():
        pid = int(key)
        if not 0 <= pid < len(out):
            raise TraceFormatError(f"{where}: delta names process {pid}")
        d = proc_to_dict(out[pid])
        unknown = set(fields) - set(d)
        if unknown:
            raise TraceFormatError(f"{where}: unknown field(s) {sorted(unknown)}")
        d.update(fields)
        out[pid] = proc_from_dict(d, pid, where)
    return tuple(out)


def trace_from_dict(doc: dict) -> Trace:
    if doc.get("format") != TRACE_FORMAT or doc.get("version") != TRACE_VERSION:
        raise TraceFormatError("not an arsim trace document of a supported version")
    scenario = scenario_from_dict(doc["scenario"])
    topo, mode = scenario.topology, scenario.mode
    records = []
    procs = None
    last_step = -1
    for i, d in enumerate(doc["records"]):
        where = f"records[{i}]"
        if d["step"] <= last_step:
            raise TraceFormatError(f"{where}: step indices must increase")
        last_step = d["step"]
        if procs is not None and "delta" in d:
            procs = _apply_delta(procs, d["delta"], where)
        if "snapshot" in d:
            snap = tuple(proc_from_dict(p, k, f"{where}.snapshot[{k}]") for k, p in enumerate(d["snapshot"]))
            if procs is not None and snap != procs:
                raise TraceFormatError(f"{where}: replayed deltas disagree with the snapshot")
            procs = snap
        if procs is None:
            raise TraceFormatError("first record carries no snapshot")
        records.append(StepRecord(d["step"], d["tick"], d["actor"], d["label"],
                                  Configuration(topo, mode, procs), d.get("detail", {}),
                                  d["restore_complete"], d["entered_s1"], d["entered_s2"]))
    return Trace(scenario, records)


def parse_trace(text: str) -> Trace:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise TraceFormatError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    return trace_from_dict(doc)


# -- text views ---------------------------------------------------------------

def _fmt_proc(pid, fields: dict) -> str:
    parts = [f"{k}={v}" for k, v in sorted(fields.items())]
    return f"p{pid}(" + " ".join(parts) + ")"


def render_trace_text(doc: dict) -> str:
    """Human-readable step log of a trace document."""
    lines = []
    sc = doc["scenario"]
    lines.append(f"# {sc['mode']} mode, {sc['topology']['n']} processes, seed {sc['seed']}")
    entered = {}
    for r in doc["records"]:
        who = "env" if r["actor"] is None else f"p{r['actor']}"
        marks = []
        if r["entered_s2"]:
            marks.append("entered S2")
            entered.setdefault("S2", []).append(r["step"])
        if r["entered_s1"]:
            marks.append("entered S1")
            entered.setdefault("S1", []).append(r["step"])
        if r["restore_complete"]:
            marks.append("restore complete")
        line = f"{r['step']:>6} t={r['tick']:<6} {who:<4} {r['label']:<10}"
        if "delta" in r and r["delta"]:
            line += " " + " ".join(_fmt_proc(k, v) for k, v in sorted(r["delta"].items(), key=lambda kv: int(kv[0])))
        if r.get("detail"):
            line += " " + json.dumps(r["detail"], sort_keys=True)
        if marks:
            line += "  [" + ", ".join(marks) + "]"
        lines.append(line)
    for name in ("S2", "S1"):
        if name in entered:
            steps = ", ".join(map(str, entered[name]))
            lines.append(f"# entered {name} at step(s) {steps}")
    return "\n".join(lines) + "\n"


def render_report_text(doc: dict) -> str:
    lines = [f"{doc.get('property', 'check')}: {doc['verdict'].upper()}"
             + (" (vacuous)" if doc.get("vacuous") else "")]
    if doc.get("detail"):
        lines.append(f"  {doc['detail']}")
    w = doc.get("witness")
    if w:
        shown = {k: v for k, v in w.items() if k not in ("path", "state", "successor")}
        if shown:
            lines.append("  witness: " + json.dumps(shown, sort_keys=True))
        if "path" in w:
            lines.append(f"  counterexample path of {len(w['path'])} states")
    for k, v in sorted(doc.get("stats", {}).items()):
        lines.append(f"  {k}: {v}")
    return "\n".join(lines) + "\n"
