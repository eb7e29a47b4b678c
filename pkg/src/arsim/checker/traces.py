"""Property checks over recorded traces.

Every check recomputes predicates from the stored configurations; the
marker flags a trace carries are for display only.
"""

from __future__ import annotations

from ..core import RESTORE_START, STUTTER
from ..simulator import FAULT_KINDS, Trace
from .predicates import in_as_double_prime, in_s1, in_s2, in_t, leader_clause, predicate_fn
from .report import CheckReport


def _any_pending(config) -> bool:
    return any(p.pending_ae for p in config.procs if p.alive)


def _ended_stuck(trace: Trace) -> bool:
    return trace.records[-1].label == STUTTER


def _out_of_budget(trace: Trace, what: str, stats: dict) -> CheckReport:
    if _ended_stuck(trace):
        last = len(trace) - 1
        return CheckReport("fail", {"step": last, "reason": "no move enabled"}, stats,
                           detail=f"execution is stuck before {what}")
    if trace.budget_exhausted:
        return CheckReport("exhausted", None, stats, detail=f"step budget ran out before {what}")
    return CheckReport("fail", {"step": len(trace) - 1, "reason": "run ended"}, stats,
                       detail=f"run ended before {what}")


def last_injection(trace: Trace, kinds=None) -> int:
    """Index of the last applied injection of the given kinds, or -1."""
    idx = trace.injection_indices(kinds)
    return idx[-1] if idx else -1


def phase_start(trace: Trace) -> int:
    """First record after the last fault or auditable event with no undetected event left.

    Authorization is an input the protocol waits for, not a perturbation, so
    it does not move the phase start.
    """
    w = last_injection(trace, FAULT_KINDS) + 1
    while w < len(trace) and _any_pending(trace.records[w].config):
        w += 1
    return w


def first_index(trace: Trace, pred, start: int = 0):
    for i in range(start, len(trace)):
        if pred(trace.records[i].config):
            return i
    return None


def check_convergence(trace: Trace, target="S1") -> CheckReport:
    pred = predicate_fn(target)
    start = last_injection(trace) + 1
    stats = {"steps": len(trace) - 1, "suffix_start": start}
    i = first_index(trace, pred, start)
    if i is not None:
        return CheckReport("pass", {"step": i}, stats, detail=f"{target} holds at step {i}")
    return _out_of_budget(trace, f"reaching {target}", stats)


def check_two_phase(trace: Trace) -> CheckReport:
    """Strict two-phase recovery: S2 at some step m, S1 at a later step n.

    The first S1 state after the phase start must not come before the first
    S2 state; a restore that completes without passing through S2 fails.
    """
    ae = trace.injection_indices(("ae",))
    stats = {"steps": len(trace) - 1, "auditable_events": len(ae)}
    if not ae:
        return CheckReport("pass", None, stats, vacuous=True, detail="no auditable event in trace")
    w = phase_start(trace)
    stats["phase_start"] = w
    m = first_index(trace, in_s2, w)
    n_first = first_index(trace, in_s1, w)
    if n_first is not None and (m is None or n_first < m):
        return CheckReport("fail", {"m": m, "n": n_first}, stats,
                           detail=f"S1 reached at step {n_first} before any S2 state")
    if m is None:
        return _out_of_budget(trace, "reaching S2", stats)
    n = first_index(trace, in_s1, m + 1)
    if n is None:
        return _out_of_budget(trace, "reaching S1 after S2", stats)
    return CheckReport("pass", {"m": m, "n": n}, stats,
                       detail=f"entered S2 at step {m}, entered S1 at step {n}")


def check_notify(trace: Trace) -> CheckReport:
    """From a T state with all counters at x, every alive otsn ends at least x+1.

    Evaluated on the final configuration, which must be in S1 (converged).
    """
    init = trace.records[0].config
    if not in_t(init):
        raise ValueError("notify check needs a trace that starts in T")
    alive = [p for p in init.procs if p.alive]
    x = alive[0].otsn if alive else 0
    stats = {"steps": len(trace) - 1, "x": x}
    if not trace.injection_indices(("ae",)):
        return CheckReport("pass", None, stats, vacuous=True, detail="no auditable event in trace")
    final = trace.final
    if not in_s1(final):
        return _out_of_budget(trace, "converging", stats)
    low = [p.pid for p in final.procs if p.alive and p.otsn < x + 1]
    if low:
        return CheckReport("fail", {"step": len(trace) - 1, "processes": low}, stats,
                           detail=f"otsn below {x + 1} at processes {low}")
    i = first_index(trace, lambda c: all(p.otsn >= x + 1 for p in c.procs if p.alive))
    return CheckReport("pass", {"step": i}, stats, detail=f"every otsn >= {x + 1} from step {i}")


def neighbour_window_ok(config) -> tuple:
    """Neighbouring alive otsn values differ by at most one (modulo)."""
    m = config.mode.modulus
    for a, b in sorted(config.topology.edges):
        pa, pb = config.procs[a], config.procs[b]
        if pa.alive and pb.alive and (pa.otsn - pb.otsn) % m not in (0, 1, m - 1):
            return False, (a, b)
    return True, None


def check_unison(trace: Trace, burn_in: int = 0) -> CheckReport:
    """Bounded-mode unison: the neighbour window, then otsn equal, then otsn = ctsn.

    The window is checked on every configuration whose protocol tick is at
    least ``burn_in``; the two equalities must be reached, in that order,
    after the last injection.
    """
    if not trace.scenario.mode.bounded:
        raise ValueError("unison is a bounded-mode property")
    checked = 0
    for i, r in enumerate(trace.records):
        if r.tick < burn_in:
            continue
        checked += 1
        ok, pair = neighbour_window_ok(r.config)
        if not ok:
            return CheckReport("fail", {"step": i, "pair": list(pair)}, {"sampled": checked},
                               detail=f"neighbours {pair} drift apart at step {i}")
    stats = {"sampled": checked, "steps": len(trace) - 1}
    start = last_injection(trace) + 1

    def otsn_equal(c):
        return len({p.otsn for p in c.procs if p.alive}) <= 1

    def all_equal(c):
        return len({p.otsn for p in c.procs if p.alive} | {p.ctsn for p in c.procs if p.alive}) <= 1

    i = first_index(trace, otsn_equal, start)
    if i is None:
        return _out_of_budget(trace, "otsn values agree", stats)
    j = first_index(trace, all_equal, i)
    if j is None:
        return _out_of_budget(trace, "ctsn values agree", stats)
    return CheckReport("pass", {"otsn_equal": i, "ctsn_equal": j}, stats,
                       detail=f"window held; otsn equal at step {i}, otsn = ctsn at step {j}")


def check_as_window(trace: Trace) -> CheckReport:
    """Every configuration of the trace lies in AS'' (bounded mode)."""
    for i, r in enumerate(trace.records):
        if not in_as_double_prime(r.config):
            return CheckReport("fail", {"step": i}, {"checked": i + 1},
                               detail=f"AS'' fails at step {i}")
    return CheckReport("pass", None, {"checked": len(trace)}, detail="AS'' held at every step")


def check_authorization_gate(trace: Trace) -> CheckReport:
    """A restore wave only starts from a state whose leader clause holds."""
    starts = 0
    for i in range(1, len(trace)):
        r = trace.records[i]
        if r.label in RESTORE_START:
            starts += 1
            if not leader_clause(trace.records[i - 1].config, r.actor):
                return CheckReport("fail", {"step": i, "actor": r.actor}, {"restore_starts": starts},
                                   detail=f"{r.label} at {r.actor} fired before all otsn caught up")
    return CheckReport("pass", None, {"restore_starts": starts},
                       vacuous=starts == 0, detail=f"{starts} restore start(s), all gated")
