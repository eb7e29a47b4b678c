"""
Exhaustive checks on tiny networks
==================================

Simulation samples runs; here we enumerate them.  Each call walks every
reachable state of a two- or three-process line.
"""

from arsim.checker.explore import check_closure, enumerate_states, explore
from arsim.checker.predicates import in_s1
from arsim.model import Mode, Topology

line2, line3 = Topology.line(2), Topology.line(3)
mode2 = Mode("unbounded", 2)

# %%
# T is closed under protocol steps, crashes and the permitted corruption.
print(check_closure(line3, "T", Mode("unbounded", 3), with_faults=True).detail)

# %%
# An auditable event is, by design, a way out of T.
rep = check_closure(line2, "T", mode2, include_ae=True)
print(rep.verdict, rep.witness["step"])

# %%
# From every T state, every fair run reaches S1.
print(explore(line2, mode2, enumerate_states(line2, mode2, "T"), "S1").report.detail)


# %%
# One pending event in T: S2 must come before S1.  With a formed tree this
# holds; with a stale second root the event can be cleared locally.
def settled(c):
    return in_s1(c) and not any(p.pending_ae for p in c.procs if p.alive)


for tree in ("fixpoint", "free"):
    init = [s for s in enumerate_states(line2, mode2, "T", tree=tree, pending=(False, True))
            if sum(p.pending_ae for p in s) == 1]
    res = explore(line2, mode2, init, "S2", forbidden=settled)
    print(tree, res.verdict, res.report.stats["states"], "states")
