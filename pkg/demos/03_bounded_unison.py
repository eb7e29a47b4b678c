"""
Bounded counters under a stream of events
=========================================

With counters taken modulo N*N+1, neighbours may never drift more than one
step apart.  We hammer a seven-process line with an event every five steps
and track the largest circular gap between neighbours.
"""

import numpy as np

from arsim.checker.traces import check_unison
from arsim.model import Mode, Topology
from arsim.simulator import Injection, Scenario, run

n = 7
rng = np.random.default_rng(6)
events = tuple(Injection(s, "ae", int(rng.integers(n))) for s in range(0, 5000, 5))
sc = Scenario(Topology.line(n), Mode("bounded", n), injections=events, seed=6,
              authorize="on_s2", stop="s1_quiescent", max_steps=20000)
trace = run(sc)

# %%
m = sc.mode.modulus
otsn = np.array([[p.otsn for p in c.procs] for c in trace.configs()])
diff = (otsn[:, 1:] - otsn[:, :-1]) % m
gap = np.minimum(diff, m - diff).max(axis=1)
ticks = np.array([r.tick for r in trace.records])
print("modulus", m)
print("largest neighbour gap before tick 1000:", gap[ticks < 1000].max())
print("largest neighbour gap after tick 1000: ", gap[ticks >= 1000].max())

# %%
print(check_unison(trace, burn_in=1000).detail)
