"""
Why the guard carries two extra conjuncts
=========================================

Taken exactly as printed, the wave guard lets a Bottom root and a Stable
child with the same sn bit wait for each other forever.  The library's
default adds the conjuncts that break the tie; the printed guard is still
available for comparison.
"""

import numpy as np

from arsim.checker.predicates import in_s1
from arsim.core import STUTTER
from arsim.model import Mode, Topology
from arsim.simulator import Injection, Scenario, run


def stuck_runs(strict, seeds=200, n=4):
    stuck = []
    for seed in range(seeds):
        rng = np.random.default_rng(8000 + seed)
        a = int(rng.integers(10, 100))
        pid = int(rng.integers(n))
        inj = (Injection(a, "failstop", pid), Injection(a + int(rng.integers(1, 50)), "revive", pid))
        sc = Scenario(Topology.random_tree(n, rng), Mode("bounded", n, strict_gd=strict),
                      init="random", seed=seed, injections=inj, authorize="on_s2",
                      max_steps=a + 1400)
        tr = run(sc)
        if tr.records[-1].label == STUTTER and not in_s1(tr.final):
            stuck.append(seed)
    return stuck


# %%
printed = stuck_runs(strict=False)
print("printed guard, runs frozen outside S1:", len(printed))
print("default guard, runs frozen outside S1:", len(stuck_runs(strict=True)))
