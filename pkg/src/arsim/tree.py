"""Silent spanning-tree layer: min-id leader election fused with BFS distances.

Each alive process adopts the smallest leader id offered by itself or an
alive neighbour whose distance still leaves room for one more hop
(``dist + 1 <= N - 1``); the hop bound flushes leader ids that no alive
process actually holds.  Parent ties go to the smallest neighbour id.  A
correction step also resets ``res`` (the AR11/B11 notification).
"""

from __future__ import annotations

from collections import deque

from .core import apply_tree_notification
from .model import Configuration


def tree_target(config: Configuration, pid: int) -> tuple:
    """Locally consistent ``(leader, parent, dist)`` for ``pid``."""
    procs, n = config.procs, config.n
    best_leader, best = pid, None
    for k in config.topology.nbrs[pid]:
        q = procs[k]
        if not q.alive or q.dist + 1 > n - 1:
            continue
        key = (q.leader, q.dist, k)
        if q.leader < best_leader or (q.leader == best_leader and best is not None and key < best):
            best_leader, best = q.leader, key
    if best is None:
        return pid, pid, 0
    return best_leader, best[2], best[1] + 1


def tree_enabled(config: Configuration, pid: int) -> bool:
    p = config.procs[pid]
    if not p.alive:
        return False
    return (p.leader, p.parent, p.dist) != tree_target(config, pid)


def tree_step(config: Configuration, pid: int) -> tuple:
    """Correct ``pid``'s tree variables; returns ``(config, notified)``."""
    if not tree_enabled(config, pid):
        raise ValueError(f"tree layer is already consistent at process {pid}")
    leader, parent, dist = tree_target(config, pid)
    ps = config.procs[pid]._replace(leader=leader, parent=parent, dist=dist)
    procs = list(config.procs)
    procs[pid] = apply_tree_notification(ps)
    return config.with_procs(procs), True


def is_tree_silent(config: Configuration) -> bool:
    return not any(tree_enabled(config, j) for j in range(config.n))


def bfs_tree(topology, alive) -> dict:
    """From-scratch fixpoint: pid -> (leader, parent, dist) over the alive subgraph."""
    alive = set(alive)
    out = {}
    for comp in topology.components(alive):
        root = comp[0]
        dist = {root: 0}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in topology.nbrs[u]:
                if v in alive and v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        for v in comp:
            if v == root:
                out[v] = (root, root, 0)
            else:
                parent = min(u for u in topology.nbrs[v] if u in dist and dist[u] == dist[v] - 1)
                out[v] = (root, parent, dist[v])
    return out


def roots(config: Configuration) -> list:
    return [p.pid for p in config.procs if p.alive and p.parent == p.pid]


def current_leader(config: Configuration):
    """The process an Authorize input is delivered to: the smallest alive root."""
    r = roots(config)
    return r[0] if r else None


def tree_root_of(config: Configuration, pid: int):
    """Follow parent pointers from ``pid`` through alive processes; None on a cycle or break."""
    procs = config.procs
    seen = set()
    j = pid
    while True:
        p = procs[j]
        if not p.alive or j in seen:
            return None
        if p.parent == j:
            return j
        seen.add(j)
        j = p.parent
        if not 0 <= j < config.n:
            return None
