"""Guarded-command semantics of the auditable-restoration protocol.

Two action sets are provided.  Unbounded mode uses AR1..AR11 with plain
integer counters; bounded mode uses B1..B12 with ``otsn``/``ctsn`` in
``[0, N^2]`` (arithmetic modulo ``N^2 + 1``) and a one-bit ``sn``.

Every function here is pure: it reads a :class:`Configuration` and, for
:func:`apply_action`, returns a new one that differs only at the firing
process.  Scheduling, fault injection and the tree layer live elsewhere.

Reading conventions (not spelled out by the guarded commands themselves):

* ``k in Nbr.j`` ranges over alive graph neighbours; ``P.k = j`` over alive
  neighbours whose parent pointer is ``j``.  Leaves therefore satisfy the
  children clauses of AR5/AR9 vacuously.
* A parent that is dead, or is neither ``j`` nor a neighbour of ``j``, is
  unreadable: guards that mention ``P.j`` are false, and ``gd`` is true.
* AR1/B1 consume the latched ``pending_ae`` flag; AR7/B7 consume
  ``authorized``.  AR11/B11 never fire on their own; the tree layer applies
  their effect (``res := 0``) when it corrects a process.
"""

from __future__ import annotations

from .model import Configuration, Mode, ModelError, ProcState, Status

R, S, BOT, TOP = Status.RESTORE, Status.STABLE, Status.BOTTOM, Status.TOP

UNBOUNDED_ACTIONS = tuple(f"AR{i}" for i in range(1, 12))
BOUNDED_ACTIONS = tuple(f"B{i}" for i in range(1, 13))
TREE = "TREE"
STUTTER = "STUTTER"
PRIORITY_ACTIONS = frozenset({"AR2", "AR6", "B2", "B6"})
RESTORE_START = frozenset({"AR7", "B7"})


class ActionError(ValueError):
    """Unknown action, mode mismatch, or an action applied with a false guard."""


def actions_for(mode: Mode) -> tuple:
    return BOUNDED_ACTIONS if mode.bounded else UNBOUNDED_ACTIONS


def wrap_add(a: int, d: int, mode: Mode) -> int:
    if mode.bounded:
        return (a + d) % mode.modulus
    r = a + d
    if r < 0:
        raise ModelError(f"counter would become negative ({a} + {d})")
    return r


def in_window(x: int, base: int, length: int, mode: Mode) -> bool:
    """Is ``x`` in ``[base .. base (+) length]``?  Circular in bounded mode."""
    if not 0 <= length <= mode.n_procs:
        raise ValueError(f"window length {length} outside 0..{mode.n_procs}")
    if mode.bounded:
        return (x - base) % mode.modulus <= length
    return base <= x <= base + length


def _next_sn(sn: int, mode: Mode) -> int:
    return sn ^ 1 if mode.bounded else sn + 1


def _parent(procs, nbrs, j: int):
    """State of j's parent, or None when it cannot be read."""
    me = procs[j]
    p = me.parent
    if p == j:
        return me
    if p in nbrs[j] and procs[p].alive:
        return procs[p]
    return None


def _alive_nbrs(procs, nbrs, j: int):
    return [procs[k] for k in nbrs[j] if procs[k].alive]


def _gd(me: ProcState, par: ProcState, strict: bool) -> bool:
    sp, sj = par.status, me.status
    same = me.sn == par.sn
    if sp == R and sj == R and not same:
        return False
    if sp == S and not (sj == S and same):
        return False
    if sp == BOT and sj == BOT and not same:
        return False
    if sp == TOP and not (sj == TOP and same):
        return False
    if strict and same:
        # A child outside the parent's current wave must carry a different sn,
        # otherwise neither AR4/AR8 nor the printed conjuncts can move it.
        if sp == BOT and sj in (R, S):
            return False
        if sp == R and sj in (BOT, TOP):
            return False
    return True


def gd(config: Configuration, pid: int) -> bool:
    procs = config.procs
    par = _parent(procs, config.topology.nbrs, pid)
    if par is None:
        return True
    return _gd(procs[pid], par, config.mode.strict_gd)


# -- guards -------------------------------------------------------------------
# Each guard takes (procs, nbrs, j, mode) and returns bool.

def _g_ae(procs, nbrs, j, mode):
    return procs[j].pending_ae


def _g_b1(procs, nbrs, j, mode):
    me = procs[j]
    if not me.pending_ae:
        return False
    n, m = mode.n_procs, mode.modulus
    return all((k.otsn - me.otsn) % m <= n for k in _alive_nbrs(procs, nbrs, j))


def _g_ar2(procs, nbrs, j, mode):
    o = procs[j].otsn
    return any(k.otsn > o for k in _alive_nbrs(procs, nbrs, j))


def _g_b2(procs, nbrs, j, mode):
    o = procs[j].otsn
    n, m = mode.n_procs, mode.modulus
    ahead = False
    for k in _alive_nbrs(procs, nbrs, j):
        d = (k.otsn - o) % m
        if d > n:
            return False
        if d >= 1:
            ahead = True
    return ahead


def _g_ar3(procs, nbrs, j, mode):
    me = procs[j]
    return me.parent == j and me.status != BOT and me.otsn > me.ctsn


def _g_b3(procs, nbrs, j, mode):
    me = procs[j]
    return me.parent == j and me.status != BOT and me.otsn != me.ctsn


def _g_4(procs, nbrs, j, mode):
    me = procs[j]
    par = _parent(procs, nbrs, j)
    return (par is not None and par.status == BOT and me.sn != par.sn
            and me.leader == par.leader)


def _children(procs, nbrs, j):
    return [procs[k] for k in nbrs[j] if procs[k].alive and procs[k].parent == j]


def _g_5(procs, nbrs, j, mode):
    me = procs[j]
    if me.status != BOT:
        return False
    for k in _children(procs, nbrs, j):
        if k.otsn != me.otsn or k.status != TOP:
            return False
    for k in _alive_nbrs(procs, nbrs, j):
        if k.sn != me.sn or k.leader != me.leader:
            return False
    return True


def _g_ar6(procs, nbrs, j, mode):
    c = procs[j].ctsn
    return any(k.ctsn > c for k in _alive_nbrs(procs, nbrs, j))


def _g_b6(procs, nbrs, j, mode):
    me = procs[j]
    if me.parent == j:
        return False
    par = _parent(procs, nbrs, j)
    return par is not None and me.ctsn != par.ctsn


def _g_7(procs, nbrs, j, mode):
    me = procs[j]
    return me.parent == j and me.status == TOP and me.ctsn == me.otsn and me.authorized


def _g_8(procs, nbrs, j, mode):
    me = procs[j]
    par = _parent(procs, nbrs, j)
    return (par is not None and par.status == R and me.sn != par.sn
            and me.leader == par.leader and me.otsn == me.ctsn)


def _g_9(procs, nbrs, j, mode):
    me = procs[j]
    if me.status != R:
        return False
    for k in _children(procs, nbrs, j):
        if k.sn != me.sn or k.status != S:
            return False
    for k in _alive_nbrs(procs, nbrs, j):
        if k.sn != me.sn or k.leader != me.leader:
            return False
    return True


def _g_10(procs, nbrs, j, mode):
    par = _parent(procs, nbrs, j)
    return par is not None and not _gd(procs[j], par, mode.strict_gd)


def _g_never(procs, nbrs, j, mode):
    return False


def _g_b12(procs, nbrs, j, mode):
    o = procs[j].otsn
    n, m = mode.n_procs, mode.modulus
    for k in _alive_nbrs(procs, nbrs, j):
        # otsn.j outside [otsn.k (-) N .. otsn.k (+) N]
        near = (o - k.otsn) % m <= n or (k.otsn - o) % m <= n
        if not near and o > k.otsn:
            return True
    return False


# -- statements ---------------------------------------------------------------
# Each statement returns the new ProcState of j.

def _s_ar1(procs, nbrs, j, mode):
    me = procs[j]
    return me._replace(otsn=wrap_add(me.otsn, 1, mode), pending_ae=False)


def _s_ar2(procs, nbrs, j, mode):
    me = procs[j]
    new = max(k.otsn for k in _alive_nbrs(procs, nbrs, j))
    if me.parent == j:
        return me._replace(otsn=new, res=0)
    return me._replace(otsn=new)


def _s_b2(procs, nbrs, j, mode):
    me = procs[j]
    return me._replace(otsn=wrap_add(me.otsn, 1, mode))


def _s_3(procs, nbrs, j, mode):
    me = procs[j]
    return me._replace(status=BOT, sn=_next_sn(me.sn, mode), res=min(me.res + 1, 1))


def _s_ar4(procs, nbrs, j, mode):
    me = procs[j]
    par = procs[me.parent]
    return me._replace(status=BOT, sn=par.sn, res=min(me.res + 1, 1))


def _s_b4(procs, nbrs, j, mode):
    me = procs[j]
    par = procs[me.parent]
    return me._replace(status=BOT, sn=par.sn, res=par.res)


def _min_res(procs, nbrs, j):
    return min([procs[j].res] + [k.res for k in _alive_nbrs(procs, nbrs, j)])


def _s_5(procs, nbrs, j, mode):
    me = procs[j]
    res = _min_res(procs, nbrs, j)
    if me.parent == j:
        if res != 1:
            return me._replace(status=BOT, sn=_next_sn(me.sn, mode), res=min(res + 1, 1))
        return me._replace(status=TOP, res=res, ctsn=me.otsn)
    return me._replace(status=TOP, res=res)


def _s_ar6(procs, nbrs, j, mode):
    me = procs[j]
    return me._replace(ctsn=max(k.ctsn for k in _alive_nbrs(procs, nbrs, j)))


def _s_b6(procs, nbrs, j, mode):
    me = procs[j]
    return me._replace(ctsn=procs[me.parent].ctsn)


def _s_7(procs, nbrs, j, mode):
    me = procs[j]
    return me._replace(status=R, sn=_next_sn(me.sn, mode), authorized=False)


def _s_ar8(procs, nbrs, j, mode):
    me = procs[j]
    par = procs[me.parent]
    return me._replace(status=R, sn=par.sn, res=min(me.res + 1, 1))


def _s_b8(procs, nbrs, j, mode):
    me = procs[j]
    par = procs[me.parent]
    return me._replace(status=R, sn=par.sn, res=par.res)


def _s_9(procs, nbrs, j, mode):
    me = procs[j]
    res = _min_res(procs, nbrs, j)
    if me.parent == j and res != 1:
        return me._replace(status=R, sn=_next_sn(me.sn, mode), res=min(res + 1, 1))
    return me._replace(status=S, res=res)


def _s_10(procs, nbrs, j, mode):
    me = procs[j]
    par = procs[me.parent]
    return me._replace(status=par.status, sn=par.sn)


def _s_11(procs, nbrs, j, mode):
    return procs[j]._replace(res=0)


def _s_b12(procs, nbrs, j, mode):
    return procs[j]._replace(otsn=0)


_UNBOUNDED = {
    "AR1": (_g_ae, _s_ar1),
    "AR2": (_g_ar2, _s_ar2),
    "AR3": (_g_ar3, _s_3),
    "AR4": (_g_4, _s_ar4),
    "AR5": (_g_5, _s_5),
    "AR6": (_g_ar6, _s_ar6),
    "AR7": (_g_7, _s_7),
    "AR8": (_g_8, _s_ar8),
    "AR9": (_g_9, _s_9),
    "AR10": (_g_10, _s_10),
    "AR11": (_g_never, _s_11),
}

_BOUNDED = {
    "B1": (_g_b1, _s_ar1),
    "B2": (_g_b2, _s_b2),
    "B3": (_g_b3, _s_3),
    "B4": (_g_4, _s_b4),
    "B5": (_g_5, _s_5),
    "B6": (_g_b6, _s_b6),
    "B7": (_g_7, _s_7),
    "B8": (_g_8, _s_b8),
    "B9": (_g_9, _s_9),
    "B10": (_g_10, _s_10),
    "B11": (_g_never, _s_11),
    "B12": (_g_b12, _s_b12),
}

_UNBOUNDED_LIST = tuple((a, _UNBOUNDED[a][0]) for a in UNBOUNDED_ACTIONS if a != "AR11")
_BOUNDED_LIST = tuple((a, _BOUNDED[a][0]) for a in BOUNDED_ACTIONS if a != "B11")


def _table(mode: Mode) -> dict:
    return _BOUNDED if mode.bounded else _UNBOUNDED


def _lookup(mode: Mode, action: str):
    try:
        return _table(mode)[action]
    except KeyError:
        raise ActionError(f"action {action!r} is not part of the {mode.kind} protocol") from None


def eval_guard(config: Configuration, pid: int, action: str) -> bool:
    guard, _ = _lookup(config.mode, action)
    procs = config.procs
    if not procs[pid].alive:
        return False
    return guard(procs, config.topology.nbrs, pid, config.mode)


def apply_action(config: Configuration, pid: int, action: str) -> Configuration:
    guard, stmt = _lookup(config.mode, action)
    procs, nbrs, mode = config.procs, config.topology.nbrs, config.mode
    if not procs[pid].alive or not guard(procs, nbrs, pid, mode):
        raise ActionError(f"{action} is not enabled at process {pid}")
    new = list(procs)
    new[pid] = stmt(procs, nbrs, pid, mode)
    return Configuration(config.topology, mode, tuple(new))


def enabled(config: Configuration, pid: int) -> list:
    procs = config.procs
    if not procs[pid].alive:
        return []
    nbrs, mode = config.topology.nbrs, config.mode
    table = _BOUNDED_LIST if mode.bounded else _UNBOUNDED_LIST
    return [a for a, g in table if g(procs, nbrs, pid, mode)]


def completes_restore(config: Configuration, pid: int, action: str) -> bool:
    """Does firing ``action`` at ``pid`` take the leader's "restore is complete" branch?"""
    if action not in ("AR9", "B9"):
        return False
    procs = config.procs
    return procs[pid].parent == pid and _min_res(procs, config.topology.nbrs, pid) == 1


def apply_tree_notification(ps: ProcState) -> ProcState:
    """Effect of AR11/B11 on the corrected process."""
    return ps._replace(res=0)
