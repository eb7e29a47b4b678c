"""Hand enumeration of the one-process bounded system.

Written from the guarded commands directly, without the package's protocol
code.  With a single process there are no neighbours and the process is its
own parent, so most actions can never fire:

* B2, B6 and B12 quantify over neighbours, B6 also needs a non-root;
* B4 and B8 need sn.j != sn.(P.j) with P.j = j;
* B10 needs Gd to fail against itself, which it never does;
* the tree layer is only unhappy when dist != 0.

A state is (status, sn, otsn, ctsn, res, dist, pending, authorized) with
N = 1: counters modulo 2, sn one bit, dist in {0, 1}.
"""

from itertools import product

STATUSES = ("RESTORE", "STABLE", "BOTTOM", "TOP")
M = 2  # N*N + 1 with N = 1


def all_states():
    return set(product(STATUSES, (0, 1), (0, 1), (0, 1), (0, 1), (0, 1), (False, True), (False, True)))


def successors(s):
    st, sn, o, c, res, dist, pend, auth = s
    out = set()
    if pend:  # B1
        out.add((st, sn, (o + 1) % M, c, res, dist, False, auth))
    if st != "BOTTOM" and o != c:  # B3
        out.add(("BOTTOM", sn ^ 1, o, c, 1, dist, pend, auth))
    if st == "BOTTOM":  # B5, leader branch
        if res != 1:
            out.add(("BOTTOM", sn ^ 1, o, c, 1, dist, pend, auth))
        else:
            out.add(("TOP", sn, o, o, res, dist, pend, auth))
    if st == "TOP" and c == o and auth:  # B7
        out.add(("RESTORE", sn ^ 1, o, c, res, dist, pend, False))
    if st == "RESTORE":  # B9, leader branch
        if res != 1:
            out.add(("RESTORE", sn ^ 1, o, c, 1, dist, pend, auth))
        else:
            out.add(("STABLE", sn, o, c, res, dist, pend, auth))
    if dist != 0:  # tree correction with its res reset
        out.add((st, sn, o, c, 0, 0, pend, auth))
    if not pend:  # environment: auditable event
        out.add((st, sn, o, c, res, dist, True, auth))
    if not auth:  # environment: authorize the (only) leader
        out.add((st, sn, o, c, res, dist, pend, True))
    if not out:
        out.add(s)
    return out


def graph():
    nodes = all_states()
    edges = {(s, t) for s in nodes for t in successors(s)}
    return nodes, edges
