"""Max-flow oracle for prefix-bounded transportation feasibility.

Independent of the simplex engine.  Each row agent ``i`` splits her unit of
supply between a node for her prefix cells and a node for the rest; each
column agent likewise collects her unit through a prefix node and a rest
node.  Cell ``(i, g)`` is an arc from the row-side group containing ``g`` to
the column-side group containing ``i``.  Prefix lower bounds become arc lower
bounds, and feasibility of the circulation is decided by the standard
super-source/super-sink reduction.  Everything is scaled to integers.
"""

from __future__ import annotations

import math
from collections import deque

from .problem import COL, ROW, FeasibilityProblem


class _Arc:
    __slots__ = ("to", "cap", "rev", "lower", "orig_cap")

    def __init__(self, to, cap, rev, lower=0):
        self.to = to
        self.cap = cap
        self.rev = rev
        self.lower = lower
        self.orig_cap = cap


class FlowNetwork:
    def __init__(self):
        self.adj: dict = {}

    def _node(self, v):
        if v not in self.adj:
            self.adj[v] = []
        return self.adj[v]

    def add_arc(self, u, v, cap, lower=0) -> _Arc:
        a = _Arc(v, cap, None, lower)
        b = _Arc(u, 0, a)
        a.rev = b
        self._node(u).append(a)
        self._node(v).append(b)
        return a

    def max_flow(self, s, t) -> int:
        """Edmonds-Karp on residual capacities."""
        total = 0
        while True:
            parent = {s: None}
            q = deque([s])
            while q and t not in parent:
                u = q.popleft()
                for a in self.adj[u]:
                    if a.cap > 0 and a.to not in parent:
                        parent[a.to] = a
                        q.append(a.to)
            if t not in parent:
                return total
            push = None
            v = t
            while parent[v] is not None:
                a = parent[v]
                push = a.cap if push is None else min(push, a.cap)
                v = a.rev.to
            v = t
            while parent[v] is not None:
                a = parent[v]
                a.cap -= push
                a.rev.cap += push
                v = a.rev.to
            total += push


def flow_feasible(problem: FeasibilityProblem) -> bool:
    """Decide ``problem`` by circulation with lower bounds.

    Only prefix bounds are supported (``problem.extra`` must be empty).
    Strict (``h == 1``) bounds need positive flow on the prefix arc: after a
    feasible circulation is found, that is possible iff the arc already
    carries flow or closes a residual cycle.
    """
    if problem.extra:
        raise ValueError("flow oracle handles prefix bounds only")
    n = problem.n
    den = 1
    for b in problem.bounds:
        den = den * b.bound.denominator // math.gcd(den, b.bound.denominator)
    unit = den

    row_prefix = {i: frozenset(range(n)) for i in range(n)}
    col_prefix = {j: frozenset(range(n)) for j in range(n)}
    row_lower = {i: 0 for i in range(n)}
    col_lower = {j: 0 for j in range(n)}
    strict_keys = []
    for b in problem.bounds:
        lower = 0 if b.strict else int(b.bound * unit)
        if b.side == ROW:
            row_prefix[b.agent], row_lower[b.agent] = b.options, lower
        else:
            col_prefix[b.agent], col_lower[b.agent] = b.options, lower
        if b.strict:
            strict_keys.append((b.side, b.agent))

    # arcs as (u, v, lower, cap); "S"/"T" are the source and sink
    arcs = []
    for i in range(n):
        arcs.append(("S", ("r", i), unit, unit))
        arcs.append((("r", i), ("rA", i), row_lower[i], unit))
        arcs.append((("r", i), ("rB", i), 0, unit))
    for j in range(n):
        arcs.append((("cA", j), ("c", j), col_lower[j], unit))
        arcs.append((("cB", j), ("c", j), 0, unit))
        arcs.append((("c", j), "T", unit, unit))
    for i in range(n):
        for j in range(n):
            u = ("rA", i) if j in row_prefix[i] else ("rB", i)
            v = ("cA", j) if i in col_prefix[j] else ("cB", j)
            arcs.append((u, v, 0, unit))
    arcs.append(("T", "S", 0, n * unit))

    net = FlowNetwork()
    excess: dict = {}
    handles = {}
    for u, v, lo, cap in arcs:
        if lo > cap:
            return False
        a = net.add_arc(u, v, cap - lo, lo)
        excess[v] = excess.get(v, 0) + lo
        excess[u] = excess.get(u, 0) - lo
        if u[0:1] == ("r",) and v[0] == "rA":
            handles[(ROW, u[1])] = (a, u, v)
        if u[0:1] == ("cA",) and v[0] == "c":
            handles[(COL, v[1])] = (a, u, v)
    need = 0
    for v, e in sorted(excess.items(), key=repr):
        if e > 0:
            net.add_arc("SS", v, e)
            need += e
        elif e < 0:
            net.add_arc(v, "TT", -e)
    net._node("SS")
    net._node("TT")
    if net.max_flow("SS", "TT") != need:
        return False

    for key in strict_keys:
        arc, u, v = handles[key]
        carried = arc.orig_cap - arc.cap  # flow above the (zero) lower bound
        if carried > 0:
            continue
        # a residual v -> u path closes a positive cycle through the arc;
        # super source/sink arcs are saturated or irrelevant to the circulation
        if not _residual_path(net, v, u, exclude={"SS", "TT"}):
            return False
    return True


def _residual_path(net: FlowNetwork, s, t, exclude) -> bool:
    seen = {s}
    q = deque([s])
    while q:
        u = q.popleft()
        if u == t:
            return True
        for a in net.adj[u]:
            if a.cap <= 0 or a.to in seen or a.to in exclude:
                continue
            seen.add(a.to)
            q.append(a.to)
    return False
