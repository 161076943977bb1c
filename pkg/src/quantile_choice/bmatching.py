"""Maximum-weight bipartite b-matching by successive shortest paths."""

from __future__ import annotations

from typing import Sequence


def max_weight_bmatching(weights: Sequence[Sequence[int]], b: int) -> set[tuple[int, int]]:
    """Edges ``(i, j)`` of a maximum-weight b-matching of a complete bipartite graph.

    Every vertex has degree at most ``b`` and each edge is used at most once.
    Weights are nonnegative integers; zero-weight edges are never selected.
    Min-cost flow with costs ``-w``: augment along cheapest paths while they
    have negative cost.
    """
    n = len(weights)
    if b < 1:
        raise ValueError("b must be at least 1")
    src, snk = 2 * n, 2 * n + 1
    size = 2 * n + 2
    # arc: [to, cap, cost, index of reverse arc]
    graph: list[list[list[int]]] = [[] for _ in range(size)]

    def arc(u, v, cap, cost):
        graph[u].append([v, cap, cost, len(graph[v])])
        graph[v].append([u, 0, -cost, len(graph[u]) - 1])

    for i in range(n):
        arc(src, i, b, 0)
        arc(n + i, snk, b, 0)
    for i in range(n):
        for j in range(n):
            w = weights[i][j]
            if w < 0:
                raise ValueError("weights must be nonnegative")
            if w > 0:
                arc(i, n + j, 1, -w)

    while True:
        dist = [None] * size
        prev: list = [None] * size
        dist[src] = 0
        for _ in range(size - 1):
            changed = False
            for u in range(size):
                if dist[u] is None:
                    continue
                for k, (v, cap, cost, _) in enumerate(graph[u]):
                    if cap > 0 and (dist[v] is None or dist[u] + cost < dist[v]):
                        dist[v] = dist[u] + cost
                        prev[v] = (u, k)
                        changed = True
            if not changed:
                break
        if dist[snk] is None or dist[snk] >= 0:
            break
        v = snk
        while v != src:
            u, k = prev[v]
            e = graph[u][k]
            e[1] -= 1
            graph[v][e[3]][1] += 1
            v = u

    chosen = set()
    for i in range(n):
        for v, cap, cost, _ in graph[i]:
            if n <= v < 2 * n and cost < 0 and cap == 0:
                chosen.add((i, v - n))
    return chosen
