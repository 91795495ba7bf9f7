"""Vertex colourings and proper directed-edge colourings for the constant-depth schedule.

A directed-edge colouring is proper when no two edges of one colour leave a
common vertex or enter a common vertex. Splitting every vertex into an
in-copy and an out-copy turns this into ordinary edge colouring of a
bipartite graph whose maximum degree is ``delta``.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Sequence

__all__ = [
    "greedy_vertex_coloring",
    "split_graph",
    "split_degree",
    "directed_edge_coloring",
    "bipartite_edge_coloring",
    "misra_gries_edge_coloring",
    "is_proper_vertex_coloring",
    "is_proper_directed_edge_coloring",
]


def _adjacency(nodes: Iterable, edges: Iterable) -> dict:
    adj = {v: set() for v in nodes}
    for e in edges:
        a, b = tuple(e)
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    return adj


def greedy_vertex_coloring(nodes: Iterable, edges: Iterable) -> dict:
    """Smallest free colour per vertex in ascending id order; uses at most max-degree + 1 colours."""
    adj = _adjacency(nodes, edges)
    colour: dict = {}
    for v in sorted(adj):
        used = {colour[u] for u in adj[v] if u in colour}
        c = 1
        while c in used:
            c += 1
        colour[v] = c
    return colour


def is_proper_vertex_coloring(colour: dict, edges: Iterable) -> bool:
    return all(colour[a] != colour[b] for a, b in (tuple(e) for e in edges))


def split_graph(directed_edges: Iterable) -> list[tuple]:
    """Edges ``(("out", a), ("in", b))`` of the doubled graph, one per directed edge."""
    return [(("out", a), ("in", b)) for a, b in directed_edges]


def split_degree(directed_edges: Iterable) -> int:
    """``delta``: the largest in- or out-degree of any vertex."""
    deg: dict = defaultdict(int)
    for u, v in split_graph(directed_edges):
        deg[u] += 1
        deg[v] += 1
    return max(deg.values(), default=0)


def is_proper_directed_edge_coloring(colour: dict, directed_edges: Iterable) -> bool:
    seen = set()
    for a, b in directed_edges:
        c = colour[(a, b)]
        for key in (("out", a, c), ("in", b, c)):
            if key in seen:
                return False
            seen.add(key)
    return True


def bipartite_edge_coloring(edges: Sequence[tuple]) -> dict:
    """Edge colouring of a bipartite simple graph with exactly max-degree colours.

    Each edge takes a colour free at both ends, after swapping an alternating
    two-colour path when necessary.
    """
    delta = 0
    deg: dict = defaultdict(int)
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    delta = max(deg.values(), default=0)
    at: dict = defaultdict(dict)  # vertex -> colour -> neighbour
    colour: dict = {}

    def free(x):
        return next(c for c in range(1, delta + 1) if c not in at[x])

    for u, v in edges:
        alpha = free(u)
        beta = free(v)
        if alpha not in at[v]:
            c = alpha
        else:
            # swap alpha/beta along the path from v; bipartiteness keeps u off it
            path = [v]
            x, want = v, alpha
            while want in at[x]:
                x = at[x][want]
                path.append(x)
                want = beta if want == alpha else alpha
            for i in range(len(path) - 1):
                a, b = path[i], path[i + 1]
                old = alpha if i % 2 == 0 else beta
                del at[a][old]
                del at[b][old]
            for i in range(len(path) - 1):
                a, b = path[i], path[i + 1]
                new = beta if i % 2 == 0 else alpha
                at[a][new] = b
                at[b][new] = a
                colour[_key(a, b, colour)] = new
            c = alpha
        at[u][c] = v
        at[v][c] = u
        colour[(u, v)] = c
    return {e: colour[e] for e in edges}


def _key(a, b, colour):
    return (a, b) if (a, b) in colour else (b, a)


def misra_gries_edge_coloring(edges: Sequence[tuple]) -> dict:
    """Edge colouring of a simple graph with at most max-degree + 1 colours (Misra and Gries)."""
    deg: dict = defaultdict(int)
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    palette = range(1, max(deg.values(), default=0) + 2)
    at: dict = defaultdict(dict)  # vertex -> colour -> neighbour
    colour_of: dict = {}

    def get(a, b):
        return colour_of.get(frozenset((a, b)))

    def set_colour(a, b, c):
        old = get(a, b)
        if old is not None:
            del at[a][old]
            del at[b][old]
        if c is not None:
            at[a][c] = b
            at[b][c] = a
            colour_of[frozenset((a, b))] = c
        else:
            colour_of.pop(frozenset((a, b)), None)

    def free(x):
        return next(c for c in palette if c not in at[x])

    def is_free(x, c):
        return c not in at[x]

    for u, v in edges:
        # maximal fan of u starting at v
        fan = [v]
        in_fan = {v}
        while True:
            last = fan[-1]
            nxt = None
            for c, w in at[u].items():
                if w not in in_fan and is_free(last, c):
                    nxt = w
                    break
            if nxt is None:
                break
            fan.append(nxt)
            in_fan.add(nxt)
        c = free(u)
        d = free(fan[-1])
        # invert the cd-path from u
        if not is_free(u, d):
            path = [u]
            x, want = u, d
            while want in at[x]:
                x = at[x][want]
                path.append(x)
                want = c if want == d else d
            pairs = list(zip(path, path[1:]))
            old = [get(a, b) for a, b in pairs]
            for a, b in pairs:
                set_colour(a, b, None)
            for (a, b), o in zip(pairs, old):
                set_colour(a, b, c if o == d else d)
        # first fan vertex w with d free; rotate the prefix ending there
        k = next(i for i, w in enumerate(fan) if is_free(w, d) and _is_fan(fan[: i + 1], u, get, is_free))
        for i in range(k):
            nc = get(u, fan[i + 1])
            set_colour(u, fan[i + 1], None)
            set_colour(u, fan[i], nc)
        set_colour(u, fan[k], d)
    return {e: colour_of[frozenset(e)] for e in edges}


def _is_fan(prefix, u, get, is_free) -> bool:
    # each edge u-prefix[i+1] must carry a colour that is free at prefix[i]
    for a, b in zip(prefix, prefix[1:]):
        c = get(u, b)
        if c is None or not is_free(a, c):
            return False
    return True


def directed_edge_coloring(directed_edges: Iterable, method: str = "bipartite") -> dict:
    """Proper directed-edge colouring keyed by directed edge, colours from 1.

    ``bipartite`` uses exactly ``delta`` colours (the doubled graph is
    bipartite); ``misra_gries`` is the general ``delta + 1`` construction.
    """
    directed_edges = [tuple(e) for e in directed_edges]
    split = split_graph(directed_edges)
    if method == "bipartite":
        col = bipartite_edge_coloring(split)
    elif method == "misra_gries":
        col = misra_gries_edge_coloring(split)
    else:
        raise ValueError(f"unknown edge colouring method {method!r}")
    out = {(a, b): col[(("out", a), ("in", b))] for a, b in directed_edges}
    if not is_proper_directed_edge_coloring(out, directed_edges):
        raise AssertionError("edge colouring is not proper")
    return out
