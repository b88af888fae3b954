"""Ring perception: smallest set of smallest rings as a minimum cycle basis."""
from __future__ import annotations

from collections import deque

from .graph import MolGraph


def _bfs_tree(adj, root):
    dist = {root: 0}
    parent = {root: None}
    q = deque([root])
    while q:
        v = q.popleft()
        for u, bi in sorted(adj[v]):
            if u not in dist:
                dist[u] = dist[v] + 1
                parent[u] = (v, bi)
                q.append(u)
    return dist, parent


def _path_bonds(parent, v):
    bonds, atoms = [], [v]
    while parent[v] is not None:
        v, bi = parent[v]
        bonds.append(bi)
        atoms.append(v)
    return bonds, atoms


def sssr(g: MolGraph) -> list[tuple[int, ...]]:
    """Return the SSSR as atom tuples in ring traversal order.

    Horton candidates (shortest path + edge + shortest path) sorted by
    size, then greedy selection of cycles independent over GF(2).  Each
    ring starts at its smallest atom and proceeds towards the smaller of
    that atom's two ring neighbours.
    """
    n, m = len(g.atoms), len(g.bonds)
    rank = m - n + 1
    if rank <= 0:
        return []
    adj = [g.neighbors(i) for i in range(n)]
    ring_bonds = g.ring_bonds
    candidates = {}
    for root in sorted(g.ring_atoms):
        dist, parent = _bfs_tree(adj, root)
        for bi in sorted(ring_bonds):
            b = g.bonds[bi]
            x, y = b.a, b.b
            if parent.get(x) and parent[x][1] == bi or parent.get(y) and parent[y][1] == bi:
                continue
            px, ax = _path_bonds(parent, x)
            py, ay = _path_bonds(parent, y)
            if set(ax) & set(ay) != {root}:
                continue
            edges = frozenset(px + py + [bi])
            if len(edges) != len(px) + len(py) + 1:
                continue
            if edges not in candidates:
                candidates[edges] = len(edges)
    ordered = sorted(candidates, key=lambda e: (len(e), sorted(e)))
    basis: list[tuple[int, int]] = []  # (pivot bit, vector)
    chosen = []
    for edges in ordered:
        vec = 0
        for bi in edges:
            vec |= 1 << bi
        for pivot, bvec in basis:
            if vec >> pivot & 1:
                vec ^= bvec
        if vec:
            pivot = vec.bit_length() - 1
            basis.append((pivot, vec))
            chosen.append(edges)
            if len(chosen) == rank:
                break
    return [_walk(g, edges) for edges in chosen]


def _walk(g: MolGraph, edges: frozenset[int]) -> tuple[int, ...]:
    nb: dict[int, list[int]] = {}
    for bi in edges:
        b = g.bonds[bi]
        nb.setdefault(b.a, []).append(b.b)
        nb.setdefault(b.b, []).append(b.a)
    start = min(nb)
    order = [start]
    prev, cur = start, min(nb[start])
    while cur != start:
        order.append(cur)
        a, b = nb[cur]
        prev, cur = cur, (b if a == prev else a)
    return tuple(order)
