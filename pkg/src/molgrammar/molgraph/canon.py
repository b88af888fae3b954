"""Exact canonical labeling of small vertex- and edge-labeled graphs.

Colour refinement (1-WL) followed by individualization of the first
non-singleton cell, with pruning by automorphisms discovered at equal
leaves.  The certificate is the lexicographically smallest relabeled
graph over the search tree, so equal certificates imply isomorphism.
"""
from __future__ import annotations

from typing import Hashable, Sequence


def _rank(keys: Sequence) -> list[int]:
    distinct = sorted(set(keys))
    index = {k: i for i, k in enumerate(distinct)}
    return [index[k] for k in keys]


class _Graph:
    __slots__ = ("n", "labels", "nbrs", "edges")

    def __init__(self, labels, edges):
        self.n = len(labels)
        self.labels = labels
        nbrs = [[] for _ in range(self.n)]
        for i, j, lab in edges:
            nbrs[i].append((j, lab))
            nbrs[j].append((i, lab))
        self.nbrs = nbrs
        self.edges = edges


def _refine(g: _Graph, colors: list[int]) -> list[int]:
    ncolors = len(set(colors))
    while True:
        sigs = [
            (colors[v], tuple(sorted((lab, colors[u]) for u, lab in g.nbrs[v])))
            for v in range(g.n)
        ]
        new = _rank(sigs)
        k = max(new) + 1 if new else 0
        if k == ncolors:
            return new
        colors, ncolors = new, k


def _certificate(g: _Graph, colors: list[int]):
    # colors is discrete: colors[v] is the canonical position of v
    inv = [0] * g.n
    for v, c in enumerate(colors):
        inv[c] = v
    labs = tuple(g.labels[inv[c]] for c in range(g.n))
    edges = tuple(sorted(
        (min(colors[i], colors[j]), max(colors[i], colors[j]), lab) for i, j, lab in g.edges
    ))
    return labs, edges


def canonical_labeling(labels: Sequence[Hashable], edges: Sequence[tuple[int, int, Hashable]]):
    """Return ``(certificate, order)`` for the graph.

    ``labels[v]`` and edge labels must be mutually comparable (strings are
    safest).  ``order[v]`` is the canonical position of vertex ``v``.
    """
    g = _Graph(list(labels), [tuple(e) for e in edges])
    if g.n == 0:
        return ((), ()), []
    start = _refine(g, _rank(g.labels))
    best: list = [None, None]  # certificate, colors
    automorphisms: list[list[int]] = []

    def orbits_fixing(path: list[int], cell: list[int]) -> dict[int, int]:
        parent = {v: v for v in cell}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for perm in automorphisms:
            if all(perm[p] == p for p in path):
                for v in cell:
                    w = perm[v]
                    if w in parent:
                        a, b = find(v), find(w)
                        if a != b:
                            parent[max(a, b)] = min(a, b)
        return {v: find(v) for v in cell}

    def search(colors: list[int], path: list[int]) -> None:
        counts: dict[int, list[int]] = {}
        for v, c in enumerate(colors):
            counts.setdefault(c, []).append(v)
        target = None
        for c in sorted(counts):
            if len(counts[c]) > 1:
                target = counts[c]
                break
        if target is None:
            cert = _certificate(g, colors)
            if best[0] is None or cert < best[0]:
                best[0], best[1] = cert, colors
            elif cert == best[0]:
                # colors and best[1] are two labelings giving the same graph
                inv = [0] * g.n
                for v, c in enumerate(best[1]):
                    inv[c] = v
                automorphisms.append([inv[colors[v]] for v in range(g.n)])
            return
        tried: set[int] = set()
        for v in target:
            if tried:
                orb = orbits_fixing(path, target)
                if orb[v] in {orb[t] for t in tried}:
                    continue
            tried.add(v)
            split = [(c, 0 if u == v else 1) for u, c in enumerate(colors)]
            search(_refine(g, _rank(split)), path + [v])

    search(start, [])
    return best[0], best[1]


def certificate_string(cert) -> str:
    labs, edges = cert
    return ";".join(labs) + "|" + ";".join(f"{i}-{j}:{lab}" for i, j, lab in edges)
