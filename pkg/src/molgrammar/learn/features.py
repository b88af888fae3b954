"""Hand-crafted hyperedge features."""
from __future__ import annotations

import numpy as np

from ..errors import UnknownEdge
from ..hypergraph import RING, MolHypergraph
from ..molgraph import AROMATIC

FEATURE_DIM = 64
ELEMENT_SLOTS = ("C", "N", "O", "F", "Si", "P", "S", "Cl", "Br", "I", "B", "H", "NT")
_SLOT = {e: i for i, e in enumerate(ELEMENT_SLOTS)}
_SIZE_BUCKETS = (2, 3, 4, 5, 6)  # last bucket: 7 and above


def _slot(atom) -> int:
    return _SLOT["NT"] if atom is None else _SLOT.get(atom.element, _SLOT["NT"])


def _fit(vec: np.ndarray, dim: int) -> np.ndarray:
    if vec.shape[0] >= dim:
        return vec[:dim]
    return np.concatenate([vec, np.zeros(dim - vec.shape[0])])


class _NodeTable:
    """Per-node quantities shared by all edges of one hypergraph."""

    def __init__(self, h: MolHypergraph):
        ids = sorted(h.nodes)
        self.row = {v: i for i, v in enumerate(ids)}
        n = len(ids)
        onehot = np.zeros((n, len(ELEMENT_SLOTS)))
        degree = np.zeros(n)
        aromatic = np.zeros(n)
        in_ring = np.zeros(n)
        for v in ids:
            r = self.row[v]
            onehot[r, _slot(h.nodes[v])] = 1.0
            degree[r] = len(h.neighbors(v))
            a = h.nodes[v]
            aromatic[r] = float(a is not None and a.aromatic)
            in_ring[r] = float(any(h.edges[e].kind == RING for e in h.incidence[v]))
        self.onehot, self.degree, self.aromatic, self.in_ring = onehot, degree, aromatic, in_ring
        self.neighbors = {v: h.neighbors(v) for v in ids}


def _edge_vector(h: MolHypergraph, eid: int, table: _NodeTable) -> np.ndarray:
    e = h.edges[eid]
    rows = [table.row[v] for v in e.members]
    parts = [
        table.onehot[rows].mean(axis=0),
        [table.degree[rows].mean() / 4.0, table.aromatic[rows].mean(), table.in_ring[rows].mean()],
    ]
    orders = np.array(e.orders)
    k = e.size
    bucket = np.zeros(len(_SIZE_BUCKETS) + 1)
    bucket[_SIZE_BUCKETS.index(k) if k in _SIZE_BUCKETS else len(_SIZE_BUCKETS)] = 1.0
    nt_frac = sum(h.nodes[v] is None for v in e.nodes) / k
    parts.append([np.mean(orders == 1), np.mean(orders == 2), np.mean(orders == 3),
                  np.mean(orders == AROMATIC), float(e.kind == RING), e.arity / 6.0, nt_frac])
    parts.append(bucket)
    # element counts one and two steps away from the edge
    members = set(e.members)
    ring1 = set()
    for v in members:
        ring1 |= table.neighbors[v]
    ring1 -= members
    ring2 = set()
    for v in ring1:
        ring2 |= table.neighbors[v]
    ring2 -= members | ring1
    for shell in (ring1, ring2):
        counts = np.zeros(len(ELEMENT_SLOTS))
        for v in shell:
            counts += table.onehot[table.row[v]]
        parts.append(counts / 4.0)
    # labels of edges sharing a node with this one
    adj = np.zeros(4)
    seen = set()
    for v in members:
        for other in h.incidence[v]:
            if other == eid or other in seen:
                continue
            seen.add(other)
            o = h.edges[other]
            if o.kind == RING:
                adj[3] += 1
            else:
                adj[min(o.orders[0], 3) - 1] += 1
    parts.append(adj / 4.0)
    parts.append([np.log1p(len(h.nodes)) / 4.0, np.log1p(len(h.edges)) / 4.0])
    return np.concatenate([np.asarray(p, dtype=np.float64).ravel() for p in parts])


def featurize_all(h: MolHypergraph, dim: int = FEATURE_DIM) -> dict[int, np.ndarray]:
    """Feature vectors for every edge of ``h``."""
    table = _NodeTable(h)
    return {eid: _fit(_edge_vector(h, eid, table), dim) for eid in sorted(h.edges)}


def featurize(h: MolHypergraph, eid: int, dim: int = FEATURE_DIM) -> np.ndarray:
    """Deterministic, relabeling-invariant feature vector of one hyperedge."""
    if eid not in h.edges:
        raise UnknownEdge(eid)
    return _fit(_edge_vector(h, eid, _NodeTable(h)), dim)
