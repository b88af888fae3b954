"""Circular (Morgan) fingerprints and Tanimoto distance."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch
from .graph import ATOMIC_NUMBER, MolGraph

_MASK = (1 << 64) - 1


def _mix(x: int) -> int:
    x &= _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def _hash_seq(values) -> int:
    h = 0x9E3779B97F4A7C15
    for v in values:
        h = _mix(h ^ _mix(v))
    return h


@dataclass(frozen=True, eq=False)
class Fingerprint:
    bits: np.ndarray = field(repr=False)
    radius: int = 2

    @property
    def nbits(self) -> int:
        return int(self.bits.shape[0])

    def on_bits(self) -> list[int]:
        return np.flatnonzero(self.bits).tolist()

    def __eq__(self, other) -> bool:
        return (isinstance(other, Fingerprint) and self.radius == other.radius
                and np.array_equal(self.bits, other.bits))

    __hash__ = None


def atom_invariants(g: MolGraph) -> list[int]:
    ring = g.ring_atoms
    out = []
    for i, a in enumerate(g.atoms):
        out.append(_hash_seq((ATOMIC_NUMBER[a.element], g.degree(i), g.hcounts[i],
                              a.charge + 16, int(i in ring), int(a.aromatic))))
    return out


def morgan_fingerprint(g: MolGraph, radius: int = 2, nbits: int = 2048) -> Fingerprint:
    """Extended-connectivity fingerprint folded to ``nbits`` bits.

    Environments whose bond set duplicates one already emitted are skipped,
    so each distinct substructure contributes one bit.
    """
    if radius < 0:
        raise ValueError("radius must be non-negative")
    if nbits <= 0 or nbits & (nbits - 1):
        raise ValueError("nbits must be a power of two")
    bits = np.zeros(nbits, dtype=bool)
    inv = atom_invariants(g)
    for h in inv:
        bits[h % nbits] = True
    n = len(g.atoms)
    env = [frozenset() for _ in range(n)]
    seen: set[frozenset] = set()
    for r in range(1, radius + 1):
        new_inv, new_env = [], []
        for a in range(n):
            nb = sorted((g.bonds[bi].order, inv[u]) for u, bi in g.neighbors(a))
            flat = [r, inv[a]]
            for order, h in nb:
                flat += [order, h]
            new_inv.append(_hash_seq(flat))
            e = set(env[a])
            for u, bi in g.neighbors(a):
                e.add(bi)
                e |= env[u]
            new_env.append(frozenset(e))
        for e, h, _ in sorted(zip(new_env, new_inv, range(n)), key=lambda t: (sorted(t[0]), t[1])):
            if not e or e in seen:
                continue
            seen.add(e)
            bits[h % nbits] = True
        inv, env = new_inv, new_env
    return Fingerprint(bits, radius)


def tanimoto_distance(a: Fingerprint, b: Fingerprint) -> float:
    """``1 - |a & b| / |a | b|``; zero when both fingerprints are empty."""
    if a.nbits != b.nbits or a.radius != b.radius:
        raise DimensionMismatch(
            f"fingerprints differ: {a.nbits} bits/r{a.radius} vs {b.nbits} bits/r{b.radius}")
    union = int(np.count_nonzero(a.bits | b.bits))
    if union == 0:
        return 0.0
    return 1.0 - int(np.count_nonzero(a.bits & b.bits)) / union


def tanimoto_matrix(fps: list[Fingerprint], others: list[Fingerprint] | None = None) -> np.ndarray:
    """Pairwise Tanimoto distances between two fingerprint lists."""
    others = fps if others is None else others
    for f in list(fps) + list(others):
        if f.nbits != fps[0].nbits or f.radius != fps[0].radius:
            raise DimensionMismatch("fingerprints with different widths or radii")
    A = np.stack([f.bits for f in fps]).astype(np.float64)
    B = np.stack([f.bits for f in others]).astype(np.float64)
    inter = A @ B.T
    union = A.sum(1)[:, None] + B.sum(1)[None, :] - inter
    with np.errstate(invalid="ignore", divide="ignore"):
        sim = np.where(union > 0, inter / np.where(union > 0, union, 1), 1.0)
    return 1.0 - sim
