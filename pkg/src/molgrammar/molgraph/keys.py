"""Canonical keys for molecules."""
from __future__ import annotations

from .canon import canonical_labeling
from .graph import MolGraph
from .smiles import write_smiles


def atom_labels(g: MolGraph) -> list[str]:
    return [
        f"{a.element}|{a.charge}|{int(a.aromatic)}|{h}" for a, h in zip(g.atoms, g.hcounts)
    ]


def canonical_ranks(g: MolGraph) -> list[int]:
    edges = [(b.a, b.b, str(b.order)) for b in g.bonds]
    _, order = canonical_labeling(atom_labels(g), edges)
    return order


def canonical_smiles(g: MolGraph) -> str:
    return write_smiles(g, canonical_ranks(g))


def canonical_key(g: MolGraph) -> str:
    """Isomorphism-complete key: the SMILES written in canonical atom order."""
    return canonical_smiles(g)
