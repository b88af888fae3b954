"""Set-level molecule metrics."""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from ..errors import EmptyBatch, MolGrammarError, TooFew
from ..molgraph import (MolGraph, canonical_key, check_valence, molecular_weight,
                        morgan_fingerprint, parse_smiles, tanimoto_matrix)


def _require(items, what="batch"):
    if len(items) == 0:
        raise EmptyBatch(f"empty {what}")


def _as_graph(item) -> MolGraph | None:
    if item is None:
        return None
    if isinstance(item, MolGraph):
        return item
    try:
        return parse_smiles(str(item))
    except MolGrammarError:
        return None


def is_valid(item) -> bool:
    """Full re-validation: parse if needed, then an independent valence re-check.

    Molecule objects are round-tripped through their canonical SMILES so a
    malformed object cannot pass on its cached bookkeeping.
    """
    g = _as_graph(item)
    if g is None:
        return False
    try:
        again = parse_smiles(canonical_key(g))
    except MolGrammarError:
        return False
    return check_valence(g) and check_valence(again)


def validity(items: Sequence) -> float:
    """Fraction of valid entries; entries are molecules, SMILES or ``None``."""
    _require(items)
    return sum(is_valid(x) for x in items) / len(items)


def _keys(mols) -> list[str]:
    return [canonical_key(m) if isinstance(m, MolGraph) else canonical_key(parse_smiles(m)) for m in mols]


def uniqueness(mols: Sequence) -> float:
    _require(mols)
    return len(set(_keys(mols))) / len(mols)


def novelty(mols: Sequence, train: Iterable) -> float:
    _require(mols)
    seen = set(_keys(list(train)))
    return sum(k not in seen for k in _keys(mols)) / len(mols)


def _fps(mols):
    return [morgan_fingerprint(m if isinstance(m, MolGraph) else parse_smiles(m)) for m in mols]


def diversity(mols: Sequence, include_self: bool = True) -> float:
    """Average Tanimoto distance between fingerprints of the batch.

    By default the mean runs over all ordered pairs including each
    molecule with itself (the full distance matrix); with
    ``include_self=False`` it runs over distinct unordered pairs.
    """
    if len(mols) < 2:
        raise TooFew("diversity needs at least two molecules")
    d = tanimoto_matrix(_fps(mols))
    n = d.shape[0]
    if include_self:
        return float(d.sum() / (n * n))
    return float(d[np.triu_indices(n, 1)].mean())


def chamfer(a: Sequence, b: Sequence) -> float:
    """Two-sided mean nearest-neighbour Tanimoto distance between two sets."""
    _require(a, "first set")
    _require(b, "second set")
    d = tanimoto_matrix(_fps(a), _fps(b))
    return float(d.min(axis=1).mean() + d.min(axis=0).mean())


def mol_weight_stats(mols: Sequence) -> dict[str, float]:
    _require(mols)
    w = np.array([molecular_weight(m if isinstance(m, MolGraph) else parse_smiles(m)) for m in mols])
    return {"mean": float(w.mean()), "min": float(w.min()), "max": float(w.max())}
