"""Molecular graphs: parsing, validation, canonical keys and fingerprints."""
from .fingerprint import Fingerprint, morgan_fingerprint, tanimoto_distance, tanimoto_matrix
from .graph import (AROMATIC, DOUBLE, SINGLE, TRIPLE, Atom, Bond, MolGraph, allowed_valences,
                    check_valence, molecular_weight)
from .keys import canonical_key, canonical_ranks, canonical_smiles
from .rings import sssr
from .smiles import parse_smiles, write_smiles
from .dataset import load_dataset, read_dataset, BUILTIN_DATASETS

__all__ = [
    "AROMATIC", "DOUBLE", "SINGLE", "TRIPLE", "Atom", "Bond", "MolGraph", "Fingerprint",
    "allowed_valences", "check_valence", "molecular_weight", "canonical_key",
    "canonical_ranks", "canonical_smiles", "morgan_fingerprint", "tanimoto_distance",
    "tanimoto_matrix", "parse_smiles", "write_smiles", "sssr", "load_dataset",
    "read_dataset", "BUILTIN_DATASETS",
]
