"""Dataset files: one ``[name<TAB>]SMILES`` record per line, ``#`` comments."""
from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..errors import EmptyDataset, MolGrammarError
from .graph import MolGraph
from .smiles import parse_smiles

BUILTIN_DATASETS = ("isocyanates", "acrylates", "chain_extenders")


def read_dataset(text: str, source: str = "<string>") -> list[tuple[str, str]]:
    """Return ``(name, smiles)`` records; names default to the line number."""
    records = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "\t" in line:
            name, smi = line.rsplit("\t", 1)
            name, smi = name.strip(), smi.strip()
        else:
            name, smi = f"{source}:{lineno}", line
        records.append((name, smi))
    return records


def dataset_text(spec: str) -> tuple[str, str]:
    if spec.startswith("builtin:"):
        key = spec.split(":", 1)[1]
        if key not in BUILTIN_DATASETS:
            raise MolGrammarError(
                f"unknown builtin dataset {key!r}; available: {', '.join(BUILTIN_DATASETS)}")
        return resources.files("molgrammar.data").joinpath(f"{key}.smi").read_text("utf-8"), key
    path = Path(spec)
    return path.read_text("utf-8"), path.name


def load_dataset(spec: str) -> list[tuple[str, MolGraph]]:
    """Load and parse a dataset file or ``builtin:<name>``."""
    text, source = dataset_text(spec)
    records = read_dataset(text, source)
    if not records:
        raise EmptyDataset(f"dataset {spec!r} contains no molecules")
    out = []
    for name, smi in records:
        try:
            out.append((name, parse_smiles(smi)))
        except MolGrammarError as exc:
            raise type(exc)(f"{name}: {exc}") from exc
    return out
