"""Monomer-class membership tests."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from ..errors import EmptyBatch, MolGrammarError, UnknownPattern
from ..molgraph import DOUBLE, SINGLE, MolGraph, load_dataset, parse_smiles


def _order(g: MolGraph, bi: int) -> int:
    return g.kekule[bi]


def _is_carbonyl_carbon(g: MolGraph, c: int) -> bool:
    if g.atoms[c].element != "C":
        return False
    return any(g.atoms[u].element == "O" and _order(g, bi) == DOUBLE for u, bi in g.neighbors(c))


def isocyanate_sites(g: MolGraph) -> list[int]:
    """Carbon atoms of N=C=O groups."""
    out = []
    for c, atom in enumerate(g.atoms):
        if atom.element != "C" or atom.charge:
            continue
        dbl = [(g.atoms[u].element, u) for u, bi in g.neighbors(c) if _order(g, bi) == DOUBLE]
        if len(dbl) == 2 and sorted(e for e, _ in dbl) == ["N", "O"]:
            out.append(c)
    return out


def acrylate_sites(g: MolGraph) -> list[int]:
    """Carbonyl carbons of C=C-C(=O)-O units whose C=C is acyclic."""
    out = []
    ring = g.ring_bonds
    for c3 in range(len(g.atoms)):
        if not _is_carbonyl_carbon(g, c3):
            continue
        nbrs = g.neighbors(c3)
        single_o = any(g.atoms[u].element == "O" and _order(g, bi) == SINGLE for u, bi in nbrs)
        if not single_o:
            continue
        for c2, b23 in nbrs:
            if g.atoms[c2].element != "C" or _order(g, b23) != SINGLE:
                continue
            if any(g.atoms[c1].element == "C" and _order(g, b12) == DOUBLE and b12 not in ring
                   for c1, b12 in g.neighbors(c2) if c1 != c3):
                out.append(c3)
                break
    return out


def hydroxyl_amine_groups(g: MolGraph) -> list[int]:
    """O-H and N-H atoms that are neither acid/ester nor amide/urea groups."""
    out = []
    for i, atom in enumerate(g.atoms):
        if atom.charge or g.hcounts[i] == 0 or atom.element not in ("O", "N"):
            continue
        nbrs = g.neighbors(i)
        if any(_order(g, bi) != SINGLE for _, bi in nbrs):
            continue
        if any(_is_carbonyl_carbon(g, u) for u, _ in nbrs):
            continue
        out.append(i)
    return out


@dataclass(frozen=True)
class MembershipPattern:
    id: str
    description: str
    predicate: Callable[[MolGraph], bool]
    dataset: str

    def matches(self, g: MolGraph) -> bool:
        return bool(self.predicate(g))


def _chain_extender(g: MolGraph) -> bool:
    return (len(hydroxyl_amine_groups(g)) == 2 and not isocyanate_sites(g)
            and not acrylate_sites(g))


PATTERNS: dict[str, MembershipPattern] = {
    p.id: p for p in (
        MembershipPattern("isocyanate", "contains N=C=O", lambda g: bool(isocyanate_sites(g)),
                          "isocyanates"),
        MembershipPattern("acrylate", "contains C=C-C(=O)-O with an acyclic C=C",
                          lambda g: bool(acrylate_sites(g)), "acrylates"),
        MembershipPattern("chain_extender",
                          "exactly two O-H/N-H groups (not acid or amide), no isocyanate or acrylate",
                          _chain_extender, "chain_extenders"),
    )
}
ALIASES = {p.dataset: p.id for p in PATTERNS.values()}
_CHECKED: set[str] = set()


def pattern_for_dataset(name: str) -> str | None:
    return ALIASES.get(name)


def get_pattern(pattern_id: str, check: bool = True) -> MembershipPattern:
    """Look up a pattern, validating it once against its own dataset."""
    pid = ALIASES.get(pattern_id, pattern_id)
    if pid not in PATTERNS:
        raise UnknownPattern(f"unknown membership pattern {pattern_id!r}; available: {', '.join(PATTERNS)}")
    pattern = PATTERNS[pid]
    if check and pid not in _CHECKED:
        mols = [g for _, g in load_dataset(f"builtin:{pattern.dataset}")]
        misses = sum(not pattern.matches(g) for g in mols)
        if misses:
            raise MolGrammarError(f"pattern {pid} misses {misses} molecules of its own class")
        _CHECKED.add(pid)
    return pattern


def membership(mols: Sequence, pattern: MembershipPattern | str) -> float:
    """Fraction of molecules that belong to the pattern's class."""
    if not isinstance(pattern, MembershipPattern):
        pattern = get_pattern(pattern)
    if len(mols) == 0:
        raise EmptyBatch("empty batch")
    hits = 0
    for m in mols:
        g = m if isinstance(m, MolGraph) else parse_smiles(m)
        hits += pattern.matches(g)
    return hits / len(mols)
