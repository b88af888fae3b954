"""Evaluation and reward metrics."""
from __future__ import annotations

from dataclasses import dataclass, field

from .builtin import chamfer, diversity, is_valid, mol_weight_stats, novelty, uniqueness, validity
from .external import DEFAULT_TIMEOUT, external_metric
from .patterns import PATTERNS, MembershipPattern, get_pattern, membership, pattern_for_dataset

BUILTIN = ("validity", "uniqueness", "novelty", "diversity", "chamfer", "membership", "mol_weight_stats")


@dataclass(frozen=True)
class MetricSpec:
    """A named metric: a builtin (``kind`` is its name) or an external command."""

    name: str
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind == "external":
            if not self.params.get("command"):
                raise ValueError(f"external metric {self.name!r} needs a command")
        elif self.kind not in BUILTIN:
            raise ValueError(f"unknown metric kind {self.kind!r}")

    def evaluate(self, mols, train=()):
        """Scalar value of the metric (the mean for mol_weight_stats/external)."""
        if self.kind == "validity":
            return validity(mols)
        if self.kind == "uniqueness":
            return uniqueness(mols)
        if self.kind == "novelty":
            return novelty(mols, train)
        if self.kind == "diversity":
            return diversity(mols)
        if self.kind == "chamfer":
            return chamfer(mols, train)
        if self.kind == "membership":
            return membership(mols, self.params["pattern"])
        if self.kind == "mol_weight_stats":
            return mol_weight_stats(mols)["mean"]
        return external_metric(mols, self.params["command"],
                               self.params.get("timeout", DEFAULT_TIMEOUT))[1]


__all__ = [
    "BUILTIN", "DEFAULT_TIMEOUT", "MembershipPattern", "MetricSpec", "PATTERNS", "chamfer",
    "diversity", "external_metric", "get_pattern", "is_valid", "membership", "mol_weight_stats",
    "novelty", "pattern_for_dataset", "uniqueness", "validity",
]
