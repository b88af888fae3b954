"""Deduplicated rule collections with per-molecule derivations."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ReplayError
from ..hypergraph import MolHypergraph, to_molecule
from ..molgraph import MolGraph
from .matching import apply_rule_with_map, match_at
from .rules import ProductionRule

NodeRef = tuple[int, int]  # (derivation step, rule-local node id)
ClassRef = tuple[int, int, int]  # (derivation step, rule-local node id, tag)


@dataclass(frozen=True)
class DerivationStep:
    """One rule application in a replayable derivation.

    ``target`` names the non-terminal to expand as the internal node of an
    earlier step (``None`` for the start symbol); ``anchors`` pins every
    anchor of the rule to a position class created by an earlier step and
    ``stars`` pins the target's position tags to rule classes.
    """

    rule: int
    target: NodeRef | None
    anchors: tuple[tuple[int, ClassRef], ...] = ()
    stars: tuple[tuple[int, tuple[int, int]], ...] = ()


@dataclass
class Grammar:
    rules: list[ProductionRule] = field(default_factory=list)
    provenance: dict[str, list[int]] = field(default_factory=dict)
    derivations: dict[str, list[DerivationStep]] = field(default_factory=dict)

    @property
    def initial_rules(self) -> list[int]:
        return [i for i, r in enumerate(self.rules) if r.is_initial]

    def keys(self) -> list[str]:
        return [r.key for r in self.rules]

    def total_count(self) -> int:
        return sum(r.count for r in self.rules)


class GrammarBuilder:
    """Accumulates rules (merging isomorphic ones) during construction."""

    def __init__(self):
        self._rules: list[ProductionRule] = []
        self._counts: list[int] = []
        self._index: dict[str, int] = {}
        self.provenance: dict[str, list[int]] = {}
        self.derivations: dict[str, list[DerivationStep]] = {}

    def add(self, rule: ProductionRule) -> int:
        idx = self._index.get(rule.key)
        if idx is None:
            idx = len(self._rules)
            self._index[rule.key] = idx
            self._rules.append(rule)
            self._counts.append(0)
        self._counts[idx] += 1
        return idx

    def record(self, key: str, steps: list[DerivationStep]) -> None:
        # duplicate molecules keep their first derivation
        if key not in self.derivations:
            self.derivations[key] = steps
            self.provenance[key] = [s.rule for s in steps]

    def build(self) -> Grammar:
        rules = [r.with_count(c) for r, c in zip(self._rules, self._counts)]
        for r, old in zip(rules, self._rules):
            r.__dict__["key"] = old.key
        return Grammar(rules, dict(self.provenance), dict(self.derivations))


START = MolHypergraph({0: None}, {}, "start")


def replay(grammar: Grammar, steps: list[DerivationStep]) -> MolGraph:
    """Re-run a recorded derivation from the start symbol."""
    partial = START
    created: dict[NodeRef, int] = {}
    for n, step in enumerate(steps):
        if not 0 <= step.rule < len(grammar.rules):
            raise ReplayError(f"step {n}: unknown rule {step.rule}")
        rule = grammar.rules[step.rule]
        if step.target is None:
            if n != 0 or not rule.is_initial:
                raise ReplayError(f"step {n}: only the first step may expand the start symbol")
            nt = 0
        else:
            if step.target not in created:
                raise ReplayError(f"step {n}: unknown target {step.target}")
            nt = created[step.target]
        want = {}
        for a, (d, local, tag) in step.anchors:
            if (d, local) not in created:
                raise ReplayError(f"step {n}: unknown anchor reference {(d, local, tag)}")
            want[a] = (created[(d, local)], tag)
        stars = {t: tuple(c) for t, c in step.stars}
        for m in match_at(partial, rule, nt):
            if m.anchor_map == want and m.star_map == stars:
                break
        else:
            raise ReplayError(f"step {n}: rule {step.rule} does not apply at the recorded site")
        partial, fresh = apply_rule_with_map(partial, rule, m)
        for local, node in fresh.items():
            created[(n, local)] = node
    if partial.nonterminals:
        raise ReplayError("derivation leaves non-terminals unexpanded")
    return to_molecule(partial)


def replay_molecule(grammar: Grammar, key: str) -> MolGraph:
    if key not in grammar.derivations:
        raise ReplayError(f"no derivation recorded for {key!r}")
    return replay(grammar, grammar.derivations[key])


def shared_rules(grammar: Grammar) -> list[ProductionRule]:
    """Rules used in the derivation of every recorded molecule."""
    if not grammar.provenance:
        return []
    common = None
    for ids in grammar.provenance.values():
        common = set(ids) if common is None else common & set(ids)
    return [grammar.rules[i] for i in sorted(common)]
