"""Bottom-up grammar construction bookkeeping."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from ..hypergraph import MolHypergraph, absorbed_classes, component_boundary, contract_with_id
from ..molgraph import canonical_key, MolGraph
from .rules import ProductionRule, RuleMaps, make_rule_with_map
from .store import DerivationStep, Grammar, GrammarBuilder


@dataclass(frozen=True)
class _Step:
    rule: int
    nt: int
    maps: RuleMaps
    tags: dict[tuple[int, int], int]
    initial: bool


class MoleculeRecorder:
    """Contracts one molecule's hypergraph and remembers how to undo it."""

    def __init__(self, h: MolHypergraph, key: str):
        self.h = h
        self.key = key
        self.steps: list[_Step] = []

    @property
    def done(self) -> bool:
        return len(self.h.nodes) == 1 and bool(self.steps) and self.steps[-1].initial

    def contract(self, component: Iterable[int], builder: GrammarBuilder) -> ProductionRule:
        comp = set(component)
        rule, maps = make_rule_with_map(self.h, comp)
        _, strad, _ = component_boundary(self.h, comp)
        tags = absorbed_classes(self.h, comp, strad)
        idx = builder.add(rule)
        self.h, nt = contract_with_id(self.h, comp)
        self.steps.append(_Step(idx, nt, maps, tags, rule.is_initial))
        return rule

    def derivation(self) -> list[DerivationStep]:
        """The recorded contractions as a top-down derivation."""
        n = len(self.steps)
        absorbed_by = {}
        for s, st in enumerate(self.steps):
            for v in st.maps.nodes:
                absorbed_by[v] = s
        out = []
        for s in reversed(range(n)):
            st = self.steps[s]
            if st.initial:
                out.append(DerivationStep(st.rule, None))
                continue
            parent = absorbed_by[st.nt]
            pmaps = self.steps[parent].maps
            target = (n - 1 - parent, pmaps.nodes[st.nt])
            anchors = []
            for (v, t), a in st.maps.anchors.items():
                sv = absorbed_by[v]
                u, tu = self.steps[sv].maps.classes[(v, t)]
                anchors.append((a, (n - 1 - sv, u, tu)))
            stars = []
            for c, tag in st.tags.items():
                stars.append((pmaps.classes[(st.nt, tag)][1], st.maps.classes[c]))
            out.append(DerivationStep(st.rule, target, tuple(sorted(anchors)), tuple(sorted(stars))))
        return out


def grammar_from_plans(molecules: Sequence[MolGraph], plans) -> Grammar:
    """Build a grammar from explicit contraction plans.

    ``plans[i]`` is a callable receiving the current hypergraph of molecule
    ``i`` and returning the next component to contract (all remaining nodes
    to finish).  Handy for tests and for hand-made grammars.
    """
    from ..hypergraph import build_hypergraph

    builder = GrammarBuilder()
    for g, plan in zip(molecules, plans):
        key = canonical_key(g)
        rec = MoleculeRecorder(build_hypergraph(g, key), key)
        while not rec.done:
            rec.contract(plan(rec.h), builder)
        builder.record(key, rec.derivation())
    return builder.build()
