"""Stochastic generation from a grammar."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import BudgetExceeded, DeadEnd
from ..hypergraph import MolHypergraph, to_molecule
from ..molgraph import MolGraph
from .matching import apply_rule, match_at, site_profile
from .store import START, Grammar


@dataclass(frozen=True)
class GenerationConfig:
    alpha: float = 0.5
    max_iterations: int = 100
    seed: int = 0

    def __post_init__(self):
        if not self.alpha >= 0:
            raise ValueError("alpha must be non-negative")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


def rule_probabilities(terminal_only, t: int, alpha: float) -> np.ndarray:
    """``p(r) ∝ exp(alpha * t * x_r)`` over the applicable rules."""
    x = np.asarray(terminal_only, dtype=float)
    logits = alpha * t * x
    w = np.exp(logits - logits.max())
    return w / w.sum()


class _Index:
    """Rule ids grouped by left-hand-side profile."""

    def __init__(self, grammar: Grammar):
        self.by_profile: dict[tuple, list[int]] = {}
        for i, r in enumerate(grammar.rules):
            if not r.is_initial:
                self.by_profile.setdefault(r.profile, []).append(i)


_INDEX_CACHE: dict[int, tuple[Grammar, _Index]] = {}


def _index(grammar: Grammar) -> _Index:
    hit = _INDEX_CACHE.get(id(grammar))
    if hit is None or hit[0] is not grammar:
        if len(_INDEX_CACHE) > 64:
            _INDEX_CACHE.clear()
        hit = (grammar, _Index(grammar))
        _INDEX_CACHE[id(grammar)] = hit
    return hit[1]


def applicable(grammar: Grammar, partial: MolHypergraph, t: int, cache: dict | None = None) -> dict[int, list]:
    """Rule id -> match list for every rule that applies somewhere.

    ``cache`` may carry per-non-terminal matches between calls on successive
    partials of one derivation; entries are reused while the non-terminal's
    incident edges are unchanged.
    """
    nts = partial.nonterminals
    sites: dict[int, list] = {}
    if t == 0:
        for i in grammar.initial_rules:
            ms = match_at(partial, grammar.rules[i], nts[0])
            if ms:
                sites[i] = ms
        return sites
    index = _index(grammar)
    for nt in nts:
        snap = None
        if cache is not None:
            snap = tuple((eid, partial.edges[eid]) for eid in partial.incidence[nt])
            hit = cache.get(nt)
            if hit is not None and hit[0] == snap:
                for i, ms in hit[1].items():
                    sites.setdefault(i, []).extend(ms)
                continue
        local = {}
        for i in index.by_profile.get(site_profile(partial, nt), ()):
            ms = match_at(partial, grammar.rules[i], nt)
            if ms:
                local[i] = ms
                sites.setdefault(i, []).extend(ms)
        if cache is not None:
            cache[nt] = (snap, local)
    return sites


def expand_once(grammar: Grammar, partial: MolHypergraph, t: int, rng: np.random.Generator,
                alpha: float = 0.5, cache: dict | None = None):
    """Sample a rule by the tilted law, then a site uniformly, and apply it.

    Returns ``(new partial, chosen rule id)``.
    """
    sites = applicable(grammar, partial, t, cache)
    if not sites:
        raise DeadEnd(f"no rule applies at iteration {t}")
    ids = sorted(sites)
    p = rule_probabilities([grammar.rules[i].terminal_only for i in ids], t, alpha)
    chosen = ids[int(rng.choice(len(ids), p=p))]
    ms = sites[chosen]
    m = ms[int(rng.integers(len(ms)))]
    return apply_rule(partial, grammar.rules[chosen], m), chosen


def generate_with_rng(grammar: Grammar, rng: np.random.Generator, alpha: float = 0.5,
                      max_iterations: int = 100) -> MolGraph:
    """One derivation drawing randomness from ``rng``."""
    if not grammar.initial_rules:
        raise DeadEnd("grammar has no initial rule")
    partial = START
    t = 0
    cache: dict = {}
    while partial.nonterminals:
        if t >= max_iterations:
            raise BudgetExceeded(f"{len(partial.nonterminals)} non-terminals left after {t} iterations")
        partial, _ = expand_once(grammar, partial, t, rng, alpha, cache)
        t += 1
    return to_molecule(partial)


def generate(grammar: Grammar, cfg: GenerationConfig = GenerationConfig()) -> MolGraph:
    """Sample one molecule; the start symbol is expanded at ``t = 0``."""
    return generate_with_rng(grammar, np.random.default_rng(cfg.seed), cfg.alpha, cfg.max_iterations)


def generate_many(grammar: Grammar, n: int, seed: int = 0, alpha: float = 0.5,
                  max_iterations: int = 100, max_failures: int | None = None):
    """Draw ``n`` molecules, redrawing derivations that fail.

    A derivation fails when it hits the iteration budget or when every
    remaining non-terminal lacks an applicable rule; both are discarded.
    Returns ``(molecules, failures)``.  ``max_failures`` (default ``10 n``)
    bounds the redraws; past it the batch is returned short.
    """
    if not grammar.initial_rules:
        raise DeadEnd("grammar has no initial rule")
    rng = np.random.default_rng(seed)
    limit = 10 * n if max_failures is None else max_failures
    out: list[MolGraph] = []
    failures = 0
    while len(out) < n:
        try:
            out.append(generate_with_rng(grammar, rng, alpha, max_iterations))
        except (BudgetExceeded, DeadEnd):
            failures += 1
            if failures > limit:
                break
    return out, failures
