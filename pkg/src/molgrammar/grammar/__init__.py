"""Production rules, grammar storage and generation."""
from .construct import MoleculeRecorder, grammar_from_plans
from .generate import GenerationConfig, applicable, expand_once, generate, generate_many, generate_with_rng, rule_probabilities
from .io import dumps, loads, read_grammar, write_grammar
from .matching import Match, apply_rule, apply_rule_with_map, match_at, match_sites
from .rules import STAR, ProductionRule, make_rule, make_rule_with_map, rule_key
from .store import START, DerivationStep, Grammar, GrammarBuilder, replay, replay_molecule, shared_rules

__all__ = [
    "DerivationStep", "applicable", "expand_once", "GenerationConfig", "Grammar", "GrammarBuilder", "Match", "MoleculeRecorder",
    "ProductionRule", "START", "STAR", "apply_rule", "apply_rule_with_map", "dumps",
    "generate", "generate_many", "generate_with_rng", "grammar_from_plans", "loads", "make_rule",
    "make_rule_with_map", "match_at", "match_sites", "read_grammar", "replay", "replay_molecule",
    "rule_key", "rule_probabilities", "shared_rules", "write_grammar",
]
