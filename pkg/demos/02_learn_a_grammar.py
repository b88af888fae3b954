"""Learn a grammar for the chain-extender monomers and sample from it.

A short run (3 epochs) keeps this under a minute; the command-line
``train`` uses 20 epochs by default.
"""
import numpy as np

from molgrammar.grammar import generate_many, shared_rules
from molgrammar.grammar.notation import describe_rule
from molgrammar.learn import TrainConfig, train
from molgrammar.metrics import diversity, membership, novelty, uniqueness, validity
from molgrammar.molgraph import canonical_key, load_dataset

data = load_dataset("builtin:chain_extenders")
mols = [g for _, g in data]
print(len(mols), "training molecules")

cfg = TrainConfig(epochs=3, seed=0, membership_pattern="chain_extender")
result = train(mols, cfg)
for rec in result.log:
    d = rec["metrics"]["diversity"]
    print(f"epoch {rec['epoch']} ({rec['phase']}): diversity {d['mean']:.3f} [{d['min']:.3f}, {d['max']:.3f}]")

grammar = result.grammar
print(f"\n{len(grammar.rules)} rules, {len(grammar.initial_rules)} initial")
for r in shared_rules(grammar):
    print("shared:", describe_rule(grammar.rules.index(r), r))

samples, failures = generate_many(grammar, 500, seed=1)
print(f"\n500 samples ({failures} derivations redrawn)")
for name, value in [("validity", validity(samples)), ("uniqueness", uniqueness(samples)),
                    ("novelty", novelty(samples, mols)), ("diversity", diversity(samples)),
                    ("membership", membership(samples, "chain_extender"))]:
    print(f"  {name:<10} {value:.3f}")

rng = np.random.default_rng(0)
print("\nsome novel ones:")
train_keys = {canonical_key(m) for m in mols}
novel = sorted({canonical_key(m) for m in samples} - train_keys)
for s in rng.choice(novel, size=min(5, len(novel)), replace=False):
    print("  ", s)
