"""The generation sampler tilts towards rules that finish the molecule.

At iteration t >= 1 a rule is drawn with weight exp(alpha * t * x), where x
is 1 for rules whose right-hand side has no non-terminal.  With one rule
of each kind and alpha = 0.5 the terminal rule wins with odds e^(t/2):1.
"""
import math

import numpy as np

from molgrammar.grammar import START, apply_rule, applicable, expand_once, grammar_from_plans, match_sites
from molgrammar.molgraph import parse_smiles


def steps(*components):
    queue = list(components)
    return lambda h: queue.pop(0) if queue else list(h.nodes)


# OCCO gives a terminal middle rule, OCCCO one that leaves an R* behind
g = grammar_from_plans([parse_smiles("OCCO"), parse_smiles("OCCCO")],
                       [steps({1, 2}), steps({1, 2}, {5, 3})])
(init,) = g.initial_rules
partial = apply_rule(START, g.rules[init], match_sites(START, g.rules[init])[0])
print("applicable:", {i: g.rules[i].terminal_only for i in applicable(g, partial, 1)})

rng = np.random.default_rng(0)
for t in range(1, 6):
    hits = sum(g.rules[expand_once(g, partial, t, rng)[1]].terminal_only for _ in range(4000))
    expected = math.exp(0.5 * t) / (math.exp(0.5 * t) + 1)
    print(f"t={t}: terminal rule chosen {hits / 4000:.3f}, formula {expected:.3f}")
