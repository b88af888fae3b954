"""From a molecule to production rules, one contraction at a time."""
from molgrammar.grammar import START, apply_rule, grammar_from_plans, make_rule, match_sites, replay_molecule
from molgrammar.grammar.notation import describe_rule
from molgrammar.hypergraph import build_hypergraph, contract, to_molecule
from molgrammar.molgraph import canonical_key, parse_smiles

# rings become single hyperedges, other bonds stay binary
for smiles in ["OCCO", "c1ccccc1", "c1ccc2ccccc2c1"]:
    h = build_hypergraph(parse_smiles(smiles))
    arities = sorted(e.arity for e in h.edges.values())
    print(f"{smiles:<16} {len(h.nodes):>2} nodes, edge arities {arities}")

# contracting the C-C bond of ethylene glycol leaves O-R*-O
glycol = build_hypergraph(parse_smiles("OCCO"))
print()
print(contract(glycol, {1, 2}).dump())

# the same step as a rule: R* with two O anchors -> O-C-C-O
rule = make_rule(glycol, {1, 2})
print()
print(describe_rule(0, rule))

# the rule fits O-R*-O in two ways (the anchors can swap)
partial = contract(glycol, {1, 2})
matches = match_sites(partial, rule)
print(len(matches), "matches;", canonical_key(to_molecule(apply_rule(partial, rule, matches[0]))))

# a whole grammar from explicit plans: middle first, then the rest
plans = [lambda h, q=[{1, 2}]: q.pop() if q else list(h.nodes)]
grammar = grammar_from_plans([parse_smiles("OCCO")], plans)
print()
for i, r in enumerate(grammar.rules):
    print(describe_rule(i, r))
key = canonical_key(parse_smiles("OCCO"))
print("replay:", canonical_key(replay_molecule(grammar, key)))
