import json
import math
import random
from collections import Counter

import numpy as np
import pytest

from molgrammar.errors import DeadEnd, GrammarFormatError, InvalidComponent, ReplayError, StaleMatch
from molgrammar.grammar import (START, DerivationStep, GenerationConfig, Grammar, apply_rule,
                                dumps, expand_once, generate, generate_many, grammar_from_plans,
                                loads, make_rule, match_sites, read_grammar, replay,
                                replay_molecule, rule_key, rule_probabilities, shared_rules,
                                write_grammar)
from molgrammar.grammar.notation import describe_rule, rule_notation
from molgrammar.hypergraph import BOND, Hyperedge, MolHypergraph, build_hypergraph, contract, relabel, to_molecule
from molgrammar.learn import PotentialNet, sample_episode
from molgrammar.molgraph import canonical_key, check_valence, parse_smiles

from conftest import mol, stepwise


def random_plan(rng):
    def plan(h):
        if rng.random() < 0.15 or not h.edges:
            return list(h.nodes)
        eids = sorted(h.edges)
        comp = set(h.edges[rng.choice(eids)].members)
        for _ in range(rng.randint(0, 2)):
            touching = [e for e in eids if set(h.edges[e].members) & comp]
            comp |= set(h.edges[rng.choice(touching)].members)
        return comp
    return plan


def whole(h):
    return list(h.nodes)


def hg(smiles):
    return build_hypergraph(mol(smiles))


@pytest.fixture(scope="module")
def glycol_rule():
    return make_rule(hg("OCCO"), {1, 2})


# rule construction

def test_glycol_middle_rule(glycol_rule):
    r = glycol_rule
    assert not r.is_initial
    assert len(r.anchors) == 2
    assert all(sig == ("T", "O", 0) for sig in r.anchors.values())
    assert sorted(r.rhs.nodes[v].element for v in r.internals) == ["C", "C"]
    assert len(r.rhs.edges) == 3 and len(r.lhs) == 2
    assert r.terminal_only
    assert rule_notation(r) == "C([O:1])C[O:2]"


def test_full_contraction_is_initial():
    r = make_rule(hg("OCCO"), {0, 1, 2, 3})
    assert r.is_initial and not r.anchors
    assert canonical_key(to_molecule(r.rhs)) == canonical_key(mol("OCCO"))


def test_cyclohexane_initial_rule():
    r = make_rule(hg("C1CCCCC1"), set(range(6)))
    assert r.is_initial and not r.anchors
    (e,) = r.rhs.edges.values()
    assert e.arity == 6


def test_rule_errors():
    with pytest.raises(InvalidComponent):
        make_rule(hg("OCCO"), {0, 3})


def test_key_invariant_under_relabeling(glycol_rule):
    h = hg("OCCO")
    mapping = {0: 7, 1: 4, 2: 9, 3: 2}
    other = make_rule(relabel(h, mapping), {4, 9})
    assert rule_key(other) == rule_key(glycol_rule)
    assert make_rule(hg("OCCO"), {1, 2}).key == glycol_rule.key


def test_key_distinguishes_bond_order():
    single = make_rule(hg("OCCO"), {1, 2})
    double = make_rule(hg("OC=CO"), {1, 2})
    assert single.key != double.key


def test_key_distinguishes_anchor_element():
    assert make_rule(hg("OCCO"), {1, 2}).key != make_rule(hg("NCCN"), {1, 2}).key


# matching and application

def o_nt_o():
    return contract(hg("OCCO"), {1, 2})


def test_initial_rule_single_match():
    r = make_rule(hg("OCCO"), {0, 1, 2, 3})
    ms = match_sites(START, r)
    assert len(ms) == 1
    out = apply_rule(START, r, ms[0])
    assert canonical_key(to_molecule(out)) == canonical_key(mol("OCCO"))


def test_symmetric_anchors_match_twice(glycol_rule):
    ms = match_sites(o_nt_o(), glycol_rule)
    assert len(ms) == 2
    assert ms[0].anchor_map != ms[1].anchor_map
    for m in ms:
        assert canonical_key(to_molecule(apply_rule(o_nt_o(), glycol_rule, m))) == canonical_key(mol("OCCO"))


def test_label_mismatch_no_match():
    r = make_rule(hg("NCCN"), {1, 2})
    assert match_sites(o_nt_o(), r) == []


def test_bond_order_mismatch_no_match():
    r = make_rule(hg("O=CC=O"), {1, 2})
    assert match_sites(o_nt_o(), r) == []


def test_stale_match(glycol_rule):
    partial = o_nt_o()
    m = match_sites(partial, glycol_rule)[0]
    changed = MolHypergraph(dict(partial.nodes), {k: e for k, e in partial.edges.items() if k != min(partial.edges)},
                            class_sigs=partial.class_sigs)
    with pytest.raises(StaleMatch):
        apply_rule(changed, glycol_rule, m)


def test_dedup_soundness():
    # two rule-key-equal rules from different molecules give isomorphic results at one site
    r1 = make_rule(hg("OCCO"), {1, 2})
    r2 = make_rule(relabel(hg("OCCO"), {0: 3, 1: 2, 2: 1, 3: 0}), {1, 2})
    assert r1.key == r2.key
    partial = o_nt_o()
    out1 = {canonical_key(to_molecule(apply_rule(partial, r1, m))) for m in match_sites(partial, r1)}
    out2 = {canonical_key(to_molecule(apply_rule(partial, r2, m))) for m in match_sites(partial, r2)}
    assert out1 == out2


def test_chain_rule_closes_cycle_from_bonds():
    # a C-C-NT partial whose outer carbons are also bonded, filled by a butane middle
    base = contract(hg("CCCC"), {1, 2})
    (nt,) = base.nonterminals
    ends = sorted(v for v in base.nodes if v != nt)
    edges = dict(base.edges)
    edges[max(edges) + 1] = Hyperedge(BOND, tuple(ends), (1,))
    partial = MolHypergraph(dict(base.nodes), edges, class_sigs=base.class_sigs)
    r = make_rule(hg("CCCC"), {1, 2})
    ms = match_sites(partial, r)
    assert ms
    out = to_molecule(apply_rule(partial, r, ms[0]))
    assert canonical_key(out) == canonical_key(mol("C1CCC1"))
    assert all(e.kind == BOND for e in apply_rule(partial, r, ms[0]).edges.values())


# construction and replay

def test_glycol_stepwise_grammar():
    g = grammar_from_plans([mol("OCCO")], [stepwise({1, 2})])
    assert len(g.rules) == 2
    assert g.initial_rules
    assert canonical_key(replay_molecule(g, canonical_key(mol("OCCO")))) == canonical_key(mol("OCCO"))


@pytest.mark.parametrize("name", ["isocyanates", "acrylates", "chain_extenders"])
def test_replay_reproduces_every_molecule(datasets, name):
    mols = [m for _, m in datasets[name]]
    for seed in range(4):
        rng = random.Random(seed)
        g = grammar_from_plans(mols, [random_plan(rng) for _ in mols])
        assert g.initial_rules
        for m in mols:
            assert canonical_key(replay_molecule(g, canonical_key(m))) == canonical_key(m)
        assert g.total_count() == sum(len(steps) for steps in g.derivations.values())


def test_replay_errors():
    g = grammar_from_plans([mol("OCCO")], [stepwise({1, 2})])
    steps = g.derivations[canonical_key(mol("OCCO"))]
    with pytest.raises(ReplayError):
        replay(g, steps[:1])
    with pytest.raises(ReplayError):
        replay(g, [DerivationStep(99, None)])
    with pytest.raises(ReplayError):
        replay_molecule(g, "CC")


def test_episode_construction_deterministic(datasets):
    mols = [m for _, m in datasets["isocyanates"]]
    net = PotentialNet(seed=3)
    a, _ = sample_episode(net, mols, 17)
    b, _ = sample_episode(net, mols, 17)
    assert Counter(a.keys()) == Counter(b.keys())
    assert [r.count for r in a.rules] == [r.count for r in b.rules]


def test_episode_replays(datasets):
    mols = [m for _, m in datasets["chain_extenders"]]
    g, _ = sample_episode(PotentialNet(seed=1), mols, 0)
    for m in mols:
        assert canonical_key(replay_molecule(g, canonical_key(m))) == canonical_key(m)


# shared rules

def test_single_molecule_rules_all_shared():
    g = grammar_from_plans([mol("O=C=NCCCCCCN=C=O")], [random_plan(random.Random(2))])
    assert {r.key for r in shared_rules(g)} == set(g.keys())


def test_disjoint_molecules_share_nothing():
    g = grammar_from_plans([mol("OCCO"), mol("C1CCCCC1")], [whole, whole])
    assert shared_rules(g) == []
    assert shared_rules(Grammar()) == []


# file format

def test_file_round_trip(tmp_path, datasets):
    mols = [m for _, m in datasets["isocyanates"]]
    g = grammar_from_plans(mols, [random_plan(random.Random(9)) for _ in mols])
    path = tmp_path / "g.json"
    write_grammar(g, path)
    back = read_grammar(path)
    assert back.keys() == g.keys()
    assert [r.count for r in back.rules] == [r.count for r in g.rules]
    assert back.provenance == g.provenance
    assert dumps(back) == dumps(g)
    for m in mols:
        assert canonical_key(replay_molecule(back, canonical_key(m))) == canonical_key(m)
    data = json.loads(path.read_text())
    assert {"version", "rules", "provenance"} <= set(data)
    assert {"key", "is_initial", "count", "anchors", "rhs"} <= set(data["rules"][0])


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("version"),
    lambda d: d.update(version=99),
    lambda d: d.update(rules=[]),
    lambda d: d["rules"][0].update(key="bogus"),
    lambda d: d["rules"][0].pop("rhs"),
    lambda d: d["provenance"].update(x=[999]),
])
def test_corrupt_files_rejected(mutate):
    g = grammar_from_plans([mol("OCCO")], [stepwise({1, 2})])
    data = json.loads(dumps(g))
    mutate(data)
    with pytest.raises(GrammarFormatError):
        loads(json.dumps(data))


def test_not_json_rejected():
    with pytest.raises(GrammarFormatError):
        loads("{not json")


# generation

def test_single_rule_grammar_always_same_molecule():
    g = grammar_from_plans([mol("OCCO")], [whole])
    for seed in range(5):
        assert canonical_key(generate(g, GenerationConfig(seed=seed))) == canonical_key(mol("OCCO"))


def test_config_validation():
    with pytest.raises(ValueError):
        GenerationConfig(alpha=-1)
    with pytest.raises(ValueError):
        GenerationConfig(max_iterations=0)


def test_tilt_formula():
    p = rule_probabilities([True, False], 2, 0.5)
    assert p[0] == pytest.approx(math.e / (math.e + 1))
    assert rule_probabilities([True, False, False], 0, 0.5) == pytest.approx([1 / 3] * 3)


def test_initial_rules_equiprobable_at_start():
    smiles = ["OCCO", "NCCN", "C1CCCCC1"]
    g = grammar_from_plans([mol(s) for s in smiles], [whole] * 3)
    rng = np.random.default_rng(0)
    counts = Counter(expand_once(g, START, 0, rng)[1] for _ in range(6000))
    assert set(counts) == set(g.initial_rules)
    for c in counts.values():
        assert c / 6000 == pytest.approx(1 / 3, abs=0.03)


def test_no_initial_rule_dead_end():
    r = make_rule(hg("OCCO"), {1, 2})
    with pytest.raises(DeadEnd):
        generate(Grammar([r]))


@pytest.mark.parametrize("name", ["isocyanates", "acrylates", "chain_extenders"])
def test_generated_molecules_valid(datasets, name):
    mols = [m for _, m in datasets[name]]
    for seed in range(2):
        g = grammar_from_plans(mols, [random_plan(random.Random(seed)) for _ in mols])
        out, failures = generate_many(g, 150, seed=seed)
        assert len(out) == 150
        for m in out:
            assert check_valence(m)
            assert check_valence(parse_smiles(canonical_key(m)))


def test_generation_deterministic(datasets):
    mols = [m for _, m in datasets["acrylates"]]
    g = grammar_from_plans(mols, [random_plan(random.Random(4)) for _ in mols])
    a, _ = generate_many(g, 40, seed=5)
    b, _ = generate_many(g, 40, seed=5)
    assert [canonical_key(m) for m in a] == [canonical_key(m) for m in b]


def test_rule_listing_line(glycol_rule):
    line = describe_rule(3, glycol_rule.with_count(4))
    assert line.startswith("p3\tcount=4\tR* -> ")
