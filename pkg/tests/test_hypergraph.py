import random

import pytest

from molgrammar.errors import InvalidComponent, NonTerminalPresent
from molgrammar.hypergraph import (BOND, RING, MolHypergraph, build_hypergraph, contract,
                                   to_molecule)
from molgrammar.molgraph import Atom, canonical_key, parse_smiles

from conftest import mol


def test_benzene_single_ring_edge():
    h = build_hypergraph(mol("c1ccccc1"))
    assert len(h.nodes) == 6
    assert len(h.edges) == 1
    (e,) = h.edges.values()
    assert e.kind == RING and e.arity == 6 and e.aromatic


def test_chain_gets_bond_edges():
    h = build_hypergraph(mol("OCCO"))
    assert len(h.nodes) == 4
    assert len(h.edges) == 3 and all(e.kind == BOND for e in h.edges.values())


def test_naphthalene_two_rings():
    h = build_hypergraph(mol("c1ccc2ccccc2c1"))
    assert len(h.nodes) == 10
    rings = [e for e in h.edges.values() if e.kind == RING]
    assert len(rings) == 2 and len(h.edges) == 2
    assert len(set(rings[0].nodes) & set(rings[1].nodes)) == 2


def test_every_bond_covered(all_smiles):
    for s in all_smiles:
        g = mol(s)
        h = build_hypergraph(g)
        assert len(h.nodes) == len(g.atoms)
        assert h.is_connected()
        covered = {}
        for e in h.edges.values():
            for a, b, _ in e.bond_pairs():
                covered.setdefault(frozenset((a, b)), []).append(e.kind)
        assert set(covered) == {frozenset((b.a, b.b)) for b in g.bonds}
        ring_bonds = g.ring_bonds
        for bi, b in enumerate(g.bonds):
            kinds = covered[frozenset((b.a, b.b))]
            if bi in ring_bonds:
                assert all(k == RING for k in kinds)
            else:
                assert kinds == [BOND]
        # spanning lower bound
        assert sum(e.arity - 1 for e in h.edges.values()) >= len(h.nodes) - 1


def test_contract_middle_of_glycol():
    h = build_hypergraph(mol("OCCO"))
    out = contract(h, {1, 2})
    assert len(out.nodes) == 3
    (nt,) = out.nonterminals
    assert sorted(a.element for a in out.nodes.values() if a is not None) == ["O", "O"]
    assert len(out.edges) == 2
    assert all(nt in e.members and e.arity == 2 for e in out.edges.values())


def test_contract_everything():
    h = build_hypergraph(mol("OCCO"))
    out = contract(h, set(h.nodes))
    assert len(out.nodes) == 1 and out.nonterminals and not out.edges


def test_contract_naphthalene_ring():
    h = build_hypergraph(mol("c1ccc2ccccc2c1"))
    rings = sorted(h.edges.items())
    eid, first = rings[0]
    other_id, other = rings[1]
    out = contract(h, set(first.nodes))
    assert len(out.nodes) == 5
    (nt,) = out.nonterminals
    assert list(out.edges) == [other_id]
    e = out.edges[other_id]
    assert e.kind == RING and e.size == 6
    assert e.arity == 5
    assert e.nodes.count(nt) == 2
    # the two absorbed positions stand for different atoms
    tags = [t for v, t in zip(e.nodes, e.tags) if v == nt]
    assert len(set(tags)) == 2
    assert all(out.position_signature(nt, t) == ("T", "C", 0) for t in tags)


def test_contract_errors():
    h = build_hypergraph(mol("OCCO"))
    with pytest.raises(InvalidComponent):
        contract(h, set())
    with pytest.raises(InvalidComponent):
        contract(h, {0, 3})
    with pytest.raises(InvalidComponent):
        contract(h, {7})


def test_repeated_contraction_terminates(all_smiles):
    rng = random.Random(5)
    for s in all_smiles[::6]:
        h = build_hypergraph(mol(s))
        steps = 0
        while len(h.nodes) > 1:
            v = rng.choice(sorted(h.nodes))
            u = rng.choice(sorted(h.neighbors(v)))
            before = len(h.nodes)
            h = contract(h, {u, v})
            assert len(h.nodes) < before
            steps += 1
        assert steps < len(mol(s).atoms)


def test_to_molecule_round_trip(all_smiles):
    for s in all_smiles:
        g = mol(s)
        assert canonical_key(to_molecule(build_hypergraph(g))) == canonical_key(g)


def test_single_carbon_is_methane():
    g = to_molecule(MolHypergraph({0: Atom("C")}, {}))
    assert len(g.atoms) == 1 and g.hcounts == (4,)


def test_nonterminal_blocks_expansion():
    with pytest.raises(NonTerminalPresent):
        to_molecule(MolHypergraph({0: None}, {}))


def test_dump_format():
    lines = build_hypergraph(mol("C1CC1O")).dump().splitlines()
    assert lines[0] == "0 T C"
    assert any(line.startswith("0 3 Ring(---)") for line in lines)
    assert lines[-1].split()[1] == "2"
