import json
import math
import random

import numpy as np
import pytest

from molgrammar.errors import DimensionMismatch, EmptyDataset, UnknownEdge
from molgrammar.grammar import replay_molecule
from molgrammar.hypergraph import build_hypergraph, relabel
from molgrammar.learn import (FEATURE_DIM, Adam, PotentialNet, TrainConfig, edge_probability,
                              featurize, featurize_all, normalized_rewards, reinforce_step,
                              sample_episode, sigmoid, train)
from molgrammar.molgraph import canonical_key

from conftest import mol


def constant_net(potential, dim=FEATURE_DIM):
    net = PotentialNet(dim, (4,), seed=0)
    for p in net.params:
        p[...] = 0.0
    net.params[-1][...] = potential
    return net


def edge_by_atoms(h, a, b):
    for eid, e in h.edges.items():
        if set(e.members) == {a, b}:
            return eid
    raise AssertionError


# features

def test_glycol_feature_symmetry():
    h = build_hypergraph(mol("OCCO"))
    co1, co2, cc = edge_by_atoms(h, 0, 1), edge_by_atoms(h, 2, 3), edge_by_atoms(h, 1, 2)
    f = featurize_all(h)
    assert np.array_equal(f[co1], f[co2])
    assert not np.array_equal(f[co1], f[cc])
    assert f[cc].shape == (FEATURE_DIM,)
    assert np.all(np.isfinite(f[cc]))
    assert np.array_equal(featurize(h, cc), f[cc])


def test_unknown_edge():
    with pytest.raises(UnknownEdge):
        featurize(build_hypergraph(mol("OCCO")), 42)


def test_features_invariant_under_relabeling(all_smiles):
    rng = random.Random(8)
    for s in all_smiles[::4]:
        h = build_hypergraph(mol(s))
        ids = list(h.nodes)
        shuffled = ids[:]
        rng.shuffle(shuffled)
        h2 = relabel(h, dict(zip(ids, [v + 100 for v in shuffled])))
        f1, f2 = featurize_all(h), featurize_all(h2)
        for eid in h.edges:
            assert np.array_equal(f1[eid], f2[eid])


# probabilities

@pytest.mark.parametrize("potential,phi", [(0.0, 0.5), (math.log(3), 0.25), (-math.log(3), 0.75)])
def test_edge_probability(potential, phi):
    net = constant_net(potential)
    assert edge_probability(net, np.zeros(FEATURE_DIM)) == pytest.approx(phi, abs=1e-12)


def test_probability_monotone_in_potential():
    values = [edge_probability(constant_net(F), np.zeros(FEATURE_DIM)) for F in np.linspace(-5, 5, 21)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        edge_probability(PotentialNet(8, (4,)), np.zeros(9))


def test_sigmoid_extremes():
    assert sigmoid(800.0) == 1.0 and sigmoid(-800.0) == 0.0


# episodes

def test_phi_one_contracts_in_one_iteration(datasets):
    mols = [m for _, m in datasets["isocyanates"]]
    g, traj = sample_episode(constant_net(-60.0), mols, 0)
    assert len(g.rules) == len(mols)
    assert all(r.is_initial for r in g.rules)
    assert {d.iteration for d in traj.draws} == {0}
    assert not traj.forced_steps


def test_phi_zero_still_terminates(datasets):
    mols = [m for _, m in datasets["chain_extenders"]]
    g, traj = sample_episode(constant_net(60.0), mols, 0)
    assert traj.forced_steps
    for m in mols:
        assert canonical_key(replay_molecule(g, canonical_key(m))) == canonical_key(m)
    assert len(traj.steps) <= sum(len(build_hypergraph(m).edges) for m in mols)


def test_glycol_log_prob_by_hand():
    net = PotentialNet(seed=4)
    g, traj = sample_episode(net, [mol("OCCO")], 12)
    by_hand = sum(math.log(d.phi) if d.x else math.log(1 - d.phi) for d in traj.draws if not d.forced)
    assert traj.log_prob == pytest.approx(by_hand, abs=1e-12)
    assert traj.product_log_prob() == pytest.approx(traj.log_prob, abs=1e-9)
    assert traj.log_prob_under(net) == pytest.approx(traj.log_prob, abs=1e-9)


def test_log_prob_identity_on_datasets(datasets):
    for name, items in datasets.items():
        mols = [m for _, m in items]
        _, traj = sample_episode(PotentialNet(seed=2), mols, 5)
        assert traj.product_log_prob() == pytest.approx(traj.log_prob, abs=1e-9)


def test_empty_dataset():
    with pytest.raises(EmptyDataset):
        sample_episode(PotentialNet(), [], 0)


# gradients

def test_gradient_matches_finite_differences():
    net = PotentialNet(8, (6, 5), seed=1)
    for b in net.params[1::2]:
        b[...] = np.random.default_rng(1).uniform(-0.5, 0.5, size=b.shape)
    _, traj = sample_episode(PotentialNet(8, (6, 5), seed=9), [mol("OCCO"), mol("NCCC(=O)O")], 3)
    grads = traj.grad_log_prob(net)
    eps = 1e-6
    for p, g in zip(net.params, grads):
        for idx in list(np.ndindex(p.shape))[:12]:
            old = p[idx]
            p[idx] = old + eps
            up = traj.log_prob_under(net)
            p[idx] = old - eps
            down = traj.log_prob_under(net)
            p[idx] = old
            fd = (up - down) / (2 * eps)
            assert g[idx] == pytest.approx(fd, rel=1e-4, abs=1e-7)


def test_normalized_rewards():
    vals = [{"a": 1.0, "b": 0.2}, {"a": 3.0, "b": 0.2}, {"a": 2.0, "b": 0.2}]
    r = normalized_rewards(vals, {"a": 2.0, "b": 1.0})
    assert r.tolist() == pytest.approx([-2.0, 2.0, 0.0])
    assert abs(r.sum()) < 1e-9
    assert normalized_rewards([{"a": 0.7}] * 4, {"a": 1.0}).tolist() == [0.0] * 4


def test_identical_rewards_leave_net_untouched():
    net = PotentialNet(FEATURE_DIM, (8,), seed=0)
    before = [p.copy() for p in net.params]
    cfg = TrainConfig(mc_samples=3, eval_generations=4)
    metrics = {"const": (1.0, lambda mols: 0.5)}
    _, report = reinforce_step(net, [mol("OCCO"), mol("NCCN")], metrics, cfg, 0)
    assert report.grad_norm == 0.0
    assert report.rewards == [0.0, 0.0, 0.0]
    assert all(np.array_equal(a, b) for a, b in zip(before, net.params))


def test_failing_metric_drops_episodes():
    cfg = TrainConfig(mc_samples=2, eval_generations=4)
    metrics = {"boom": (1.0, lambda mols: 1 / 0)}
    with pytest.warns(RuntimeWarning):
        _, report = reinforce_step(PotentialNet(FEATURE_DIM, (8,)), [mol("OCCO")], metrics, cfg, 0)
    assert report.dropped == 2 and report.episodes == []


def test_adam_ascent_direction():
    p = [np.zeros(3)]
    opt = Adam(p, lr=0.1)
    opt.step(p, [np.array([1.0, -2.0, 0.0])])
    assert p[0][0] > 0 and p[0][1] < 0 and p[0][2] == 0


def test_config_validation():
    for bad in [dict(mc_samples=0), dict(eval_generations=1), dict(epochs=-1), dict(lam={"diversity": float("inf")})]:
        with pytest.raises(ValueError):
            TrainConfig(**bad)


# training loop

def small_cfg(**kw):
    base = dict(mc_samples=2, epochs=1, eval_generations=6, hidden=(16, 8), seed=3,
                membership_pattern="chain_extender")
    base.update(kw)
    return TrainConfig(**base)


def test_train_zero_epochs_returns_baseline(datasets):
    mols = [m for _, m in datasets["chain_extenders"]]
    res = train(mols, small_cfg(epochs=0))
    assert [rec["phase"] for rec in res.log] == ["select"]
    for m in mols:
        assert canonical_key(replay_molecule(res.grammar, canonical_key(m))) == canonical_key(m)


def test_train_log_deterministic(tmp_path, datasets):
    mols = [m for _, m in datasets["chain_extenders"]]
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    ra = train(mols, small_cfg(epochs=2), log_path=a)
    rb = train(mols, small_cfg(epochs=2), log_path=b)
    assert a.read_bytes() == b.read_bytes()
    assert ra.grammar.keys() == rb.grammar.keys()
    recs = [json.loads(line) for line in a.read_text().splitlines()]
    assert [r["epoch"] for r in recs] == [1, 2, 2]
    assert {"epoch", "metrics", "grad_norm"} <= set(recs[0])
    assert set(recs[0]["metrics"]["diversity"]) == {"mean", "min", "max"}
    assert "wall_ms" not in recs[0]


def test_train_empty_dataset():
    with pytest.raises(EmptyDataset):
        train([], small_cfg())


def test_checkpoint_round_trip(tmp_path):
    net = PotentialNet(12, (7, 5), seed=6)
    path = tmp_path / "ck.npz"
    net.save(path)
    back = PotentialNet.load(path)
    assert back.sizes == net.sizes
    assert all(np.array_equal(a, b) for a, b in zip(net.params, back.params))
    first = path.read_bytes()
    net.save(path)
    assert path.read_bytes() == first
