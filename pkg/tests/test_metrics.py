import itertools
import random
import stat
import sys

import numpy as np
import pytest

from molgrammar.errors import EmptyBatch, ProcessFailure, ProtocolError, ScorerTimeout, TooFew, UnknownPattern
from molgrammar.metrics import (MetricSpec, chamfer, diversity, external_metric, get_pattern,
                                membership, mol_weight_stats, novelty, uniqueness, validity)
from molgrammar.molgraph import morgan_fingerprint, parse_smiles

from conftest import mol

HDI = "O=C=NCCCCCCN=C=O"


def jaccard_distance(a, b):
    # set-based oracle, independent of the bit-vector implementation
    sa = set(morgan_fingerprint(mol(a) if isinstance(a, str) else a).on_bits())
    sb = set(morgan_fingerprint(mol(b) if isinstance(b, str) else b).on_bits())
    union = sa | sb
    return 0.0 if not union else 1 - len(sa & sb) / len(union)


def chamfer_oracle(A, B):
    return (sum(min(jaccard_distance(a, b) for b in B) for a in A) / len(A)
            + sum(min(jaccard_distance(b, a) for a in A) for b in B) / len(B))


# validity, uniqueness, novelty

def test_validity():
    assert validity(["OCCO", mol("CC")]) == 1.0
    assert validity(["OCCO", "C1CC", None, "c1cccc1"]) == 0.25
    with pytest.raises(EmptyBatch):
        validity([])


def test_uniqueness():
    assert uniqueness(["OCCO"] * 10) == pytest.approx(0.1)
    assert uniqueness(["OCCO", "C(O)CO", "NCCN"]) == pytest.approx(2 / 3)
    with pytest.raises(EmptyBatch):
        uniqueness([])


def test_novelty(datasets):
    train = [m for _, m in datasets["isocyanates"]]
    assert novelty(train, train) == 0.0
    assert novelty(["OCCO", HDI], train) == 0.5
    with pytest.raises(EmptyBatch):
        novelty([], train)


# diversity and chamfer

def test_diversity_of_duplicates():
    assert diversity(["OCCO", "OCCO"]) == 0.0
    with pytest.raises(TooFew):
        diversity(["OCCO"])


def test_diversity_matches_oracle():
    smiles = ["OCCO", HDI, "C=CC(=O)OC", "NCCN"]
    n = len(smiles)
    total = sum(jaccard_distance(a, b) for a, b in itertools.product(smiles, repeat=2))
    assert diversity(smiles) == pytest.approx(total / (n * n), abs=1e-12)
    pairs = sum(jaccard_distance(a, b) for a, b in itertools.combinations(smiles, 2))
    assert diversity(smiles, include_self=False) == pytest.approx(pairs / (n * (n - 1) / 2), abs=1e-12)


@pytest.mark.parametrize("name,target", [("isocyanates", 0.61), ("acrylates", 0.67), ("chain_extenders", 0.80)])
def test_training_set_diversity(datasets, name, target):
    mols = [m for _, m in datasets[name]]
    assert diversity(mols) == pytest.approx(target, abs=0.05)


def test_chamfer_examples():
    d = jaccard_distance("OCCO", HDI)
    assert 0 < d <= 1
    assert chamfer(["OCCO"], ["OCCO", HDI]) == pytest.approx(d / 2, abs=1e-12)
    assert chamfer(["OCCO", HDI], ["OCCO", HDI]) == 0.0
    with pytest.raises(EmptyBatch):
        chamfer([], ["OCCO"])


def test_chamfer_symmetric_and_matches_oracle(datasets):
    A = [m for _, m in datasets["isocyanates"]][:5]
    B = [m for _, m in datasets["chain_extenders"]][:4]
    assert chamfer(A, B) == pytest.approx(chamfer(B, A), abs=1e-12)
    assert chamfer(A, B) == pytest.approx(chamfer_oracle(A, B), abs=1e-12)
    assert 0.0 <= chamfer(A, B) <= 2.0


def test_metrics_order_independent(datasets):
    mols = [m for _, m in datasets["acrylates"]]
    train = [m for _, m in datasets["isocyanates"]]
    perm = mols[:]
    random.Random(1).shuffle(perm)
    for fn in (uniqueness, diversity, validity, lambda x: chamfer(x, train), lambda x: novelty(x, train),
               lambda x: membership(x, "acrylate")):
        assert abs(fn(mols) - fn(perm)) <= 1e-12


# membership

def test_isocyanate_pattern():
    assert membership([HDI], "isocyanate") == 1.0
    assert membership(["OCCO"], "isocyanate") == 0.0


@pytest.mark.parametrize("name,pattern", [("isocyanates", "isocyanate"), ("acrylates", "acrylate"),
                                          ("chain_extenders", "chain_extender")])
def test_pattern_covers_own_dataset(datasets, name, pattern):
    assert membership([m for _, m in datasets[name]], pattern) == 1.0
    assert membership([m for _, m in datasets[name]], name) == 1.0


def test_patterns_do_not_overlap(datasets):
    iso = [m for _, m in datasets["isocyanates"]]
    acr = [m for _, m in datasets["acrylates"]]
    assert membership(iso, "acrylate") == 0.0
    assert membership(acr, "isocyanate") == 0.0
    assert membership(iso + acr, "chain_extender") == 0.0


def test_unknown_pattern():
    with pytest.raises(UnknownPattern) as info:
        get_pattern("polyol")
    assert "isocyanate" in str(info.value)


# molecular weight

def test_mol_weight_stats():
    stats = mol_weight_stats(["C", "OCCO"])
    assert stats["min"] == pytest.approx(16.04, abs=0.01)
    assert stats["max"] == pytest.approx(62.07, abs=0.01)
    assert stats["mean"] == pytest.approx((16.043 + 62.068) / 2, abs=0.01)
    assert mol_weight_stats(["OCCO"]) == mol_weight_stats(["C(O)CO"])
    with pytest.raises(EmptyBatch):
        mol_weight_stats([])


# external scorers

def script(tmp_path, name, body):
    path = tmp_path / name
    path.write_text(f"#!{sys.executable}\nimport sys\n{body}\n")
    path.chmod(path.stat().st_mode | stat.S_IEXEC)
    return str(path)


def test_constant_scorer(tmp_path):
    cmd = script(tmp_path, "scorer-const-1", "for line in sys.stdin:\n    print('1.0')")
    scores, mean = external_metric(["OCCO", "CC", HDI], cmd)
    assert scores == [1.0, 1.0, 1.0] and mean == 1.0


def test_scorer_sees_smiles_in_order(tmp_path):
    cmd = script(tmp_path, "scorer-len", "for line in sys.stdin:\n    print(len(line.strip()))")
    scores, _ = external_metric(["C", "CCCC"], cmd)
    assert scores == [1.0, 4.0]


def test_short_output_is_protocol_error(tmp_path):
    cmd = script(tmp_path, "scorer-short", "sys.stdin.read()\nprint('0.5')")
    with pytest.raises(ProtocolError):
        external_metric(["OCCO", "CC"], cmd)


def test_non_numeric_is_protocol_error(tmp_path):
    cmd = script(tmp_path, "scorer-text", "for line in sys.stdin:\n    print('high')")
    with pytest.raises(ProtocolError):
        external_metric(["OCCO"], cmd)


def test_failing_scorer(tmp_path):
    cmd = script(tmp_path, "scorer-fail", "sys.stdin.read()\nsys.stderr.write('model missing')\nsys.exit(3)")
    with pytest.raises(ProcessFailure) as info:
        external_metric(["OCCO"], cmd)
    assert "model missing" in str(info.value)
    with pytest.raises(ProcessFailure):
        external_metric(["OCCO"], str(tmp_path / "absent"))


def test_scorer_timeout(tmp_path):
    cmd = script(tmp_path, "scorer-slow", "import time\ntime.sleep(5)")
    with pytest.raises(ScorerTimeout):
        external_metric(["OCCO"], cmd, timeout=0.5)


def test_metric_spec(tmp_path):
    assert MetricSpec("u", "uniqueness").evaluate(["CC", "CC"]) == 0.5
    assert MetricSpec("m", "membership", {"pattern": "isocyanate"}).evaluate([HDI]) == 1.0
    cmd = script(tmp_path, "scorer-const-1", "for line in sys.stdin:\n    print('1.0')")
    assert MetricSpec("rs", "external", {"command": cmd}).evaluate(["CC"]) == 1.0
    with pytest.raises(ValueError):
        MetricSpec("x", "external")
    with pytest.raises(ValueError):
        MetricSpec("x", "qed")
