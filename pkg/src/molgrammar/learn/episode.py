"""Grammar-construction episodes driven by Bernoulli edge selection."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import EmptyDataset
from ..grammar import Grammar, GrammarBuilder, MoleculeRecorder
from ..hypergraph import MolHypergraph, build_hypergraph, to_molecule
from ..molgraph import MolGraph, canonical_key
from .features import featurize_all
from .net import PotentialNet, sigmoid, softplus

MAX_RESAMPLE = 10


@dataclass(frozen=True)
class Draw:
    molecule: int
    iteration: int
    edge: int
    phi: float
    x: int
    forced: bool = False


@dataclass
class Trajectory:
    """Every edge draw of one episode with the features it was drawn from."""

    draws: list[Draw] = field(default_factory=list)
    features: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    log_prob: float = 0.0

    @property
    def forced_steps(self) -> list[int]:
        return [i for i, d in enumerate(self.draws) if d.forced]

    @property
    def steps(self) -> list[list[Draw]]:
        out: dict[int, list[Draw]] = {}
        for d in self.draws:
            out.setdefault(d.iteration, []).append(d)
        return [out[k] for k in sorted(out)]

    def product_log_prob(self) -> float:
        """``log prod phi^X (1-phi)^(1-X)`` over the unforced draws."""
        phi = np.array([d.phi for d in self.draws if not d.forced])
        x = np.array([d.x for d in self.draws if not d.forced])
        if phi.size == 0:
            return 0.0
        return float(np.log(np.prod(np.where(x == 1, phi, 1.0 - phi))))

    def _masks(self):
        x = np.array([d.x for d in self.draws], dtype=np.float64)
        live = np.array([not d.forced for d in self.draws], dtype=np.float64)
        return x, live

    def log_prob_under(self, net: PotentialNet) -> float:
        """Log-likelihood of the recorded draws if they came from ``net``."""
        if not self.draws:
            return 0.0
        F = net.forward(self.features)
        x, live = self._masks()
        # log phi = -softplus(F), log(1 - phi) = -softplus(-F)
        return float(np.sum(live * -(x * softplus(F) + (1 - x) * softplus(-F))))

    def grad_log_prob(self, net: PotentialNet) -> list[np.ndarray]:
        """Gradient of :meth:`log_prob_under` with respect to ``net.params``."""
        if not self.draws:
            return [np.zeros_like(p) for p in net.params]
        F, acts = net.forward(self.features, keep=True)
        x, live = self._masks()
        return net.backward(acts, live * (sigmoid(-F) - x))


def _components(h: MolHypergraph, selected: Sequence[int]) -> list[list[int]]:
    parent: dict[int, int] = {}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for eid in selected:
        members = h.edges[eid].members
        for v in members:
            parent.setdefault(v, v)
        for v in members[1:]:
            a, b = find(members[0]), find(v)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for v in sorted(parent):
        groups.setdefault(find(v), []).append(v)
    return [groups[k] for k in sorted(groups)]


def as_hypergraphs(dataset) -> list[MolHypergraph]:
    out = []
    for item in dataset:
        if isinstance(item, tuple):
            item = item[1]
        if isinstance(item, MolGraph):
            item = build_hypergraph(item, canonical_key(item))
        out.append(item)
    return out


def sample_episode(net: PotentialNet, dataset, seed, max_resample: int = MAX_RESAMPLE):
    """Build one grammar from the whole dataset; returns ``(Grammar, Trajectory)``.

    All molecules advance together.  Each iteration draws ``X ~ Bernoulli(phi)``
    for every remaining hyperedge, contracts the connected components of the
    selected edges one after another and records one rule per component.
    A molecule whose draw selects nothing is redrawn up to ``max_resample``
    times (these draws stay in the likelihood); after that its highest-phi
    edge is selected outright and that forced choice is kept out of the
    likelihood.
    """
    hs = as_hypergraphs(dataset)
    if not hs:
        raise EmptyDataset("no molecules to build a grammar from")
    rng = np.random.default_rng(seed)
    builder = GrammarBuilder()
    recs = [MoleculeRecorder(h, h.origin or canonical_key(to_molecule(h))) for h in hs]
    draws: list[Draw] = []
    rows: list[np.ndarray] = []
    log_prob = 0.0
    it = 0
    while True:
        pending = []
        for i, rec in enumerate(recs):
            if rec.done:
                continue
            if not rec.h.edges:
                rec.contract(list(rec.h.nodes), builder)
            else:
                pending.append(i)
        if not pending:
            break
        feats = [featurize_all(recs[i].h, net.input_dim) for i in pending]
        X = np.stack([v for f in feats for v in f.values()])
        F = net.forward(X)
        phi = sigmoid(-F)
        log_on, log_off = -softplus(F), -softplus(-F)
        offset = 0
        for i, f in zip(pending, feats):
            eids = list(f)
            sl = slice(offset, offset + len(eids))
            offset += len(eids)
            p = phi[sl]
            for _ in range(max_resample + 1):
                x = rng.random(len(eids)) < p
                for k, eid in enumerate(eids):
                    draws.append(Draw(i, it, eid, float(p[k]), int(x[k])))
                    rows.append(X[sl][k])
                log_prob += float(np.sum(np.where(x, log_on[sl], log_off[sl])))
                if x.any():
                    break
            else:
                k = int(np.argmax(p))
                x = np.zeros(len(eids), dtype=bool)
                x[k] = True
                draws.append(Draw(i, it, eids[k], float(p[k]), 1, forced=True))
                rows.append(X[sl][k])
            selected = [eid for eid, on in zip(eids, x) if on]
            for comp in _components(recs[i].h, selected):
                recs[i].contract(comp, builder)
        it += 1
    for rec in recs:
        builder.record(rec.key, rec.derivation())
    feats_arr = np.stack(rows) if rows else np.zeros((0, net.input_dim))
    return builder.build(), Trajectory(draws, feats_arr, log_prob)
