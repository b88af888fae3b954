"""REINFORCE training of the potential network."""
from __future__ import annotations

import json
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import EmptyDataset, MetricFailure
from ..grammar import Grammar, generate_many
from ..metrics import chamfer, diversity, get_pattern, membership, novelty, uniqueness, validity
from .episode import Trajectory, as_hypergraphs, sample_episode
from .features import FEATURE_DIM
from .net import Adam, PotentialNet

DEFAULT_LAMBDA = {"diversity": 1.0, "membership": 2.0}


@dataclass(frozen=True)
class TrainConfig:
    mc_samples: int = 5
    epochs: int = 20
    learning_rate: float = 0.01
    lam: dict = field(default_factory=lambda: dict(DEFAULT_LAMBDA))
    eval_generations: int = 200
    seed: int = 0
    alpha: float = 0.5
    max_iterations: int = 100
    hidden: tuple = (300, 128)
    feature_dim: int = FEATURE_DIM
    membership_pattern: str | None = None
    threads: int = 1
    log_timing: bool = False

    def __post_init__(self):
        if self.mc_samples < 1:
            raise ValueError("mc_samples must be at least 1")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if self.eval_generations < 2:
            raise ValueError("eval_generations must be at least 2")
        if not all(math.isfinite(float(v)) for v in self.lam.values()):
            raise ValueError("metric weights must be finite")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")


Metric = Callable[[list], float]


def reward_metrics(cfg: TrainConfig, train_mols=()) -> dict[str, tuple[float, Metric]]:
    """Metric callables for every weighted name in ``cfg.lam``."""
    train = list(train_mols)
    table: dict[str, Metric] = {
        "diversity": diversity,
        "uniqueness": uniqueness,
        "validity": validity,
        "novelty": lambda mols: novelty(mols, train),
        "chamfer": lambda mols: chamfer(mols, train),
    }
    out = {}
    for name, weight in cfg.lam.items():
        if name == "membership":
            if cfg.membership_pattern is None:
                raise ValueError("membership reward needs a membership pattern")
            pattern = get_pattern(cfg.membership_pattern)
            out[name] = (float(weight), lambda mols, p=pattern: membership(mols, p))
        elif name in table:
            out[name] = (float(weight), table[name])
        else:
            raise ValueError(f"unknown reward metric {name!r}")
    return out


@dataclass
class EpisodeResult:
    grammar: Grammar
    trajectory: Trajectory
    metrics: dict[str, float]
    score: float
    failures: int
    reward: float = 0.0


@dataclass
class StepReport:
    episodes: list[EpisodeResult]
    rewards: list[float]
    grad_norm: float
    dropped: int


def _episode_seeds(seed, n: int):
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [tuple(child.spawn(2)) for child in root.spawn(n)]


def _run_episode(net, hs, seeds, cfg: TrainConfig, metrics):
    ep_seed, gen_seed = seeds
    grammar, traj = sample_episode(net, hs, ep_seed)
    mols, failures = generate_many(grammar, cfg.eval_generations, gen_seed, cfg.alpha, cfg.max_iterations)
    values = {}
    for name, (_, fn) in metrics.items():
        try:
            values[name] = float(fn(mols))
        except Exception as exc:  # any evaluator crash drops the episode
            raise MetricFailure(f"{name}: {exc}") from exc
    score = sum(w * values[name] for name, (w, _) in metrics.items())
    return EpisodeResult(grammar, traj, values, score, failures)


def _worker(args):
    net, hs, seeds, cfg, train = args
    try:
        return _run_episode(net, hs, seeds, cfg, reward_metrics(cfg, train))
    except MetricFailure as exc:
        return exc


def run_episodes(net: PotentialNet, hs, metrics, cfg: TrainConfig, seed, train=()):
    """``cfg.mc_samples`` independent episodes; returns results and the drop count."""
    seeds = _episode_seeds(seed, cfg.mc_samples)
    if cfg.threads > 1:
        jobs = [(net, hs, s, cfg, list(train)) for s in seeds]
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            raw = list(pool.map(_worker, jobs))
    else:
        raw = []
        for s in seeds:
            try:
                raw.append(_run_episode(net, hs, s, cfg, metrics))
            except MetricFailure as exc:
                raw.append(exc)
    results, dropped = [], 0
    for r in raw:
        if isinstance(r, MetricFailure):
            warnings.warn(f"episode dropped: {r}", RuntimeWarning, stacklevel=2)
            dropped += 1
        else:
            results.append(r)
    return results, dropped


def normalized_rewards(values: list[dict[str, float]], weights: dict[str, float]) -> np.ndarray:
    """``R_n = sum_i lambda_i (M_i(n) - mean_n M_i)``; identical columns give exact zeros."""
    n = len(values)
    out = np.zeros(n)
    for name, w in weights.items():
        col = np.array([v[name] for v in values], dtype=np.float64)
        if n and np.all(col == col[0]):
            continue
        out += w * (col - col.mean())
    return out


def reinforce_step(net: PotentialNet, dataset, metrics, cfg: TrainConfig, seed,
                   optimizer: Adam | None = None, train=()):
    """One gradient-ascent update from ``cfg.mc_samples`` fresh episodes.

    ``metrics`` maps a name to ``(weight, callable)``.  The update is skipped
    (parameters untouched) when every normalized reward is zero.
    """
    hs = as_hypergraphs(dataset)
    optimizer = optimizer or Adam(net.params, cfg.learning_rate)
    results, dropped = run_episodes(net, hs, metrics, cfg, seed, train)
    weights = {name: w for name, (w, _) in metrics.items()}
    rewards = normalized_rewards([r.metrics for r in results], weights)
    grads = [np.zeros_like(p) for p in net.params]
    for r, R in zip(results, rewards):
        r.reward = float(R)
        if R == 0.0:
            continue
        for acc, g in zip(grads, r.trajectory.grad_log_prob(net)):
            acc += R * g
    if results:
        for acc in grads:
            acc /= len(results)
    grad_norm = float(math.sqrt(sum(float(np.sum(g * g)) for g in grads)))
    if grad_norm > 0.0:
        optimizer.step(net.params, grads, ascent=True)
    return net, StepReport(results, rewards.tolist(), grad_norm, dropped)


@dataclass
class TrainResult:
    grammar: Grammar
    net: PotentialNet
    log: list[dict]
    best: EpisodeResult


def _summary(results: list[EpisodeResult], names) -> dict:
    out = {}
    for name in names:
        vals = [r.metrics[name] for r in results]
        out[name] = ({"mean": float(np.mean(vals)), "min": float(np.min(vals)), "max": float(np.max(vals))}
                     if vals else None)
    return out


def train(dataset, cfg: TrainConfig = TrainConfig(), metrics=None, log_path=None,
          on_episode=None) -> TrainResult:
    """Run ``cfg.epochs`` updates, then pick the best grammar from a final round.

    The final round samples ``cfg.mc_samples`` episodes with the trained net
    and returns the one with the highest raw weighted score, so
    ``epochs=0`` yields an untrained baseline.  ``on_episode(epoch, result)``
    sees every episode, including the final round's (epoch ``cfg.epochs + 1``).
    """
    hs = as_hypergraphs(dataset)
    if not hs:
        raise EmptyDataset("dataset contains no molecules")
    from ..hypergraph import to_molecule

    train_mols = [to_molecule(h) for h in hs]
    metrics = metrics if metrics is not None else reward_metrics(cfg, train_mols)
    names = list(metrics)
    root = np.random.SeedSequence(cfg.seed)
    net_seed, *epoch_seeds = root.spawn(cfg.epochs + 2)
    net = PotentialNet(cfg.feature_dim, tuple(cfg.hidden), int(net_seed.generate_state(1)[0]))
    opt = Adam(net.params, cfg.learning_rate)
    log: list[dict] = []
    fh = open(log_path, "w") if log_path else None

    def emit(rec):
        log.append(rec)
        if fh:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
            fh.flush()

    try:
        for epoch in range(1, cfg.epochs + 1):
            t0 = time.perf_counter()
            _, report = reinforce_step(net, hs, metrics, cfg, epoch_seeds[epoch - 1], opt, train_mols)
            if on_episode:
                for r in report.episodes:
                    on_episode(epoch, r)
            rec = {"epoch": epoch, "phase": "train", "metrics": _summary(report.episodes, names),
                   "score_max": max((r.score for r in report.episodes), default=None),
                   "grad_norm": report.grad_norm, "episodes": len(report.episodes),
                   "dropped": report.dropped,
                   "generation_failures": sum(r.failures for r in report.episodes)}
            if cfg.log_timing:
                rec["wall_ms"] = round(1000 * (time.perf_counter() - t0), 1)
            emit(rec)
        t0 = time.perf_counter()
        results, dropped = run_episodes(net, hs, metrics, cfg, epoch_seeds[-1], train_mols)
        if not results:
            raise MetricFailure("every final-round episode failed its metrics")
        if on_episode:
            for r in results:
                on_episode(cfg.epochs + 1, r)
        best = max(results, key=lambda r: r.score)  # first maximum on ties
        rec = {"epoch": cfg.epochs, "phase": "select", "metrics": _summary(results, names),
               "score_max": best.score, "grad_norm": None, "episodes": len(results),
               "dropped": dropped, "generation_failures": sum(r.failures for r in results)}
        if cfg.log_timing:
            rec["wall_ms"] = round(1000 * (time.perf_counter() - t0), 1)
        emit(rec)
    finally:
        if fh:
            fh.close()
    return TrainResult(best.grammar, net, log, best)
