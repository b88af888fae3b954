"""Command-line entry point: ``molgrammar <command> [flags]``.

Commands: train, generate, evaluate, rules, hgraph.  Every command accepts
``--config FILE`` with ``key = value`` lines (keys are flag names with
dashes or underscores); flags given on the command line win.

Exit codes: 0 success, 1 bad input or configuration, 2 internal error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

from .errors import MolGrammarError
from .grammar import generate_many, read_grammar, shared_rules, write_grammar
from .grammar.notation import describe_rule
from .hypergraph import build_hypergraph
from .learn import DEFAULT_LAMBDA, TrainConfig, train
from .metrics import (PATTERNS, chamfer, diversity, external_metric, get_pattern, membership,
                      mol_weight_stats, novelty, pattern_for_dataset, uniqueness, validity)
from .molgraph import canonical_key, load_dataset, parse_smiles
from .molgraph.dataset import dataset_text, read_dataset

DEFAULT_SEED = 0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def parse_metrics(text: str) -> dict[str, float]:
    """``"diversity:1,membership:2"`` -> ``{"diversity": 1.0, "membership": 2.0}``."""
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        name, sep, weight = item.partition(":")
        if not sep:
            raise UsageError(f"metric {item!r} needs a weight, as in name:weight")
        try:
            w = float(weight)
        except ValueError:
            raise UsageError(f"bad weight in {item!r}") from None
        if not math.isfinite(w):
            raise UsageError(f"weight in {item!r} must be finite")
        out[name.strip()] = w
    if not out:
        raise UsageError("no metrics given")
    return out


def read_config(path) -> dict[str, str]:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _dataset_name(spec: str) -> str:
    return spec.split(":", 1)[1] if spec.startswith("builtin:") else Path(spec).stem


# commands

def cmd_train(args) -> int:
    data = load_dataset(args.dataset)
    lam = parse_metrics(args.metrics)
    pattern = args.membership or pattern_for_dataset(_dataset_name(args.dataset))
    if "membership" in lam:
        if pattern is None:
            raise UsageError("membership reward needs --membership (available: "
                             + ", ".join(PATTERNS) + ")")
        get_pattern(pattern)
    cfg = TrainConfig(mc_samples=args.mc_samples, epochs=args.epochs, learning_rate=args.lr, lam=lam,
                      eval_generations=args.eval_generations, seed=args.seed, alpha=args.alpha,
                      max_iterations=args.max_iterations, membership_pattern=pattern,
                      threads=args.threads)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result = train(data, cfg, log_path=out / "train_log.jsonl")
    write_grammar(result.grammar, out / "grammar.json")
    result.net.save(out / "checkpoint.npz")
    final = result.log[-1]
    print(f"epochs {cfg.epochs}, selected grammar: {len(result.grammar.rules)} rules, "
          f"score {result.best.score:.4f}")
    for name, value in sorted(result.best.metrics.items()):
        print(f"  {name:<12} {value:.4f}")
    print(f"  final round: {final['episodes']} episodes, {final['generation_failures']} failed derivations")
    print(f"wrote {out / 'grammar.json'}, {out / 'checkpoint.npz'}, {out / 'train_log.jsonl'}")
    return 0


def cmd_generate(args) -> int:
    if args.n < 0:
        raise UsageError("-n must be non-negative")
    grammar = read_grammar(args.grammar)
    output = Path(args.output) if args.output else Path(args.out) / "generated.smi"
    output.parent.mkdir(parents=True, exist_ok=True)
    mols, failures = generate_many(grammar, args.n, args.seed, args.alpha, args.max_iterations) \
        if args.n else ([], 0)
    output.write_text("".join(canonical_key(m) + "\n" for m in mols))
    print(f"wrote {len(mols)} molecules to {output} ({failures} failed derivations skipped)",
          file=sys.stderr)
    if len(mols) < args.n:
        print(f"error: gave up after {failures} failed derivations", file=sys.stderr)
        return 1
    return 0


def _read_smiles_lines(path) -> list[str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    return [smi for _, smi in read_dataset(text, str(path))]


def _external_specs(items) -> list[tuple[str, str]]:
    out = []
    for item in items or ():
        name, sep, command = item.partition("=")
        if not sep or not name or not command:
            raise UsageError(f"--external expects name=command, got {item!r}")
        out.append((name, command))
    return out


def evaluate_files(generated, train_spec, pattern=None, externals=()) -> dict:
    """Compute the evaluation report for a SMILES file against a training set."""
    lines = _read_smiles_lines(generated)
    try:
        train_text, train_source = dataset_text(train_spec)
    except OSError as exc:
        raise UsageError(f"cannot read {train_spec}: {exc}") from exc
    train = [g for _, g in load_dataset(train_spec)]
    if pattern is None:
        pattern = pattern_for_dataset(_dataset_name(train_spec))
    else:
        get_pattern(pattern)
    mols = []
    for s in lines:
        try:
            mols.append(parse_smiles(s))
        except MolGrammarError:
            pass
    metrics: dict = {}

    def put(name, fn):
        try:
            metrics[name] = fn()
        except MolGrammarError as exc:
            metrics[name] = "error"
            metrics.setdefault("_errors", {})[name] = str(exc)

    put("validity", lambda: validity(lines))
    put("uniqueness", lambda: uniqueness(mols))
    put("novelty", lambda: novelty(mols, train))
    put("diversity", lambda: diversity(mols))
    put("chamfer", lambda: chamfer(mols, train))
    if pattern is not None:
        put("membership", lambda: membership(mols, pattern))
    put("mol_weight", lambda: mol_weight_stats(mols))
    for name, command in externals:
        put(f"external:{name}", lambda c=command: external_metric(mols, c)[1])
    header = {
        "generated": str(generated),
        "generated_sha256": _sha256(generated),
        "train": train_spec,
        "train_sha256": hashlib.sha256(train_text.encode()).hexdigest(),
        "train_source": train_source,
        "membership_pattern": pattern,
        "externals": [list(e) for e in externals],
        "n_generated_lines": len(lines),
        "n_parsed": len(mols),
        "n_train": len(train),
    }
    return {"header": header, "metrics": metrics}


def format_report(report: dict) -> str:
    rows = []
    for name, value in report["metrics"].items():
        if name == "_errors":
            continue
        if isinstance(value, dict):
            for k, v in value.items():
                rows.append((f"{name}.{k}", f"{v:.4f}"))
        elif isinstance(value, float):
            rows.append((name, f"{value:.4f}"))
        else:
            rows.append((name, str(value)))
    width = max(len(r[0]) for r in rows)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


def cmd_evaluate(args) -> int:
    if not Path(args.generated).is_file():
        raise UsageError(f"no such file: {args.generated}")
    report = evaluate_files(args.generated, args.train, args.membership, _external_specs(args.external))
    report["header"]["seed"] = args.seed
    out = Path(args.report) if args.report else Path(args.out) / "report.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(report, indent=1, sort_keys=True) + "\n")
    print(format_report(report))
    print(f"report: {out}")
    return 0


def cmd_rules(args) -> int:
    grammar = read_grammar(args.grammar)
    picked = shared_rules(grammar) if args.shared else grammar.rules
    index = {id(r): i for i, r in enumerate(grammar.rules)}
    for r in picked:
        print(describe_rule(index[id(r)], r))
    print(f"# {len(picked)} of {len(grammar.rules)} rules, total count {grammar.total_count()}")
    return 0


def cmd_hgraph(args) -> int:
    h = build_hypergraph(parse_smiles(args.smiles))
    print(f"# {len(h.nodes)} nodes, {len(h.edges)} edges")
    print(h.dump())
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key=value file; command-line flags take precedence")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out", default="out", help="output directory")

    parser = _Parser(prog="molgrammar", description="Learn, sample and inspect molecular graph grammars.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", parents=[common], help="learn a grammar from a dataset")
    p.add_argument("--dataset", required=True, help="SMILES file or builtin:<name>")
    p.add_argument("--metrics", default=",".join(f"{k}:{v:g}" for k, v in DEFAULT_LAMBDA.items()))
    p.add_argument("--membership", help="membership pattern id (defaults from the dataset name)")
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--mc-samples", type=int, default=5)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--eval-generations", type=int, default=200)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--max-iterations", type=int, default=100)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("generate", parents=[common], help="sample molecules from a grammar")
    p.add_argument("--grammar", required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--max-iterations", type=int, default=100)
    p.add_argument("--output", help="SMILES file (default <out>/generated.smi)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("evaluate", parents=[common], help="score generated molecules")
    p.add_argument("--generated", required=True)
    p.add_argument("--train", required=True, help="SMILES file or builtin:<name>")
    p.add_argument("--membership")
    p.add_argument("--external", action="append", metavar="NAME=COMMAND")
    p.add_argument("--report", help="JSON report path (default <out>/report.json)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("rules", parents=[common], help="print production rules")
    p.add_argument("--grammar", required=True)
    p.add_argument("--shared", action="store_true", help="only rules used by every molecule")
    p.set_defaults(func=cmd_rules)

    p = sub.add_parser("hgraph", parents=[common], help="dump the hypergraph of a molecule")
    p.add_argument("--smiles", required=True)
    p.set_defaults(func=cmd_hgraph)
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    commands = parser._subparsers._group_actions[0].choices
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    command = next((a for a in argv if a in commands), None)
    if known.config and command:
        conf = read_config(known.config)
        sub = commands[command]
        actions = {a.dest: a for a in sub._actions if a.dest not in ("help", "config")}
        unknown = sorted(set(conf) - set(actions))
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        defaults = {}
        for dest, value in conf.items():
            a = actions[dest]
            if isinstance(a, argparse._StoreTrueAction):
                defaults[dest] = value.lower() in ("1", "true", "yes")
            elif isinstance(a, argparse._AppendAction):
                defaults[dest] = [v.strip() for v in value.split(";") if v.strip()]
            else:
                try:
                    defaults[dest] = (a.type or str)(value)
                except ValueError:
                    raise UsageError(f"config key {dest}: bad value {value!r}") from None
            a.required = False
        sub.set_defaults(**defaults)
    args = parser.parse_args(argv)
    if args.threads < 1:
        raise UsageError("--threads must be at least 1")
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        return args.func(args)
    except (UsageError, MolGrammarError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # an invariant broke somewhere
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
