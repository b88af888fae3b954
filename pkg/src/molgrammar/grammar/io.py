"""JSON grammar files."""
from __future__ import annotations

import json
from pathlib import Path

from ..errors import GrammarFormatError
from ..hypergraph import Hyperedge, MolHypergraph
from ..molgraph import Atom
from .rules import ProductionRule, rule_key
from .store import DerivationStep, Grammar

FORMAT_VERSION = 1


def _node_json(v: int, atom: Atom | None, anchor: bool) -> dict:
    if atom is None:
        return {"id": v, "kind": "N", "anchor": anchor}
    return {"id": v, "kind": "T", "anchor": anchor, "element": atom.element, "charge": atom.charge,
            "aromatic": atom.aromatic, "explicit_h": atom.explicit_h}


def rule_to_json(r: ProductionRule) -> dict:
    rhs = r.rhs
    return {
        "key": r.key,
        "is_initial": r.is_initial,
        "count": r.count,
        "anchors": sorted(r.anchors),
        "rhs": {
            "nodes": [_node_json(v, rhs.nodes[v], v in r.anchors) for v in sorted(rhs.nodes)],
            "edges": [
                {"id": eid, "kind": e.kind, "nodes": list(e.nodes), "orders": list(e.orders),
                 "tags": list(e.tags)}
                for eid, e in sorted(rhs.edges.items())
            ],
            "classes": [[v, t, s[1], s[2]] for (v, t), s in sorted(rhs.class_sigs.items())],
        },
    }


def grammar_to_json(g: Grammar) -> dict:
    return {
        "version": FORMAT_VERSION,
        "rules": [rule_to_json(r) for r in g.rules],
        "provenance": {k: list(v) for k, v in g.provenance.items()},
        "derivations": {
            k: [
                {"rule": s.rule,
                 "target": None if s.target is None else list(s.target),
                 "anchors": [[a, list(ref)] for a, ref in s.anchors],
                 "stars": [[t, list(c)] for t, c in s.stars]}
                for s in steps
            ]
            for k, steps in g.derivations.items()
        },
    }


def dumps(g: Grammar) -> str:
    return json.dumps(grammar_to_json(g), indent=1) + "\n"


def write_grammar(g: Grammar, path) -> None:
    Path(path).write_text(dumps(g))


def _rule_from_json(d: dict) -> ProductionRule:
    nodes, anchors = {}, {}
    for n in d["rhs"]["nodes"]:
        v = int(n["id"])
        if n["kind"] == "N":
            atom = None
        elif n["kind"] == "T":
            atom = Atom(str(n["element"]), int(n["charge"]), bool(n.get("aromatic", False)),
                        None if n.get("explicit_h") is None else int(n["explicit_h"]))
        else:
            raise GrammarFormatError(f"unknown node kind {n['kind']!r}")
        nodes[v] = atom
        if n.get("anchor"):
            if atom is None:
                raise GrammarFormatError(f"anchor {v} must name an element")
            anchors[v] = atom.signature
    if sorted(anchors) != sorted(int(a) for a in d["anchors"]):
        raise GrammarFormatError("anchor list disagrees with rhs node marks")
    edges = {}
    for e in d["rhs"]["edges"]:
        nodes_e = tuple(int(x) for x in e["nodes"])
        if any(x not in nodes for x in nodes_e):
            raise GrammarFormatError(f"edge {e['id']} refers to an unknown node")
        edges[int(e["id"])] = Hyperedge(str(e["kind"]), nodes_e, tuple(int(x) for x in e["orders"]),
                                        tuple(int(x) for x in e.get("tags", ())))
    sigs = {}
    for v, t, element, charge in d["rhs"].get("classes", []):
        if nodes.get(int(v), 0) is not None:
            raise GrammarFormatError(f"class ({v}, {t}) is not on a non-terminal")
        sigs[(int(v), int(t))] = ("T", str(element), int(charge))
    rule = ProductionRule(MolHypergraph(nodes, edges, class_sigs=sigs), anchors, bool(d["is_initial"]), int(d["count"]))
    if rule_key(rule) != d["key"]:
        raise GrammarFormatError("stored rule key does not match the rule body")
    return rule


def grammar_from_json(data) -> Grammar:
    try:
        if not isinstance(data, dict) or data.get("version") != FORMAT_VERSION:
            raise GrammarFormatError("missing or unsupported grammar file version")
        rules = [_rule_from_json(r) for r in data["rules"]]
        if not rules:
            raise GrammarFormatError("grammar has no rules")
        provenance = {str(k): [int(i) for i in v] for k, v in data.get("provenance", {}).items()}
        derivations = {}
        for k, steps in data.get("derivations", {}).items():
            derivations[str(k)] = [
                DerivationStep(
                    int(s["rule"]),
                    None if s["target"] is None else tuple(int(x) for x in s["target"]),
                    tuple((int(a), tuple(int(x) for x in ref)) for a, ref in s["anchors"]),
                    tuple((int(t), tuple(int(x) for x in c)) for t, c in s.get("stars", [])),
                )
                for s in steps
            ]
    except GrammarFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise GrammarFormatError(f"malformed grammar file: {exc}") from exc
    for ids in provenance.values():
        if any(not 0 <= i < len(rules) for i in ids):
            raise GrammarFormatError("provenance refers to an unknown rule")
    return Grammar(rules, provenance, derivations)


def loads(text: str) -> Grammar:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GrammarFormatError(f"not a grammar file: {exc}") from exc
    return grammar_from_json(data)


def read_grammar(path) -> Grammar:
    return loads(Path(path).read_text())
