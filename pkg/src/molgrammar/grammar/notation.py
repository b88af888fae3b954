"""Anchored SMILES-like text for production rules.

Anchors print as ``[C:1]`` (atom-map style), non-terminals as ``[*]`` and
internal atoms as plain element symbols.  Ring hyperedges are written out as
their member bonds.  Example: an isocyanate cap reads ``[C:1]N=C=O``.
"""
from __future__ import annotations

from .rules import ProductionRule

_BOND = {1: "", 2: "=", 3: "#", 4: ":"}


def _label(rule: ProductionRule, v: int, anchor_no: dict[int, int]) -> str:
    atom = rule.rhs.nodes[v]
    if atom is None:
        return "[*]"
    charge = ""
    if atom.charge:
        charge = ("+" if atom.charge > 0 else "-") + (str(abs(atom.charge)) if abs(atom.charge) > 1 else "")
    if v in anchor_no:
        return f"[{atom.element}{charge}:{anchor_no[v]}]"
    return f"[{atom.element}{charge}]" if charge else atom.element


def rule_notation(rule: ProductionRule) -> str:
    rhs = rule.rhs
    anchor_no = {v: i + 1 for i, v in enumerate(sorted(rule.anchors))}
    adj: dict[int, dict[int, int]] = {v: {} for v in rhs.nodes}
    for eid in sorted(rhs.edges):
        for a, b, order in rhs.edges[eid].bond_pairs():
            if a != b:
                adj[a].setdefault(b, order)
                adj[b].setdefault(a, order)

    seen: set[int] = set()
    closures: dict[frozenset, int] = {}
    next_digit = [1]

    # first pass assigns ring-closure digits along the DFS tree
    def mark(v: int, parent: int | None) -> None:
        seen.add(v)
        for u in sorted(adj[v]):
            if u == parent:
                continue
            if u in seen:
                key = frozenset((u, v))
                if key not in closures:
                    closures[key] = next_digit[0]
                    next_digit[0] += 1
            else:
                mark(u, v)

    def write(v: int, parent: int | None, done: set[int]) -> str:
        done.add(v)
        text = _label(rule, v, anchor_no)
        for u in sorted(adj[v]):
            key = frozenset((u, v))
            if u != parent and key in closures:
                text += _BOND[adj[v][u]] + _digit(closures[key])
        children = [u for u in sorted(adj[v]) if u != parent and u not in done
                    and frozenset((u, v)) not in closures]
        for i, u in enumerate(children):
            branch = _BOND[adj[v][u]] + write(u, v, done)
            text += branch if i == len(children) - 1 else f"({branch})"
        return text

    parts = []
    done: set[int] = set()
    for v in sorted(rhs.nodes, key=lambda x: (x in rule.anchors, x)):
        if v not in seen:
            mark(v, None)
            parts.append(write(v, None, done))
    return ".".join(parts)


def _digit(d: int) -> str:
    return str(d) if d < 10 else f"%{d}"


def describe_rule(index: int, rule: ProductionRule) -> str:
    head = "X" if rule.is_initial else "R*"
    return f"p{index}\tcount={rule.count}\t{head} -> {rule_notation(rule)}"
