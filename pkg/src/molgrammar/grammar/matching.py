"""Left-hand-side matching and rule application."""
from __future__ import annotations

from dataclasses import dataclass

from ..errors import StaleMatch
from ..hypergraph import RING, Hyperedge, MolHypergraph
from .rules import STAR, ProductionRule

Cls = tuple[int, int]


@dataclass(frozen=True)
class Match:
    """A placement of a rule's left-hand side in a partial hypergraph.

    ``anchors`` pairs rule anchor ids with partial position classes;
    ``stars`` pairs the non-terminal's position tags with rule classes;
    ``edges`` records (pattern edge id, partial edge id, shift, direction)
    so that pattern position ``i`` lands on partial position
    ``shift + direction * i``.
    """

    nt: int
    anchors: tuple[tuple[int, Cls], ...]
    stars: tuple[tuple[int, Cls], ...]
    edges: tuple[tuple[int, int, int, int], ...]
    snapshot: tuple[tuple[int, tuple[int, ...], tuple[int, ...]], ...]

    @property
    def anchor_map(self) -> dict[int, Cls]:
        return dict(self.anchors)

    @property
    def star_map(self) -> dict[int, Cls]:
        return dict(self.stars)


def _alignments(p, q: Hyperedge, nt: int):
    k = len(p.slots)
    if q.kind == RING:
        options = [(s, d) for s in range(k) for d in (1, -1)]
    elif p.orders[0] != q.orders[0]:
        return
    else:
        options = [(0, 1), (1, 1)]
    for s, d in options:
        for i in range(k):
            j = (s + d * i) % k
            if (p.slots[i] == STAR) != (q.nodes[j] == nt):
                break
            # bond i joins positions i, i+1; it lands on bond j or j-1
            if q.kind == RING and p.orders[i] != (q.orders[j] if d == 1 else q.orders[(j - 1) % k]):
                break
        else:
            yield s, d


def site_profile(partial: MolHypergraph, nt: int) -> tuple:
    out = []
    for eid in partial.incidence[nt]:
        e = partial.edges[eid]
        out.append((e.kind, e.size, tuple(sorted(e.orders)), e.nodes.count(nt)))
    return tuple(sorted(out))


def match_at(partial: MolHypergraph, rule: ProductionRule, nt: int) -> list[Match]:
    """All matches of ``rule`` whose non-terminal is ``nt``."""
    if nt not in partial.nodes or partial.nodes[nt] is not None:
        return []
    incident = partial.incidence[nt]
    pattern = rule.lhs
    if len(incident) != len(pattern):
        return []
    if rule.is_initial:
        return [Match(nt, (), (), (), ())]
    if site_profile(partial, nt) != rule.profile:
        return []
    snapshot = tuple((eid, partial.edges[eid].nodes, partial.edges[eid].tags) for eid in incident)
    found: list[Match] = []
    amap: dict[int, Cls] = {}
    used: set[Cls] = set()
    smap: dict[int, Cls] = {}
    sinv: dict[Cls, int] = {}
    used_edges: set[int] = set()
    chosen: list[tuple[int, int, int, int]] = []

    def rec(i: int) -> None:
        if i == len(pattern):
            found.append(Match(nt, tuple(sorted(amap.items())), tuple(sorted(smap.items())),
                               tuple(chosen), snapshot))
            return
        p = pattern[i]
        k = len(p.slots)
        for qid in incident:
            if qid in used_edges:
                continue
            q = partial.edges[qid]
            if q.kind != p.kind or q.size != k:
                continue
            for s, d in _alignments(p, q, nt):
                added_a, added_s = [], []
                ok = True
                for idx in range(k):
                    j = (s + d * idx) % k
                    c = (q.nodes[j], q.tags[j])
                    slot = p.slots[idx]
                    if slot == STAR:
                        inner = p.inner[idx]
                        if partial.position_signature(*c) != rule.rhs.position_signature(*inner):
                            ok = False
                            break
                        if c[1] in smap or inner in sinv:
                            if smap.get(c[1]) != inner:
                                ok = False
                                break
                            continue
                        smap[c[1]] = inner
                        sinv[inner] = c[1]
                        added_s.append(c[1])
                    elif slot in amap:
                        if amap[slot] != c:
                            ok = False
                            break
                    elif c in used or partial.position_signature(*c) != rule.anchors[slot]:
                        ok = False
                        break
                    else:
                        amap[slot] = c
                        used.add(c)
                        added_a.append(slot)
                if ok:
                    used_edges.add(qid)
                    chosen.append((p.edge_id, qid, s, d))
                    rec(i + 1)
                    chosen.pop()
                    used_edges.discard(qid)
                for slot in added_a:
                    used.discard(amap.pop(slot))
                for tag in added_s:
                    del sinv[smap.pop(tag)]

    rec(0)
    return found


def match_sites(partial: MolHypergraph, rule: ProductionRule) -> list[Match]:
    """Every placement of ``rule`` over every non-terminal of ``partial``."""
    out = []
    for nt in partial.nonterminals:
        out.extend(match_at(partial, rule, nt))
    return out


def apply_rule_with_map(partial: MolHypergraph, rule: ProductionRule, m: Match):
    """Apply a match and return ``(new partial, rule internal id -> new node id)``."""
    if m.nt not in partial.nodes or partial.nodes[m.nt] is not None:
        raise StaleMatch(f"node {m.nt} is no longer a non-terminal")
    for eid, nodes, tags in m.snapshot:
        e = partial.edges.get(eid)
        if e is None or e.nodes != nodes or e.tags != tags:
            raise StaleMatch(f"edge {eid} changed since matching")
    if len(partial.incidence[m.nt]) != len(m.snapshot):
        raise StaleMatch("non-terminal gained edges since matching")
    for _, (v, _) in m.anchors:
        if v not in partial.nodes:
            raise StaleMatch(f"anchor node {v} vanished")
    fresh = {v: partial.next_id + i for i, v in enumerate(rule.internals)}
    nodes = {v: a for v, a in partial.nodes.items() if v != m.nt}
    sigs = {c: s for c, s in partial.class_sigs.items() if c[0] != m.nt}
    for (u, t), s in rule.rhs.class_sigs.items():
        sigs[(fresh[u], t)] = s
    for v, new in fresh.items():
        nodes[new] = rule.rhs.nodes[v]
    matched = {q for _, q, _, _ in m.edges}
    edges = {eid: e for eid, e in partial.edges.items() if eid not in matched}
    for p_id, q_id, s, d in m.edges:
        q = partial.edges[q_id]
        p = rule.rhs.edges[p_id]
        k = q.size
        new_nodes, new_tags = list(q.nodes), list(q.tags)
        for j in range(k):
            if q.nodes[j] == m.nt:
                i = (d * (j - s)) % k
                new_nodes[j] = fresh[p.nodes[i]]
                new_tags[j] = p.tags[i]
        edges[q_id] = Hyperedge(q.kind, tuple(new_nodes), q.orders, tuple(new_tags))
    next_edge = max(partial.edges, default=-1) + 1
    for eid in sorted(rule.rhs.edges):
        e = rule.rhs.edges[eid]
        if all(v in fresh for v in e.members):
            edges[next_edge] = e.replace(fresh)
            next_edge += 1
    out = MolHypergraph(nodes, edges, partial.origin, partial.next_id + len(fresh), sigs)
    return out, fresh


def apply_rule(partial: MolHypergraph, rule: ProductionRule, m: Match) -> MolHypergraph:
    """Replace the matched non-terminal by the rule's right-hand side."""
    return apply_rule_with_map(partial, rule, m)[0]
