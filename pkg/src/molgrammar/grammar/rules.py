"""Production rules built from contraction steps."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from ..hypergraph import BOND, RING, Hyperedge, MolHypergraph, check_component, component_boundary
from ..molgraph import Atom
from ..molgraph.canon import canonical_labeling, certificate_string

STAR = -1  # pattern position occupied by the rule's own non-terminal


def _atom_label(atom: Atom | None) -> str:
    if atom is None:
        return "NT"
    h = "" if atom.explicit_h is None else str(atom.explicit_h)
    return f"{atom.element}|{atom.charge}|{int(atom.aromatic)}|{h}"


def _sig_label(sig: tuple) -> str:
    return f"{sig[1]}|{sig[2]}"


@dataclass(frozen=True)
class EdgePattern:
    """One left-hand-side edge: ``slots`` hold STAR or a rule anchor id.

    ``inner`` gives, for STAR positions, the rhs position class that the
    position turns into (``None`` elsewhere).
    """

    edge_id: int
    kind: str
    slots: tuple[int, ...]
    orders: tuple[int, ...]
    inner: tuple[tuple[int, int] | None, ...]


@dataclass(frozen=True, eq=False)
class ProductionRule:
    """``LHS -> RHS`` with anchors shared by both sides.

    ``rhs`` holds internal nodes and anchor nodes; ``anchors`` maps the
    anchor ids of ``rhs`` to their required signature, the element and
    charge of the atom the anchor stands for.  An anchor matches a position
    class denoting such an atom whether or not that atom has been expanded
    yet, so applicability does not depend on expansion order.  The left-hand side
    is implied: the rule's non-terminal plus every rhs edge that touches
    an anchor, with internal positions collapsed onto the non-terminal.
    """

    rhs: MolHypergraph
    anchors: Mapping[int, tuple]
    is_initial: bool
    count: int = field(default=1, compare=False)

    def __post_init__(self):
        if self.is_initial and self.anchors:
            raise ValueError("initial rules cannot have anchors")

    @cached_property
    def internals(self) -> tuple[int, ...]:
        return tuple(v for v in sorted(self.rhs.nodes) if v not in self.anchors)

    @cached_property
    def terminal_only(self) -> bool:
        """``x_r``: no non-terminal among the right-hand side's new nodes."""
        return all(self.rhs.nodes[v] is not None for v in self.internals)

    @cached_property
    def lhs(self) -> tuple[EdgePattern, ...]:
        out = []
        for eid in sorted(self.rhs.edges):
            e = self.rhs.edges[eid]
            if not any(v in self.anchors for v in e.members):
                continue
            slots = tuple(v if v in self.anchors else STAR for v in e.nodes)
            inner = tuple(None if v in self.anchors else (v, t) for v, t in zip(e.nodes, e.tags))
            out.append(EdgePattern(eid, e.kind, slots, e.orders, inner))
        return tuple(out)

    @cached_property
    def profile(self) -> tuple:
        return tuple(sorted(
            (p.kind, len(p.slots), tuple(sorted(p.orders)), p.slots.count(STAR)) for p in self.lhs
        ))

    @cached_property
    def key(self) -> str:
        return rule_key(self)

    def with_count(self, count: int) -> ProductionRule:
        return ProductionRule(self.rhs, self.anchors, self.is_initial, count)


def _incidence_graph(rhs: MolHypergraph, anchors: Mapping[int, tuple]):
    """Plain labeled graph whose isomorphisms are the anchored-rule isomorphisms.

    Positions on internal non-terminals go through one vertex per position
    class so that coincident positions stay coincident.
    """
    labels: list[str] = []
    vid: dict[int, int] = {}
    for v in sorted(rhs.nodes):
        vid[v] = len(labels)
        labels.append("A:" + _sig_label(anchors[v]) if v in anchors else "I:" + _atom_label(rhs.nodes[v]))
    edges = []
    class_vertex: dict[tuple[int, int], int] = {}

    def endpoint(v: int, tag: int) -> int:
        if v in anchors or rhs.nodes[v] is not None:
            return vid[v]
        c = (v, tag)
        if c not in class_vertex:
            class_vertex[c] = len(labels)
            labels.append("C:" + _sig_label(rhs.class_sigs[c]))
            edges.append((class_vertex[c], vid[v], "c"))
        return class_vertex[c]

    edge_vertices: dict[int, list[int]] = {}
    for eid in sorted(rhs.edges):
        e = rhs.edges[eid]
        if e.kind == BOND:
            x = len(labels)
            labels.append(f"B:{e.orders[0]}")
            edges.append((x, endpoint(e.nodes[0], e.tags[0]), "m"))
            edges.append((x, endpoint(e.nodes[1], e.tags[1]), "m"))
            edge_vertices[eid] = [x]
        else:
            k = len(e.nodes)
            pos = list(range(len(labels), len(labels) + k))
            labels.extend(["P"] * k)
            for i in range(k):
                edges.append((pos[i], endpoint(e.nodes[i], e.tags[i]), "m"))
                edges.append((pos[i], pos[(i + 1) % k], f"r{e.orders[i]}"))
            edge_vertices[eid] = pos
    return labels, edges, vid, edge_vertices, class_vertex


def canonicalize_rule(rhs: MolHypergraph, anchors: Mapping[int, tuple], is_initial: bool):
    """Return ``(key, canonical rhs, canonical anchors, node map, class map)``.

    The canonical rhs numbers nodes and edges by canonical rank, numbers
    the position classes of each internal non-terminal from 1 and writes
    each ring starting at its lowest-ranked position.  The maps send input
    node ids (and input position classes) to canonical ones.
    """
    labels, edges, vid, edge_vertices, class_vertex = _incidence_graph(rhs, anchors)
    cert, order = canonical_labeling(labels, edges)
    key = ("X|" if is_initial else "R|") + certificate_string(cert)
    node_ids = sorted(rhs.nodes, key=lambda v: order[vid[v]])
    nmap = {v: i for i, v in enumerate(node_ids)}
    cmap: dict[tuple[int, int], tuple[int, int]] = {}
    for v in rhs.nodes:
        if v not in anchors and rhs.nodes[v] is not None:
            cmap[(v, 0)] = (nmap[v], 0)
    per_node: dict[int, list] = {}
    for c in sorted(class_vertex, key=lambda c: order[class_vertex[c]]):
        per_node.setdefault(c[0], []).append(c)
    for v, cs in per_node.items():
        for i, c in enumerate(cs):
            cmap[c] = (nmap[v], i + 1)

    def canon_tag(v: int, t: int) -> int:
        return cmap[(v, t)][1] if (v, t) in cmap else 0

    edge_ids = sorted(rhs.edges, key=lambda e: min(order[x] for x in edge_vertices[e]))
    new_edges = {}
    for new_id, eid in enumerate(edge_ids):
        e = rhs.edges[eid]
        if e.kind == RING:
            pos = edge_vertices[eid]
            k = len(pos)
            start = min(range(k), key=lambda i: order[pos[i]])
            step = 1 if order[pos[(start + 1) % k]] < order[pos[(start - 1) % k]] else -1
            idx = [(start + step * i) % k for i in range(k)]
            if step == 1:
                orders = tuple(e.orders[i] for i in idx)
            else:
                orders = tuple(e.orders[(i - 1) % k] for i in idx)
        else:
            ends = sorted(range(2), key=lambda j: (nmap[e.nodes[j]], canon_tag(e.nodes[j], e.tags[j])))
            idx, orders = ends, e.orders
        nodes = tuple(nmap[e.nodes[i]] for i in idx)
        tags = tuple(canon_tag(e.nodes[i], e.tags[i]) for i in idx)
        new_edges[new_id] = Hyperedge(e.kind, nodes, orders, tags)
    new_nodes = {nmap[v]: rhs.nodes[v] for v in rhs.nodes}
    new_anchors = {nmap[v]: s for v, s in anchors.items()}
    sigs = {cmap[c]: rhs.class_sigs[c] for c in class_vertex}
    return key, MolHypergraph(new_nodes, new_edges, class_sigs=sigs), new_anchors, nmap, cmap


def rule_key(rule: ProductionRule) -> str:
    """Canonical text of (anchor pattern, anchored rhs graph, is_initial)."""
    return canonicalize_rule(rule.rhs, rule.anchors, rule.is_initial)[0]


@dataclass(frozen=True)
class RuleMaps:
    """Where the pieces of the contracted hypergraph went in the canonical rule.

    ``classes`` maps component position classes ``(node, tag)`` to rule
    classes; ``anchors`` maps outside position classes to anchor ids.
    """

    nodes: dict[int, int]
    classes: dict[tuple[int, int], tuple[int, int]]
    anchors: dict[tuple[int, int], int]


def make_rule_with_map(h: MolHypergraph, component: Iterable[int], straddling=None):
    """Build the rule for contracting ``component`` plus its :class:`RuleMaps`."""
    comp = check_component(h, component, straddling)
    internal, strad, _ = component_boundary(h, comp)
    is_initial = len(comp) == len(h.nodes)
    nodes: dict[int, Atom | None] = {v: h.nodes[v] for v in comp}
    anchors: dict[int, tuple] = {}
    anchor_of: dict[tuple[int, int], int] = {}
    fresh = h.next_id
    edges = {eid: h.edges[eid] for eid in internal}
    for eid in strad:
        e = h.edges[eid]
        new_nodes, new_tags = [], []
        for v, t in zip(e.nodes, e.tags):
            if v in comp:
                new_nodes.append(v)
                new_tags.append(t)
                continue
            if (v, t) not in anchor_of:
                sig = h.position_signature(v, t)
                anchor_of[(v, t)] = fresh
                # anchors keep only what the left-hand side tests
                nodes[fresh] = Atom(sig[1], sig[2])
                anchors[fresh] = sig
                fresh += 1
            new_nodes.append(anchor_of[(v, t)])
            new_tags.append(0)
        edges[eid] = Hyperedge(e.kind, tuple(new_nodes), e.orders, tuple(new_tags))
    sigs = {c: sg for c, sg in h.class_sigs.items() if c[0] in comp}
    rhs = MolHypergraph(nodes, edges, h.origin, class_sigs=sigs)
    key, crhs, canchors, nmap, cmap = canonicalize_rule(rhs, anchors, is_initial)
    rule = ProductionRule(crhs, canchors, is_initial)
    rule.__dict__["key"] = key
    maps = RuleMaps(
        {v: nmap[v] for v in comp},
        {c: cmap[c] for c in cmap},
        {c: nmap[a] for c, a in anchor_of.items()},
    )
    return rule, maps


def make_rule(h: MolHypergraph, component: Iterable[int], straddling=None) -> ProductionRule:
    """Rule whose rhs is the component plus its anchors and connecting edges.

    Every outside position class reached by a straddling edge becomes its
    own anchor.  When the component covers the whole hypergraph the rule
    is initial (its left-hand side is the start symbol).
    """
    return make_rule_with_map(h, component, straddling)[0]
