"""Ring-aware molecular hypergraphs and node-set contraction.

Every non-ring bond becomes a 2-node ``bond`` hyperedge and every SSSR
ring one ``ring`` hyperedge over its atoms in traversal order.  Ring edges
keep their positional node tuple through contractions: positions whose
atom was absorbed into a non-terminal point at that non-terminal, so one
non-terminal may occupy several positions of a straddling ring edge.

Each position also carries a tag.  Terminal positions use tag 0; a
position pointing at a non-terminal uses a tag naming the absorbed atom
it stands for, so positions of different edges that denote the same
atom share ``(node, tag)``.  This pair is called a position class; the
hypergraph remembers the element and charge behind every class of a
non-terminal in ``class_sigs``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .errors import InvalidComponent, NonTerminalPresent, ValenceError
from .molgraph import AROMATIC, Atom, Bond, MolGraph, sssr

BOND, RING = "bond", "ring"
_ORDER_CHAR = {1: "-", 2: "=", 3: "#", 4: ":"}


@dataclass(frozen=True)
class Hyperedge:
    kind: str
    nodes: tuple[int, ...]
    orders: tuple[int, ...]
    tags: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.tags:
            object.__setattr__(self, "tags", (0,) * len(self.nodes))
        elif len(self.tags) != len(self.nodes):
            raise ValueError("one tag per position is required")
        if self.kind == BOND:
            if len(self.nodes) != 2 or len(self.orders) != 1:
                raise ValueError("bond hyperedges join exactly two nodes with one order")
        elif self.kind == RING:
            if len(self.nodes) < 3 or len(self.orders) != len(self.nodes):
                raise ValueError("ring label length must equal the ring size")
        else:
            raise ValueError(f"unknown hyperedge kind {self.kind!r}")

    @property
    def size(self) -> int:
        return len(self.nodes)

    @cached_property
    def members(self) -> tuple[int, ...]:
        return tuple(dict.fromkeys(self.nodes))

    def position_class(self, j: int) -> tuple[int, int]:
        return self.nodes[j], self.tags[j]

    @property
    def arity(self) -> int:
        return len(self.members)

    @property
    def aromatic(self) -> bool:
        return self.kind == RING and all(o == AROMATIC for o in self.orders)

    def label(self) -> str:
        if self.kind == BOND:
            return f"Bond({_ORDER_CHAR[self.orders[0]]})"
        return f"Ring({''.join(_ORDER_CHAR[o] for o in self.orders)}{',arom' if self.aromatic else ''})"

    def bond_pairs(self) -> list[tuple[int, int, int]]:
        """(node, node, order) for each bond the edge stands for."""
        if self.kind == BOND:
            return [(self.nodes[0], self.nodes[1], self.orders[0])]
        k = len(self.nodes)
        return [(self.nodes[i], self.nodes[(i + 1) % k], self.orders[i]) for i in range(k)]

    def replace(self, mapping: Mapping[int, int]) -> Hyperedge:
        return Hyperedge(self.kind, tuple(mapping.get(v, v) for v in self.nodes), self.orders, self.tags)


@dataclass(frozen=True, eq=False)
class MolHypergraph:
    """Nodes map id -> :class:`Atom` (terminal) or ``None`` (non-terminal)."""

    nodes: Mapping[int, Atom | None]
    edges: Mapping[int, Hyperedge]
    origin: str = ""
    next_id: int = field(default=-1)
    class_sigs: Mapping[tuple[int, int], tuple] = field(default_factory=dict)

    def __post_init__(self):
        if self.next_id < 0:
            object.__setattr__(self, "next_id", max(self.nodes, default=-1) + 1)

    @cached_property
    def incidence(self) -> dict[int, tuple[int, ...]]:
        inc: dict[int, list[int]] = {v: [] for v in self.nodes}
        for eid in sorted(self.edges):
            for v in self.edges[eid].members:
                inc[v].append(eid)
        return {v: tuple(es) for v, es in inc.items()}

    def position_signature(self, v: int, tag: int) -> tuple:
        """``("T", element, charge)`` of the atom a position class stands for."""
        a = self.nodes[v]
        return a.signature if a is not None else self.class_sigs[(v, tag)]

    def is_terminal(self, v: int) -> bool:
        return self.nodes[v] is not None

    @property
    def nonterminals(self) -> list[int]:
        return sorted(v for v, a in self.nodes.items() if a is None)

    def neighbors(self, v: int) -> set[int]:
        out = set()
        for eid in self.incidence[v]:
            out.update(self.edges[eid].members)
        out.discard(v)
        return out

    def is_connected(self) -> bool:
        if not self.nodes:
            return True
        start = min(self.nodes)
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for u in self.neighbors(v):
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == len(self.nodes)

    def dump(self) -> str:
        """Debug listing: ``id kind label`` per node, ``id arity label nodes`` per edge."""
        lines = []
        for v in sorted(self.nodes):
            a = self.nodes[v]
            lines.append(f"{v} NT R*" if a is None else f"{v} T {a.label()}")
        for eid in sorted(self.edges):
            e = self.edges[eid]
            lines.append(f"{eid} {e.arity} {e.label()} {','.join(map(str, e.nodes))}")
        return "\n".join(lines)


def build_hypergraph(g: MolGraph, origin: str = "") -> MolHypergraph:
    """Lift a molecule: one ring edge per SSSR ring, one bond edge per non-ring bond."""
    nodes = {i: a for i, a in enumerate(g.atoms)}
    edges: dict[int, Hyperedge] = {}
    ring_bonds = g.ring_bonds
    for ring in sssr(g):
        k = len(ring)
        orders = tuple(g.bond_between(ring[i], ring[(i + 1) % k]).order for i in range(k))
        edges[len(edges)] = Hyperedge(RING, ring, orders)
    for bi, b in enumerate(g.bonds):
        if bi not in ring_bonds:
            edges[len(edges)] = Hyperedge(BOND, (b.a, b.b), (b.order,))
    return MolHypergraph(nodes, edges, origin)


def component_boundary(h: MolHypergraph, component: Iterable[int]):
    """Split edges touching ``component`` into internal and straddling ones.

    Returns ``(internal edge ids, straddling edge ids, anchor node ids)``;
    anchors are outside nodes reached through straddling edges, in
    first-seen order.
    """
    comp = set(component)
    internal, straddling, anchors = [], [], []
    seen_edges = set()
    for v in sorted(comp):
        for eid in h.incidence[v]:
            if eid in seen_edges:
                continue
            seen_edges.add(eid)
            e = h.edges[eid]
            outside = [u for u in e.members if u not in comp]
            if outside:
                straddling.append(eid)
                for u in outside:
                    if u not in anchors:
                        anchors.append(u)
            else:
                internal.append(eid)
    return sorted(internal), sorted(straddling), anchors


def check_component(h: MolHypergraph, component: Iterable[int], straddling=None) -> set[int]:
    comp = set(component)
    if not comp:
        raise InvalidComponent("empty component")
    missing = comp - set(h.nodes)
    if missing:
        raise InvalidComponent(f"unknown nodes {sorted(missing)}")
    _, strad, _ = component_boundary(h, comp)
    if straddling is not None and set(straddling) != set(strad):
        raise InvalidComponent(
            f"straddling edges {sorted(straddling)} do not match the component boundary {strad}")
    start = min(comp)
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for eid in h.incidence[v]:
            for u in h.edges[eid].members:
                if u in comp and u not in seen:
                    seen.add(u)
                    stack.append(u)
    if seen != comp:
        raise InvalidComponent("component is not connected")
    return comp


def contract_with_id(h: MolHypergraph, component: Iterable[int], straddling=None):
    """Like :func:`contract` but also returns the new non-terminal's id."""
    comp = check_component(h, component, straddling)
    internal, strad, _ = component_boundary(h, comp)
    nt = h.next_id
    nodes = {v: a for v, a in h.nodes.items() if v not in comp}
    nodes[nt] = None
    classes = absorbed_classes(h, comp, strad)
    drop, strad_set = set(internal), set(strad)
    sigs = {c: s for c, s in h.class_sigs.items() if c[0] not in comp}
    for c, tag in classes.items():
        sigs[(nt, tag)] = h.position_signature(*c)
    edges = {}
    for eid, e in h.edges.items():
        if eid in drop:
            continue
        if eid in strad_set:
            pos = [classes.get(c) for c in zip(e.nodes, e.tags)]
            e = Hyperedge(e.kind,
                          tuple(v if p is None else nt for v, p in zip(e.nodes, pos)),
                          e.orders,
                          tuple(t if p is None else p for t, p in zip(e.tags, pos)))
        edges[eid] = e
    return MolHypergraph(nodes, edges, h.origin, nt + 1, sigs), nt


def absorbed_classes(h: MolHypergraph, comp, straddling) -> dict[tuple[int, int], int]:
    """Tag given to each absorbed position class of the straddling edges."""
    found = set()
    for eid in straddling:
        e = h.edges[eid]
        for c in zip(e.nodes, e.tags):
            if c[0] in comp:
                found.add(c)
    return {c: i + 1 for i, c in enumerate(sorted(found))}


def contract(h: MolHypergraph, component: Iterable[int], straddling=None) -> MolHypergraph:
    """Replace a connected node set by one fresh non-terminal.

    Edges wholly inside the set disappear; straddling edges keep their
    label and have the absorbed positions re-pointed at the non-terminal.
    """
    return contract_with_id(h, component, straddling)[0]


def to_molecule(h: MolHypergraph) -> MolGraph:
    """Expand a terminal-only hypergraph back to a validated molecule."""
    if any(a is None for a in h.nodes.values()):
        raise NonTerminalPresent("hypergraph still contains non-terminal nodes")
    ids = sorted(h.nodes)
    index = {v: i for i, v in enumerate(ids)}
    bonds: dict[frozenset, int] = {}
    for eid in sorted(h.edges):
        for a, b, order in h.edges[eid].bond_pairs():
            if a == b:
                raise ValenceError(f"edge {eid} bonds node {a} to itself")
            key = frozenset((index[a], index[b]))
            if bonds.setdefault(key, order) != order:
                raise ValenceError(f"conflicting orders for bond {a}-{b}")
    out = [Bond(*sorted(k), o) for k, o in bonds.items()]
    return MolGraph([h.nodes[v] for v in ids], out)


def relabel(h: MolHypergraph, mapping: Mapping[int, int]) -> MolHypergraph:
    """Rename node ids (edge ids are kept)."""
    nodes = {mapping[v]: a for v, a in h.nodes.items()}
    edges = {eid: e.replace(mapping) for eid, e in h.edges.items()}  # tags travel with positions
    sigs = {(mapping[v], t): s for (v, t), s in h.class_sigs.items()}
    return MolHypergraph(nodes, edges, h.origin, class_sigs=sigs)
