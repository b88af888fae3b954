"""Atom/bond containers, the valence model and kekulization."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from ..errors import ValenceError

SINGLE, DOUBLE, TRIPLE, AROMATIC = 1, 2, 3, 4
BOND_ORDERS = (SINGLE, DOUBLE, TRIPLE, AROMATIC)

ELEMENTS = ("H", "B", "C", "N", "O", "F", "Si", "P", "S", "Cl", "Br", "I")
ATOMIC_NUMBER = {"H": 1, "B": 5, "C": 6, "N": 7, "O": 8, "F": 9, "Si": 14,
                 "P": 15, "S": 16, "Cl": 17, "Br": 35, "I": 53}
# IUPAC standard atomic weights (conventional values)
ATOMIC_WEIGHT = {"H": 1.008, "B": 10.81, "C": 12.011, "N": 14.007, "O": 15.999,
                 "F": 18.998, "Si": 28.085, "P": 30.974, "S": 32.06,
                 "Cl": 35.45, "Br": 79.904, "I": 126.904}

# Isoelectronic rows: a charge q shifts an element -q places along its row,
# e.g. N+ takes the valences of C and O- those of F.
_ROWS = (
    (("B", (3,)), ("C", (4,)), ("N", (3,)), ("O", (2,)), ("F", (1,)), ("Ne", (0,))),
    (("Al", (3,)), ("Si", (4,)), ("P", (3, 5)), ("S", (2, 4, 6)), ("Cl", (1,)), ("Ar", (0,))),
)
_HALOGEN_ROW = (("Se", (2,)), ("X", (1,)), ("Kr", (0,)))


def allowed_valences(element: str, charge: int = 0) -> tuple[int, ...]:
    """Allowed total valences (bond orders + hydrogens) for an atom."""
    if element == "H":
        return (1,) if charge == 0 else (0,)
    if element in ("Br", "I"):
        row, pos = _HALOGEN_ROW, 1
    else:
        for row in _ROWS:
            names = [name for name, _ in row]
            if element in names:
                pos = names.index(element)
                break
        else:
            raise ValenceError(f"unsupported element {element!r}")
    shifted = pos - charge
    if not 0 <= shifted < len(row):
        return ()
    return row[shifted][1]


@dataclass(frozen=True)
class Atom:
    element: str
    charge: int = 0
    aromatic: bool = False
    explicit_h: int | None = None

    @property
    def signature(self) -> tuple:
        """Label used when atoms act as grammar anchors."""
        return ("T", self.element, self.charge)

    def label(self) -> str:
        h = "" if self.explicit_h is None else f"H{self.explicit_h}"
        charge = f"{self.charge:+d}" if self.charge else ""
        return f"{self.element}{'a' if self.aromatic else ''}{h}{charge}"


@dataclass(frozen=True)
class Bond:
    a: int
    b: int
    order: int

    @property
    def endpoints(self) -> frozenset[int]:
        return frozenset((self.a, self.b))


class MolGraph:
    """Connected molecular graph with implicit hydrogens.

    Construction validates connectivity and valences, kekulizes aromatic
    systems and infers hydrogen counts.  Instances are immutable.
    """

    def __init__(self, atoms: Sequence[Atom], bonds: Iterable[Bond]):
        self.atoms: tuple[Atom, ...] = tuple(atoms)
        self.bonds: tuple[Bond, ...] = tuple(bonds)
        n = len(self.atoms)
        if n == 0:
            raise ValenceError("molecule has no atoms")
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        seen = set()
        for i, bond in enumerate(self.bonds):
            if bond.a == bond.b or not (0 <= bond.a < n and 0 <= bond.b < n):
                raise ValenceError(f"bad bond endpoints {bond.a}-{bond.b}")
            if bond.order not in BOND_ORDERS:
                raise ValenceError(f"bad bond order {bond.order}")
            key = bond.endpoints
            if key in seen:
                raise ValenceError(f"duplicate bond {bond.a}-{bond.b}")
            seen.add(key)
            adj[bond.a].append((bond.b, i))
            adj[bond.b].append((bond.a, i))
        self._adj = tuple(tuple(x) for x in adj)
        if not _connected(self._adj):
            raise ValenceError("molecule is not connected")
        for atom in self.atoms:
            allowed_valences(atom.element, atom.charge)  # rejects unknown elements
        self.kekule = kekulize(self.atoms, self.bonds, self._adj)
        self.hcounts = _assign_hydrogens(self.atoms, self.kekule, self._adj)

    def __len__(self) -> int:
        return len(self.atoms)

    def __repr__(self) -> str:
        from .smiles import write_smiles

        return f"MolGraph({write_smiles(self)!r})"

    def neighbors(self, i: int) -> tuple[tuple[int, int], ...]:
        """(neighbor atom, bond index) pairs of atom ``i``."""
        return self._adj[i]

    def degree(self, i: int) -> int:
        return len(self._adj[i])

    def bond_between(self, i: int, j: int) -> Bond | None:
        for k, bi in self._adj[i]:
            if k == j:
                return self.bonds[bi]
        return None

    @cached_property
    def ring_bonds(self) -> frozenset[int]:
        """Indices of bonds lying on a cycle (non-bridges)."""
        return frozenset(range(len(self.bonds))) - _bridges(self._adj, len(self.bonds))

    @cached_property
    def ring_atoms(self) -> frozenset[int]:
        out = set()
        for bi in self.ring_bonds:
            out.add(self.bonds[bi].a)
            out.add(self.bonds[bi].b)
        return frozenset(out)

    def relabel(self, perm: Sequence[int]) -> MolGraph:
        """Return the graph with atom ``i`` moved to position ``perm[i]``."""
        atoms = [None] * len(self.atoms)
        for i, p in enumerate(perm):
            atoms[p] = self.atoms[i]
        bonds = [Bond(perm[b.a], perm[b.b], b.order) for b in self.bonds]
        return MolGraph(atoms, bonds)


def _connected(adj) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for u, _ in adj[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == len(adj)


def _bridges(adj, nbonds: int) -> frozenset[int]:
    n = len(adj)
    disc = [-1] * n
    low = [0] * n
    out = set()
    timer = 0
    for root in range(n):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = timer
        timer += 1
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            v, parent_bond, it = stack[-1]
            advanced = False
            for u, bi in it:
                if bi == parent_bond:
                    continue
                if disc[u] == -1:
                    disc[u] = low[u] = timer
                    timer += 1
                    stack.append((u, bi, iter(adj[u])))
                    advanced = True
                    break
                low[v] = min(low[v], disc[u])
            if not advanced:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[v])
                    if low[v] > disc[p]:
                        out.add(parent_bond)
    return frozenset(out)


def _plain_sum(atom_idx, bonds, adj, aromatic_as=1) -> int:
    total = 0
    for _, bi in adj[atom_idx]:
        o = bonds[bi].order
        total += aromatic_as if o == AROMATIC else o
    return total


def kekulize(atoms, bonds, adj) -> tuple[int, ...]:
    """Assign single/double orders to aromatic bonds.

    Every aromatic atom whose valence leaves room for one more bond must
    receive exactly one double bond from its aromatic neighbours; the
    assignment is an exact perfect matching found by backtracking.
    """
    orders = [b.order for b in bonds]
    arom_bonds = [i for i, b in enumerate(bonds) if b.order == AROMATIC]
    if not arom_bonds:
        return tuple(orders)
    for i in arom_bonds:
        b = bonds[i]
        if not (atoms[b.a].aromatic and atoms[b.b].aromatic):
            raise ValenceError("aromatic bond attached to a non-aromatic atom")
    needs = set()
    for i, atom in enumerate(atoms):
        if not atom.aromatic:
            continue
        s = _plain_sum(i, bonds, adj) + (atom.explicit_h or 0)
        target = _lowest_at_least(atom, s)
        if target is None:
            raise ValenceError(f"atom {i} ({atom.element}) exceeds its valence")
        if target - s >= 1:
            needs.add(i)
    partners = {
        i: [(u, bi) for u, bi in adj[i] if bonds[bi].order == AROMATIC and u in needs]
        for i in needs
    }
    matched: dict[int, int] = {}

    def solve() -> bool:
        free = [i for i in needs if i not in matched]
        if not free:
            return True
        best = None
        best_opts = None
        for i in sorted(free):
            opts = [(u, bi) for u, bi in partners[i] if u not in matched]
            if best_opts is None or len(opts) < len(best_opts):
                best, best_opts = i, opts
                if not opts:
                    return False
        for u, bi in best_opts:
            matched[best] = bi
            matched[u] = bi
            if solve():
                return True
            del matched[best]
            del matched[u]
        return False

    if not solve():
        raise ValenceError("aromatic system cannot be kekulized")
    double = set(matched.values())
    for i in arom_bonds:
        orders[i] = DOUBLE if i in double else SINGLE
    return tuple(orders)


def _lowest_at_least(atom: Atom, s: int) -> int | None:
    for v in allowed_valences(atom.element, atom.charge):
        if v >= s:
            return v
    return None


def _assign_hydrogens(atoms, kekule, adj) -> tuple[int, ...]:
    out = []
    for i, atom in enumerate(atoms):
        s = sum(kekule[bi] for _, bi in adj[i])
        if atom.explicit_h is not None:
            if s + atom.explicit_h not in allowed_valences(atom.element, atom.charge):
                raise ValenceError(
                    f"atom {i} ({atom.label()}) has illegal valence {s + atom.explicit_h}")
            out.append(atom.explicit_h)
            continue
        target = _lowest_at_least(atom, s)
        if target is None:
            raise ValenceError(f"atom {i} ({atom.element}) has illegal valence {s}")
        out.append(target - s)
    return tuple(out)


def check_valence(g: MolGraph) -> bool:
    """Independent re-check of a constructed graph's valence bookkeeping.

    Recomputes every atom's valence from the stored Kekulé orders and
    hydrogen counts, and verifies the Kekulé assignment itself.
    """
    if len(g.kekule) != len(g.bonds) or len(g.hcounts) != len(g.atoms):
        return False
    valence = [0] * len(g.atoms)
    arom_double = [0] * len(g.atoms)
    for bond, k in zip(g.bonds, g.kekule):
        if bond.order == AROMATIC:
            if k not in (SINGLE, DOUBLE):
                return False
            if not (g.atoms[bond.a].aromatic and g.atoms[bond.b].aromatic):
                return False
            if k == DOUBLE:
                arom_double[bond.a] += 1
                arom_double[bond.b] += 1
        elif k != bond.order:
            return False
        valence[bond.a] += k
        valence[bond.b] += k
    for i, atom in enumerate(g.atoms):
        h = g.hcounts[i]
        if h < 0 or (atom.explicit_h is not None and h != atom.explicit_h):
            return False
        if valence[i] + h not in allowed_valences(atom.element, atom.charge):
            return False
        if arom_double[i] > 1:
            return False
    return True


def molecular_weight(g: MolGraph) -> float:
    return sum(ATOMIC_WEIGHT[a.element] for a in g.atoms) + ATOMIC_WEIGHT["H"] * sum(g.hcounts)
