"""SMILES reading and writing for the supported subset.

Supported: organic-subset and bracket atoms (charge, H count), bonds
``- = # :``, branches, ring closures (digits and ``%nn``) and aromatic
lowercase atoms.  Stereo markers, isotopes, wildcards, atom classes and
multi-fragment input are rejected.
"""
from __future__ import annotations

from typing import Sequence

from ..errors import SmilesSyntaxError, UnsupportedFeature
from .graph import AROMATIC, DOUBLE, SINGLE, TRIPLE, Atom, Bond, MolGraph, allowed_valences

ORGANIC = {"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"}
AROMATIC_ORGANIC = {"b": "B", "c": "C", "n": "N", "o": "O", "p": "P", "s": "S"}
BRACKET_ELEMENTS = {"H", "B", "C", "N", "O", "F", "Si", "P", "S", "Cl", "Br", "I"}
BOND_SYMBOLS = {"-": SINGLE, "=": DOUBLE, "#": TRIPLE, ":": AROMATIC}
_ORDER_SYMBOL = {SINGLE: "-", DOUBLE: "=", TRIPLE: "#", AROMATIC: ":"}


def parse_smiles(text: str) -> MolGraph:
    """Parse a SMILES string into a validated :class:`MolGraph`."""
    if not isinstance(text, str) or not text.strip():
        raise SmilesSyntaxError("empty SMILES")
    text = text.strip()
    atoms: list[Atom] = []
    bonds: list[tuple[int, int, str | None]] = []
    bonded: set[frozenset[int]] = set()
    rings: dict[int, tuple[int, str | None]] = {}
    branch_stack: list[int] = []
    prev: int | None = None
    pending: str | None = None
    i, n = 0, len(text)

    def add_bond(a: int, b: int, symbol: str | None) -> None:
        key = frozenset((a, b))
        if a == b or key in bonded:
            raise SmilesSyntaxError(f"duplicate or self bond between atoms {a} and {b}")
        bonded.add(key)
        bonds.append((a, b, symbol))

    def add_atom(atom: Atom) -> None:
        nonlocal prev, pending
        atoms.append(atom)
        idx = len(atoms) - 1
        if prev is not None:
            add_bond(prev, idx, pending)
        elif pending is not None:
            raise SmilesSyntaxError("bond symbol before the first atom")
        prev, pending = idx, None

    while i < n:
        ch = text[i]
        if ch == "[":
            close = text.find("]", i)
            if close < 0:
                raise SmilesSyntaxError("unclosed bracket atom")
            add_atom(_parse_bracket(text[i + 1:close]))
            i = close + 1
        elif ch in "BCNOPSFI":
            if text.startswith("Cl", i) or text.startswith("Br", i):
                sym, i = text[i:i + 2], i + 2
            else:
                sym, i = ch, i + 1
            if sym not in ORGANIC:
                raise SmilesSyntaxError(f"unknown atom {sym!r}")
            add_atom(Atom(sym))
        elif ch in AROMATIC_ORGANIC:
            add_atom(Atom(AROMATIC_ORGANIC[ch], aromatic=True))
            i += 1
        elif ch in BOND_SYMBOLS:
            if pending is not None:
                raise SmilesSyntaxError("two consecutive bond symbols")
            if prev is None:
                raise SmilesSyntaxError("bond symbol before the first atom")
            pending = ch
            i += 1
        elif ch in "/\\":
            raise UnsupportedFeature("stereo bond markers are not supported")
        elif ch == "$":
            raise UnsupportedFeature("quadruple bonds are not supported")
        elif ch == "(":
            if prev is None or pending is not None:
                raise SmilesSyntaxError("branch without a preceding atom")
            branch_stack.append(prev)
            i += 1
        elif ch == ")":
            if not branch_stack:
                raise SmilesSyntaxError("unmatched ')'")
            if pending is not None:
                raise SmilesSyntaxError("dangling bond symbol before ')'")
            if text[i - 1] == "(":
                raise SmilesSyntaxError("empty branch")
            prev = branch_stack.pop()
            i += 1
        elif ch.isdigit() or ch == "%":
            if prev is None:
                raise SmilesSyntaxError("ring closure before the first atom")
            if ch == "%":
                digits = text[i + 1:i + 3]
                if len(digits) != 2 or not digits.isdigit():
                    raise SmilesSyntaxError("malformed %nn ring closure")
                num, i = int(digits), i + 3
            else:
                num, i = int(ch), i + 1
            if num in rings:
                other, sym = rings.pop(num)
                if sym is not None and pending is not None and sym != pending:
                    raise SmilesSyntaxError(f"conflicting bond symbols on ring closure {num}")
                add_bond(other, prev, pending if pending is not None else sym)
            else:
                rings[num] = (prev, pending)
            pending = None
        elif ch == ".":
            raise UnsupportedFeature("multi-fragment SMILES are not supported")
        elif ch == "*":
            raise UnsupportedFeature("wildcard atoms are not supported")
        else:
            raise SmilesSyntaxError(f"unexpected character {ch!r} at position {i}")
    if pending is not None:
        raise SmilesSyntaxError("dangling bond symbol at end of input")
    if branch_stack:
        raise SmilesSyntaxError("unclosed branch")
    if rings:
        raise SmilesSyntaxError(f"unclosed ring(s) {sorted(rings)}")
    if not atoms:
        raise SmilesSyntaxError("no atoms")
    out = []
    for a, b, sym in bonds:
        if sym is None:
            order = AROMATIC if atoms[a].aromatic and atoms[b].aromatic else SINGLE
        else:
            order = BOND_SYMBOLS[sym]
        out.append(Bond(a, b, order))
    return MolGraph(atoms, out)


def _parse_bracket(body: str) -> Atom:
    if not body:
        raise SmilesSyntaxError("empty bracket atom")
    if body[0].isdigit():
        raise UnsupportedFeature("isotopes are not supported")
    if "@" in body:
        raise UnsupportedFeature("chirality markers are not supported")
    if ":" in body:
        raise UnsupportedFeature("atom classes are not supported")
    if body[0] == "*":
        raise UnsupportedFeature("wildcard atoms are not supported")
    pos = 0
    aromatic = False
    if body[:2] in BRACKET_ELEMENTS:
        element, pos = body[:2], 2
    elif body[:1] in BRACKET_ELEMENTS:
        element, pos = body[:1], 1
    elif body[:1] in AROMATIC_ORGANIC:
        element, pos, aromatic = AROMATIC_ORGANIC[body[0]], 1, True
    else:
        raise UnsupportedFeature(f"unsupported element in [{body}]")
    h = 0
    if pos < len(body) and body[pos] == "H":
        pos += 1
        start = pos
        while pos < len(body) and body[pos].isdigit():
            pos += 1
        h = int(body[start:pos]) if pos > start else 1
    charge = 0
    if pos < len(body) and body[pos] in "+-":
        sign = 1 if body[pos] == "+" else -1
        pos += 1
        start = pos
        while pos < len(body) and body[pos].isdigit():
            pos += 1
        if pos > start:
            charge = sign * int(body[start:pos])
        else:
            charge = sign
            while pos < len(body) and body[pos] == body[start - 1]:
                charge += sign
                pos += 1
    if pos != len(body):
        raise SmilesSyntaxError(f"malformed bracket atom [{body}]")
    return Atom(element, charge, aromatic, h)


def _inferred_h(g: MolGraph, i: int) -> int | None:
    atom = g.atoms[i]
    s = sum(g.kekule[bi] for _, bi in g.neighbors(i))
    for v in allowed_valences(atom.element, 0):
        if v >= s:
            return v - s
    return None


def _atom_text(g: MolGraph, i: int) -> str:
    atom = g.atoms[i]
    h = g.hcounts[i]
    plain_ok = (
        atom.charge == 0
        and atom.element in ORGANIC
        and (not atom.aromatic or atom.element in AROMATIC_ORGANIC.values())
        and _inferred_h(g, i) == h
    )
    sym = atom.element.lower() if atom.aromatic else atom.element
    if plain_ok:
        return sym
    text = "[" + sym
    if h:
        text += "H" + (str(h) if h > 1 else "")
    if atom.charge:
        text += ("+" if atom.charge > 0 else "-") + (str(abs(atom.charge)) if abs(atom.charge) > 1 else "")
    return text + "]"


def _bond_text(g: MolGraph, bond: Bond) -> str:
    both_arom = g.atoms[bond.a].aromatic and g.atoms[bond.b].aromatic
    if bond.order == AROMATIC:
        return "" if both_arom else ":"
    if bond.order == SINGLE:
        return "-" if both_arom else ""
    return _ORDER_SYMBOL[bond.order]


def write_smiles(g: MolGraph, ranks: Sequence[int] | None = None) -> str:
    """Write ``g`` as SMILES.

    ``ranks`` orders atoms (start atom and branch order); with canonical
    ranks the output is a canonical SMILES.
    """
    n = len(g.atoms)
    rank = list(ranks) if ranks is not None else list(range(n))
    start = min(range(n), key=rank.__getitem__)
    # pass 1: DFS tree and ring-closure bonds
    visit = [-1] * n
    children: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    tree_bonds = set()
    visit[start] = 0
    counter = 1
    stack = [(start, iter(sorted(g.neighbors(start), key=lambda x: rank[x[0]])))]
    while stack:
        v, it = stack[-1]
        for u, bi in it:
            if visit[u] == -1:
                visit[u] = counter
                counter += 1
                children[v].append((u, bi))
                tree_bonds.add(bi)
                stack.append((u, iter(sorted(g.neighbors(u), key=lambda x: rank[x[0]]))))
                break
        else:
            stack.pop()
    opens: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    closes: list[list[int]] = [[] for _ in range(n)]
    for bi, bond in enumerate(g.bonds):
        if bi in tree_bonds:
            continue
        a, b = (bond.a, bond.b) if visit[bond.a] < visit[bond.b] else (bond.b, bond.a)
        opens[a].append((visit[b], bi))
        closes[b].append(bi)
    # pass 2: emit
    digit_of: dict[int, int] = {}
    free_digits: list[int] = []
    next_digit = 1
    out: list[str] = []
    work: list[tuple] = [("atom", start, None)]
    while work:
        item = work.pop()
        if item[0] == "text":
            out.append(item[1])
            continue
        _, v, via = item
        if via is not None:
            out.append(_bond_text(g, g.bonds[via]))
        out.append(_atom_text(g, v))
        released = []
        for bi in sorted(closes[v], key=lambda b: digit_of[b]):
            d = digit_of.pop(bi)
            out.append(_ring_digit(d))
            released.append(d)
        for _, bi in sorted(opens[v]):
            if free_digits:
                free_digits.sort()
                d = free_digits.pop(0)
            else:
                d, next_digit = next_digit, next_digit + 1
            digit_of[bi] = d
            out.append(_bond_text(g, g.bonds[bi]) + _ring_digit(d))
        free_digits.extend(released)
        kids = children[v]
        if kids:
            work.append(("atom", kids[-1][0], kids[-1][1]))
            for u, bi in reversed(kids[:-1]):
                work.append(("text", ")"))
                work.append(("atom", u, bi))
                work.append(("text", "("))
    return "".join(out)


def _ring_digit(d: int) -> str:
    if d < 10:
        return str(d)
    if d < 100:
        return f"%{d}"
    raise SmilesSyntaxError("too many simultaneously open rings")
