"""Spanning trees on sets of literals and linear-constraint coefficients.

Subsets of an ordered literal set ``B = (L_1, ..., L_m)`` are encoded as
bitmasks in the same way as assignments: ``L_1`` is the most significant bit,
so the subset ``{L_1, L_3}`` of a three-literal set is ``0b101``.
"""
from __future__ import annotations

import heapq
import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import Literal, LiteralSet, OutcomeTable
from .errors import ContractViolation, UnsupportedSize

MAX_TREE_VERTICES = 8


@dataclass(frozen=True)
class LiteralTree:
    vertices: tuple
    edges: frozenset  # of (i, j) index pairs with i < j

    def __post_init__(self):
        verts = tuple(self.vertices)
        if len(set(verts)) != len(verts):
            raise ContractViolation("duplicate tree vertices")
        edges = frozenset(tuple(sorted(e)) for e in self.edges)
        n = len(verts)
        for i, j in edges:
            if i == j:
                raise ContractViolation("self-loop in tree")
            if not (0 <= i < n and 0 <= j < n):
                raise ContractViolation(f"edge {(i, j)} out of range")
        if len(edges) != max(n - 1, 0):
            raise ContractViolation(f"a tree on {n} vertices has {max(n - 1, 0)} edges")
        if n > 1 and len(_component(0, edges, n)) != n:
            raise ContractViolation("edges do not connect all vertices")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_literal_edges(cls, vertices, edges) -> "LiteralTree":
        verts = tuple(vertices)
        pos = {v: i for i, v in enumerate(verts)}
        return cls(verts, frozenset((pos[a], pos[b]) for a, b in edges))

    @property
    def n(self) -> int:
        return len(self.vertices)

    def literal_edges(self) -> tuple:
        """Edges as frozensets of literals, in sorted index order."""
        return tuple(
            frozenset((self.vertices[i], self.vertices[j])) for i, j in sorted(self.edges)
        )

    def neighbours(self, i: int) -> list:
        return sorted(b if a == i else a for a, b in self.edges if i in (a, b))

    def describe(self, names=None) -> str:
        if not self.edges:
            return "(" + ",".join(v.name(names) for v in self.vertices) + ")"
        return " ".join(
            f"{self.vertices[i].name(names)}-{self.vertices[j].name(names)}"
            for i, j in sorted(self.edges)
        )


def _component(start, edges, n):
    adj = {i: set() for i in range(n)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen = {start}
    todo = [start]
    while todo:
        v = todo.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


def _default_vertices(n):
    return tuple(Literal(i) for i in range(n))


def prufer_decode(seq: Sequence[int], vertices: Sequence[Literal] | None = None) -> LiteralTree:
    """Labeled tree for a Prüfer sequence (vertices default to ``X1..Xn``)."""
    seq = list(seq)
    n = len(seq) + 2
    if vertices is None:
        vertices = _default_vertices(n)
    vertices = tuple(vertices)
    if len(vertices) != n:
        raise ContractViolation(f"sequence of length {len(seq)} needs {n} vertices")
    if any(not isinstance(x, int) or not 0 <= x < n for x in seq):
        raise ContractViolation(f"Prüfer entries must lie in [0, {n})")
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    leaves = [i for i in range(n) if degree[i] == 1]
    heapq.heapify(leaves)
    edges = set()
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.add((min(leaf, x), max(leaf, x)))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.add((min(u, v), max(u, v)))
    return LiteralTree(vertices, frozenset(edges))


def prufer_encode(tree: LiteralTree) -> tuple:
    n = tree.n
    if n < 2:
        return ()
    adj = {i: set(tree.neighbours(i)) for i in range(n)}
    leaves = [i for i in range(n) if len(adj[i]) == 1]
    heapq.heapify(leaves)
    seq = []
    for _ in range(n - 2):
        leaf = heapq.heappop(leaves)
        (parent,) = adj.pop(leaf)
        adj[parent].discard(leaf)
        seq.append(parent)
        if len(adj[parent]) == 1:
            heapq.heappush(leaves, parent)
    return tuple(seq)


def enumerate_trees(bplus: Iterable[Literal], allow_large: bool = False):
    """All labeled spanning trees on ``bplus``, in Prüfer-lexicographic order.

    Vertices are the literals in sorted order.  Zero or one vertex gives a
    single edgeless tree.
    """
    verts = tuple(sorted(LiteralSet(bplus)))
    n = len(verts)
    if n > MAX_TREE_VERTICES and not allow_large:
        raise UnsupportedSize(
            f"{n}^{n - 2} trees; pass allow_large=True to enumerate beyond n={MAX_TREE_VERTICES}"
        )
    if n < 2:
        yield LiteralTree(verts, frozenset())
        return
    for seq in itertools.product(range(n), repeat=n - 2):
        yield prufer_decode(seq, verts)


def count_trees(n: int) -> int:
    return 1 if n < 2 else n ** (n - 2)


def _vertex_index(tree: LiteralTree, lit: Literal) -> int:
    try:
        return tree.vertices.index(lit)
    except ValueError:
        raise ContractViolation(f"{lit} is not a vertex of the tree") from None


def degree(tree: LiteralTree, lit: Literal) -> int:
    i = _vertex_index(tree, lit)
    return sum(1 for e in tree.edges if i in e)


def edge_bijection(tree: LiteralTree, root: Literal) -> dict:
    """Map each non-root vertex to the last edge on its path from ``root``."""
    r = _vertex_index(tree, root)
    parent = {r: None}
    queue = deque([r])
    while queue:
        v = queue.popleft()
        for w in tree.neighbours(v):
            if w not in parent:
                parent[w] = v
                queue.append(w)
    return {
        tree.vertices[v]: frozenset((tree.vertices[v], tree.vertices[p]))
        for v, p in parent.items()
        if p is not None
    }


# --------------------------------------------------------------------------
# coefficient vectors
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CoefficientVector:
    """Integer weight ``m_S`` for every subset ``S`` of ``literals``."""

    literals: tuple
    entries: dict  # mask -> int

    def __post_init__(self):
        full = 1 << len(self.literals)
        if set(self.entries) != set(range(full)):
            raise ContractViolation("coefficient vector must cover every subset")

    def __getitem__(self, subset) -> int:
        if isinstance(subset, int):
            return self.entries[subset]
        return self.entries[self.mask(subset)]

    def mask(self, subset: Iterable[Literal]) -> int:
        m = len(self.literals)
        mask = 0
        for lit in subset:
            try:
                i = self.literals.index(lit)
            except ValueError:
                raise ContractViolation(f"{lit} not in coefficient lattice") from None
            mask |= 1 << (m - 1 - i)
        return mask

    def subset(self, mask: int) -> tuple:
        m = len(self.literals)
        return tuple(lit for i, lit in enumerate(self.literals) if mask >> (m - 1 - i) & 1)

    def items(self):
        """``(mask, m)`` pairs sorted by subset size, then lexicographically."""
        m = len(self.literals)
        return sorted(
            self.entries.items(),
            key=lambda kv: (bin(kv[0]).count("1"), [i for i in range(m) if kv[0] >> (m - 1 - i) & 1]),
        )

    def dot(self, values: dict) -> float:
        return sum(m * values[mask] for mask, m in self.entries.items())

    def term_name(self, mask: int, prefix: str = "b") -> str:
        if mask == 0:
            return prefix + "0"
        return prefix + "".join(
            (str(lit.var + 1) if len(self.literals) < 10 else f"_{lit.var + 1}")
            for lit in self.subset(mask)
        )

    def render(self, prefix: str = "b") -> str:
        """Inequality ``sum(m_S * b_S) > 0`` with negative terms moved right."""
        def term(mask, coef):
            name = self.term_name(mask, prefix)
            return name if coef == 1 else f"{coef}*{name}"

        left = [term(s, c) for s, c in reversed(self.items()) if c > 0]
        right = [term(s, -c) for s, c in self.items() if c < 0]
        return f"{' + '.join(left) or '0'} > {' + '.join(right) or '0'}"

    def to_dict(self) -> dict:
        return {self.term_name(mask): m for mask, m in self.items()}


def _check_tree(bplus: LiteralSet, tree: LiteralTree):
    if frozenset(tree.vertices) != frozenset(bplus):
        raise ContractViolation("tree does not span bplus")


def m_irred(b: Iterable[Literal], bplus: Iterable[Literal], tree: LiteralTree) -> CoefficientVector:
    b = LiteralSet(b)
    bplus = LiteralSet(bplus)
    if not bplus <= b:
        raise ContractViolation("bplus must be a subset of b")
    _check_tree(bplus, tree)
    lits = b.ordered()
    edges = tree.literal_edges()
    deg = {v: degree(tree, v) for v in tree.vertices}
    entries = {}
    for mask in range(1 << len(lits)):
        s = {lit for i, lit in enumerate(lits) if mask >> (len(lits) - 1 - i) & 1}
        sp = s & bplus
        entries[mask] = (
            1
            - (len(lits) - len(s))
            + len(edges)
            - sum(deg[v] for v in sp)
            + sum(1 for e in edges if e <= sp)
        )
    return CoefficientVector(lits, entries)


def m_sing(b: Iterable[Literal], bplus: Iterable[Literal], tree: LiteralTree) -> CoefficientVector:
    b = LiteralSet(b)
    base = m_irred(b, bplus, tree)
    rest = b - LiteralSet(bplus)
    entries = {}
    for mask, m in base.entries.items():
        outside = len(rest - set(base.subset(mask)))
        entries[mask] = m + outside - ((1 << outside) - 1)
    return CoefficientVector(base.literals, entries)


def mobius_coefficients(t: OutcomeTable, b: Iterable[Literal]) -> dict:
    """Saturated identity-link coefficients of ``t`` in the coordinates of ``b``.

    ``b`` must cover every variable of ``t``.  Entry ``S`` is
    ``sum_{S' <= S} (-1)^{|S - S'|} D[literals in S' true, others false]``.
    """
    b = LiteralSet(b)
    if len(b) != t.k or b.variables != frozenset(range(t.k)):
        raise ContractViolation("b must contain one literal per variable")
    lits = b.ordered()
    m = len(lits)
    cell = {}
    for mask in range(1 << m):
        c = [0] * t.k
        for i, lit in enumerate(lits):
            c[lit.var] = lit.setting(mask >> (m - 1 - i) & 1)
        cell[mask] = t[tuple(c)]
    return mobius(cell, m)


def mobius(values: dict, m: int) -> dict:
    """Subset Möbius inversion over an ``m``-element lattice."""
    coef = dict(values)
    for i in range(m):
        bit = 1 << i
        for mask in range(1 << m):
            if mask & bit:
                coef[mask] = coef[mask] - coef[mask ^ bit]
    return coef


def zeta(coef: dict, m: int) -> dict:
    """Inverse of :func:`mobius`: ``value[S] = sum_{S' <= S} coef[S']``."""
    vals = dict(coef)
    for i in range(m):
        bit = 1 << i
        for mask in range(1 << m):
            if mask & bit:
                vals[mask] = vals[mask] + vals[mask ^ bit]
    return vals


__all__ = [
    "LiteralTree",
    "CoefficientVector",
    "prufer_decode",
    "prufer_encode",
    "enumerate_trees",
    "count_trees",
    "degree",
    "edge_bijection",
    "m_irred",
    "m_sing",
    "mobius",
    "mobius_coefficients",
    "zeta",
]
