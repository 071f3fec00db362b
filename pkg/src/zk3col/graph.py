"""Graphs, edge algebra and proper 3-colorings.

Vertices are labelled ``1..n`` and every edge is stored canonically as
``(i, j)`` with ``i < j``.
"""

from __future__ import annotations

import enum
import random
from collections import deque
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Iterator, Optional

Edge = tuple[int, int]

ENUMERATION_LIMIT = 12


class GraphError(ValueError):
    """Base class for graph construction and parsing failures."""


class MalformedLineError(GraphError):
    pass


class LoopEdgeError(GraphError):
    pass


class DuplicateEdgeError(GraphError):
    pass


class DisconnectedGraphError(GraphError):
    pass


class VertexRangeError(GraphError):
    pass


class GraphTooLargeError(GraphError):
    pass


def canonical(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Graph:
    """Loop-free, connected, undirected graph on vertices ``1..n``."""

    n: int
    edges: tuple[Edge, ...]
    _incident: tuple[tuple[Edge, ...], ...] = field(init=False, repr=False, compare=False)
    _edge_set: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise VertexRangeError(f"vertex count must be positive, got {self.n}")
        seen: set[Edge] = set()
        for i, j in self.edges:
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise VertexRangeError(f"edge ({i},{j}) has a vertex outside 1..{self.n}")
            if i == j:
                raise LoopEdgeError(f"loop at vertex {i}")
            if i > j:
                raise GraphError(f"edge ({i},{j}) is not canonical (need i < j)")
            if (i, j) in seen:
                raise DuplicateEdgeError(f"duplicate edge ({i},{j})")
            seen.add((i, j))
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))
        incident: list[list[Edge]] = [[] for _ in range(self.n + 1)]
        for e in self.edges:
            incident[e[0]].append(e)
            incident[e[1]].append(e)
        object.__setattr__(self, "_incident", tuple(tuple(x) for x in incident))
        object.__setattr__(self, "_edge_set", frozenset(self.edges))
        if not self._connected():
            raise DisconnectedGraphError("graph is not connected")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Build a graph, canonicalizing edge orientation."""
        out = []
        for i, j in edges:
            if i == j:
                raise LoopEdgeError(f"loop at vertex {i}")
            out.append(canonical(i, j))
        return cls(n, tuple(out))

    def _connected(self) -> bool:
        seen = {1}
        todo = deque([1])
        while todo:
            v = todo.popleft()
            for w in self.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == self.n

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def has_edge(self, i: int, j: int) -> bool:
        return canonical(i, j) in self._edge_set

    def incident(self, v: int) -> tuple[Edge, ...]:
        return self._incident[v]

    def neighbors(self, v: int) -> Iterator[int]:
        for a, b in self._incident[v]:
            yield b if a == v else a

    def degree(self, v: int) -> int:
        return len(self._incident[v])

    def to_text(self) -> str:
        """Canonical graph-file rendering (also the input of the wire digest)."""
        lines = [f"{self.n} {self.m}"]
        lines += [f"{i} {j}" for i, j in self.edges]
        return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    """Parse the ``n m`` / ``i j`` graph file format."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise MalformedLineError(f"line {lineno}: expected two integers, got {raw!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise MalformedLineError(f"line {lineno}: not an integer pair: {raw!r}") from None
        rows.append((lineno, a, b))
    if not rows:
        raise MalformedLineError("empty graph file")
    _, n, m = rows[0]
    if n < 1 or m < 0:
        raise MalformedLineError(f"line {rows[0][0]}: bad header {n} {m}")
    body = rows[1:]
    if len(body) != m:
        raise MalformedLineError(f"header announces {m} edges, found {len(body)}")
    edges: list[Edge] = []
    seen: set[Edge] = set()
    for lineno, i, j in body:
        if not (1 <= i <= n and 1 <= j <= n):
            raise VertexRangeError(f"line {lineno}: vertex out of range 1..{n} in ({i},{j})")
        if i == j:
            raise LoopEdgeError(f"line {lineno}: loop at vertex {i}")
        e = canonical(i, j)
        if e in seen:
            raise DuplicateEdgeError(f"line {lineno}: duplicate edge {e}")
        seen.add(e)
        edges.append(e)
    return Graph(n, tuple(edges))


def load_graph(path) -> Graph:
    with open(path, encoding="ascii") as fh:
        return parse_graph(fh.read())


def edges_of(graph: Graph, v: int) -> frozenset[Edge]:
    if not 1 <= v <= graph.n:
        raise VertexRangeError(f"vertex {v} outside 1..{graph.n}")
    return frozenset(graph.incident(v))


class RelationKind(enum.Enum):
    DISJOINT = "disjoint"
    SHARED = "shared"
    SAME = "same"


@dataclass(frozen=True)
class EdgeRelation:
    kind: RelationKind
    vertex: Optional[int] = None

    def __str__(self) -> str:
        if self.kind is RelationKind.SHARED:
            return f"shared({self.vertex})"
        return self.kind.value


DISJOINT = EdgeRelation(RelationKind.DISJOINT)
SAME = EdgeRelation(RelationKind.SAME)


def edge_relation(e: Edge, f: Edge) -> EdgeRelation:
    if e == f:
        return SAME
    common = set(e) & set(f)
    if len(common) == 1:
        return EdgeRelation(RelationKind.SHARED, common.pop())
    return DISJOINT


@dataclass(frozen=True)
class Coloring:
    """Vertex colors in F_3; ``coloring[v]`` for ``v`` in ``1..n``."""

    colors: tuple[int, ...]

    def __getitem__(self, v: int) -> int:
        if v < 1:
            raise IndexError(v)
        return self.colors[v - 1]

    def __len__(self) -> int:
        return len(self.colors)

    def is_proper(self, graph: Graph) -> bool:
        return all(self[i] != self[j] for i, j in graph.edges)

    def permuted(self, perm: tuple[int, int, int]) -> "Coloring":
        return Coloring(tuple(perm[c] for c in self.colors))


def _backtrack(graph: Graph) -> Iterator[list[int]]:
    # vertices in label order, colors ascending -> lexicographic output
    colors = [0] * (graph.n + 1)
    earlier = [[w for w in graph.neighbors(v) if w < v] for v in range(graph.n + 1)]

    def extend(v: int) -> Iterator[list[int]]:
        if v > graph.n:
            yield colors[1:]
            return
        used = {colors[w] for w in earlier[v]}
        for c in range(3):
            if c not in used:
                colors[v] = c
                yield from extend(v + 1)

    yield from extend(1)


def base_coloring(graph: Graph) -> Optional[Coloring]:
    """The lexicographically first proper 3-coloring, or ``None``."""
    for cols in _backtrack(graph):
        return Coloring(tuple(cols))
    return None


COLOR_PERMUTATIONS: tuple[tuple[int, int, int], ...] = tuple(permutations(range(3)))


def find_coloring(graph: Graph, rng: random.Random) -> Optional[Coloring]:
    """Random proper coloring: the base coloring under a uniform permutation of F_3."""
    base = base_coloring(graph)
    if base is None:
        return None
    return base.permuted(rng.choice(COLOR_PERMUTATIONS))


def proper_colorings(graph: Graph, limit: int = ENUMERATION_LIMIT) -> list[Coloring]:
    if graph.n > limit:
        raise GraphTooLargeError(f"n={graph.n} exceeds enumeration limit {limit}")
    return [Coloring(tuple(c)) for c in _backtrack(graph)]


# -- fixtures -------------------------------------------------------------

def complete_graph(n: int) -> Graph:
    return Graph(n, tuple((i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)))


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i % n + 1) for i in range(1, n + 1)])


def path_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(1, n)))


def petersen_graph() -> Graph:
    outer = [(i, i % 5 + 1) for i in range(1, 6)]
    spokes = [(i, i + 5) for i in range(1, 6)]
    inner = [(6 + k, 6 + (k + 2) % 5) for k in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


FIXTURES = {
    "edge": lambda: complete_graph(2),
    "k3": lambda: complete_graph(3),
    "k4": lambda: complete_graph(4),
    "c5": lambda: cycle_graph(5),
    "path4": lambda: path_graph(4),
    "petersen": petersen_graph,
}
