"""
Architecture graphs, subgraphs and embeddability.

An architecture graph (AG) is the undirected coupling graph of a device.
Subgraphs of the AG are the interaction graphs of benchmark sections, and the
embedding search decides whether a graph can be placed onto the AG without
any SWAP, which is what makes a glink strong.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from importlib import resources
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple, Union

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]

BUILTIN_ARCHITECTURES = ('grid2x3', 'tokyo', 'rochester', 'sycamore53', 'sycamore54')

DEFAULT_NODE_LIMIT = 10_000_000


def canonical_edge(p: int, q: int) -> Edge:
    """Return the undirected edge (p, q) with p < q."""
    if p == q:
        raise ValueError(f"Self-loop on vertex {p} is not an edge")
    return (p, q) if p < q else (q, p)


@dataclass(frozen=True)
class Subgraph:
    """Undirected graph on a subset of physical vertices."""

    vertices: FrozenSet[int]
    edges: FrozenSet[Edge]

    def __post_init__(self):
        object.__setattr__(self, 'vertices', frozenset(self.vertices))
        object.__setattr__(self, 'edges', frozenset(canonical_edge(p, q) for p, q in self.edges))
        for p, q in self.edges:
            if p not in self.vertices or q not in self.vertices:
                raise ValueError(f"Edge ({p}, {q}) has an endpoint outside the vertex set")

    @classmethod
    def from_edges(cls, edges: Iterable[Edge], vertices: Iterable[int] = ()) -> 'Subgraph':
        """Build a subgraph spanning the endpoints of ``edges`` plus any extra vertices."""
        edge_set = frozenset(canonical_edge(p, q) for p, q in edges)
        verts = set(vertices)
        for p, q in edge_set:
            verts.update((p, q))
        return cls(frozenset(verts), edge_set)

    def union(self, other: 'Subgraph') -> 'Subgraph':
        return Subgraph(self.vertices | other.vertices, self.edges | other.edges)

    @property
    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges)

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        return nx.is_connected(self.to_networkx())

    def is_subgraph_of(self, ag: 'ArchitectureGraph') -> bool:
        """True when every vertex and edge already exists in ``ag``."""
        return (all(0 <= v < ag.vertex_count for v in self.vertices)
                and all(ag.has_edge(p, q) for p, q in self.edges))

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(sorted(self.vertices))
        g.add_edges_from(self.sorted_edges)
        return g

    def to_dict(self) -> Dict[str, list]:
        return {'vertices': sorted(self.vertices), 'edges': [list(e) for e in self.sorted_edges]}

    @classmethod
    def from_dict(cls, data: Dict[str, list]) -> 'Subgraph':
        return cls.from_edges((tuple(e) for e in data['edges']), data.get('vertices', ()))


@dataclass(frozen=True)
class ArchitectureGraph:
    """Connected, undirected coupling graph on vertices 0..vertex_count-1."""

    name: str
    vertex_count: int
    edges: FrozenSet[Edge]

    def __post_init__(self):
        if self.vertex_count < 1:
            raise ValueError(f"Architecture '{self.name}' needs at least one vertex, got {self.vertex_count}")
        edges = frozenset(canonical_edge(p, q) for p, q in self.edges)
        for p, q in edges:
            if not (0 <= p < self.vertex_count and 0 <= q < self.vertex_count):
                raise ValueError(
                    f"Edge ({p}, {q}) of '{self.name}' is outside 0..{self.vertex_count - 1}"
                )
        object.__setattr__(self, 'edges', edges)
        if not nx.is_connected(self.to_networkx()):
            raise ValueError(f"Architecture '{self.name}' is not connected")

    @cached_property
    def adjacency(self) -> Tuple[FrozenSet[int], ...]:
        """Neighbour sets indexed by vertex."""
        adj: List[Set[int]] = [set() for _ in range(self.vertex_count)]
        for p, q in self.edges:
            adj[p].add(q)
            adj[q].add(p)
        return tuple(frozenset(a) for a in adj)

    @cached_property
    def sorted_edges(self) -> Tuple[Edge, ...]:
        return tuple(sorted(self.edges))

    def has_edge(self, p: int, q: int) -> bool:
        return p != q and canonical_edge(p, q) in self.edges

    def neighbors(self, v: int) -> FrozenSet[int]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def diameter(self) -> int:
        return int(distance_matrix(self).max())

    def as_subgraph(self) -> Subgraph:
        return Subgraph(frozenset(range(self.vertex_count)), self.edges)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph(name=self.name)
        g.add_nodes_from(range(self.vertex_count))
        g.add_edges_from(sorted(self.edges))
        return g

    def to_text(self) -> str:
        """Serialize to the ``n`` / ``e p q`` text format."""
        lines = [f"# {self.name}", f"n {self.vertex_count}"]
        lines.extend(f"e {p} {q}" for p, q in self.sorted_edges)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, name: str = 'custom') -> 'ArchitectureGraph':
        """
        Parse an architecture graph from its text format.

        Args:
            text: Lines ``n <vertex_count>`` then ``e <p> <q>``; ``#`` starts a comment
            name: Identifier for the resulting graph

        Returns:
            ArchitectureGraph
        """
        vertex_count: Optional[int] = None
        edges: List[Edge] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                if parts[0] == 'n' and len(parts) == 2:
                    if vertex_count is not None:
                        raise ValueError("duplicate 'n' line")
                    vertex_count = int(parts[1])
                elif parts[0] == 'e' and len(parts) == 3:
                    if vertex_count is None:
                        raise ValueError("'e' line before 'n' line")
                    p, q = int(parts[1]), int(parts[2])
                    if p >= q:
                        raise ValueError(f"edge must satisfy p < q, got {p} {q}")
                    edges.append((p, q))
                else:
                    raise ValueError(f"unrecognised line '{line}'")
            except ValueError as exc:
                raise ValueError(f"{name}: line {lineno}: {exc}") from None
        if vertex_count is None:
            raise ValueError(f"{name}: missing 'n <vertex_count>' line")
        return cls(name, vertex_count, frozenset(edges))

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> 'ArchitectureGraph':
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Architecture file not found: {path}")
        return cls.from_text(path.read_text(), name=path.stem)

    def __repr__(self) -> str:
        return f"ArchitectureGraph(name='{self.name}', vertices={self.vertex_count}, edges={len(self.edges)})"


@lru_cache(maxsize=None)
def builtin_architecture(name: str) -> ArchitectureGraph:
    """
    Load one of the bundled device topologies.

    Args:
        name: One of grid2x3, tokyo, rochester, sycamore53, sycamore54

    Returns:
        ArchitectureGraph
    """
    if name not in BUILTIN_ARCHITECTURES:
        raise ValueError(
            f"Unknown architecture '{name}'. Valid choices: {', '.join(BUILTIN_ARCHITECTURES)}"
        )
    text = resources.files('quekno').joinpath('data').joinpath(f'{name}.txt').read_text()
    return ArchitectureGraph.from_text(text, name=name)


def load_architecture(name_or_path: str) -> ArchitectureGraph:
    """Resolve a builtin name, else read a topology file."""
    if name_or_path in BUILTIN_ARCHITECTURES:
        return builtin_architecture(name_or_path)
    return ArchitectureGraph.from_file(name_or_path)


@lru_cache(maxsize=32)
def distance_matrix(ag: ArchitectureGraph) -> np.ndarray:
    """
    All-pairs hop counts of ``ag`` as a read-only integer matrix.
    """
    rows, cols = zip(*ag.sorted_edges) if ag.edges else ((), ())
    adj = csr_matrix(
        (np.ones(len(rows)), (rows, cols)), shape=(ag.vertex_count, ag.vertex_count)
    )
    dist = shortest_path(adj, directed=False, unweighted=True).astype(np.int64)
    dist.setflags(write=False)
    return dist


# ---------------------------------------------------------------------------
# Embedding search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Embedding:
    """Injective vertex map from a source graph into a target graph."""

    mapping: Dict[int, int]

    def __hash__(self):
        return hash(tuple(sorted(self.mapping.items())))

    def __call__(self, v: int) -> int:
        return self.mapping[v]

    def is_valid(self, src: Union[Subgraph, ArchitectureGraph], tgt: ArchitectureGraph) -> bool:
        """Check injectivity, domain coverage and edge preservation."""
        src = _as_subgraph(src)
        if set(self.mapping) != set(src.vertices):
            return False
        images = list(self.mapping.values())
        if len(set(images)) != len(images):
            return False
        if any(not 0 <= v < tgt.vertex_count for v in images):
            return False
        return all(tgt.has_edge(self.mapping[p], self.mapping[q]) for p, q in src.edges)

    def to_permutation(self, n: int) -> Tuple[int, ...]:
        """Extend the map to a permutation of 0..n-1, filling gaps in ascending order."""
        result: List[Optional[int]] = [None] * n
        for v, img in self.mapping.items():
            result[v] = img
        free = iter(sorted(set(range(n)) - set(self.mapping.values())))
        return tuple(next(free) if img is None else img for img in result)


class EmbeddingStatus(Enum):
    FOUND = 'found'
    ABSENT = 'absent'
    INCONCLUSIVE = 'inconclusive'


@dataclass(frozen=True)
class EmbeddingSearch:
    """Outcome of a bounded embedding search."""

    status: EmbeddingStatus
    embedding: Optional[Embedding]
    nodes_expanded: int


class _NodeLimitReached(Exception):
    pass


def _as_subgraph(g: Union[Subgraph, ArchitectureGraph]) -> Subgraph:
    return g.as_subgraph() if isinstance(g, ArchitectureGraph) else g


def _search_order(vertices: Iterable[int], adj: Dict[int, Set[int]]) -> List[int]:
    """Connectivity-first order: most already-ordered neighbours, then degree, then index."""
    remaining = set(vertices)
    order: List[int] = []
    placed_neighbours = {v: 0 for v in remaining}
    while remaining:
        v = min(remaining, key=lambda u: (-placed_neighbours[u], -len(adj[u]), u))
        order.append(v)
        remaining.remove(v)
        for u in adj[v]:
            if u in remaining:
                placed_neighbours[u] += 1
    return order


def search_embedding(src: Union[Subgraph, ArchitectureGraph], tgt: ArchitectureGraph,
                     node_limit: int = DEFAULT_NODE_LIMIT) -> EmbeddingSearch:
    """
    Decide whether ``src`` embeds into ``tgt`` (subgraph monomorphism).

    Args:
        src: Source graph
        tgt: Target architecture graph
        node_limit: Maximum candidate assignments before giving up

    Returns:
        EmbeddingSearch with a witness when FOUND
    """
    src = _as_subgraph(src)
    n_src = len(src.vertices)

    if n_src > tgt.vertex_count or len(src.edges) > len(tgt.edges):
        return EmbeddingSearch(EmbeddingStatus.ABSENT, None, 0)
    if src.is_subgraph_of(tgt):
        return EmbeddingSearch(EmbeddingStatus.FOUND, Embedding({v: v for v in src.vertices}), 0)

    adj: Dict[int, Set[int]] = {v: set() for v in src.vertices}
    for p, q in src.edges:
        adj[p].add(q)
        adj[q].add(p)

    src_degrees = sorted((len(a) for a in adj.values()), reverse=True)
    tgt_degrees = sorted((tgt.degree(v) for v in range(tgt.vertex_count)), reverse=True)
    if any(s > t for s, t in zip(src_degrees, tgt_degrees)):
        return EmbeddingSearch(EmbeddingStatus.ABSENT, None, 0)

    order = _search_order(src.vertices, adj)
    position = {v: i for i, v in enumerate(order)}
    # neighbours of order[i] that come earlier in the order
    earlier = [[u for u in adj[v] if position[u] < i] for i, v in enumerate(order)]
    all_targets = range(tgt.vertex_count)
    mapping: Dict[int, int] = {}
    used: Set[int] = set()
    expanded = 0

    def extend(i: int) -> bool:
        nonlocal expanded
        if i == len(order):
            return True
        v = order[i]
        need = len(adj[v])
        if earlier[i]:
            cands = set(tgt.adjacency[mapping[earlier[i][0]]])
            for u in earlier[i][1:]:
                cands &= tgt.adjacency[mapping[u]]
            candidates: Iterable[int] = sorted(cands)
        else:
            candidates = all_targets
        for c in candidates:
            if c in used or tgt.degree(c) < need:
                continue
            expanded += 1
            if expanded > node_limit:
                raise _NodeLimitReached
            mapping[v] = c
            used.add(c)
            if extend(i + 1):
                return True
            del mapping[v]
            used.discard(c)
        return False

    try:
        found = extend(0)
    except _NodeLimitReached:
        logger.warning("Embedding search hit node limit %d on %d-vertex source",
                       node_limit, n_src)
        return EmbeddingSearch(EmbeddingStatus.INCONCLUSIVE, None, expanded)

    logger.debug("Embedding search expanded %d nodes (found=%s)", expanded, found)
    if found:
        return EmbeddingSearch(EmbeddingStatus.FOUND, Embedding(dict(mapping)), expanded)
    return EmbeddingSearch(EmbeddingStatus.ABSENT, None, expanded)


def embeddable(src: Union[Subgraph, ArchitectureGraph], tgt: ArchitectureGraph,
               node_limit: int = DEFAULT_NODE_LIMIT) -> Optional[Embedding]:
    """Return an embedding witness, or None when absent or undecided."""
    return search_embedding(src, tgt, node_limit).embedding


def random_subgraph(ag: ArchitectureGraph, target_edges: int, rng: np.random.Generator,
                    jitter: int = 2) -> Subgraph:
    """
    Sample a connected subgraph of ``ag`` by edge accretion.

    Args:
        ag: Architecture graph to sample from
        target_edges: Mean edge count, 1 <= target_edges <= |E|
        rng: Seeded random stream
        jitter: Edge count is drawn uniformly from target_edges +/- jitter

    Returns:
        Connected Subgraph whose edges are AG edges
    """
    n_edges = len(ag.edges)
    if not 1 <= target_edges <= n_edges:
        raise ValueError(f"target_edges must lie in [1, {n_edges}], got {target_edges}")
    lo = max(1, target_edges - jitter)
    hi = min(n_edges, target_edges + jitter)
    size = int(rng.integers(lo, hi + 1))

    edges = ag.sorted_edges
    seed_edge = edges[int(rng.integers(n_edges))]
    chosen = {seed_edge}
    verts = set(seed_edge)
    while len(chosen) < size:
        frontier = [e for e in edges
                    if e not in chosen and (e[0] in verts or e[1] in verts)]
        e = frontier[int(rng.integers(len(frontier)))]
        chosen.add(e)
        verts.update(e)
    return Subgraph(frozenset(verts), frozenset(chosen))
