"""
Permutation algebra on physical vertices, SWAP witnesses and glinks.

A permutation is stored as the vector (p(0), ..., p(n-1)). Composition
follows function notation: compose(outer, inner)(i) == outer(inner(i)), and a
SWAP sequence s1, ..., sc implements p_sc o ... o p_s1.
"""
import logging
from collections import deque
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .graph import (
    DEFAULT_NODE_LIMIT,
    ArchitectureGraph,
    Edge,
    EmbeddingStatus,
    Subgraph,
    canonical_edge,
    random_subgraph,
    search_embedding,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Permutation:
    """Bijection on 0..n-1 stored as its image vector."""

    mapping: Tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(v) for v in self.mapping)
        if sorted(mapping) != list(range(len(mapping))):
            raise ValueError(f"Not a permutation of 0..{len(mapping) - 1}: {list(mapping)}")
        object.__setattr__(self, 'mapping', mapping)

    @classmethod
    def identity(cls, n: int) -> 'Permutation':
        return cls(tuple(range(n)))

    @classmethod
    def transposition(cls, n: int, p: int, q: int) -> 'Permutation':
        """The permutation exchanging p and q."""
        vec = list(range(n))
        vec[p], vec[q] = vec[q], vec[p]
        return cls(tuple(vec))

    def __call__(self, i: int) -> int:
        return self.mapping[i]

    def __len__(self) -> int:
        return len(self.mapping)

    def __iter__(self):
        return iter(self.mapping)

    def compose(self, inner: 'Permutation') -> 'Permutation':
        return compose(self, inner)

    def inverse(self) -> 'Permutation':
        return inverse(self)

    def is_identity(self) -> bool:
        return all(i == v for i, v in enumerate(self.mapping))

    def to_list(self) -> List[int]:
        return list(self.mapping)

    def __repr__(self) -> str:
        return f"Permutation({self.mapping})"


def compose(outer: Permutation, inner: Permutation) -> Permutation:
    """Return outer o inner, i.e. i -> outer(inner(i))."""
    if len(outer) != len(inner):
        raise ValueError(f"Cannot compose permutations of length {len(outer)} and {len(inner)}")
    return Permutation(tuple(outer.mapping[v] for v in inner.mapping))


def inverse(p: Permutation) -> Permutation:
    inv = [0] * len(p)
    for i, v in enumerate(p.mapping):
        inv[v] = i
    return Permutation(tuple(inv))


def random_permutation(n: int, rng: np.random.Generator) -> Permutation:
    return Permutation(tuple(int(v) for v in rng.permutation(n)))


def apply_to_graph(p: Permutation, g: Subgraph) -> Subgraph:
    """Relabel the vertices and edges of ``g`` by ``p``."""
    outside = [v for v in g.vertices if not 0 <= v < len(p)]
    if outside:
        raise ValueError(f"Vertices {sorted(outside)} lie outside permutation of length {len(p)}")
    return Subgraph(
        frozenset(p(v) for v in g.vertices),
        frozenset(canonical_edge(p(a), p(b)) for a, b in g.edges),
    )


@dataclass(frozen=True)
class SwapCircuit:
    """Ordered SWAP gates on architecture edges."""

    swaps: Tuple[Edge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'swaps', tuple(canonical_edge(p, q) for p, q in self.swaps))

    def __len__(self) -> int:
        return len(self.swaps)

    def __iter__(self):
        return iter(self.swaps)

    def reversed(self) -> 'SwapCircuit':
        """The same SWAPs backwards, which implements the inverse permutation."""
        return SwapCircuit(tuple(reversed(self.swaps)))

    def is_parallel(self) -> bool:
        seen = set()
        for p, q in self.swaps:
            if p in seen or q in seen:
                return False
            seen.update((p, q))
        return True

    def layers(self) -> int:
        """ASAP depth of the SWAP sequence."""
        last: Dict[int, int] = {}
        depth = 0
        for p, q in self.swaps:
            layer = max(last.get(p, 0), last.get(q, 0)) + 1
            last[p] = last[q] = layer
            depth = max(depth, layer)
        return depth


def swap_sequence_to_perm(swaps: Iterable[Edge], ag: ArchitectureGraph) -> Permutation:
    """
    Compose SWAPs in application order into the permutation they implement.

    Args:
        swaps: SwapCircuit or iterable of vertex pairs
        ag: Architecture graph every pair must be an edge of

    Returns:
        Permutation p_sc o ... o p_s1
    """
    swaps = list(swaps)
    for p, q in swaps:
        if not ag.has_edge(p, q):
            raise ValueError(f"Swap ({p}, {q}) is not an edge of '{ag.name}'")
    return compose_swaps(swaps, ag.vertex_count)


def compose_swaps(swaps: Iterable[Edge], n: int) -> Permutation:
    """Compose transpositions in application order without checking adjacency."""
    vec = list(range(n))
    for p, q in swaps:
        if not (0 <= p < n and 0 <= q < n):
            raise ValueError(f"Swap ({p}, {q}) lies outside 0..{n - 1}")
        # left-composing a transposition exchanges the values p and q
        vec = [q if v == p else p if v == q else v for v in vec]
    return Permutation(tuple(vec))


def swap_cost(perm: Permutation, ag: ArchitectureGraph, limit: int = 6) -> Optional[int]:
    """
    Minimum number of AG SWAPs implementing ``perm`` by breadth-first search.

    Exponential; meant for checking constructed boundary costs on small devices.
    Returns None when the cost exceeds ``limit``.
    """
    target = perm.mapping
    start = tuple(range(ag.vertex_count))
    if target == start:
        return 0
    seen = {start}
    frontier = deque([(start, 0)])
    while frontier:
        vec, cost = frontier.popleft()
        if cost == limit:
            continue
        for p, q in ag.sorted_edges:
            nxt = tuple(q if v == p else p if v == q else v for v in vec)
            if nxt == target:
                return cost + 1
            if nxt not in seen:
                seen.add(nxt)
                frontier.append((nxt, cost + 1))
    return None


class PermType(str, Enum):
    OPT1 = 'opt1'
    OPT2 = 'opt2'
    PARALLEL = 'parallel'


@dataclass(frozen=True)
class BoundaryPermutation:
    """Permutation between two sections together with the SWAPs implementing it."""

    perm: Permutation
    witness: SwapCircuit
    swap_cost: int
    depth_layers: int
    perm_type: PermType

    def to_dict(self) -> Dict[str, object]:
        return {
            'swaps': [list(s) for s in self.witness],
            'cost': self.swap_cost,
            'depth_layers': self.depth_layers,
            'perm': self.perm.to_list(),
            'perm_type': self.perm_type.value,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, object], ag: ArchitectureGraph) -> 'BoundaryPermutation':
        witness = SwapCircuit(tuple(tuple(s) for s in data['swaps']))
        return cls(
            perm=compose_swaps(witness, ag.vertex_count),
            witness=witness,
            swap_cost=int(data['cost']),
            depth_layers=int(data['depth_layers']),
            perm_type=PermType(data.get('perm_type', PermType.OPT1.value)),
        )


def _from_witness(swaps: Sequence[Edge], ag: ArchitectureGraph, perm_type: PermType,
                  depth_layers: Optional[int] = None) -> BoundaryPermutation:
    witness = SwapCircuit(tuple(swaps))
    return BoundaryPermutation(
        perm=swap_sequence_to_perm(witness, ag),
        witness=witness,
        swap_cost=len(witness),
        depth_layers=witness.layers() if depth_layers is None else depth_layers,
        perm_type=perm_type,
    )


def random_boundary_perm(ag: ArchitectureGraph, perm_type: PermType, rng: np.random.Generator,
                         max_swaps: Optional[int] = None,
                         near: Optional[Tuple[Iterable[int], Iterable[int]]] = None) -> BoundaryPermutation:
    """
    Draw a boundary permutation of the given type.

    Args:
        ag: Architecture graph
        perm_type: opt1 (one swap), opt2 (one or two swaps) or parallel (a matching)
        rng: Seeded random stream
        max_swaps: Upper bound on the witness length; 1 forces a single swap
        near: Vertices of the sections before and after the boundary; a
            parallel matching keeps to edges touching them

    Returns:
        BoundaryPermutation whose witness is minimal for opt1/opt2
    """
    perm_type = PermType(perm_type)
    edges = ag.sorted_edges
    if not edges:
        raise ValueError(f"Architecture '{ag.name}' has no edges to swap on")
    if max_swaps is not None and max_swaps < 1:
        raise ValueError(f"max_swaps must be at least 1, got {max_swaps}")

    if perm_type is PermType.OPT1:
        return _from_witness([edges[int(rng.integers(len(edges)))]], ag, perm_type)

    if perm_type is PermType.OPT2:
        first = int(rng.integers(len(edges)))
        if max_swaps == 1 or len(edges) == 1 or rng.random() < 0.5:
            return _from_witness([edges[first]], ag, perm_type)
        second = int(rng.integers(len(edges) - 1))
        if second >= first:
            second += 1
        # two distinct transpositions give an even permutation other than the
        # identity, so no single swap (odd) implements it and the cost is 2
        return _from_witness([edges[first], edges[second]], ag, perm_type)

    upper = max(1, ag.vertex_count // 4)
    size = int(rng.integers(1, upper + 1))
    if max_swaps is not None:
        size = min(size, max_swaps)
    matching: List[Edge] = []
    used = set()
    for p, q in _parallel_candidates(edges, rng, near):
        if p in used or q in used:
            continue
        matching.append((p, q))
        used.update((p, q))
        if len(matching) == size:
            break
    return _from_witness(matching, ag, perm_type, depth_layers=1)


def _parallel_candidates(edges: Sequence[Edge], rng: np.random.Generator,
                         near: Optional[Tuple[Iterable[int], Iterable[int]]]) -> List[Edge]:
    """
    Edge order for a parallel matching.

    With ``near`` = (vertices before, vertices after), edges joining both sets
    come first, then edges touching either; other edges are left out. Without
    ``near``, or when no edge touches the sets, every edge is a candidate.
    """
    shuffled = [edges[int(i)] for i in rng.permutation(len(edges))]
    if near is None:
        return shuffled
    before, after = set(near[0]), set(near[1])
    joining = [e for e in shuffled
               if (e[0] in before or e[1] in before) and (e[0] in after or e[1] in after)]
    joined = set(joining)
    touching = [e for e in shuffled
                if e not in joined and ({e[0], e[1]} & (before | after))]
    return (joining + touching) or shuffled


@dataclass(frozen=True)
class Glink:
    """Two subgraphs linked by a boundary permutation."""

    g1: Subgraph
    boundary: BoundaryPermutation
    g2: Subgraph
    strong: bool

    @property
    def perm(self) -> Permutation:
        return self.boundary.perm

    @property
    def union(self) -> Subgraph:
        """g1 together with g2 relabelled by the boundary permutation."""
        return self.g1.union(apply_to_graph(self.boundary.perm, self.g2))


def make_glink(ag: ArchitectureGraph, g1: Subgraph, perm_type: PermType, target_edges: int,
               rng: np.random.Generator, retry_budget: int = 200,
               node_limit: int = DEFAULT_NODE_LIMIT, jitter: int = 2,
               max_swaps: Optional[int] = None) -> Glink:
    """
    Draw a glink starting at ``g1``, retrying until its union refuses to embed.

    Args:
        ag: Architecture graph
        g1: Subgraph the link starts from
        perm_type: Boundary permutation type
        target_edges: Mean edge count of the second subgraph
        rng: Seeded random stream
        retry_budget: Attempts before accepting a weak glink
        node_limit: Embedding search cap; inconclusive searches count as weak
        jitter: Edge count jitter for the second subgraph
        max_swaps: Passed to random_boundary_perm, together with the vertices
            of both subgraphs

    Returns:
        Glink, with strong=False only when the budget ran out
    """
    if retry_budget < 1:
        raise ValueError(f"retry_budget must be at least 1, got {retry_budget}")
    glink: Optional[Glink] = None
    for attempt in range(1, retry_budget + 1):
        g2 = random_subgraph(ag, target_edges, rng, jitter)
        boundary = random_boundary_perm(ag, perm_type, rng, max_swaps,
                                        near=(g1.vertices, g2.vertices))
        glink = Glink(g1, boundary, g2, strong=False)
        result = search_embedding(glink.union, ag, node_limit)
        if result.status is EmbeddingStatus.ABSENT:
            logger.debug("Strong glink after %d attempt(s), %d search nodes",
                         attempt, result.nodes_expanded)
            return replace(glink, strong=True)

    logger.warning("No strong glink on '%s' within %d attempts; keeping a weak one",
                   ag.name, retry_budget)
    return glink
