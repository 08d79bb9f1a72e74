"""Baseline greedy lookahead router producing transcripts."""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .circuit import Circuit
from .graph import (
    ArchitectureGraph,
    Embedding,
    Subgraph,
    canonical_edge,
    distance_matrix,
    search_embedding,
)
from .metadata import Objective
from .perm import Permutation, random_permutation
from .verify import Event, ExecEvent, SwapEvent, Transcript, validate_transcript

logger = logging.getLogger(__name__)

# embedding searches that seed initial mappings stay small
SEED_NODE_LIMIT = 20_000
SEED_CANDIDATES = 8


@dataclass(frozen=True)
class RouterConfig:
    """Router settings; restarts draw independent initial mappings."""

    objective: Objective = Objective.GATE
    lookahead_window: int = 20
    seed: int = 0
    restarts: int = 1
    lookahead_discount: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, 'objective', Objective(self.objective))
        if self.lookahead_window < 0:
            raise ValueError(f"lookahead_window must be >= 0, got {self.lookahead_window}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")

    @classmethod
    def from_config(cls, config, objective: Objective = Objective.GATE,
                    seed: int = 0) -> 'RouterConfig':
        return cls(objective=objective, seed=seed, **config.router_params)


def _prefix_graph(pairs: Sequence[Tuple[int, int]], k: int) -> Subgraph:
    return Subgraph.from_edges(canonical_edge(a, b) for a, b in pairs[:k])


def longest_embeddable_prefix(c: Circuit, ag: ArchitectureGraph,
                              node_limit: int = SEED_NODE_LIMIT) -> Tuple[int, Optional[Embedding]]:
    """
    Largest k such that the interaction graph of the first k 2-qubit gates embeds.

    Embeddability shrinks monotonically with k, so k is found by bisection.
    Searches that hit ``node_limit`` count as not embeddable.

    Returns:
        (k, embedding of that prefix), with embedding None when k is 0
    """
    pairs = [g.qubits for g in c.gates if g.is_two_qubit]
    lo, hi = 0, len(pairs)
    witness: Optional[Embedding] = None
    while lo < hi:
        mid = (lo + hi + 1) // 2
        found = search_embedding(_prefix_graph(pairs, mid), ag, node_limit).embedding
        if found is None:
            hi = mid - 1
        else:
            lo, witness = mid, found
    return lo, witness


def _embedded_mapping(prefix: Subgraph, ag: ArchitectureGraph,
                      rng: Optional[np.random.Generator]) -> Optional[Permutation]:
    """Initial mapping from an embedding of ``prefix``; ``rng`` relabels the device first."""
    n = ag.vertex_count
    if rng is None:
        target, back = ag, list(range(n))
    else:
        tau = [int(v) for v in rng.permutation(n)]
        target = ArchitectureGraph(ag.name, n, frozenset((tau[p], tau[q]) for p, q in ag.edges))
        back = [0] * n
        for p, t in enumerate(tau):
            back[t] = p
    found = search_embedding(prefix, target, SEED_NODE_LIMIT).embedding
    if found is None:
        return None
    embedding = Embedding({v: back[img] for v, img in found.mapping.items()})
    return Permutation(embedding.to_permutation(n))


def _head_distance(mapping: Permutation, pairs: Sequence[Tuple[int, int]],
                   dist: List[List[int]]) -> int:
    return sum(dist[mapping(a)][mapping(b)] for a, b in pairs)


def seed_mapping(c: Circuit, ag: ArchitectureGraph, cfg: RouterConfig, restart: int,
                 rng: np.random.Generator, prefix_length: int) -> Permutation:
    """
    Initial mapping for one restart.

    Restart 0 keeps the best of SEED_CANDIDATES embeddings of the longest
    embeddable prefix, scored by the distance of the first 2-qubit gates past
    the prefix. Later restarts take one embedding into a randomly relabelled
    device. A random mapping is the fallback.
    """
    n = ag.vertex_count
    if prefix_length == 0:
        return random_permutation(n, rng)
    pairs = [g.qubits for g in c.gates if g.is_two_qubit]
    prefix = _prefix_graph(pairs, prefix_length)
    if restart == 0:
        dist = distance_matrix(ag).tolist()
        head = pairs[:prefix_length + cfg.lookahead_window]
        candidates = [_embedded_mapping(prefix, ag, None)]
        candidates += [_embedded_mapping(prefix, ag, rng) for _ in range(SEED_CANDIDATES - 1)]
        candidates = [m for m in candidates if m is not None]
        if candidates:
            return min(candidates, key=lambda m: _head_distance(m, head, dist))
    else:
        mapping = _embedded_mapping(prefix, ag, rng)
        if mapping is not None:
            return mapping
    return random_permutation(n, rng)


def _score(swap: Optional[Tuple[int, int]], gates: Sequence[Tuple[int, int]], weights: Sequence[float],
           sigma: List[int], owner: List[int], dist: List[List[int]]) -> float:
    """Weighted distance sum of ``gates`` after applying ``swap`` (None for no swap)."""
    if swap is None:
        return sum(w * dist[sigma[a]][sigma[b]] for (a, b), w in zip(gates, weights))
    p0, p1 = swap
    moved: Dict[int, int] = {}
    if owner[p0] >= 0:
        moved[owner[p0]] = p1
    if owner[p1] >= 0:
        moved[owner[p1]] = p0
    total = 0.0
    for (a, b), w in zip(gates, weights):
        total += w * dist[moved.get(a, sigma[a])][moved.get(b, sigma[b])]
    return total


def _route_once(c: Circuit, ag: ArchitectureGraph, cfg: RouterConfig,
                mapping: Permutation) -> Transcript:
    dist = distance_matrix(ag).tolist()
    diameter = ag.diameter
    sigma = list(mapping.mapping)
    owner = [-1] * ag.vertex_count
    for logical, phys in enumerate(sigma):
        owner[phys] = logical

    per_qubit: Dict[int, List[int]] = {q: [] for q in range(c.n_qubits)}
    for i, g in enumerate(c.gates):
        for q in g.qubits:
            per_qubit[q].append(i)
    head = {q: 0 for q in per_qubit}
    executed = [False] * len(c)
    remaining = len(c)
    events: List[Event] = []

    def ready() -> List[int]:
        cands = {per_qubit[q][head[q]] for q in per_qubit if head[q] < len(per_qubit[q])}
        return sorted(i for i in cands
                      if all(per_qubit[q][head[q]] == i for q in c.gates[i].qubits))

    swaps_since_exec = 0
    while remaining:
        progressed = True
        while progressed:
            progressed = False
            for i in ready():
                g = c.gates[i]
                if g.is_two_qubit and dist[sigma[g.qubits[0]]][sigma[g.qubits[1]]] != 1:
                    continue
                events.append(ExecEvent(i))
                executed[i] = True
                remaining -= 1
                for q in g.qubits:
                    head[q] += 1
                progressed = True
                swaps_since_exec = 0
        if not remaining:
            break

        blocked = ready()
        front = [c.gates[i].qubits for i in blocked]
        front_set = set(blocked)
        lookahead = []
        for i, g in enumerate(c.gates):
            if len(lookahead) >= cfg.lookahead_window:
                break
            if not executed[i] and g.is_two_qubit and i not in front_set:
                lookahead.append(g.qubits)
        gates = front + lookahead
        weights = [1.0] * len(front) + [cfg.lookahead_discount] * len(lookahead)

        candidates = sorted({
            (min(p, nb), max(p, nb))
            for a, b in front for p in (sigma[a], sigma[b]) for nb in ag.neighbors(p)
        })
        current = _score(None, gates, weights, sigma, owner, dist)
        best = min(candidates, key=lambda sw: _score(sw, gates, weights, sigma, owner, dist))
        best_score = _score(best, gates, weights, sigma, owner, dist)

        oa, ob = front[0]
        after = {owner[best[0]]: best[1], owner[best[1]]: best[0]}
        d_after = dist[after.get(oa, sigma[oa])][after.get(ob, sigma[ob])]
        if not (best_score < current and swaps_since_exec + 1 + d_after <= diameter):
            # step the oldest blocked gate along a shortest path
            pa, pb = sigma[oa], sigma[ob]
            step = min(x for x in ag.neighbors(pa) if dist[x][pb] == dist[pa][pb] - 1)
            best = (min(pa, step), max(pa, step))

        p0, p1 = best
        l0, l1 = owner[p0], owner[p1]
        owner[p0], owner[p1] = l1, l0
        if l0 >= 0:
            sigma[l0] = p1
        if l1 >= 0:
            sigma[l1] = p0
        events.append(SwapEvent(p0, p1))
        swaps_since_exec += 1

    return Transcript(mapping, tuple(events))


def greedy_route(c: Circuit, ag: ArchitectureGraph, cfg: RouterConfig,
                 initial_mapping: Optional[Permutation] = None) -> Transcript:
    """
    Route ``c`` onto ``ag`` with a distance-plus-lookahead greedy heuristic.

    Args:
        c: Logical circuit
        ag: Architecture graph
        cfg: Router settings
        initial_mapping: Fixed logical-to-physical mapping for every restart;
            when omitted each restart is seeded by seed_mapping()

    Returns:
        Best transcript over all restarts
    """
    if c.n_qubits > ag.vertex_count:
        raise ValueError(f"Circuit has {c.n_qubits} qubits, device '{ag.name}' has {ag.vertex_count}")
    if initial_mapping is not None and len(initial_mapping) != ag.vertex_count:
        raise ValueError(
            f"initial_mapping has length {len(initial_mapping)}, expected {ag.vertex_count}"
        )

    prefix_length = 0
    if initial_mapping is None:
        prefix_length, _ = longest_embeddable_prefix(c, ag)
        logger.debug("Longest embeddable prefix: %d two-qubit gates", prefix_length)

    best: Optional[Tuple[int, Transcript]] = None
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    for r, seed_seq in enumerate(seeds):
        rng = np.random.default_rng(seed_seq)
        if initial_mapping is not None:
            mapping = initial_mapping
        else:
            mapping = seed_mapping(c, ag, cfg, r, rng, prefix_length)
        transcript = _route_once(c, ag, cfg, mapping)
        if cfg.objective is Objective.GATE:
            cost = transcript.swap_count
        else:
            report = validate_transcript(c, ag, transcript)
            cost = report.output_depth
        logger.debug("Restart %d: cost %d", r, cost)
        if best is None or cost < best[0]:
            best = (cost, transcript)
    return best[1]
