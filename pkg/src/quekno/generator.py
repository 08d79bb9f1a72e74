"""
Benchmark construction: a chain of strong glinks, a random circuit sprinkled
onto every subgraph of the chain, and a scramble that hides the chain behind
the cumulative boundary permutations.

Section i of the output circuit is (p1 o ... o pi)(Ci), where Ci is an
AG-circuit whose interaction graph is the i-th subgraph of the chain. Taking
p1^-1 as initial mapping and undoing each boundary permutation with its
witness executes the circuit at the planted cost.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

import numpy as np

from .circuit import (
    Circuit,
    Gate,
    apply_to_circuit,
    concat_all,
    gate_counts,
)
from .graph import ArchitectureGraph, Subgraph, load_architecture, random_subgraph
from .metadata import GRAPH_SIZE_EDGES, Objective, QueknoMetadata, QueknoSpec, Section
from .perm import Glink, Permutation, compose, inverse, make_glink, random_permutation
from .verify import replay

logger = logging.getLogger(__name__)

DEFAULT_TAGS = ('x', 'h', 't', 's')


@dataclass(frozen=True)
class GenerationOptions:
    """Tunables for generate(); defaults match config/config.yml."""

    retry_budget: int = 200
    node_limit: int = 10_000_000
    edge_jitter: int = 2
    one_qubit_tags: Tuple[str, ...] = DEFAULT_TAGS
    graph_sizes: Dict[str, int] = field(default_factory=lambda: dict(GRAPH_SIZE_EDGES))

    @classmethod
    def from_config(cls, config) -> 'GenerationOptions':
        """
        Build options from a Config instance.

        Args:
            config: quekno.config_loader.Config

        Returns:
            GenerationOptions
        """
        sizes = dict(GRAPH_SIZE_EDGES)
        sizes.update(config.graph_sizes)
        return cls(graph_sizes=sizes, **config.generation_params)


def round_half_up(value: Fraction) -> int:
    return math.floor(value + Fraction(1, 2))


def sprinkle(g: Subgraph, qbg_ratio: Fraction, rng: np.random.Generator, n_qubits: int,
             tags: Sequence[str] = DEFAULT_TAGS) -> Circuit:
    """
    Random AG-circuit whose interaction graph is exactly ``g``.

    Every edge gets one CNOT, then up to |E| further CNOTs go on random edges.
    1-qubit gates are added to reach round(qbg_ratio * #CNOT), and the gate
    order is shuffled.

    Args:
        g: Subgraph with at least one edge
        qbg_ratio: Target 1-qubit to 2-qubit gate ratio
        rng: Seeded random stream
        n_qubits: Qubit universe of the returned circuit
        tags: Alphabet for 1-qubit gate tags

    Returns:
        Circuit
    """
    if not g.edges:
        raise ValueError("Cannot sprinkle gates onto a subgraph without edges")
    edges = g.sorted_edges
    extra = int(rng.integers(0, len(edges) + 1))
    pairs = list(edges) + [edges[int(rng.integers(len(edges)))] for _ in range(extra)]

    gates: List[Gate] = []
    for p, q in pairs:
        if rng.random() < 0.5:
            p, q = q, p
        gates.append(Gate.cnot(p, q))

    verts = sorted(g.vertices)
    for _ in range(round_half_up(Fraction(qbg_ratio) * len(pairs))):
        v = verts[int(rng.integers(len(verts)))]
        gates.append(Gate.one(v, tags[int(rng.integers(len(tags)))]))

    order = rng.permutation(len(gates))
    return Circuit(tuple(gates[int(i)] for i in order), n_qubits)


def align_last_layer(c: Circuit, g: Subgraph, rng: np.random.Generator,
                     tags: Sequence[str] = DEFAULT_TAGS) -> Circuit:
    """
    Pad idle vertices of ``g`` so that each of them is busy in the last layer.

    Padding uses 1-qubit gates or, when a neighbour in ``g`` is idle too,
    a repeated CNOT on that edge. Depth and interaction graph are unchanged.
    """
    total = c.depth
    if total == 0:
        return c
    last = {v: -1 for v in g.vertices}
    for layer_no, layer in enumerate(c.layers):
        for i in layer:
            for q in c.gates[i].qubits:
                last[q] = layer_no

    final = total - 1
    gates = list(c.gates)
    adj = {v: sorted(u for e in g.edges if v in e for u in e if u != v) for v in g.vertices}
    for v in sorted(g.vertices):
        while last[v] < final:
            partners = [u for u in adj[v] if last[u] < final]
            if partners and rng.random() < 0.5:
                u = partners[int(rng.integers(len(partners)))]
                layer = max(last[u], last[v]) + 1
                gates.append(Gate.cnot(v, u) if rng.random() < 0.5 else Gate.cnot(u, v))
                last[u] = last[v] = layer
            else:
                gates.append(Gate.one(v, tags[int(rng.integers(len(tags)))]))
                last[v] += 1
    return Circuit(tuple(gates), c.n_qubits)


def _reversed(c: Circuit) -> Circuit:
    return Circuit(tuple(reversed(c.gates)), c.n_qubits)


def _final_layer_qubits(c: Circuit) -> FrozenSet[int]:
    if not c.layers:
        return frozenset()
    return frozenset(q for i in c.layers[-1] for q in c.gates[i].qubits)


def is_aligned(c: Circuit, g: Subgraph) -> bool:
    """True when every vertex of ``g`` has its first and its last gate on a longest path."""
    return g.vertices <= _final_layer_qubits(c) and g.vertices <= _final_layer_qubits(_reversed(c))


def align_layers(c: Circuit, g: Subgraph, rng: np.random.Generator,
                 tags: Sequence[str] = DEFAULT_TAGS) -> Circuit:
    """
    Align both ends of a section: every vertex of ``g`` ends a longest path
    and starts one, so a SWAP layer between two sections cannot slide into
    either of them.
    """
    c = align_last_layer(c, g, rng, tags)
    return _reversed(align_last_layer(_reversed(c), g, rng, tags))


def balance_one_qubit(c: Circuit, g: Subgraph, qbg_ratio: Fraction, rng: np.random.Generator,
                      tags: Sequence[str] = DEFAULT_TAGS) -> Circuit:
    """
    Bring the 1-qubit gate count of an aligned section back to
    round(qbg_ratio * #CNOT).

    Surplus 1-qubit gates are dropped when depth and alignment survive it;
    missing ones go into idle slots between two consecutive gates of a qubit,
    which moves no other gate. Stops early when neither is possible.
    """
    counts = gate_counts(c)
    target = round_half_up(Fraction(qbg_ratio) * counts.two_qubit)
    depth = c.depth
    gates = list(c.gates)

    surplus = counts.one_qubit - target
    removed: Set[int] = set()
    for idx in (int(i) for i in rng.permutation(len(gates))):
        if surplus <= 0:
            break
        if gates[idx].is_two_qubit:
            continue
        trial = Circuit(tuple(gt for j, gt in enumerate(gates) if j != idx and j not in removed),
                        c.n_qubits)
        if trial.depth == depth and is_aligned(trial, g):
            removed.add(idx)
            surplus -= 1
    gates = [gt for j, gt in enumerate(gates) if j not in removed]

    deficit = target - counts.one_qubit
    while deficit > 0:
        current = Circuit(tuple(gates), c.n_qubits)
        layer_of = {i: k for k, layer in enumerate(current.layers) for i in layer}
        previous: Dict[int, int] = {}
        slots: List[Tuple[int, int]] = []
        for i, gt in enumerate(gates):
            for q in gt.qubits:
                if q in previous and layer_of[i] >= layer_of[previous[q]] + 2:
                    slots.append((previous[q], q))
                previous[q] = i
        if not slots:
            break
        after, q = slots[int(rng.integers(len(slots)))]
        gates.insert(after + 1, Gate.one(q, tags[int(rng.integers(len(tags)))]))
        deficit -= 1

    if surplus > 0 or deficit > 0:
        logger.debug("1-qubit balance stopped %d gate(s) off target %d",
                     max(surplus, deficit), target)
    return Circuit(tuple(gates), c.n_qubits)


def _section_circuit(spec: QueknoSpec, g: Subgraph, rng: np.random.Generator, n: int,
                     options: GenerationOptions) -> Circuit:
    c = sprinkle(g, spec.qbg_ratio, rng, n, options.one_qubit_tags)
    if spec.objective is Objective.DEPTH:
        c = align_layers(c, g, rng, options.one_qubit_tags)
        c = balance_one_qubit(c, g, spec.qbg_ratio, rng, options.one_qubit_tags)
    return c


def assemble_benchmark(ag: ArchitectureGraph, spec: QueknoSpec, pi1: Permutation,
                       g1: Subgraph, glinks: Sequence[Glink],
                       section_circuits: Sequence[Circuit]) -> Tuple[Circuit, QueknoMetadata]:
    """
    Scramble section circuits along a glink chain and record the planted solution.

    Args:
        ag: Architecture graph
        spec: Benchmark parameters
        pi1: Initial scrambling permutation
        g1: First subgraph of the chain
        glinks: Links of the chain in order
        section_circuits: Unscrambled AG-circuits, one per subgraph

    Returns:
        (circuit, metadata) with known ratios measured by replay
    """
    if len(section_circuits) != len(glinks) + 1:
        raise ValueError(
            f"{len(glinks)} glinks need {len(glinks) + 1} section circuits, got {len(section_circuits)}"
        )
    n = ag.vertex_count

    cumulative = pi1
    scrambled = [apply_to_circuit(pi1, section_circuits[0])]
    for glink, section in zip(glinks, section_circuits[1:]):
        cumulative = compose(cumulative, glink.perm)
        scrambled.append(apply_to_circuit(cumulative, section))
    circuit = concat_all(scrambled, n)

    sections = []
    start = 0
    for part in scrambled:
        sections.append(Section(start, start + len(part)))
        start += len(part)

    boundaries = tuple(gl.boundary for gl in glinks)
    if spec.objective is Objective.GATE:
        known_cost = sum(b.swap_cost for b in boundaries)
    else:
        known_cost = sum(b.depth_layers for b in boundaries)

    counts = gate_counts(circuit)
    meta = QueknoMetadata(
        spec=spec,
        initial_mapping=inverse(pi1),
        sections=tuple(sections),
        boundaries=boundaries,
        strong_flags=tuple(gl.strong for gl in glinks),
        subgraphs=(g1,) + tuple(gl.g2 for gl in glinks),
        known_cost=known_cost,
        stats={
            'gates': len(circuit),
            'one_qubit': counts.one_qubit,
            'two_qubit': counts.two_qubit,
            'depth': circuit.depth,
        },
    )

    _, report = replay(circuit, meta, ag)
    if not report.valid:
        raise RuntimeError(f"Planted solution failed replay: {report.first_violation}")
    meta = replace(meta, known_rho_gate=report.rho_gate, known_rho_depth=report.rho_depth)
    return circuit, meta


def generate(spec: QueknoSpec, ag: Optional[ArchitectureGraph] = None,
             options: Optional[GenerationOptions] = None) -> Tuple[Circuit, QueknoMetadata]:
    """
    Generate one benchmark circuit with a planted near-optimal transformation.

    Args:
        spec: Benchmark parameters
        ag: Architecture graph; loaded from spec.ag_name when omitted
        options: Generation tunables

    Returns:
        (circuit, metadata)
    """
    options = options or GenerationOptions()
    if ag is None:
        ag = load_architecture(spec.ag_name)
    rng = np.random.default_rng(spec.seed)
    n = ag.vertex_count
    target_edges = spec.target_edges(ag, options.graph_sizes)

    pi1 = random_permutation(n, rng)
    g1 = random_subgraph(ag, target_edges, rng, options.edge_jitter)
    section_circuits = [_section_circuit(spec, g1, rng, n, options)]
    glinks: List[Glink] = []

    cost = 0
    while cost < spec.target_cost:
        # a single remaining unit forces a one-swap boundary
        max_swaps = spec.target_cost - cost if spec.objective is Objective.GATE else None
        prev = glinks[-1].g2 if glinks else g1
        glink = make_glink(
            ag, prev, spec.perm_type, target_edges, rng,
            retry_budget=options.retry_budget,
            node_limit=options.node_limit,
            jitter=options.edge_jitter,
            max_swaps=max_swaps,
        )
        glinks.append(glink)
        section_circuits.append(_section_circuit(spec, glink.g2, rng, n, options))
        cost += glink.boundary.swap_cost if spec.objective is Objective.GATE else 1

    circuit, meta = assemble_benchmark(ag, spec, pi1, g1, glinks, section_circuits)
    logger.info(
        "Generated %s %s circuit: cost %d, %d gates, depth %d, rho %.4f, weak glinks %d",
        ag.name, spec.objective.value, meta.known_cost, len(circuit), circuit.depth,
        float(meta.known_rho or 0), sum(1 for s in meta.strong_flags if not s),
    )
    return circuit, meta
