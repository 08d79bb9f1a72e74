"""
Transformation transcripts, planted-solution replay, metrics and an exact
swap-cost oracle for small devices.

A transcript records an initial logical-to-physical mapping followed by gate
executions and SWAP insertions. Executing it tracks the running mapping: a
SWAP on physical edge (p, q) left-composes the transposition of p and q.
"""
import itertools
import json
import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from networkx.algorithms.isomorphism import GraphMatcher

from .circuit import Circuit, Gate, GateCounts, gate_counts, lower_swaps
from .graph import ArchitectureGraph, load_architecture
from .metadata import QueknoMetadata
from .perm import Permutation
from .qasm import load_qasm
from .storage import read_json, write_json

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExecEvent:
    gate_index: int


@dataclass(frozen=True)
class SwapEvent:
    p: int
    q: int


Event = Union[ExecEvent, SwapEvent]


@dataclass(frozen=True)
class Transcript:
    """Initial mapping plus an ordered list of executions and SWAP insertions."""

    initial_mapping: Permutation
    events: Tuple[Event, ...]

    @property
    def swap_count(self) -> int:
        return sum(1 for e in self.events if isinstance(e, SwapEvent))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'initial_mapping': self.initial_mapping.to_list(),
            'events': [
                {'exec': e.gate_index} if isinstance(e, ExecEvent) else {'swap': [e.p, e.q]}
                for e in self.events
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Transcript':
        events: List[Event] = []
        for i, raw in enumerate(data['events']):
            if 'exec' in raw:
                events.append(ExecEvent(int(raw['exec'])))
            elif 'swap' in raw and len(raw['swap']) == 2:
                events.append(SwapEvent(int(raw['swap'][0]), int(raw['swap'][1])))
            else:
                raise ValueError(f"Event {i} is neither an exec nor a swap: {raw}")
        return cls(Permutation(tuple(data['initial_mapping'])), tuple(events))

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'Transcript':
        return cls.from_dict(read_json(path))

    def dump(self, path: Union[str, Path]) -> Path:
        return write_json(path, self.to_dict())


@dataclass(frozen=True)
class Violation:
    """First rule broken by a transcript; event_index -1 means the header."""

    event_index: int
    reason: str


@dataclass(frozen=True)
class Report:
    swap_count: int
    output_gate_counts: Optional[GateCounts]
    output_depth: Optional[int]
    rho_gate: Optional[Fraction]
    rho_depth: Optional[Fraction]
    first_violation: Optional[Violation] = None

    @property
    def valid(self) -> bool:
        return self.first_violation is None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'valid': self.valid,
            'swap_count': self.swap_count,
            'output_gate_counts': None if self.output_gate_counts is None
            else dict(self.output_gate_counts._asdict()),
            'output_depth': self.output_depth,
            'rho_gate': None if self.rho_gate is None else float(self.rho_gate),
            'rho_depth': None if self.rho_depth is None else float(self.rho_depth),
            'first_violation': None if self.first_violation is None
            else {'event_index': self.first_violation.event_index,
                  'reason': self.first_violation.reason},
        }

    def summary(self) -> str:
        if not self.valid:
            v = self.first_violation
            return f"INVALID at event {v.event_index}: {v.reason}"
        rho_g = 'n/a' if self.rho_gate is None else f"{float(self.rho_gate):.4f}"
        rho_d = 'n/a' if self.rho_depth is None else f"{float(self.rho_depth):.4f}"
        return (f"valid, swaps={self.swap_count}, cx={self.output_gate_counts.two_qubit}, "
                f"depth={self.output_depth}, rho_gate={rho_g}, rho_depth={rho_d}")


def metrics(input_circuit: Circuit, output_circuit: Circuit
            ) -> Tuple[Optional[Fraction], Optional[Fraction]]:
    """
    Gate and depth ratios of a transformation.

    Args:
        input_circuit: Logical circuit
        output_circuit: Physical circuit; SWAPs are lowered to 3 CNOTs first

    Returns:
        (rho_gate, rho_depth); each None when its denominator is zero
    """
    src = lower_swaps(input_circuit)
    out = lower_swaps(output_circuit)
    src_two = gate_counts(src).two_qubit
    rho_gate = Fraction(gate_counts(out).two_qubit, src_two) if src_two else None
    rho_depth = Fraction(out.depth, src.depth) if src.depth else None
    return rho_gate, rho_depth


def _simulate(c: Circuit, ag: ArchitectureGraph, t: Transcript
              ) -> Tuple[Circuit, Report]:
    n = ag.vertex_count
    swaps = t.swap_count

    def fail(index: int, reason: str, physical: List[Gate]) -> Tuple[Circuit, Report]:
        logger.debug("Transcript violation at event %d: %s", index, reason)
        return (Circuit(tuple(physical), n),
                Report(swaps, None, None, None, None, Violation(index, reason)))

    if c.n_qubits > n:
        return fail(-1, f"circuit has {c.n_qubits} qubits, device has {n}", [])
    if len(t.initial_mapping) != n:
        return fail(-1, f"initial mapping has length {len(t.initial_mapping)}, expected {n}", [])

    sigma = list(t.initial_mapping.mapping)
    queues: Dict[int, deque] = {q: deque() for q in range(c.n_qubits)}
    for i, g in enumerate(c.gates):
        for q in g.qubits:
            queues[q].append(i)
    executed = [False] * len(c)
    physical: List[Gate] = []

    for idx, event in enumerate(t.events):
        if isinstance(event, SwapEvent):
            p, q = event.p, event.q
            if not ag.has_edge(p, q):
                return fail(idx, f"swap ({p}, {q}) is not an edge of '{ag.name}'", physical)
            sigma = [q if v == p else p if v == q else v for v in sigma]
            physical.append(Gate.swap(p, q))
            continue

        i = event.gate_index
        if not 0 <= i < len(c):
            return fail(idx, f"gate index {i} out of range", physical)
        if executed[i]:
            return fail(idx, f"gate {i} executed twice", physical)
        gate = c.gates[i]
        blocked = [q for q in gate.qubits if queues[q][0] != i]
        if blocked:
            return fail(idx, f"gate {i} {gate!r} executed before an earlier gate on qubit {blocked[0]}",
                        physical)
        mapped = Gate(gate.kind, tuple(sigma[q] for q in gate.qubits), gate.tag)
        if gate.is_two_qubit and not ag.has_edge(*mapped.qubits):
            return fail(idx, f"gate {i} {gate!r} lands on non-adjacent physical qubits "
                             f"{mapped.qubits}", physical)
        for q in gate.qubits:
            queues[q].popleft()
        executed[i] = True
        physical.append(mapped)

    if not all(executed):
        missing = executed.index(False)
        return fail(len(t.events), f"gate {missing} never executed", physical)

    out = Circuit(tuple(physical), n)
    lowered = lower_swaps(out)
    rho_gate, rho_depth = metrics(c, out)
    return out, Report(swaps, gate_counts(lowered), lowered.depth, rho_gate, rho_depth)


def validate_transcript(c: Circuit, ag: ArchitectureGraph, t: Transcript) -> Report:
    """Execute ``t`` against ``c`` on ``ag`` and report the first violation or the metrics."""
    return _simulate(c, ag, t)[1]


def transcript_from_metadata(c: Circuit, meta: QueknoMetadata) -> Transcript:
    """
    Planted transformation: run each section, undoing the next boundary
    permutation between sections with its witness reversed.
    """
    meta.check_consistency(len(c))
    events: List[Event] = []
    for i, section in enumerate(meta.sections):
        if i > 0:
            events.extend(SwapEvent(p, q) for p, q in meta.boundaries[i - 1].witness.reversed())
        events.extend(ExecEvent(j) for j in range(section.start, section.end))
    return Transcript(meta.initial_mapping, tuple(events))


def replay(c: Circuit, meta: QueknoMetadata,
           ag: Optional[ArchitectureGraph] = None) -> Tuple[Circuit, Report]:
    """
    Rebuild the physical circuit of the planted solution and score it.

    Args:
        c: Benchmark circuit
        meta: Its metadata
        ag: Architecture graph; loaded by name from the spec if omitted

    Returns:
        (physical circuit with SWAP gates, Report)
    """
    if ag is None:
        ag = load_architecture(meta.spec.ag_name)
    return _simulate(c, ag, transcript_from_metadata(c, meta))


def automorphisms(ag: ArchitectureGraph) -> List[Permutation]:
    """All automorphisms of ``ag`` as vertex permutations, sorted."""
    g = ag.to_networkx()
    found = {
        tuple(iso[v] for v in range(ag.vertex_count))
        for iso in GraphMatcher(g, g).isomorphisms_iter()
    }
    return [Permutation(p) for p in sorted(found)]


def brute_force_optimal(c: Circuit, ag: ArchitectureGraph, cost_limit: int,
                        max_vertices: int = 8) -> Optional[int]:
    """
    Exact minimum number of SWAPs needed to execute ``c`` on ``ag``.

    Breadth-first search over (placement, executed gates) states, deepening
    one SWAP per level. Executable gates are always run eagerly, and initial
    placements are taken once per automorphism orbit.

    Args:
        c: Logical circuit
        ag: Architecture graph with at most ``max_vertices`` vertices
        cost_limit: Largest cost to search for
        max_vertices: Refuse larger devices

    Returns:
        Minimum SWAP count, or None if it exceeds cost_limit
    """
    if ag.vertex_count > max_vertices:
        raise ValueError(
            f"Exact search supports at most {max_vertices} vertices, '{ag.name}' has {ag.vertex_count}"
        )
    if c.n_qubits > ag.vertex_count:
        raise ValueError(f"Circuit has {c.n_qubits} qubits, device has {ag.vertex_count}")

    pairs = [g.qubits for g in c.gates if g.is_two_qubit]
    if not pairs:
        return 0
    logical = sorted({q for pair in pairs for q in pair})
    slot = {q: i for i, q in enumerate(logical)}
    gates = [(slot[a], slot[b]) for a, b in pairs]

    preds = []
    last: Dict[int, int] = {}
    for k, (a, b) in enumerate(gates):
        mask = 0
        for q in (a, b):
            if q in last:
                mask |= 1 << last[q]
            last[q] = k
        preds.append(mask)
    full = (1 << len(gates)) - 1
    adjacency = ag.adjacency

    def close(place: Tuple[int, ...], done: int) -> int:
        progress = True
        while progress:
            progress = False
            for k, (a, b) in enumerate(gates):
                bit = 1 << k
                if done & bit or preds[k] & ~done:
                    continue
                if place[b] in adjacency[place[a]]:
                    done |= bit
                    progress = True
        return done

    autos = [p.mapping for p in automorphisms(ag)]
    frontier = []
    seen = set()
    for place in itertools.permutations(range(ag.vertex_count), len(logical)):
        if min(tuple(a[v] for v in place) for a in autos) != place:
            continue
        state = (place, close(place, 0))
        if state[1] == full:
            return 0
        if state not in seen:
            seen.add(state)
            frontier.append(state)

    edges = ag.sorted_edges
    for cost in range(1, cost_limit + 1):
        nxt = []
        for place, done in frontier:
            for u, v in edges:
                if u not in place and v not in place:
                    continue
                moved = tuple(v if x == u else u if x == v else x for x in place)
                state = (moved, close(moved, done))
                if state[1] == full:
                    return cost
                if state not in seen:
                    seen.add(state)
                    nxt.append(state)
        frontier = nxt
        logger.debug("Exact search level %d: %d states", cost, len(frontier))
    return None


def load_report_inputs(circuit_path: Union[str, Path], transcript_path: Union[str, Path],
                       ag_name: str) -> Tuple[Circuit, ArchitectureGraph, Transcript]:
    """Load a circuit, a transcript and a device for third-party scoring."""
    return load_qasm(circuit_path), load_architecture(ag_name), Transcript.load(transcript_path)


def report_json(report: Report) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True)
