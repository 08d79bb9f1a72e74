"""
Gate and circuit model: ASAP layering, interaction graphs, relabelling.
"""
import re
from collections import namedtuple
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Tuple

from .graph import Subgraph, canonical_edge
from .perm import Permutation

GateCounts = namedtuple('GateCounts', ['one_qubit', 'two_qubit'])

_TAG_RE = re.compile(r'^[a-z][a-z0-9_]*$')
RESERVED_TAGS = frozenset({'cx', 'swap', 'barrier', 'qreg', 'creg', 'measure', 'include', 'openqasm', 'gate'})


class GateKind(str, Enum):
    ONE_QUBIT = 'one_qubit'
    CNOT = 'cnot'
    SWAP = 'swap'


@dataclass(frozen=True)
class Gate:
    """A 1-qubit gate (identified by its tag), a CNOT or a SWAP."""

    kind: GateKind
    qubits: Tuple[int, ...]
    tag: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, 'kind', GateKind(self.kind))
        object.__setattr__(self, 'qubits', tuple(int(q) for q in self.qubits))
        if any(q < 0 for q in self.qubits):
            raise ValueError(f"Negative qubit index in {self.qubits}")
        if self.kind is GateKind.ONE_QUBIT:
            if len(self.qubits) != 1:
                raise ValueError(f"1-qubit gate needs exactly one qubit, got {self.qubits}")
            if self.tag is None or not _TAG_RE.match(self.tag) or self.tag in RESERVED_TAGS:
                raise ValueError(f"Invalid 1-qubit gate tag: {self.tag!r}")
        else:
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError(f"{self.kind.value} needs two distinct qubits, got {self.qubits}")
            if self.tag is not None:
                raise ValueError(f"{self.kind.value} does not take a tag")

    @classmethod
    def one(cls, qubit: int, tag: str = 'h') -> 'Gate':
        return cls(GateKind.ONE_QUBIT, (qubit,), tag)

    @classmethod
    def cnot(cls, control: int, target: int) -> 'Gate':
        return cls(GateKind.CNOT, (control, target))

    @classmethod
    def swap(cls, p: int, q: int) -> 'Gate':
        return cls(GateKind.SWAP, (p, q))

    @property
    def is_two_qubit(self) -> bool:
        return self.kind is not GateKind.ONE_QUBIT

    def relabel(self, p: Permutation) -> 'Gate':
        return Gate(self.kind, tuple(p(q) for q in self.qubits), self.tag)

    def __repr__(self) -> str:
        if self.kind is GateKind.ONE_QUBIT:
            return f"{self.tag}<{self.qubits[0]}>"
        name = 'cx' if self.kind is GateKind.CNOT else 'swap'
        return f"{name}<{self.qubits[0]},{self.qubits[1]}>"


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over qubits 0..n_qubits-1."""

    gates: Tuple[Gate, ...]
    n_qubits: int

    def __post_init__(self):
        object.__setattr__(self, 'gates', tuple(self.gates))
        for i, g in enumerate(self.gates):
            if max(g.qubits) >= self.n_qubits:
                raise ValueError(
                    f"Gate {i} {g!r} acts outside the {self.n_qubits}-qubit universe"
                )

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __getitem__(self, index: int) -> Gate:
        return self.gates[index]

    def __add__(self, other: 'Circuit') -> 'Circuit':
        return concat(self, other)

    @cached_property
    def layers(self) -> Tuple[Tuple[int, ...], ...]:
        """Gate indices per ASAP layer."""
        last: Dict[int, int] = {}
        buckets: List[List[int]] = []
        for i, g in enumerate(self.gates):
            layer = max((last.get(q, -1) for q in g.qubits), default=-1) + 1
            for q in g.qubits:
                last[q] = layer
            if layer == len(buckets):
                buckets.append([])
            buckets[layer].append(i)
        return tuple(tuple(b) for b in buckets)

    @property
    def depth(self) -> int:
        return len(self.layers)

    def two_qubit_gates(self) -> List[Tuple[int, Gate]]:
        return [(i, g) for i, g in enumerate(self.gates) if g.is_two_qubit]


def layers(c: Circuit) -> List[List[int]]:
    """Partition gate indices into layers, each gate as early as its qubits allow."""
    return [list(layer) for layer in c.layers]


def depth(c: Circuit) -> int:
    return c.depth


def interaction_graph(c: Circuit) -> Subgraph:
    """One undirected edge per distinct pair acted on by a 2-qubit gate."""
    return Subgraph.from_edges(canonical_edge(*g.qubits) for g in c.gates if g.is_two_qubit)


def apply_to_circuit(p: Permutation, c: Circuit) -> Circuit:
    """Relabel every gate's qubits by ``p``."""
    if len(p) < c.n_qubits:
        raise ValueError(f"Permutation of length {len(p)} cannot relabel {c.n_qubits} qubits")
    return Circuit(tuple(g.relabel(p) for g in c.gates), max(c.n_qubits, len(p)))


def concat(a: Circuit, b: Circuit) -> Circuit:
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"Cannot concatenate circuits on {a.n_qubits} and {b.n_qubits} qubits")
    return Circuit(a.gates + b.gates, a.n_qubits)


def concat_all(circuits: Iterable[Circuit], n_qubits: int) -> Circuit:
    gates: List[Gate] = []
    for c in circuits:
        if c.n_qubits != n_qubits:
            raise ValueError(f"Cannot concatenate a {c.n_qubits}-qubit circuit into {n_qubits} qubits")
        gates.extend(c.gates)
    return Circuit(tuple(gates), n_qubits)


def gate_counts(c: Circuit) -> GateCounts:
    """Count 1-qubit and 2-qubit gates; a SWAP counts once."""
    two = sum(1 for g in c.gates if g.is_two_qubit)
    return GateCounts(len(c.gates) - two, two)


def lower_swaps(c: Circuit) -> Circuit:
    """Replace each SWAP(p, q) with CNOT(p, q), CNOT(q, p), CNOT(p, q)."""
    gates: List[Gate] = []
    for g in c.gates:
        if g.kind is GateKind.SWAP:
            p, q = g.qubits
            gates.extend((Gate.cnot(p, q), Gate.cnot(q, p), Gate.cnot(p, q)))
        else:
            gates.append(g)
    return Circuit(tuple(gates), c.n_qubits)
