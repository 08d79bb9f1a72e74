"""
Benchmark specifications and the planted-solution metadata written beside
every generated circuit.
"""
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from .graph import ArchitectureGraph, Subgraph, load_architecture
from .perm import BoundaryPermutation, Permutation, PermType


class Objective(str, Enum):
    GATE = 'gate'
    DEPTH = 'depth'


class GraphSize(str, Enum):
    SMALL = 'small'
    LARGE = 'large'
    TOKYO_DEFAULT = 'tokyo-default'


GRAPH_SIZE_EDGES: Dict[str, int] = {
    GraphSize.SMALL.value: 8,
    GraphSize.LARGE.value: 16,
    GraphSize.TOKYO_DEFAULT.value: 5,
}

QBG_RATIOS: Dict[str, Fraction] = {
    'TFL': Fraction(3, 2),
    'QSE': Fraction(51, 20),
}

GATE_PERM_TYPES = (PermType.OPT1, PermType.OPT2)
DEPTH_PERM_TYPES = (PermType.PARALLEL,)


def parse_qbg_ratio(value: Union[str, float, int, Fraction]) -> Fraction:
    """Accept 'TFL', 'QSE', a decimal string, a fraction string or a number."""
    if isinstance(value, Fraction):
        return value
    text = str(value).strip()
    if text.upper() in QBG_RATIOS:
        return QBG_RATIOS[text.upper()]
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(
            f"Invalid qubit gate ratio '{value}'. Use TFL, QSE or a positive number"
        ) from None


def ratio_label(ratio: Fraction) -> str:
    """Short label for file names: TFL, QSE or the decimal value."""
    for name, value in QBG_RATIOS.items():
        if ratio == value:
            return name
    return f"{float(ratio):g}"


def fraction_to_str(value: Optional[Fraction]) -> Optional[str]:
    return None if value is None else f"{value.numerator}/{value.denominator}"


def fraction_from_str(value: Optional[str]) -> Optional[Fraction]:
    return None if value is None else Fraction(value)


@dataclass(frozen=True)
class QueknoSpec:
    """Parameters of one benchmark circuit."""

    ag_name: str
    objective: Objective
    target_cost: int
    perm_type: PermType
    graph_size: GraphSize
    qbg_ratio: Fraction
    seed: int
    subgraph_edges: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, 'objective', Objective(self.objective))
        object.__setattr__(self, 'perm_type', PermType(self.perm_type))
        object.__setattr__(self, 'graph_size', GraphSize(self.graph_size))
        object.__setattr__(self, 'qbg_ratio', parse_qbg_ratio(self.qbg_ratio))
        self.validate()

    def validate(self) -> None:
        allowed = GATE_PERM_TYPES if self.objective is Objective.GATE else DEPTH_PERM_TYPES
        if self.perm_type not in allowed:
            raise ValueError(
                f"Objective '{self.objective.value}' requires perm type in "
                f"{[p.value for p in allowed]}, got '{self.perm_type.value}'"
            )
        if self.target_cost < 0:
            raise ValueError(f"target_cost must be non-negative, got {self.target_cost}")
        if self.qbg_ratio <= 0:
            raise ValueError(f"qbg_ratio must be positive, got {self.qbg_ratio}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.subgraph_edges is not None and self.subgraph_edges < 1:
            raise ValueError(f"subgraph_edges must be at least 1, got {self.subgraph_edges}")

    def target_edges(self, ag: ArchitectureGraph,
                     graph_sizes: Optional[Mapping[str, int]] = None) -> int:
        """Mean subgraph edge count, clamped to the device's edge count."""
        if self.subgraph_edges is not None:
            wanted = self.subgraph_edges
        else:
            wanted = (graph_sizes or GRAPH_SIZE_EDGES)[self.graph_size.value]
        return max(1, min(wanted, len(ag.edges)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'ag': self.ag_name,
            'objective': self.objective.value,
            'target_cost': self.target_cost,
            'perm_type': self.perm_type.value,
            'graph_size': self.graph_size.value,
            'qbg_ratio': fraction_to_str(self.qbg_ratio),
            'seed': self.seed,
            'subgraph_edges': self.subgraph_edges,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'QueknoSpec':
        return cls(
            ag_name=data['ag'],
            objective=data['objective'],
            target_cost=int(data['target_cost']),
            perm_type=data['perm_type'],
            graph_size=data['graph_size'],
            qbg_ratio=data['qbg_ratio'],
            seed=int(data['seed']),
            subgraph_edges=data.get('subgraph_edges'),
        )


@dataclass(frozen=True)
class Section:
    """Half-open gate index range [start, end) of one section."""

    start: int
    end: int

    def __len__(self) -> int:
        return self.end - self.start

    def to_dict(self) -> Dict[str, int]:
        return {'start': self.start, 'end': self.end}


@dataclass(frozen=True)
class QueknoMetadata:
    """Planted solution of a generated circuit and its measured quality."""

    spec: QueknoSpec
    initial_mapping: Permutation
    sections: Tuple[Section, ...]
    boundaries: Tuple[BoundaryPermutation, ...]
    strong_flags: Tuple[bool, ...]
    subgraphs: Tuple[Subgraph, ...]
    known_cost: int
    known_rho_gate: Optional[Fraction] = None
    known_rho_depth: Optional[Fraction] = None
    stats: Dict[str, int] = field(default_factory=dict)
    qasm_file: Optional[str] = None

    @property
    def seed(self) -> int:
        return self.spec.seed

    @property
    def known_rho(self) -> Optional[Fraction]:
        """Ratio for the benchmark's own objective."""
        if self.spec.objective is Objective.GATE:
            return self.known_rho_gate
        return self.known_rho_depth

    @property
    def all_strong(self) -> bool:
        return all(self.strong_flags)

    def boundary_cost(self) -> int:
        if self.spec.objective is Objective.GATE:
            return sum(b.swap_cost for b in self.boundaries)
        return sum(b.depth_layers for b in self.boundaries)

    def check_consistency(self, n_gates: Optional[int] = None) -> None:
        """Raise ValueError when sections, boundaries and cost disagree."""
        if len(self.sections) != len(self.boundaries) + 1:
            raise ValueError(
                f"{len(self.sections)} sections need {len(self.sections) - 1} boundaries, "
                f"got {len(self.boundaries)}"
            )
        if len(self.strong_flags) != len(self.boundaries):
            raise ValueError("strong_flags must have one entry per boundary")
        expected_start = 0
        for s in self.sections:
            if s.start != expected_start or s.end < s.start:
                raise ValueError(f"Sections do not tile the circuit at {s}")
            expected_start = s.end
        if n_gates is not None and expected_start != n_gates:
            raise ValueError(f"Sections cover {expected_start} gates, circuit has {n_gates}")
        if self.known_cost != self.boundary_cost():
            raise ValueError(
                f"known_cost {self.known_cost} differs from boundary total {self.boundary_cost()}"
            )

    def with_qasm_file(self, name: str) -> 'QueknoMetadata':
        return replace(self, qasm_file=name)

    def to_dict(self) -> Dict[str, Any]:
        known_rho = self.known_rho
        return {
            'spec': self.spec.to_dict(),
            'seed': self.seed,
            'initial_mapping': self.initial_mapping.to_list(),
            'sections': [s.to_dict() for s in self.sections],
            'boundaries': [
                dict(b.to_dict(), strong=bool(strong))
                for b, strong in zip(self.boundaries, self.strong_flags)
            ],
            'subgraphs': [g.to_dict() for g in self.subgraphs],
            'known_cost': self.known_cost,
            'known_rho': None if known_rho is None else float(known_rho),
            'known_rho_exact': fraction_to_str(known_rho),
            'known_rho_gate': fraction_to_str(self.known_rho_gate),
            'known_rho_depth': fraction_to_str(self.known_rho_depth),
            'stats': dict(self.stats),
            'qasm_file': self.qasm_file,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any],
                  ag: Optional[ArchitectureGraph] = None) -> 'QueknoMetadata':
        """
        Rebuild metadata from its JSON form.

        Args:
            data: Parsed sidecar
            ag: Architecture the boundary SWAPs live on; loaded from the spec if omitted

        Returns:
            QueknoMetadata
        """
        spec = QueknoSpec.from_dict(data['spec'])
        if ag is None:
            ag = load_architecture(spec.ag_name)
        boundaries = tuple(BoundaryPermutation.from_dict(b, ag) for b in data['boundaries'])
        return cls(
            spec=spec,
            initial_mapping=Permutation(tuple(data['initial_mapping'])),
            sections=tuple(Section(int(s['start']), int(s['end'])) for s in data['sections']),
            boundaries=boundaries,
            strong_flags=tuple(bool(b.get('strong', False)) for b in data['boundaries']),
            subgraphs=tuple(Subgraph.from_dict(g) for g in data.get('subgraphs', [])),
            known_cost=int(data['known_cost']),
            known_rho_gate=fraction_from_str(data.get('known_rho_gate')),
            known_rho_depth=fraction_from_str(data.get('known_rho_depth')),
            stats=dict(data.get('stats', {})),
            qasm_file=data.get('qasm_file'),
        )
