"""
QUEKNO benchmark package
Generates quantum circuit transformation benchmarks with known near-optimal
SWAP costs, replays their planted solutions and scores routed transcripts.
"""

from .config_loader import Config, get_config, reload_config
from .graph import ArchitectureGraph, Subgraph, load_architecture, search_embedding
from .perm import Permutation, PermType, compose, inverse
from .circuit import Circuit, Gate, interaction_graph
from .qasm import QasmParseError, emit_qasm, parse_qasm
from .metadata import Objective, QueknoMetadata, QueknoSpec
from .generator import generate
from .verify import Report, Transcript, brute_force_optimal, replay, validate_transcript
from .route import RouterConfig, greedy_route

__version__ = '0.1.0'
__all__ = [
    'Config',
    'get_config',
    'reload_config',
    'ArchitectureGraph',
    'Subgraph',
    'load_architecture',
    'search_embedding',
    'Permutation',
    'PermType',
    'compose',
    'inverse',
    'Circuit',
    'Gate',
    'interaction_graph',
    'QasmParseError',
    'emit_qasm',
    'parse_qasm',
    'Objective',
    'QueknoMetadata',
    'QueknoSpec',
    'generate',
    'Report',
    'Transcript',
    'brute_force_optimal',
    'replay',
    'validate_transcript',
    'RouterConfig',
    'greedy_route'
]
