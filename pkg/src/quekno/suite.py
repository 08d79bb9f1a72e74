"""
Benchmark suites: enumerate the parameter grid, generate circuits on a worker
pool, write QASM files with JSON sidecars and a manifest, and summarise,
verify or evaluate a written suite.
"""
import hashlib
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .generator import GenerationOptions, generate
from .graph import ArchitectureGraph, load_architecture
from .metadata import (
    GraphSize,
    Objective,
    QueknoMetadata,
    QueknoSpec,
    parse_qbg_ratio,
    ratio_label,
)
from .perm import PermType
from .qasm import load_qasm, write_qasm
from .route import RouterConfig, greedy_route
from .storage import read_json, write_json
from .verify import Transcript, replay, validate_transcript

logger = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.json'

CELL_KEYS = ['perm_type', 'graph_size', 'qbg_ratio', 'target_cost']

EVALUATION_COLUMNS = ['file', 'known_rho', 'achieved_rho', 'ratio', 'valid', 'swaps']


@dataclass(frozen=True)
class ReviewBand:
    """Soft bounds for the known ratios of a regenerated full suite."""

    mean: float
    tolerance: float
    ceiling: float
    # largest share of circuits allowed above ``ceiling``
    share_above: float


REVIEW_BANDS = {
    Objective.GATE: ReviewBand(mean=1.19, tolerance=0.10, ceiling=1.6, share_above=0.0),
    Objective.DEPTH: ReviewBand(mean=1.40, tolerance=0.20, ceiling=1.5, share_above=0.25),
}

# costs over which mean depth ratios may grow at most linearly
LINEAR_COSTS = range(1, 6)


def suite_name(ag: ArchitectureGraph, objective: Union[Objective, str]) -> str:
    """Suite label such as 53Q_gate_rochester."""
    return f"{ag.vertex_count}Q_{Objective(objective).value}_{ag.name}"


def cell_key(perm: PermType, size: GraphSize, ratio: Fraction, cost: int) -> str:
    return f"{perm.value}_{size.value}_{ratio_label(ratio)}_c{cost}"


def derive_seed(base_seed: int, cell: str, index: int) -> int:
    """64-bit seed derived from the base seed, the cell key and the index within the cell."""
    digest = hashlib.sha256(f"{base_seed}:{cell}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], 'big')


@dataclass(frozen=True)
class SuiteEntry:
    """One circuit of a suite: file stem plus its spec."""

    stem: str
    cell: str
    spec: QueknoSpec


def build_entries(ag: ArchitectureGraph, objective: Union[Objective, str],
                  perm_types: Sequence[Union[PermType, str]],
                  graph_sizes: Sequence[Union[GraphSize, str]],
                  qbg_ratios: Sequence[Union[str, float, Fraction]],
                  costs: Sequence[int], count: int, base_seed: int,
                  subgraph_edges: Optional[int] = None,
                  ag_ref: Optional[str] = None) -> List[SuiteEntry]:
    """
    Enumerate every (perm type, graph size, ratio, cost, index) combination.

    Args:
        ag: Architecture graph
        objective: gate or depth
        perm_types: Boundary permutation types
        graph_sizes: Named subgraph sizes
        qbg_ratios: Qubit gate ratios
        costs: Target costs
        count: Circuits per cell
        base_seed: Seed every per-circuit seed is derived from
        subgraph_edges: Optional explicit subgraph edge count
        ag_ref: Name or path recorded in specs (defaults to ag.name)

    Returns:
        Entries in deterministic order
    """
    objective = Objective(objective)
    if count < 1:
        raise ValueError(f"count must be at least 1, got {count}")
    name = suite_name(ag, objective)
    entries = []
    for perm, size, ratio, cost in itertools.product(perm_types, graph_sizes, qbg_ratios, costs):
        perm, size, ratio = PermType(perm), GraphSize(size), parse_qbg_ratio(ratio)
        cell = cell_key(perm, size, ratio, int(cost))
        for idx in range(count):
            spec = QueknoSpec(
                ag_name=ag_ref or ag.name,
                objective=objective,
                target_cost=int(cost),
                perm_type=perm,
                graph_size=size,
                qbg_ratio=ratio,
                seed=derive_seed(base_seed, cell, idx),
                subgraph_edges=subgraph_edges,
            )
            entries.append(SuiteEntry(f"{name}_{cell}_{idx:02d}", cell, spec))
    return entries


def _summary(entry: SuiteEntry, meta: QueknoMetadata) -> Dict[str, Any]:
    spec = meta.spec
    return {
        'name': entry.stem,
        'cell': entry.cell,
        'qasm_file': meta.qasm_file,
        'metadata_file': f"{entry.stem}.json",
        'ag': spec.ag_name,
        'objective': spec.objective.value,
        'perm_type': spec.perm_type.value,
        'graph_size': spec.graph_size.value,
        'qbg_ratio': ratio_label(spec.qbg_ratio),
        'target_cost': spec.target_cost,
        'known_cost': meta.known_cost,
        'known_rho': None if meta.known_rho is None else float(meta.known_rho),
        'gates': meta.stats.get('gates'),
        'two_qubit': meta.stats.get('two_qubit'),
        'depth': meta.stats.get('depth'),
        'all_strong': meta.all_strong,
        'seed': spec.seed,
    }


def _generate_entry(args: Tuple[SuiteEntry, str, ArchitectureGraph, GenerationOptions]
                    ) -> Dict[str, Any]:
    entry, out_dir, ag, options = args
    circuit, meta = generate(entry.spec, ag, options)
    meta = meta.with_qasm_file(f"{entry.stem}.qasm")
    write_qasm(Path(out_dir) / meta.qasm_file, circuit)
    write_json(Path(out_dir) / f"{entry.stem}.json", meta.to_dict())
    return _summary(entry, meta)


def _ordering_flags(df: pd.DataFrame) -> List[str]:
    """Per-cell ordering and growth checks on mean known depth ratios."""
    means = df.groupby(['graph_size', 'qbg_ratio', 'target_cost'], sort=True)['known_rho'].mean()
    flags = []
    for (size, ratio, cost), value in means.items():
        qse = (size, 'QSE', cost)
        if ratio == 'TFL' and qse in means.index and value <= means.loc[qse]:
            flags.append(f"depth: TFL not above QSE for {size} c{cost} "
                         f"({value:.4f} vs {means.loc[qse]:.4f})")
        large = ('large', ratio, cost)
        if size == 'small' and large in means.index and value <= means.loc[large]:
            flags.append(f"depth: small not above large for {ratio} c{cost} "
                         f"({value:.4f} vs {means.loc[large]:.4f})")

    for (size, ratio), series in means.groupby(level=[0, 1], sort=True):
        per_cost = series.droplevel([0, 1])
        if 1 not in per_cost.index:
            continue
        slope = per_cost.loc[1] - 1
        for cost, value in per_cost.items():
            if cost in LINEAR_COSTS and value - 1 > cost * slope + 1e-9:
                flags.append(f"depth: {size} {ratio} c{cost} mean {value:.4f} grows faster "
                             f"than linearly from c1 ({per_cost.loc[1]:.4f})")
    return flags


@dataclass
class SuiteManifest:
    """Summaries of every circuit in a suite directory."""

    name: str
    entries: List[Dict[str, Any]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.entries)

    def cell_stats(self) -> pd.DataFrame:
        """
        Per-cell aggregates: circuit count, mean depth and gate counts,
        mean/min/max known ratio.
        """
        df = self.frame()
        if df.empty:
            return df
        df = df.copy()
        df['known_rho'] = pd.to_numeric(df['known_rho'], errors='coerce')
        grouped = df.groupby(CELL_KEYS, sort=True)
        stats = grouped.agg(
            circuits=('name', 'count'),
            mean_depth=('depth', 'mean'),
            mean_gates=('gates', 'mean'),
            mean_two_qubit=('two_qubit', 'mean'),
            mean_known_rho=('known_rho', 'mean'),
            min_known_rho=('known_rho', 'min'),
            max_known_rho=('known_rho', 'max'),
            weak=('all_strong', lambda s: int((~s.astype(bool)).sum())),
        )
        return stats.reset_index()

    def review_flags(self) -> List[str]:
        """
        Distribution checks on known ratios, one line per failed check.

        Means and shares are compared with REVIEW_BANDS per objective. Depth
        suites also need TFL above QSE and small above large per cell, and
        mean ratios growing at most linearly with target cost. A flag asks
        for a look at the generator; it does not make the suite invalid.
        """
        df = self.frame()
        if df.empty:
            return []
        df = df.copy()
        df['known_rho'] = pd.to_numeric(df['known_rho'], errors='coerce')
        flags = []
        for objective, part in df.groupby('objective', sort=True):
            band = REVIEW_BANDS[Objective(objective)]
            rho = part['known_rho'].dropna()
            if rho.empty:
                continue
            mean = float(rho.mean())
            if abs(mean - band.mean) > band.tolerance:
                flags.append(f"{objective}: mean known rho {mean:.4f} outside "
                             f"{band.mean:.2f} ± {band.tolerance:.2f}")
            share = float((rho > band.ceiling).mean())
            if share > band.share_above:
                flags.append(f"{objective}: {share:.0%} of circuits above {band.ceiling}, "
                             f"expected at most {band.share_above:.0%}")
            if Objective(objective) is Objective.DEPTH:
                flags.extend(_ordering_flags(part))
        return flags

    def write(self, out_dir: Union[str, Path]) -> Path:
        return write_json(Path(out_dir) / MANIFEST_NAME, self.entries)

    @classmethod
    def load(cls, suite_dir: Union[str, Path]) -> 'SuiteManifest':
        """
        Load a suite's manifest, or rebuild it from sidecars when absent.

        Args:
            suite_dir: Directory holding the suite

        Returns:
            SuiteManifest (possibly empty)
        """
        suite_dir = Path(suite_dir)
        if not suite_dir.is_dir():
            raise FileNotFoundError(f"Suite directory not found: {suite_dir}")
        path = suite_dir / MANIFEST_NAME
        if path.exists():
            entries = read_json(path)
        else:
            entries = []
            for sidecar in sorted(suite_dir.glob('*.json')):
                try:
                    data = read_json(sidecar)
                    meta = QueknoMetadata.from_dict(data)
                except (OSError, ValueError, KeyError, TypeError) as exc:
                    logger.warning("Skipping %s: %s", sidecar.name, exc)
                    continue
                spec = meta.spec
                cell = cell_key(spec.perm_type, spec.graph_size, spec.qbg_ratio, spec.target_cost)
                entries.append(_summary(SuiteEntry(sidecar.stem, cell, meta.spec), meta))
        return cls(suite_dir.name, list(entries))


def generate_suite(entries: Sequence[SuiteEntry], out_dir: Union[str, Path],
                   ag: ArchitectureGraph, options: Optional[GenerationOptions] = None,
                   workers: int = 1) -> SuiteManifest:
    """
    Generate every entry, write its files and the manifest.

    Args:
        entries: Output of build_entries
        out_dir: Destination directory
        ag: Architecture graph
        options: Generation tunables
        workers: Process pool size; 1 runs in-process

    Returns:
        SuiteManifest in entry order
    """
    options = options or GenerationOptions()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = [(entry, str(out_dir), ag, options) for entry in entries]

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(_generate_entry, jobs, chunksize=4))
    else:
        summaries = []
        for i, job in enumerate(jobs, start=1):
            summaries.append(_generate_entry(job))
            if i % 50 == 0:
                logger.info("Generated %d/%d circuits", i, len(jobs))

    manifest = SuiteManifest(out_dir.name, summaries)
    manifest.write(out_dir)
    logger.info("Wrote %d circuits to %s", len(manifest), out_dir)
    return manifest


def _load_pair(suite_dir: Path, entry: Dict[str, Any]
               ) -> Tuple[Any, QueknoMetadata, ArchitectureGraph]:
    data = read_json(suite_dir / entry['metadata_file'])
    ag = load_architecture(data['spec']['ag'])
    meta = QueknoMetadata.from_dict(data, ag)
    circuit = load_qasm(suite_dir / (meta.qasm_file or entry['qasm_file']))
    return circuit, meta, ag


def verify_entry(suite_dir: Union[str, Path], entry: Dict[str, Any]) -> Optional[str]:
    """Replay one suite entry; returns None when it checks out, else the problem."""
    try:
        circuit, meta, ag = _load_pair(Path(suite_dir), entry)
        _, report = replay(circuit, meta, ag)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        return f"unreadable: {exc}"
    if not report.valid:
        return report.summary()
    if meta.spec.objective is Objective.DEPTH:
        for i, b in enumerate(meta.boundaries):
            if not b.witness.is_parallel() or b.witness.layers() != b.depth_layers:
                return (f"boundary {i} is not a single parallel swap layer "
                        f"({b.witness.layers()} layers, {b.depth_layers} recorded)")
    planted_swaps = sum(b.swap_cost for b in meta.boundaries)
    if report.swap_count != planted_swaps:
        return f"replay used {report.swap_count} swaps, boundaries record {planted_swaps}"
    if meta.known_rho is not None:
        replayed = report.rho_gate if meta.spec.objective is Objective.GATE else report.rho_depth
        if replayed != meta.known_rho:
            return f"known_rho {meta.known_rho} differs from replayed {replayed}"
    return None


def verify_suite(suite_dir: Union[str, Path]) -> List[Tuple[str, Optional[str]]]:
    """
    Replay every circuit of a suite.

    Returns:
        (name, problem or None) per entry, in manifest order
    """
    manifest = SuiteManifest.load(suite_dir)
    results = []
    for entry in manifest.entries:
        problem = verify_entry(suite_dir, entry)
        if problem:
            logger.warning("%s: %s", entry['name'], problem)
        results.append((entry['name'], problem))
    return results


def _evaluate_entry(suite_dir: Path, entry: Dict[str, Any], router: RouterConfig,
                    transcripts_dir: Optional[Union[str, Path]]) -> Dict[str, Any]:
    circuit, meta, ag = _load_pair(suite_dir, entry)
    if transcripts_dir is not None:
        transcript = Transcript.load(Path(transcripts_dir) / f"{entry['name']}.json")
    else:
        cfg = RouterConfig(
            objective=meta.spec.objective,
            lookahead_window=router.lookahead_window,
            seed=router.seed,
            restarts=router.restarts,
            lookahead_discount=router.lookahead_discount,
        )
        transcript = greedy_route(circuit, ag, cfg)
    report = validate_transcript(circuit, ag, transcript)
    achieved = report.rho_gate if meta.spec.objective is Objective.GATE else report.rho_depth
    known = meta.known_rho
    return {
        'file': meta.qasm_file,
        'known_rho': None if known is None else float(known),
        'achieved_rho': None if achieved is None else float(achieved),
        'ratio': float(achieved / known) if achieved is not None and known else np.nan,
        'valid': report.valid,
        'swaps': report.swap_count,
    }


def evaluate_suite(suite_dir: Union[str, Path], router: RouterConfig,
                   transcripts_dir: Optional[Union[str, Path]] = None) -> pd.DataFrame:
    """
    Score the greedy router, or external transcripts, against known ratios.

    Args:
        suite_dir: Suite directory
        router: Router settings; its objective is overridden per circuit
        transcripts_dir: Directory of ``<name>.json`` transcripts to score instead

    Returns:
        DataFrame with columns file, known_rho, achieved_rho, ratio, valid, swaps;
        an unreadable entry gives a row with valid False
    """
    suite_dir = Path(suite_dir)
    manifest = SuiteManifest.load(suite_dir)
    rows = []
    for entry in manifest.entries:
        try:
            rows.append(_evaluate_entry(suite_dir, entry, router, transcripts_dir))
        except (OSError, ValueError, KeyError, TypeError) as exc:
            logger.warning("%s: unreadable: %s", entry.get('name'), exc)
            rows.append({
                'file': entry.get('qasm_file'),
                'known_rho': None,
                'achieved_rho': None,
                'ratio': np.nan,
                'valid': False,
                'swaps': None,
            })
    return pd.DataFrame(rows, columns=EVALUATION_COLUMNS)
