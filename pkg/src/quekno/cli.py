"""
Command line: quekno generate | verify | evaluate | stats.

Exit codes: 0 success, 1 validation failure or nothing to process, 2 usage error.
"""
import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from .config_loader import Config, get_config
from .generator import GenerationOptions
from .graph import load_architecture
from .metadata import DEPTH_PERM_TYPES, GATE_PERM_TYPES, GraphSize, Objective
from .route import RouterConfig
from .suite import SuiteManifest, build_entries, evaluate_suite, generate_suite, suite_name, verify_suite
from .verify import load_report_inputs, report_json, validate_transcript

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2

SEED_ENV_VAR = 'QUEKNO_SEED'


class UsageError(Exception):
    pass


def _csv(value: Optional[str]) -> Optional[List[str]]:
    if value is None:
        return None
    items = [v.strip() for v in value.split(',') if v.strip()]
    if not items:
        raise UsageError(f"empty list: '{value}'")
    return items


def _ints(values: List[str], flag: str) -> List[int]:
    try:
        return [int(v) for v in values]
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated integers, got {','.join(values)}") from None


def _default_seed(config: Config) -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return int(config.get('generation.default_seed', 42))
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV_VAR} must be an integer, got '{raw}'") from None


def setup_logging(config: Config, level: Optional[str] = None) -> None:
    """Configure the root logger from the logging section of the config."""
    level_name = (level or config.get('logging.level', 'INFO')).upper()
    logging.basicConfig(
        level=getattr(logging, level_name, logging.INFO),
        format=config.get('logging.format', '%(levelname)s %(name)s: %(message)s'),
        force=True,
    )


def cmd_generate(args: argparse.Namespace, config: Config) -> int:
    """Generate a benchmark suite and print per-cell statistics."""
    ag = load_architecture(args.ag)
    objective = Objective(args.objective)
    gate = objective is Objective.GATE

    perm_types = _csv(args.perm_type) or [
        p.value for p in (GATE_PERM_TYPES if gate else DEPTH_PERM_TYPES)
    ]
    if args.graph_size:
        graph_sizes = _csv(args.graph_size)
    elif ag.name == 'tokyo':
        graph_sizes = [GraphSize.TOKYO_DEFAULT.value]
    else:
        graph_sizes = [GraphSize.SMALL.value, GraphSize.LARGE.value]
    qbg_ratios = _csv(args.qbg_ratio) or (['TFL'] if gate else ['TFL', 'QSE'])
    if args.costs:
        costs = _ints(_csv(args.costs), '--costs')
    else:
        costs = list(config.get('generation.gate_costs' if gate else 'generation.depth_costs'))
    count = args.count if args.count is not None else int(config.get('generation.count_per_cell', 10))
    seed = args.seed if args.seed is not None else _default_seed(config)
    workers = args.workers if args.workers is not None else int(config.get('cli.workers', 1))

    entries = build_entries(
        ag, objective, perm_types, graph_sizes, qbg_ratios, costs, count, seed,
        subgraph_edges=args.subgraph_edges, ag_ref=args.ag,
    )
    out_dir = Path(args.out) if args.out else config.output_dir / suite_name(ag, objective)
    print(f"Generating {len(entries)} circuits for {suite_name(ag, objective)} into {out_dir}")

    manifest = generate_suite(entries, out_dir, ag, GenerationOptions.from_config(config), workers)
    print(manifest.cell_stats().to_string(index=False))
    print(f"✅ Wrote {len(manifest)} circuits and {out_dir / 'manifest.json'}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, config: Config) -> int:
    """Replay a suite, or validate one third-party transcript."""
    if args.transcript:
        if not (args.circuit and args.ag):
            raise UsageError("--transcript needs --circuit and --ag")
        circuit, ag, transcript = load_report_inputs(args.circuit, args.transcript, args.ag)
        report = validate_transcript(circuit, ag, transcript)
        print(report.summary())
        print(report_json(report))
        return EXIT_OK if report.valid else EXIT_INVALID

    if not args.directory:
        raise UsageError("verify needs a suite DIR or --transcript/--circuit/--ag")
    results = verify_suite(args.directory)
    if not results:
        print("no circuits found")
        return EXIT_INVALID
    bad = [(name, problem) for name, problem in results if problem]
    for name, problem in bad:
        print(f"✗ {name}: {problem}")
    print(f"{len(results) - len(bad)}/{len(results)} valid")
    return EXIT_INVALID if bad else EXIT_OK


def cmd_evaluate(args: argparse.Namespace, config: Config) -> int:
    """Route every suite circuit (or score given transcripts) and compare ratios."""
    manifest = SuiteManifest.load(args.directory)
    if not len(manifest):
        print("no circuits found")
        return EXIT_INVALID
    seed = args.seed if args.seed is not None else _default_seed(config)
    router = RouterConfig.from_config(config, seed=seed)
    if args.restarts is not None:
        router = RouterConfig(router.objective, router.lookahead_window, seed,
                              args.restarts, router.lookahead_discount)

    frame = evaluate_suite(args.directory, router, args.transcripts)
    print(frame.to_string(index=False))
    if args.csv:
        Path(args.csv).parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(args.csv, index=False, float_format='%.6f')
        print(f"✓ CSV written to {args.csv}")
    return EXIT_OK if bool(frame['valid'].all()) else EXIT_INVALID


def cmd_stats(args: argparse.Namespace, config: Config) -> int:
    """Print per-cell aggregates of a suite and flag ratios outside the review bands."""
    manifest = SuiteManifest.load(args.directory)
    if not len(manifest):
        print("no circuits found")
        return EXIT_INVALID
    stats = manifest.cell_stats()
    print(stats.to_string(index=False))
    flags = manifest.review_flags()
    for flag in flags:
        print(f"Warning: {flag}")
    if not flags:
        print("✓ Known ratios within review bands")
    if args.csv:
        Path(args.csv).parent.mkdir(parents=True, exist_ok=True)
        stats.to_csv(args.csv, index=False, float_format='%.6f')
        print(f"✓ CSV written to {args.csv}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='quekno',
        description='Generate and verify QCT benchmarks with known near-optimal costs',
    )
    parser.add_argument('--config', help='Path to config.yml (default: config/config.yml)')
    parser.add_argument('--log-level', help='Override logging.level (DEBUG, INFO, ...)')
    sub = parser.add_subparsers(dest='command', required=True)

    gen = sub.add_parser('generate', help='Generate a benchmark suite')
    gen.add_argument('--ag', default='rochester', help='Builtin architecture name or topology file')
    gen.add_argument('--objective', choices=[o.value for o in Objective], default='gate')
    gen.add_argument('--perm-type', help='Comma list of opt1,opt2,parallel')
    gen.add_argument('--graph-size', help='Comma list of small,large,tokyo-default')
    gen.add_argument('--qbg-ratio', help='Comma list of TFL,QSE or numbers')
    gen.add_argument('--costs', help='Comma list of target costs')
    gen.add_argument('--count', type=int, help='Circuits per cell')
    gen.add_argument('--seed', type=int, help=f'Base seed (default: ${SEED_ENV_VAR} or config)')
    gen.add_argument('--subgraph-edges', type=int, help='Explicit mean subgraph edge count')
    gen.add_argument('--out', help='Output directory')
    gen.add_argument('--workers', type=int, help='Worker processes')
    gen.set_defaults(func=cmd_generate)

    ver = sub.add_parser('verify', help='Replay a suite or validate a transcript')
    ver.add_argument('directory', nargs='?', help='Suite directory')
    ver.add_argument('--transcript', help='Transcript JSON to validate')
    ver.add_argument('--circuit', help='QASM circuit the transcript transforms')
    ver.add_argument('--ag', help='Architecture name or topology file')
    ver.set_defaults(func=cmd_verify)

    ev = sub.add_parser('evaluate', help='Score the baseline router or external transcripts')
    ev.add_argument('directory', help='Suite directory')
    ev.add_argument('--transcripts', help='Directory of <name>.json transcripts')
    ev.add_argument('--csv', help='Write results as CSV')
    ev.add_argument('--seed', type=int, help='Router seed')
    ev.add_argument('--restarts', type=int, help='Router restarts')
    ev.set_defaults(func=cmd_evaluate)

    st = sub.add_parser('stats', help='Per-cell suite statistics')
    st.add_argument('directory', help='Suite directory')
    st.add_argument('--csv', help='Write statistics as CSV')
    st.set_defaults(func=cmd_stats)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = get_config(args.config)
        setup_logging(config, args.log_level)
        return args.func(args, config)
    except (UsageError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
