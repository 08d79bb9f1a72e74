"""
Tests for suite enumeration, generation, verification and evaluation.
"""
import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))
sys.path.insert(0, os.path.dirname(__file__))

import json
import shutil
import tempfile
import unittest
from pathlib import Path

from quekno.graph import builtin_architecture
from quekno.route import RouterConfig, greedy_route
from quekno.suite import (
    MANIFEST_NAME,
    SuiteManifest,
    build_entries,
    derive_seed,
    evaluate_suite,
    generate_suite,
    suite_name,
    verify_suite,
)
from quekno.qasm import load_qasm
import golden

GATE_COSTS = [0, 1, 2, 3, 4, 5, 10, 15, 20, 25]
DEPTH_COSTS = [1, 2, 3, 4, 5, 10]


class TestBuildEntries(unittest.TestCase):
    """Test the parameter grid."""

    def test_rochester_gate_grid(self):
        ag = builtin_architecture('rochester')
        entries = build_entries(ag, 'gate', ['opt1', 'opt2'], ['small', 'large'], ['TFL'],
                                GATE_COSTS, 10, 42)
        self.assertEqual(len(entries), 400)
        self.assertEqual(len({e.stem for e in entries}), 400)
        self.assertEqual(entries[0].stem, '53Q_gate_rochester_opt1_small_TFL_c0_00')

    def test_rochester_depth_grid(self):
        ag = builtin_architecture('rochester')
        entries = build_entries(ag, 'depth', ['parallel'], ['small', 'large'], ['TFL', 'QSE'],
                                DEPTH_COSTS, 10, 42)
        self.assertEqual(len(entries), 240)

    def test_tokyo_grids(self):
        ag = builtin_architecture('tokyo')
        gate = build_entries(ag, 'gate', ['opt1', 'opt2'], ['tokyo-default'], ['TFL'],
                             GATE_COSTS, 10, 42)
        depth = build_entries(ag, 'depth', ['parallel'], ['tokyo-default'], ['1.5', '2.55'],
                              DEPTH_COSTS, 10, 42)
        self.assertEqual(len(gate), 200)
        self.assertEqual(len(depth), 120)
        self.assertEqual({e.cell.split('_')[2] for e in depth}, {'TFL', 'QSE'})

    def test_seeds(self):
        """Test seeds depend on base seed, cell and index only."""
        self.assertEqual(derive_seed(42, 'opt1_small_TFL_c1', 0), derive_seed(42, 'opt1_small_TFL_c1', 0))
        self.assertNotEqual(derive_seed(42, 'opt1_small_TFL_c1', 0), derive_seed(42, 'opt1_small_TFL_c1', 1))
        self.assertNotEqual(derive_seed(42, 'opt1_small_TFL_c1', 0), derive_seed(43, 'opt1_small_TFL_c1', 0))
        self.assertLess(derive_seed(1, 'x', 0), 2 ** 64)

    def test_invalid_grid(self):
        ag = builtin_architecture('tokyo')
        with self.assertRaises(ValueError):
            build_entries(ag, 'gate', ['parallel'], ['tokyo-default'], ['TFL'], [1], 1, 0)
        with self.assertRaises(ValueError):
            build_entries(ag, 'gate', ['opt1'], ['huge'], ['TFL'], [1], 1, 0)
        with self.assertRaises(ValueError):
            build_entries(ag, 'gate', ['opt1'], ['tokyo-default'], ['TFL'], [1], 0, 0)

    def test_suite_name(self):
        self.assertEqual(suite_name(builtin_architecture('tokyo'), 'depth'), '20Q_depth_tokyo')


def summary_rows(objective, cells):
    """Manifest rows from {(graph_size, qbg_ratio, target_cost): [known_rho, ...]}."""
    rows = []
    for (size, ratio, cost), values in cells.items():
        for i, rho in enumerate(values):
            rows.append({'name': f'{size}_{ratio}_c{cost}_{i}', 'objective': objective,
                         'graph_size': size, 'qbg_ratio': ratio, 'target_cost': cost,
                         'known_rho': rho})
    return rows


class TestReviewFlags(unittest.TestCase):
    """Test distribution checks on known ratios."""

    def test_gate_suite_inside_band(self):
        rows = summary_rows('gate', {('small', 'TFL', 1): [1.1, 1.2], ('large', 'TFL', 2): [1.25, 1.2]})
        self.assertEqual(SuiteManifest('s', rows).review_flags(), [])

    def test_gate_suite_above_ceiling(self):
        rows = summary_rows('gate', {('small', 'TFL', 1): [1.0, 1.0, 1.0, 1.0, 1.65]})
        flags = SuiteManifest('s', rows).review_flags()
        self.assertEqual(len(flags), 1)
        self.assertIn('above 1.6', flags[0])

    def test_depth_suite_inside_band(self):
        rows = summary_rows('depth', {
            ('small', 'TFL', 1): [1.45], ('small', 'QSE', 1): [1.35],
            ('large', 'TFL', 1): [1.40], ('large', 'QSE', 1): [1.30],
            ('small', 'TFL', 2): [1.50], ('small', 'QSE', 2): [1.40],
            ('large', 'TFL', 2): [1.45], ('large', 'QSE', 2): [1.35],
        })
        self.assertEqual(SuiteManifest('s', rows).review_flags(), [])

    def test_depth_suite_below_band_and_out_of_order(self):
        rows = summary_rows('depth', {
            ('small', 'TFL', 1): [1.10], ('small', 'QSE', 1): [1.15],
            ('large', 'TFL', 1): [1.12], ('large', 'QSE', 1): [1.20],
        })
        flags = SuiteManifest('s', rows).review_flags()
        self.assertTrue(any('outside 1.40 ± 0.20' in f for f in flags))
        self.assertTrue(any('TFL not above QSE for small c1' in f for f in flags))
        self.assertTrue(any('small not above large for TFL c1' in f for f in flags))

    def test_depth_growth_faster_than_linear(self):
        rows = summary_rows('depth', {('small', 'TFL', 1): [1.1], ('small', 'TFL', 2): [1.5]})
        flags = SuiteManifest('s', rows).review_flags()
        self.assertTrue(any('faster than linearly' in f for f in flags))

    def test_empty_manifest(self):
        self.assertEqual(SuiteManifest('s').review_flags(), [])


class TestSuiteFiles(unittest.TestCase):
    """Test a small generated suite on the 2x3 grid."""

    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.out = Path(self.tmp) / 'suite'
        entries = build_entries(golden.GRID, 'gate', ['opt1', 'opt2'], ['small'], ['TFL'],
                                [0, 1, 2], 2, 7, subgraph_edges=3)
        self.manifest = generate_suite(entries, self.out, golden.GRID)

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_files_written(self):
        self.assertEqual(len(self.manifest), 12)
        self.assertTrue((self.out / MANIFEST_NAME).exists())
        for entry in self.manifest.entries:
            self.assertTrue((self.out / entry['qasm_file']).exists())
            sidecar = json.loads((self.out / entry['metadata_file']).read_text())
            self.assertEqual(sidecar['qasm_file'], entry['qasm_file'])
            self.assertEqual(sidecar['known_cost'], entry['target_cost'])

    def test_reproducible(self):
        """Test regenerating the same grid writes identical files."""
        again = Path(self.tmp) / 'again'
        entries = build_entries(golden.GRID, 'gate', ['opt1', 'opt2'], ['small'], ['TFL'],
                                [0, 1, 2], 2, 7, subgraph_edges=3)
        generate_suite(entries, again, golden.GRID)
        for entry in self.manifest.entries:
            for key in ('qasm_file', 'metadata_file'):
                self.assertEqual((self.out / entry[key]).read_text(),
                                 (again / entry[key]).read_text())

    def test_verify_passes(self):
        results = verify_suite(self.out)
        self.assertEqual(len(results), 12)
        self.assertTrue(all(problem is None for _, problem in results))

    def test_verify_reports_tampering(self):
        """Test an edited boundary swap is reported for that circuit only."""
        entry = next(e for e in self.manifest.entries if e['known_cost'] >= 1)
        path = self.out / entry['metadata_file']
        data = json.loads(path.read_text())
        data['boundaries'][0]['swaps'] = [[0, 5]]
        path.write_text(json.dumps(data))
        problems = {name: problem for name, problem in verify_suite(self.out) if problem}
        self.assertEqual(list(problems), [entry['name']])
        self.assertIn('INVALID', problems[entry['name']])

    def test_verify_reports_unreadable(self):
        entry = self.manifest.entries[0]
        (self.out / entry['qasm_file']).write_text('qreg q[2];\ncreg c[1];\n')
        problems = dict(verify_suite(self.out))
        self.assertIn('unreadable', problems[entry['name']])

    def test_manifest_rebuilt_from_sidecars(self):
        (self.out / MANIFEST_NAME).unlink()
        (self.out / 'notes.json').write_text('{"hello": 1}')
        with self.assertLogs('quekno.suite', level='WARNING'):
            manifest = SuiteManifest.load(self.out)
        self.assertEqual(sorted(e['name'] for e in manifest.entries),
                         sorted(e['name'] for e in self.manifest.entries))

    def test_cell_stats(self):
        """Test per-cell aggregates."""
        stats = self.manifest.cell_stats()
        self.assertEqual(len(stats), 6)
        self.assertTrue((stats['circuits'] == 2).all())
        zero = stats[stats['target_cost'] == 0]
        self.assertTrue((zero['mean_known_rho'] == 1.0).all())
        for column in ('mean_depth', 'mean_gates', 'min_known_rho', 'max_known_rho', 'weak'):
            self.assertIn(column, stats.columns)

    def test_evaluate_router(self):
        """Test router evaluation rows and their ratio of ratios."""
        frame = evaluate_suite(self.out, RouterConfig(restarts=2))
        self.assertEqual(list(frame.columns),
                         ['file', 'known_rho', 'achieved_rho', 'ratio', 'valid', 'swaps'])
        self.assertEqual(len(frame), 12)
        self.assertTrue(frame['valid'].all())
        self.assertTrue(((frame['achieved_rho'] / frame['known_rho'] - frame['ratio']).abs() < 1e-9).all())
        again = evaluate_suite(self.out, RouterConfig(restarts=2))
        self.assertTrue(frame.equals(again))

    def test_evaluate_transcripts(self):
        """Test scoring transcripts from a directory."""
        transcripts = Path(self.tmp) / 'transcripts'
        for entry in self.manifest.entries:
            circuit = load_qasm(self.out / entry['qasm_file'])
            greedy_route(circuit, golden.GRID, RouterConfig(seed=1)).dump(
                transcripts / f"{entry['name']}.json")
        frame = evaluate_suite(self.out, RouterConfig(), transcripts)
        self.assertTrue(frame['valid'].all())

    def test_evaluate_reports_corrupt_sidecar(self):
        """Test a corrupt sidecar gives an invalid row instead of aborting the evaluation."""
        entry = self.manifest.entries[3]
        (self.out / entry['metadata_file']).write_text('{not json')
        with self.assertLogs('quekno.suite', level='WARNING'):
            frame = evaluate_suite(self.out, RouterConfig())
        self.assertEqual(len(frame), 12)
        broken = frame[frame['file'] == entry['qasm_file']]
        self.assertEqual(len(broken), 1)
        self.assertFalse(broken['valid'].iloc[0])
        self.assertEqual(int(frame['valid'].sum()), 11)

    def test_evaluate_reports_missing_transcript(self):
        transcripts = Path(self.tmp) / 'transcripts'
        transcripts.mkdir()
        frame = evaluate_suite(self.out, RouterConfig(), transcripts)
        self.assertEqual(len(frame), 12)
        self.assertFalse(frame['valid'].any())

    def test_empty_directory(self):
        empty = Path(self.tmp) / 'empty'
        empty.mkdir()
        self.assertEqual(len(SuiteManifest.load(empty)), 0)
        self.assertEqual(verify_suite(empty), [])
        self.assertTrue(evaluate_suite(empty, RouterConfig()).empty)

    def test_missing_directory(self):
        with self.assertRaises(FileNotFoundError):
            SuiteManifest.load(Path(self.tmp) / 'nowhere')


class TestDepthSuiteFiles(unittest.TestCase):
    """Test depth suites keep every boundary a single layer of disjoint swaps."""

    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.out = Path(self.tmp) / 'suite'
        entries = build_entries(golden.GRID, 'depth', ['parallel'], ['small'], ['TFL'],
                                [1, 2], 2, 11, subgraph_edges=3)
        self.manifest = generate_suite(entries, self.out, golden.GRID)

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_verify_passes(self):
        self.assertTrue(all(problem is None for _, problem in verify_suite(self.out)))

    def test_verify_reports_layered_witness(self):
        """Test a witness padded with a cancelling swap pair is rejected as non-parallel."""
        entry = self.manifest.entries[0]
        path = self.out / entry['metadata_file']
        data = json.loads(path.read_text())
        swaps = data['boundaries'][0]['swaps']
        data['boundaries'][0]['swaps'] = swaps + [swaps[0], swaps[0]]
        path.write_text(json.dumps(data))
        problems = dict(verify_suite(self.out))
        self.assertIn('parallel', problems[entry['name']])
        self.assertEqual(sum(1 for p in problems.values() if p), 1)


if __name__ == '__main__':
    unittest.main()
