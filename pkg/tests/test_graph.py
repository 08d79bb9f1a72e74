"""
Tests for architecture graphs, embedding search and subgraph sampling.
"""
import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))
sys.path.insert(0, os.path.dirname(__file__))

import itertools
import unittest
from collections import Counter

import numpy as np

from quekno.graph import (
    ArchitectureGraph,
    Embedding,
    EmbeddingStatus,
    Subgraph,
    builtin_architecture,
    distance_matrix,
    embeddable,
    load_architecture,
    random_subgraph,
    search_embedding,
)
import golden


def exhaustive_embeddable(src: Subgraph, tgt: ArchitectureGraph) -> bool:
    """Reference answer: try every injective vertex map."""
    verts = sorted(src.vertices)
    for images in itertools.permutations(range(tgt.vertex_count), len(verts)):
        f = dict(zip(verts, images))
        if all(tgt.has_edge(f[p], f[q]) for p, q in src.edges):
            return True
    return False


def random_connected_ag(n: int, extra: int, rng: np.random.Generator, name: str) -> ArchitectureGraph:
    """Random spanning tree on n vertices plus ``extra`` random chords."""
    order = [int(v) for v in rng.permutation(n)]
    edges = set()
    for i in range(1, n):
        parent = order[int(rng.integers(i))]
        edges.add(tuple(sorted((order[i], parent))))
    extra = min(extra, n * (n - 1) // 2 - len(edges))
    while extra > 0:
        p, q = (int(v) for v in rng.choice(n, size=2, replace=False))
        if tuple(sorted((p, q))) not in edges:
            edges.add(tuple(sorted((p, q))))
            extra -= 1
    return ArchitectureGraph(name, n, frozenset(edges))


class TestBuiltinArchitectures(unittest.TestCase):
    """Test the bundled device topologies."""

    def test_grid2x3(self):
        """Test the 2x3 grid used by the worked example."""
        grid = builtin_architecture('grid2x3')
        self.assertEqual(grid.vertex_count, 6)
        self.assertEqual(grid.sorted_edges,
                         ((0, 1), (0, 2), (1, 3), (2, 3), (2, 4), (3, 5), (4, 5)))

    def test_vertex_and_edge_counts(self):
        """Test sizes of every builtin device."""
        expected = {
            'tokyo': (20, 43),
            'rochester': (53, 58),
            'sycamore53': (53, 86),
            'sycamore54': (54, 88),
        }
        for name, (n, m) in expected.items():
            with self.subTest(name=name):
                ag = builtin_architecture(name)
                self.assertEqual(ag.vertex_count, n)
                self.assertEqual(len(ag.edges), m)

    def test_rochester_degree_histogram(self):
        """Rochester is a heavy-hex style lattice: only degrees 1 to 3."""
        ag = builtin_architecture('rochester')
        hist = Counter(ag.degree(v) for v in range(ag.vertex_count))
        self.assertEqual(hist, Counter({2: 39, 3: 12, 1: 2}))

    def test_sycamore53_drops_one_vertex(self):
        """The 53-qubit device is the 54-qubit grid with one vertex removed."""
        full = builtin_architecture('sycamore54')
        broken = builtin_architecture('sycamore53')
        self.assertEqual(full.vertex_count - broken.vertex_count, 1)
        self.assertLess(len(broken.edges), len(full.edges))

    def test_unknown_name_lists_choices(self):
        """Test error message for an unknown device."""
        with self.assertRaises(ValueError) as ctx:
            builtin_architecture('falcon')
        self.assertIn('rochester', str(ctx.exception))

    def test_load_architecture_from_file(self):
        """Test loading a user topology file."""
        import tempfile
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'line3.txt')
            with open(path, 'w') as f:
                f.write("# a path\nn 3\ne 0 1\ne 1 2\n")
            ag = load_architecture(path)
            self.assertEqual(ag.name, 'line3')
            self.assertEqual(ag.sorted_edges, ((0, 1), (1, 2)))

    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            load_architecture('/nonexistent/device.txt')


class TestArchitectureGraph(unittest.TestCase):
    """Test text format parsing and invariants."""

    def test_text_round_trip(self):
        """Test serialising then parsing a device."""
        tokyo = builtin_architecture('tokyo')
        again = ArchitectureGraph.from_text(tokyo.to_text(), name='tokyo')
        self.assertEqual(again.edges, tokyo.edges)
        self.assertEqual(again.vertex_count, 20)

    def test_parse_errors_name_the_line(self):
        """Test malformed lines are reported with their line number."""
        cases = {
            "n 3\ne 1 0\n": "line 2",
            "e 0 1\n": "line 1",
            "n 3\nn 4\n": "line 2",
            "n 3\nx 0 1\n": "line 2",
        }
        for text, where in cases.items():
            with self.subTest(text=text):
                with self.assertRaises(ValueError) as ctx:
                    ArchitectureGraph.from_text(text)
                self.assertIn(where, str(ctx.exception))

    def test_missing_vertex_count(self):
        with self.assertRaises(ValueError):
            ArchitectureGraph.from_text("# empty\n")

    def test_disconnected_rejected(self):
        """Test disconnected graphs are refused."""
        with self.assertRaises(ValueError) as ctx:
            ArchitectureGraph('split', 4, frozenset({(0, 1), (2, 3)}))
        self.assertIn('not connected', str(ctx.exception))

    def test_edge_out_of_range(self):
        with self.assertRaises(ValueError):
            ArchitectureGraph('bad', 2, frozenset({(0, 2)}))

    def test_self_loop(self):
        with self.assertRaises(ValueError):
            ArchitectureGraph('loop', 2, frozenset({(0, 1), (1, 1)}))

    def test_edges_are_canonical(self):
        """Test (q, p) is stored as (p, q)."""
        ag = ArchitectureGraph('pair', 2, frozenset({(1, 0)}))
        self.assertEqual(ag.edges, frozenset({(0, 1)}))
        self.assertTrue(ag.has_edge(1, 0))
        self.assertFalse(ag.has_edge(0, 0))


class TestDistanceMatrix(unittest.TestCase):
    """Test all-pairs hop counts."""

    def test_grid_distances(self):
        """Test a few distances on the 2x3 grid."""
        dist = distance_matrix(golden.GRID)
        self.assertEqual(dist[0, 5], 3)
        self.assertEqual(dist[1, 4], 3)
        self.assertEqual(dist[1, 3], 1)
        self.assertEqual(golden.GRID.diameter, 3)

    def test_metric_properties(self):
        """Test zero diagonal, symmetry and the triangle inequality."""
        for name in ('grid2x3', 'tokyo', 'rochester'):
            with self.subTest(name=name):
                dist = distance_matrix(builtin_architecture(name))
                self.assertTrue((np.diag(dist) == 0).all())
                self.assertTrue((dist == dist.T).all())
                # d[i,k] <= d[i,j] + d[j,k] for every j
                via = (dist[:, :, None] + dist[None, :, :]).min(axis=1)
                self.assertTrue((dist <= via).all())

    def test_read_only(self):
        dist = distance_matrix(golden.GRID)
        with self.assertRaises(ValueError):
            dist[0, 1] = 7


class TestEmbedding(unittest.TestCase):
    """Test the embedding search."""

    def test_triangle_absent(self):
        """The grid is bipartite, so no 3-cycle embeds."""
        triangle = Subgraph.from_edges([(0, 1), (1, 2), (0, 2)])
        result = search_embedding(triangle, golden.GRID)
        self.assertEqual(result.status, EmbeddingStatus.ABSENT)
        self.assertIsNone(embeddable(triangle, golden.GRID))

    def test_subgraph_embeds_by_identity(self):
        """Test the first worked-example subgraph embeds as itself."""
        witness = embeddable(golden.g1(), golden.GRID)
        self.assertIsNotNone(witness)
        self.assertEqual(witness.mapping, {v: v for v in golden.g1().vertices})

    def test_union_absent(self):
        """Test the worked-example union graph (has a 3-cycle) does not embed."""
        union = Subgraph.from_edges([(0, 1), (1, 3), (2, 4), (3, 5), (0, 3), (4, 5)])
        self.assertEqual(search_embedding(union, golden.GRID).status, EmbeddingStatus.ABSENT)

    def test_witness_is_valid(self):
        """Test a non-trivial witness satisfies the embedding invariants."""
        path = Subgraph.from_edges([(0, 5), (5, 1), (1, 4)])
        witness = embeddable(path, golden.GRID)
        self.assertIsNotNone(witness)
        self.assertTrue(witness.is_valid(path, golden.GRID))

    def test_invalid_embedding_detected(self):
        path = Subgraph.from_edges([(0, 1)])
        self.assertFalse(Embedding({0: 0, 1: 5}).is_valid(path, golden.GRID))
        self.assertFalse(Embedding({0: 1, 1: 1}).is_valid(path, golden.GRID))

    def test_too_many_vertices(self):
        big = builtin_architecture('tokyo')
        self.assertEqual(search_embedding(big, golden.GRID).status, EmbeddingStatus.ABSENT)

    def test_node_limit_inconclusive(self):
        """Test exhausting the node limit is reported as inconclusive."""
        path = Subgraph.from_edges([(0, 5), (5, 1)])
        with self.assertLogs('quekno.graph', level='WARNING'):
            result = search_embedding(path, golden.GRID, node_limit=1)
        self.assertEqual(result.status, EmbeddingStatus.INCONCLUSIVE)
        self.assertIsNone(result.embedding)

    def test_deterministic(self):
        path = Subgraph.from_edges([(0, 5), (5, 1), (1, 4)])
        first = embeddable(path, golden.GRID)
        self.assertEqual(first, embeddable(path, golden.GRID))

    def test_agrees_with_exhaustive_on_grid(self):
        """Test every connected edge subset of K4 and K5 against brute force."""
        for n in (4, 5):
            all_edges = list(itertools.combinations(range(n), 2))
            for r in range(1, len(all_edges) + 1):
                for edges in itertools.combinations(all_edges, r):
                    g = Subgraph.from_edges(edges)
                    if not g.is_connected():
                        continue
                    found = search_embedding(g, golden.GRID).status is EmbeddingStatus.FOUND
                    self.assertEqual(found, exhaustive_embeddable(g, golden.GRID), msg=str(edges))

    def test_agrees_with_exhaustive_on_random_targets(self):
        """Test random small sources against random 8-vertex devices."""
        rng = np.random.default_rng(7)
        for t in range(10):
            tgt = random_connected_ag(8, int(rng.integers(0, 6)), rng, f'rand{t}')
            for _ in range(20):
                k = int(rng.integers(2, 6))
                src_ag = random_connected_ag(k, int(rng.integers(0, 3)), rng, 'src')
                src = src_ag.as_subgraph()
                result = search_embedding(src, tgt)
                self.assertEqual(result.status is EmbeddingStatus.FOUND,
                                 exhaustive_embeddable(src, tgt))
                if result.embedding is not None:
                    self.assertTrue(result.embedding.is_valid(src, tgt))


class TestRandomSubgraph(unittest.TestCase):
    """Test connected subgraph sampling."""

    def check_draws(self, name, target, lo, hi, draws=50):
        ag = builtin_architecture(name)
        rng = np.random.default_rng(11)
        for _ in range(draws):
            g = random_subgraph(ag, target, rng)
            self.assertTrue(lo <= len(g.edges) <= hi)
            self.assertTrue(g.is_connected())
            self.assertTrue(g.is_subgraph_of(ag))

    def test_grid_single_edge_target(self):
        self.check_draws('grid2x3', 1, 1, 3)

    def test_tokyo_default_size(self):
        self.check_draws('tokyo', 5, 3, 7)

    def test_rochester_large_size(self):
        self.check_draws('rochester', 16, 14, 18)

    def test_whole_graph_target(self):
        """Test target equal to |E| clamps to at most |E| edges."""
        self.check_draws('grid2x3', 7, 5, 7)

    def test_out_of_range_target(self):
        rng = np.random.default_rng(0)
        for bad in (0, 8):
            with self.assertRaises(ValueError):
                random_subgraph(golden.GRID, bad, rng)

    def test_reproducible(self):
        ag = builtin_architecture('tokyo')
        a = random_subgraph(ag, 5, np.random.default_rng(3))
        b = random_subgraph(ag, 5, np.random.default_rng(3))
        self.assertEqual(a, b)


class TestSubgraph(unittest.TestCase):
    """Test the subgraph value type."""

    def test_endpoint_outside_vertex_set(self):
        with self.assertRaises(ValueError):
            Subgraph(frozenset({0, 1}), frozenset({(1, 2)}))

    def test_dict_round_trip(self):
        g = golden.g1()
        self.assertEqual(Subgraph.from_dict(g.to_dict()), g)

    def test_union_and_degree(self):
        union = golden.g1().union(golden.g2())
        self.assertEqual(len(union.edges), 5)
        self.assertEqual(union.degree(4), 2)


if __name__ == '__main__':
    unittest.main()
