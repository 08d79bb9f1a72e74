"""
Tests for the gate and circuit model.
"""
import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))
sys.path.insert(0, os.path.dirname(__file__))

import unittest

import numpy as np

from quekno.circuit import (
    Circuit,
    Gate,
    GateKind,
    apply_to_circuit,
    concat,
    concat_all,
    depth,
    gate_counts,
    interaction_graph,
    layers,
    lower_swaps,
)
from quekno.perm import Permutation, apply_to_graph, inverse, random_permutation
import golden
from golden import circuit_from_tuples


class TestGate(unittest.TestCase):
    """Test gate validation."""

    def test_factories(self):
        self.assertEqual(Gate.one(3).tag, 'h')
        self.assertEqual(Gate.cnot(0, 1).kind, GateKind.CNOT)
        self.assertTrue(Gate.swap(0, 1).is_two_qubit)
        self.assertFalse(Gate.one(0, 't').is_two_qubit)

    def test_invalid_gates(self):
        """Test malformed gates are rejected."""
        with self.assertRaises(ValueError):
            Gate.cnot(2, 2)
        with self.assertRaises(ValueError):
            Gate.one(0, 'cx')
        with self.assertRaises(ValueError):
            Gate.one(0, 'Bad-Tag')
        with self.assertRaises(ValueError):
            Gate(GateKind.CNOT, (0,))
        with self.assertRaises(ValueError):
            Gate(GateKind.SWAP, (0, 1), 'h')
        with self.assertRaises(ValueError):
            Gate.one(-1)

    def test_repr(self):
        self.assertEqual(repr(Gate.one(3)), 'h<3>')
        self.assertEqual(repr(Gate.cnot(0, 1)), 'cx<0,1>')

    def test_qubit_outside_universe(self):
        with self.assertRaises(ValueError):
            Circuit((Gate.cnot(0, 2),), 2)


class TestLayers(unittest.TestCase):
    """Test ASAP layering and depth."""

    def test_worked_example(self):
        """Test the 25-gate circuit has 9 layers and a 4-gate first layer."""
        c = golden.worked_circuit()
        self.assertEqual(depth(c), golden.WORKED_DEPTH)
        self.assertEqual(layers(c)[0], golden.WORKED_FIRST_LAYER)

    def test_empty(self):
        c = Circuit((), 3)
        self.assertEqual(depth(c), 0)
        self.assertEqual(layers(c), [])

    def test_blocking(self):
        c = circuit_from_tuples([(0, 1), (1, 2), (3, 4)], 5)
        self.assertEqual(layers(c), [[0, 2], [1]])
        self.assertEqual(depth(c), 2)

    def test_asap_properties(self):
        """Test layers are qubit-disjoint and no gate could move earlier."""
        c = golden.worked_circuit()
        placed = {}
        for k, layer in enumerate(layers(c)):
            used = [q for i in layer for q in c[i].qubits]
            self.assertEqual(len(used), len(set(used)))
            for i in layer:
                placed[i] = k
        for i, g in enumerate(c):
            if placed[i] == 0:
                continue
            earlier = [j for j in range(i) if set(c[j].qubits) & set(g.qubits)]
            self.assertEqual(max(placed[j] for j in earlier), placed[i] - 1)

    def test_depth_invariant_under_relabelling(self):
        c = golden.worked_circuit()
        rng = np.random.default_rng(0)
        for _ in range(10):
            self.assertEqual(depth(apply_to_circuit(random_permutation(6, rng), c)), depth(c))


class TestInteractionGraph(unittest.TestCase):
    """Test interaction graphs."""

    def test_worked_example(self):
        g = interaction_graph(golden.worked_circuit())
        self.assertEqual(g.edges, frozenset(golden.WORKED_INTERACTION_EDGES))

    def test_one_qubit_only(self):
        c = circuit_from_tuples([(0,), (1,), (0,)], 2)
        self.assertEqual(interaction_graph(c).edges, frozenset())

    def test_direction_and_repetition_collapse(self):
        c = circuit_from_tuples([(0, 1), (1, 0), (0, 1)], 2)
        self.assertEqual(interaction_graph(c).edges, frozenset({(0, 1)}))

    def test_commutes_with_relabelling(self):
        """Test the interaction graph of p(C) is p applied to that of C."""
        c = golden.worked_circuit()
        rng = np.random.default_rng(1)
        for _ in range(10):
            p = random_permutation(6, rng)
            self.assertEqual(interaction_graph(apply_to_circuit(p, c)),
                             apply_to_graph(p, interaction_graph(c)))


class TestRelabelAndConcat(unittest.TestCase):
    """Test permuted circuits and concatenation."""

    def test_scramble_first_section(self):
        """Test relabelling the first section by pi1 gives the head of the benchmark."""
        section = circuit_from_tuples(golden.SECTION_1)
        expected = circuit_from_tuples(golden.WORKED_CIRCUIT[:len(golden.SECTION_1)])
        self.assertEqual(apply_to_circuit(golden.PI1, section), expected)

    def test_round_trip(self):
        c = golden.worked_circuit()
        self.assertEqual(apply_to_circuit(inverse(golden.PI1), apply_to_circuit(golden.PI1, c)), c)

    def test_distributes_over_concat(self):
        a, b = golden.section_circuits()
        p = golden.PI1
        self.assertEqual(apply_to_circuit(p, a + b), apply_to_circuit(p, a) + apply_to_circuit(p, b))

    def test_short_permutation(self):
        with self.assertRaises(ValueError):
            apply_to_circuit(Permutation.identity(3), golden.worked_circuit())

    def test_concat(self):
        a, b = golden.section_circuits()
        empty = Circuit((), 6)
        self.assertEqual(concat(a, empty), a)
        joined = concat(a, b)
        self.assertEqual(len(joined), len(a) + len(b))
        self.assertLessEqual(depth(joined), depth(a) + depth(b))
        self.assertEqual(concat_all([a, b], 6), joined)

    def test_universe_mismatch(self):
        with self.assertRaises(ValueError):
            concat(Circuit((), 2), Circuit((), 3))
        with self.assertRaises(ValueError):
            concat_all([Circuit((), 2)], 3)


class TestCounts(unittest.TestCase):
    """Test gate counting and SWAP lowering."""

    def test_gate_counts(self):
        self.assertEqual(gate_counts(golden.section_circuits()[0]), (8, 5))
        self.assertEqual(gate_counts(golden.worked_circuit()), golden.WORKED_COUNTS)
        self.assertEqual(gate_counts(Circuit((), 1)), (0, 0))

    def test_swap_counts_once(self):
        c = Circuit((Gate.swap(0, 1), Gate.one(0)), 2)
        self.assertEqual(gate_counts(c), (1, 1))

    def test_lower_swaps(self):
        """Test a SWAP becomes three alternating CNOTs of depth 3."""
        lowered = lower_swaps(Circuit((Gate.swap(0, 1),), 2))
        self.assertEqual(list(lowered), [Gate.cnot(0, 1), Gate.cnot(1, 0), Gate.cnot(0, 1)])
        self.assertEqual(depth(lowered), 3)

    def test_lower_without_swaps(self):
        c = golden.worked_circuit()
        self.assertEqual(lower_swaps(c), c)

    def test_lowering_adds_two_per_swap(self):
        c = Circuit((Gate.swap(0, 1), Gate.cnot(1, 2), Gate.swap(1, 2)), 3)
        self.assertEqual(gate_counts(lower_swaps(c)).two_qubit, gate_counts(c).two_qubit + 4)


if __name__ == '__main__':
    unittest.main()
