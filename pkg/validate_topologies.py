"""
Validate the builtin device topologies: vertex and edge counts, degree
histograms, connectivity and diameter.
"""
import sys
from collections import Counter
from pathlib import Path

import pandas as pd

sys.path.insert(0, str(Path(__file__).parent / 'src'))

from quekno.graph import BUILTIN_ARCHITECTURES, builtin_architecture

# name -> (vertices, edges, {degree: count})
EXPECTED = {
    'grid2x3': (6, 7, {2: 4, 3: 2}),
    'tokyo': (20, 43, None),
    'rochester': (53, 58, {1: 2, 2: 39, 3: 12}),
    'sycamore53': (53, 86, None),
    'sycamore54': (54, 88, None),
}

print("=" * 80)
print("BUILTIN TOPOLOGY VALIDATION")
print("=" * 80)
print()

rows = []
all_valid = True

for name in BUILTIN_ARCHITECTURES:
    ag = builtin_architecture(name)
    histogram = dict(sorted(Counter(ag.degree(v) for v in range(ag.vertex_count)).items()))
    connected = ag.as_subgraph().is_connected()
    n, e, degrees = EXPECTED[name]
    valid = (ag.vertex_count == n and len(ag.edges) == e and connected
             and (degrees is None or histogram == degrees))
    all_valid = all_valid and valid

    print(f"{name}: {ag.vertex_count} qubits, {len(ag.edges)} couplers "
          f"{'✓' if valid else '✗ ERROR'}")
    print(f"  degrees: {histogram}")
    rows.append({
        'device': name,
        'qubits': ag.vertex_count,
        'couplers': len(ag.edges),
        'max_degree': max(histogram),
        'diameter': ag.diameter,
        'connected': connected,
    })

print()
print(pd.DataFrame(rows).to_string(index=False))
print()
print("=" * 80)
if all_valid:
    print("✅ All topologies match their published coupling maps")
else:
    print("✗ Topology mismatch found")
    sys.exit(1)
