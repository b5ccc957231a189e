"""The three-stage design process on a slice of the [[7,3,3]] space.

Searches a few million candidate codes, routes each onto a seven-ion line,
compiles to SP gates and picks the shortest encoder.  The slice is chosen to
contain the code with the lowest total gate count of the full sweep.

    python3 demos/optimum_733.py
"""

from __future__ import annotations

import time

import numpy as np

from cpccodes import model, native, route, search

t0 = time.perf_counter()
spec = search.SearchSpec(3, 4, "xz", "correct", 563_000_000, 566_000_000)
valid = search.valid_indices(spec)
print(f"stage 1: {len(valid)} valid codes among {spec.space_size:,} candidates "
      f"({time.perf_counter() - t0:.1f}s)")
cpc = np.array([model.cpc_gate_count(model.from_index(int(i), 3, 4)) for i in valid])
print(f"  CPC gates: min {cpc.min()}, median {search.lower_median(cpc)}")

swaps = np.array([route.count_swaps(model.build_circuit(model.from_index(int(i), 3, 4))) for i in valid])
print(f"stage 2: two-qubit gates after routing: min {(cpc + swaps).min()}, "
      f"median {search.lower_median(cpc + swaps)}")

local = np.array([native.simplified_local_count(model.from_index(int(i), 3, 4)) for i in valid])
total = cpc + swaps + local
best = int(np.argmin(total))
print(f"stage 3: simplified local gates: min {local.min()}, median {search.lower_median(local)}")
print(f"  shortest encoder: L = {total[best]} "
      f"(CPC {cpc[best]}, SWAP {swaps[best]}, local {local[best]}) for code {int(valid[best])}")

t = model.from_index(int(valid[best]), 3, 4)
print("\n" + repr(t))
r = route.route_nearest_neighbor(model.build_circuit(t))
s = native.simplify(native.lower_to_native(r))
print("compiled encoder:")
print("  " + " ".join(map(str, s.encoder)))
print("routing checks out:", route.verify_routing(model.build_circuit(t), r),
      "| native equivalence:", native.verify_native_equivalence(model.build_circuit(t), s))
for gammas in ((1, 1, 1), (2, 1, 1), (1, 3, 1)):
    w = native.CostWeights(*gammas)
    costs = [native.weighted_cost(x, w) for x in zip(cpc, swaps, local)]
    j = int(np.argmin(costs))
    print(f"  R with gamma={gammas}: best {costs[j]} at code {int(valid[j])}")
