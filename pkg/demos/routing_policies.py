"""How the routing policy and gate order move the two-qubit counts.

The routing rule only fixes the swap direction.  This script compares the
persistent and swap-back policies, row- and column-major gate order, and a
handful of trap layouts on a random sample of valid [[7,3,3]] codes.

    python3 demos/routing_policies.py
"""

from __future__ import annotations

import numpy as np

from cpccodes import model, route, search

valid, _ = search.random_search(3, 4, 4_000_000, seed=2)
print(f"{len(valid)} valid codes sampled")
layouts = {
    "A,B,C,p1..p4": None,
    "p1..p4,A,B,C": route.Layout((3, 4, 5, 6, 0, 1, 2)),
    "A,p1,B,p2,C,p3,p4": route.Layout((0, 3, 1, 4, 2, 5, 6)),
}
for order in ("row", "col"):
    circuits = [model.build_circuit(model.from_index(int(i), 3, 4), order) for i in valid]
    cpc = np.array([len(c.encoder) for c in circuits])
    for policy in route.POLICIES:
        for name, lay in layouts.items():
            two = cpc + np.array([route.count_swaps(c, lay, policy) for c in circuits])
            print(f"  {order}-major  {policy:10s} {name:18s} min {two.min():3d}  "
                  f"median {search.lower_median(two)}")
