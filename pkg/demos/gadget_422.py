"""Walk through the [[4,2,2]] detection code end to end.

Builds the code from its adjacency matrices, prints the syndrome table,
compiles it to SP native gates, scans it for dangerous single faults and
estimates post-selected failure rates.

    python3 demos/gadget_422.py
"""

from __future__ import annotations

from cpccodes import model, native, noisesim
from cpccodes.noisesim import NoiseModel, estimate_rates

t = model.code_422()
c = model.build_circuit(t)
print("encoder:", " ".join(map(str, c.encoder)))

print("\nsyndrome table (p1 p2):")
by_syndrome: dict = {}
for err, s in model.syndrome_table(t, "xyz"):
    by_syndrome.setdefault(s, []).append(err.label(t.k))
for s, errs in sorted(by_syndrome.items()):
    print(f"  {s[0]}{s[1]}  {', '.join(errs)}")
print("detects every single error:", model.is_valid_code(t, "xyz", "detect"))

low = native.lower_to_native(c)
simp = native.simplify(low, "xyz")
print(f"\nlocal gates in the encoder: {native.local_gate_count(low)} lowered, "
      f"{native.local_gate_count(simp)} after simplification")
print("simplified encoder:", " ".join(map(str, simp.encoder)))
print("frame bookkeeping:", simp.frame)
print("still a working code:", native.verify_native_equivalence(c, simp, "xyz"))

stabs = noisesim.plus_zero_stabilizers()
print("\nfault scan with input |+0>:")
for name, circ in (
    ("canonical", c),
    ("without cross-check", noisesim.cross_checkless_422_circuit()),
    ("rearranged with SWAP", noisesim.hardened_422_circuit()),
):
    found = noisesim.fault_scan(circ, stabs)
    print(f"  {name:22s} {len(found)} unsafe location(s) {[str(f) for f in found]}")

print("\n      p        raw   postselected   yield")
for p in (1e-3, 2e-3, 5e-3, 1e-2):
    e = estimate_rates(c, stabs, NoiseModel(p, p), exact_weight=2)
    print(f"  {p:.0e}  {e.raw_failure_rate:.3e}  {e.postselected_failure_rate:.3e}  {e.yield_:.4f}")
