"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line that is printed in the terminal
summary.  The full 2^30 sweep is computed once per session; on one core it
takes roughly ten minutes.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
import pytest

from cpccodes import cli, model, native, noisesim, route, search
from cpccodes.core import PauliString, oracle_syndrome
from cpccodes.noisesim import NoiseModel, estimate_rates

WORKERS = int(os.environ.get("CPC_THREADS", os.cpu_count() or 1))
CHUNK = 4000

RESULTS: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = (ok, detail)


# ---------------------------------------------------------------------------
# the sweep


def _compile_chunk(indices: np.ndarray):
    """Route, lower and simplify a chunk; return counts plus the invariant flags."""
    n = len(indices)
    swaps = np.zeros(n, np.int64)
    local = np.zeros(n, np.int64)
    route_ok = np.zeros(n, bool)
    sp_kept = np.zeros(n, bool)
    originals, routed, seqs = [], [], []
    fx = np.zeros((n, 7), np.int64)
    fz = np.zeros((n, 7), np.int64)
    w = 1 << np.arange(4)
    for i, idx in enumerate(indices):
        t = model.from_index(int(idx), 3, 4)
        c = model.build_circuit(t)
        r = route.route_nearest_neighbor(c)
        swaps[i] = r.swap_count
        route_ok[i] = route.verify_routing(c, r)
        originals.append(c)
        routed.append(r)
        ops, marker, count = native.fast_simplify(t)
        local[i] = count
        sp_kept[i] = sum(k == "SP" for k, _ in ops) == 2 * model.cpc_gate_count(t)
        seqs.append((ops, marker))
        sx, sz = model.single_error_syndromes(t)
        fx[i], fz[i] = sx @ w, sz @ w
    preserved = route.batch_syndromes_preserved(originals, routed, "XZ")
    native_ok = native.batch_verify_native(3, 4, seqs, fx, fz, "xz", "correct")
    return swaps, local, route_ok & preserved, native_ok & sp_kept


@dataclass
class Sweep:
    valid: np.ndarray
    cpc: np.ndarray
    keys: np.ndarray
    swaps: np.ndarray
    local: np.ndarray
    unsimplified: np.ndarray
    route_ok: np.ndarray
    native_ok: np.ndarray
    search_seconds: float

    @property
    def two_qubit(self):
        return self.cpc + self.swaps

    @property
    def l_total(self):
        return self.cpc + self.swaps + self.local


@pytest.fixture(scope="module")
def sweep() -> Sweep:
    t0 = time.perf_counter()
    valid = search.valid_indices(search.SearchSpec(3, 4, "xz", "correct", 0, 1 << 30), WORKERS)
    search_seconds = time.perf_counter() - t0
    keys = search.canonical_keys(valid, 3, 4)
    bits = np.zeros(len(valid), np.int64)
    nb = np.zeros(len(valid), np.int64)
    for b in range(30):
        on = ((valid >> np.uint64(b)) & np.uint64(1)).astype(np.int64)
        bits += on
        if b < 12:
            nb += on
    unsimplified = 4 * nb + 6 * (bits - nb)
    chunks = [valid[i:i + CHUNK] for i in range(0, len(valid), CHUNK)]
    if WORKERS > 1:
        with ProcessPoolExecutor(WORKERS) as pool:
            parts = list(pool.map(_compile_chunk, chunks))
    else:
        parts = [_compile_chunk(c) for c in chunks]
    swaps, local, route_ok, native_ok = (np.concatenate(x) for x in zip(*parts))
    return Sweep(valid, bits, keys, swaps, local, unsimplified, route_ok, native_ok, search_seconds)


def _median(a):
    return search.lower_median(a)


# ---------------------------------------------------------------------------
# criteria


def test_1_hamming_bound():
    a, b = search.hamming_bound_kmax(7, 3, 2), search.hamming_bound_kmax(9, 3, 2)
    ok = (a, b) == (3, 4)
    record(1, ok, f"k_max(7,3,2)={a} (want 3), k_max(9,3,2)={b} (want 4)")
    assert ok


SYNDROME_TABLE = {
    (0, 0): {"I"},
    (1, 0): {"X_A", "X_B", "X_p1", "Z_p2"},
    (0, 1): {"Z_A", "Z_B", "Z_p1", "X_p2"},
    (1, 1): {"Y_A", "Y_B", "Y_p1", "Y_p2"},
}


def test_2_syndrome_table_422():
    rows = model.syndrome_table(model.code_422(), "xyz")
    got: dict = {}
    for err, s in rows:
        got.setdefault(s, set()).add(err.label(2))
    ok = len(rows) == 13 and got == SYNDROME_TABLE
    record(2, ok, f"{len(rows)} rows, grouping {'matches' if got == SYNDROME_TABLE else 'differs from'} the reference table")
    assert ok


def test_3_formula_equals_oracle():
    rng = np.random.default_rng(3)
    mismatches = checks = 0
    for _ in range(1000):
        t = model.from_index(int(rng.integers(1 << 30)), 3, 4)
        c = model.build_circuit(t)
        for q in range(7):
            sx = model.syndrome_formula(t, model.error_vector(t, "X", q))
            sz = model.syndrome_formula(t, model.error_vector(t, "Z", q))
            for letter, s in (("X", sx), ("Z", sz), ("Y", sx ^ sz)):
                checks += 1
                mismatches += tuple(int(b) for b in s) != oracle_syndrome(c, PauliString.single(7, q, letter))
    record(3, mismatches == 0, f"{checks} checks over 1000 random triples, {mismatches} mismatches")
    assert mismatches == 0


def test_4_exhaustive_search(sweep):
    count = len(sweep.valid)
    lo = int(sweep.cpc.min())
    at_min = int((sweep.cpc == lo).sum())
    med = _median(sweep.cpc)
    classes = len(np.unique(sweep.keys))
    classes_at_min = len(np.unique(sweep.keys[sweep.cpc == lo]))
    frac = 100 * count / 2**30
    # a 20x speed-up over a four-day baseline means under 4.8 hours
    fast = sweep.search_seconds < 4 * 24 * 3600 / 20
    got = (count, lo, at_min, med, classes, classes_at_min)
    want = (306_480, 14, 864, 18, 2190, 245)
    ok = got == want and fast
    record(
        4,
        ok,
        f"valid={count} ({frac:.3f}%), min={lo} x{at_min}, median={med}, classes={classes}, "
        f"classes at min={classes_at_min} (want 245), search {sweep.search_seconds:.0f}s on {WORKERS} worker(s)",
    )
    assert got == want
    assert fast


def test_5_routing(sweep):
    lo = int(sweep.two_qubit.min())
    med = _median(sweep.two_qubit)
    all_ok = bool(sweep.route_ok.all())
    ok = 27 <= lo <= 31 and abs(med - 51) <= 5 and all_ok
    record(
        5,
        ok,
        f"min={lo} ({int((sweep.two_qubit == lo).sum())} code(s)), median={med}; policy persistent upward swaps, "
        f"row-major rounds, layout A,B,C,p1..p4 (hits 27 exactly: {lo == 27}); "
        f"verify+syndrome preservation {int(sweep.route_ok.sum())}/{len(sweep.route_ok)}",
    )
    assert all_ok
    assert 27 <= lo <= 31
    assert abs(med - 51) <= 5


def test_6_native_compilation(sweep):
    c = model.build_circuit(model.code_422())
    low = native.lower_to_native(c)
    simp = native.simplify(low, "xyz")
    before, after = native.local_gate_count(low), native.local_gate_count(simp)
    ok_422 = (before, after) == (26, 4) and native.verify_native_equivalence(c, simp, "xyz")
    s_min, s_med = int(sweep.local.min()), _median(sweep.local)
    u_min, u_med = int(sweep.unsimplified.min()), _median(sweep.unsimplified)
    l_min = int(sweep.l_total.min())
    best = int(np.argmin(sweep.l_total))
    monotone = bool((sweep.local <= sweep.unsimplified).all())
    equiv = bool(sweep.native_ok.all())
    ok = (
        ok_422
        and abs(s_min - 7) <= 2
        and abs(s_med - 10) <= 2
        and abs(u_med - 92) <= 6
        and abs(l_min - 34) <= 3
        and monotone
        and equiv
    )
    record(
        6,
        ok,
        f"[[4,2,2]] {before}->{after}; simplified min={s_min} (x{int((sweep.local == s_min).sum())}) "
        f"median={s_med}; unsimplified min={u_min} median={u_med}; L min={l_min} at index "
        f"{int(sweep.valid[best])} (cpc={int(sweep.cpc[best])}, swap={int(sweep.swaps[best])}, "
        f"local={int(sweep.local[best])}); equivalence {int(sweep.native_ok.sum())}/{len(sweep.native_ok)}, "
        f"monotone={monotone}",
    )
    assert ok_422
    assert equiv and monotone
    assert abs(s_min - 7) <= 2 and abs(s_med - 10) <= 2
    assert abs(u_med - 92) <= 6
    assert abs(l_min - 34) <= 3


def test_7_postselection_proxy():
    c = model.build_circuit(model.code_422())
    stabs = noisesim.plus_zero_stabilizers()
    w1 = estimate_rates(c, stabs, NoiseModel(1e-3, 1e-3), exact_weight=1)
    a = estimate_rates(c, stabs, NoiseModel(1e-3, 1e-3), exact_weight=2)
    b = estimate_rates(c, stabs, NoiseModel(2e-3, 2e-3), exact_weight=2)
    post_ratio = b.postselected_failure_rate / a.postselected_failure_rate
    raw_ratio = b.raw_failure_rate / a.raw_failure_rate
    dominance = all(
        e.postselected_failure_rate <= e.raw_failure_rate
        for e in (w1, a, b)
    )
    ok = (
        w1.postselected_failure_rate == 0
        and abs(post_ratio - 4) <= 0.8
        and abs(raw_ratio - 2) <= 0.2
        and dominance
    )
    record(
        7,
        ok,
        f"weight<=1 postselected={w1.postselected_failure_rate}; postselected ratio={post_ratio:.3f}, "
        f"raw ratio={raw_ratio:.3f}, postselected<=raw: {dominance}",
    )
    assert ok


def test_8_fault_scan():
    stabs = noisesim.plus_zero_stabilizers()
    hardened = noisesim.fault_scan(noisesim.hardened_422_circuit(), stabs)
    loose = noisesim.fault_scan(noisesim.cross_checkless_422_circuit(), stabs)
    canonical = noisesim.fault_scan(model.build_circuit(model.code_422()), stabs)
    ok = hardened == [] and len(loose) > 0
    record(
        8,
        ok,
        f"rearranged hardened circuit: {len(hardened)} violations; cross-check-less: "
        f"{[str(f) for f in loose]}; canonical [[4,2,2]]: {len(canonical)} violations",
    )
    assert ok


def test_9_determinism(tmp_path):
    rng = "563000000:566000000"
    outs = []
    for threads in (1, 2, 1):
        d = tmp_path / f"t{threads}_{len(outs)}"
        assert cli.main(["-q", "pipeline", "--range", rng, "--threads", str(threads), "--seed", "7", "--out", str(d)]) == 0
        outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    same = outs[0] == outs[1] == outs[2]
    n = outs[0]["compiled.jsonl"].count(b"\n")
    record(9, same, f"pipeline on {rng} ({n} codes) with 1, 2, 1 threads: byte-identical={same}")
    assert same
