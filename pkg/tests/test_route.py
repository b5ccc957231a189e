from __future__ import annotations

import numpy as np
import pytest

from cpccodes import model, route
from cpccodes.core import CNOT, CPG, Circuit, Gate, mirrored_circuit

OPT = 563768403  # the lowest-L [[7,3,3]] code found by the full sweep


def _line(n):
    return ("data",) * (n - 1) + ("parity",)


def test_layout_validation():
    assert route.Layout.default(4).positions == (0, 1, 2, 3)
    assert route.Layout.parse("2,0,1").position_of == {2: 0, 0: 1, 1: 2}
    with pytest.raises(ValueError):
        route.Layout((0, 0, 1))


def test_adjacent_gate_needs_no_swap():
    c = mirrored_circuit(3, _line(3), [CNOT(0, 1), CPG(1, 2)])
    r = route.route_nearest_neighbor(c)
    assert r.swap_count == 0 and r.gates == c.encoder
    assert route.two_qubit_count(r) == r.cpc_count == 2
    assert route.verify_routing(c, r)


def test_distance_three_gate_uses_two_upward_swaps():
    c = mirrored_circuit(4, _line(4), [CNOT(0, 3)])
    r = route.route_nearest_neighbor(c)
    assert r.gates == (Gate("SWAP", (2, 3)), Gate("SWAP", (1, 2)), CNOT(0, 1))
    assert r.final_layout.positions == (0, 3, 1, 2)
    assert route.verify_routing(c, r)


def test_swap_back_policy_restores_layout():
    c = mirrored_circuit(4, _line(4), [CNOT(0, 3), CPG(1, 3)])
    r = route.route_nearest_neighbor(c, policy="swap_back")
    assert r.final_layout == r.initial_layout
    assert r.swap_count == 2 * 2 + 2 * 1
    assert route.verify_routing(c, r)
    with pytest.raises(ValueError):
        route.route_nearest_neighbor(c, policy="teleport")


def test_unknown_qubit_and_bad_layout():
    c = mirrored_circuit(3, _line(3), [CNOT(0, 2)])
    with pytest.raises(ValueError):
        route.route_nearest_neighbor(c, route.Layout((0, 1)))


def test_optimum_code_routes_to_27():
    c = model.build_circuit(model.from_index(OPT, 3, 4))
    r = route.route_nearest_neighbor(c)
    assert (r.cpc_count, r.swap_count, route.two_qubit_count(r)) == (14, 13, 27)


def _swap_oracle(c, layout):
    """Sum over gates of (distance - 1), moving the far qubit next to the near one."""
    at = list(layout)
    total = 0
    for g in c.encoder:
        i, j = sorted(at.index(q) for q in g.qubits)
        total += j - i - 1
        q = at.pop(j)
        at.insert(i + 1, q)
    return total


def test_routing_properties_on_random_codes(sample_valid_indices, rng):
    picks = rng.choice(sample_valid_indices, 500, replace=False)
    cs, rs = [], []
    for i, idx in enumerate(picks):
        c = model.build_circuit(model.from_index(int(idx), 3, 4))
        lay = route.Layout(tuple(rng.permutation(7))) if i % 2 else None
        r = route.route_nearest_neighbor(c, lay)
        assert route.verify_routing(c, r)
        assert r.cpc_count == model.cpc_gate_count(model.from_index(int(idx), 3, 4))
        assert r.swap_count == sum(g.kind == "SWAP" for g in r.gates)
        assert r.swap_count == route.count_swaps(c, lay)
        assert r.swap_count == _swap_oracle(c, r.initial_layout.positions)
        for pol in route.POLICIES:
            assert route.count_swaps(c, lay, pol) == route.route_nearest_neighbor(c, lay, pol).swap_count
        cs.append(c)
        rs.append(r)
    assert route.batch_syndromes_preserved(cs, rs, "XYZ").all()
    for c, r in list(zip(cs, rs))[:25]:
        assert route.syndromes_preserved(c, r, "XYZ")


def test_mutations_are_caught(sample_valid_indices):
    caught = 0
    for idx in sample_valid_indices[:100]:
        c = model.build_circuit(model.from_index(int(idx), 3, 4))
        r = route.route_nearest_neighbor(c)
        swaps = [i for i, g in enumerate(r.gates) if g.kind == "SWAP"]
        if not swaps:
            continue
        m = r.without(swaps[len(swaps) // 2])
        assert not route.verify_routing(c, m)
        caught += 1
    assert caught > 50


def test_batch_and_scalar_preservation_agree_on_broken_routings(sample_valid_indices, rng):
    cs, rs = [], []
    for idx in sample_valid_indices[:120]:
        c = model.build_circuit(model.from_index(int(idx), 3, 4))
        r = route.route_nearest_neighbor(c, route.Layout(tuple(rng.permutation(7))))
        swaps = [i for i, g in enumerate(r.gates) if g.kind == "SWAP"]
        if swaps:
            r = r.without(swaps[0])
        cs.append(c)
        rs.append(r)
    batch = route.batch_syndromes_preserved(cs, rs, "XZ")
    scalar = np.array([route.syndromes_preserved(c, r, "XZ") for c, r in zip(cs, rs)])
    assert np.array_equal(batch, scalar)
    assert not batch.all()


def test_full_circuit_is_mirrored():
    c = model.build_circuit(model.from_index(OPT, 3, 4))
    full = route.route_nearest_neighbor(c).full_circuit()
    assert isinstance(full, Circuit) and full.is_mirrored()


def test_role_respecting_layouts():
    lays = list(route.role_respecting_layouts(2, 2))
    assert len(lays) == 2 * 2 * 2
    assert route.Layout((0, 1, 2, 3)) in lays and route.Layout((2, 3, 0, 1)) in lays
