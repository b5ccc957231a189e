"""Routing CPC encoders onto a linear nearest-neighbour register.

Qubits sit in a line of trap positions.  A two-qubit gate between positions
``i < j`` that are not adjacent is preceded by SWAPs that walk the qubit at
``j`` upwards (towards ``i``) one position at a time.  By default the moved
qubit stays where it ends up; ``policy="swap_back"`` restores the layout after
every gate instead.  Only the encoder is routed and counted: the decoder is its
mirror image.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from cpccodes.core import Circuit, Gate, PauliString, batch_conjugate, oracle_syndrome, pack_gate_lists

POLICIES = ("persistent", "swap_back")


@dataclass(frozen=True)
class Layout:
    """``positions[i]`` is the logical qubit held at trap position ``i``."""

    positions: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "positions", tuple(int(q) for q in self.positions))
        if sorted(self.positions) != list(range(len(self.positions))):
            raise ValueError(f"layout {self.positions} is not a permutation")

    @classmethod
    def default(cls, n: int) -> Layout:
        """Data qubits then parity qubits in index order (A, B, C, p1, ... for [[7,3,3]])."""
        return cls(tuple(range(n)))

    @classmethod
    def parse(cls, text: str) -> Layout:
        return cls(tuple(int(s) for s in text.split(",") if s.strip()))

    @property
    def position_of(self) -> dict[int, int]:
        return {q: i for i, q in enumerate(self.positions)}

    def __len__(self) -> int:
        return len(self.positions)


@dataclass(frozen=True)
class RoutedCircuit:
    """A routed encoder: gates act on trap positions, SWAPs included."""

    gates: tuple[Gate, ...]
    swap_count: int
    cpc_count: int
    initial_layout: Layout
    final_layout: Layout
    roles: tuple[str, ...]

    @property
    def n_qubits(self) -> int:
        return len(self.initial_layout)

    def physical_roles(self) -> tuple[str, ...]:
        """Role of the qubit initially held at each position."""
        return tuple(self.roles[q] for q in self.initial_layout.positions)

    def full_circuit(self) -> Circuit:
        """Encode-wait-decode circuit on positions; the decoder retraces the SWAPs."""
        dec = tuple(g.inverse() for g in reversed(self.gates))
        return Circuit(self.n_qubits, self.physical_roles(), self.gates + dec, len(self.gates))

    def without(self, index: int) -> RoutedCircuit:
        gates = self.gates[:index] + self.gates[index + 1:]
        dropped = self.gates[index]
        return RoutedCircuit(
            gates,
            self.swap_count - (dropped.kind == "SWAP"),
            self.cpc_count - (dropped.kind != "SWAP"),
            self.initial_layout,
            self.final_layout,
            self.roles,
        )


def _apply_swap(at: list[int], pos: dict[int, int], i: int, j: int) -> None:
    qa, qb = at[i], at[j]
    at[i], at[j] = qb, qa
    pos[qa], pos[qb] = j, i


def route_nearest_neighbor(c: Circuit, layout: Layout | None = None, policy: str = "persistent") -> RoutedCircuit:
    """Insert upward SWAPs so every encoder gate acts on adjacent positions."""
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {POLICIES}")
    layout = Layout.default(c.n_qubits) if layout is None else layout
    if len(layout) != c.n_qubits:
        raise ValueError("layout does not cover every qubit")
    at = list(layout.positions)
    pos = layout.position_of
    out: list[Gate] = []
    swaps = cpc = 0
    for g in c.encoder if c.wait_marker is not None else c.gates:
        if not g.is_two_qubit:
            out.append(Gate(g.kind, (pos[g.qubits[0]],)))
            continue
        if g.kind not in ("CNOT", "CPG"):
            raise ValueError(f"cannot route {g.kind} gates")
        a, b = g.qubits
        if a not in pos or b not in pos:
            raise KeyError(f"gate {g} uses a qubit missing from the layout")
        i, j = sorted((pos[a], pos[b]))
        moved = []
        while j - i > 1:
            out.append(Gate("SWAP", (j - 1, j)))
            _apply_swap(at, pos, j - 1, j)
            moved.append(j)
            swaps += 1
            j -= 1
        out.append(Gate(g.kind, (pos[a], pos[b])))
        cpc += 1
        if policy == "swap_back":
            for jj in reversed(moved):
                out.append(Gate("SWAP", (jj - 1, jj)))
                _apply_swap(at, pos, jj - 1, jj)
                swaps += 1
    return RoutedCircuit(tuple(out), swaps, cpc, layout, Layout(tuple(at)), c.roles)


def count_swaps(c: Circuit, layout: Layout | None = None, policy: str = "persistent") -> int:
    """SWAP count of :func:`route_nearest_neighbor` without building gates."""
    at = list(range(c.n_qubits) if layout is None else layout.positions)
    pos = {q: i for i, q in enumerate(at)}
    swaps = 0
    for g in c.encoder:
        if not g.is_two_qubit:
            continue
        i, j = sorted((pos[g.qubits[0]], pos[g.qubits[1]]))
        d = j - i - 1
        if d <= 0:
            continue
        if policy == "swap_back":
            swaps += 2 * d
            continue
        # the qubit at j slides to i+1; everything in between shifts down by one
        q = at[j]
        del at[j]
        at.insert(i + 1, q)
        for p in range(i + 1, j + 1):
            pos[at[p]] = p
        swaps += d
    return swaps


def verify_routing(original: Circuit, routed: RoutedCircuit, layout: Layout | None = None) -> bool:
    """Check the routed encoder replays the original gate by gate on adjacent positions."""
    layout = routed.initial_layout if layout is None else layout
    at = list(layout.positions)
    pos = {q: i for i, q in enumerate(at)}
    want = [g for g in (original.encoder if original.wait_marker is not None else original.gates)]
    k = 0
    for g in routed.gates:
        if g.is_two_qubit and abs(g.qubits[0] - g.qubits[1]) != 1:
            return False
        if g.kind == "SWAP":
            _apply_swap(at, pos, *g.qubits)
            continue
        if k >= len(want):
            return False
        logical = tuple(at[p] for p in g.qubits)
        if g.kind != want[k].kind or logical != want[k].qubits:
            return False
        k += 1
    return k == len(want) and tuple(at) == routed.final_layout.positions


def two_qubit_count(r: RoutedCircuit) -> int:
    return r.cpc_count + r.swap_count


def syndromes_preserved(original: Circuit, routed: RoutedCircuit, alphabet: str = "XYZ") -> bool:
    """Routed and unrouted circuits give the same syndrome for every wait error.

    A physical error at position ``i`` is the logical error on the qubit the
    final layout places there.  Parity qubits return to their initial positions
    after the mirrored decoder, so syndrome bits line up by role order.
    """
    full = routed.full_circuit()
    n = original.n_qubits
    logical_parity = original.parity_qubits
    start = routed.initial_layout.position_of
    order = [start[q] for q in logical_parity]
    for p in range(n):
        q = routed.final_layout.positions[p]
        for ch in alphabet:
            s_log = oracle_syndrome(original, PauliString.single(n, q, ch))
            e = PauliString.single(n, p, ch)
            final = _final(full, e)
            s_phys = tuple((final.x >> pp) & 1 for pp in order)
            if s_log != s_phys:
                return False
    return True


def _decoder_syndromes(decoders, measured: np.ndarray, n: int, alphabet: str) -> np.ndarray:
    """Syndrome masks, shape (N, n, len(alphabet)), for each wait error on each wire."""
    N, L = len(decoders), len(alphabet)
    rows = np.repeat(np.arange(N), n * L)
    R = len(rows)
    lt = np.zeros((R, n), np.uint8)
    wire = np.tile(np.repeat(np.arange(n), L), N)
    lt[np.arange(R), wire] = np.tile(np.array(["IXZY".index(ch) for ch in alphabet], np.uint8), N * n)
    ph = np.zeros(R, np.uint8)
    batch_conjugate(lt, ph, pack_gate_lists(decoders), rows)
    xs = (lt & 1).astype(np.int64).reshape(N, n * L, n)
    cols = np.take_along_axis(xs, np.repeat(measured[:, None, :], n * L, axis=1), axis=2)
    return (cols << np.arange(measured.shape[1])).sum(axis=2).reshape(N, n, L)


def batch_syndromes_preserved(
    originals: Sequence[Circuit], routed: Sequence[RoutedCircuit], alphabet: str = "XYZ"
) -> np.ndarray:
    """:func:`syndromes_preserved` for many codes at once, on batched Pauli frames."""
    N = len(originals)
    if N == 0:
        return np.zeros(0, bool)
    n = originals[0].n_qubits
    if any(c.n_qubits != n for c in originals) or len(routed) != N:
        raise ValueError("batch needs equally sized circuits, one routing each")
    log_dec = [[(g.kind, g.qubits) for g in c.decoder] for c in originals]
    phys_dec = [[(g.kind, g.qubits) for g in reversed(r.gates)] for r in routed]
    log_meas = np.array([c.parity_qubits for c in originals], np.int64)
    phys_meas = np.array(
        [[r.initial_layout.position_of[q] for q in c.parity_qubits] for c, r in zip(originals, routed)], np.int64
    )
    s_log = _decoder_syndromes(log_dec, log_meas, n, alphabet)
    s_phys = _decoder_syndromes(phys_dec, phys_meas, n, alphabet)
    final = np.array([r.final_layout.positions for r in routed], np.int64)
    want = np.take_along_axis(s_log, final[:, :, None].repeat(len(alphabet), axis=2), axis=1)
    return np.all(s_phys == want, axis=(1, 2))


def _final(c: Circuit, e: PauliString) -> PauliString:
    from cpccodes.core import propagate

    return propagate(c, e, c.wait_marker)


def role_respecting_layouts(k: int, m: int, blocks: Sequence[str] = ("data", "parity")):
    """Layouts keeping data qubits in one block and parity in another, both block orders."""
    import itertools

    data = list(range(k))
    parity = list(range(k, k + m))
    for dp in itertools.permutations(data):
        for pp in itertools.permutations(parity):
            yield Layout(tuple(dp) + tuple(pp))
            yield Layout(tuple(pp) + tuple(dp))
