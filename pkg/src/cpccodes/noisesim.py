"""Noise studies of CPC memories: one encode-wait-decode cycle under Pauli noise.

Everything here is Pauli-frame bookkeeping.  A wait-stage error maps to a
syndrome and to a residual Pauli on the data register, both GF(2)-linear in
the error, so single-qubit responses are computed once and combined by XOR.

The channel draws X with probability ``p_x`` and Z with probability ``p_z``
independently on every qubit; a Y appears only when both fire.  Exact
enumeration counts *elementary* faults, so a Y on one qubit is a second-order
event.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from cpccodes.core import (
    CPG,
    CNOT,
    DATA,
    PARITY,
    Circuit,
    DimensionError,
    Gate,
    PauliString,
    propagate,
)
from cpccodes.native import GateSeq
from cpccodes.route import RoutedCircuit


@dataclass(frozen=True)
class NoiseModel:
    p_x: float
    p_z: float

    def __post_init__(self) -> None:
        for p in (self.p_x, self.p_z):
            if not (0.0 <= p <= 1.0) or not np.isfinite(p):
                raise ValueError(f"probabilities must lie in [0, 1], got {p}")
        if self.p_x + self.p_z > 1.0:
            raise ValueError("p_x + p_z must not exceed 1")

    def letter_probabilities(self) -> dict[str, float]:
        px, pz = self.p_x, self.p_z
        return {"I": (1 - px) * (1 - pz), "X": px * (1 - pz), "Z": pz * (1 - px), "Y": px * pz}


@dataclass(frozen=True)
class CycleOutcome:
    syndrome: tuple[int, ...]
    residual: PauliString
    logical_failure: bool


@dataclass(frozen=True)
class RateEstimate:
    raw_failure_rate: float
    postselected_failure_rate: float
    yield_: float
    method: str
    samples: int
    covered_mass: float = 1.0


# ----------------------------------------------------------------------------
# stabilizer span


def _symplectic(p: PauliString) -> int:
    return p.x | (p.z << p.n)


def _span_table(stabs: Sequence[PauliString], k: int) -> np.ndarray:
    """Boolean table over 2k-bit symplectic words: is the word in the stabilizer span?"""
    if any(s.n != k for s in stabs):
        raise DimensionError(f"stabilizers must act on the {k} data qubits")
    table = np.zeros(1 << (2 * k), bool)
    words = {0}
    for s in stabs:
        v = _symplectic(s)
        words |= {w ^ v for w in words}
    table[list(words)] = True
    return table


def _span_words(stabs: Sequence[PauliString]) -> list[int]:
    words = {0}
    for s in stabs:
        v = _symplectic(s)
        words |= {w ^ v for w in words}
    return sorted(words)


def in_stabilizer_span(p: PauliString, stabs: Sequence[PauliString]) -> bool:
    """Membership of ``p`` (phase ignored) in the group generated by ``stabs``."""
    return bool(_span_table(stabs, p.n)[_symplectic(p)])


def effective_weight(residual: PauliString, stabs: Sequence[PauliString]) -> int:
    """Smallest weight of ``residual`` times any element of the stabilizer group."""
    k = residual.n
    best = k + 1
    mask = (1 << k) - 1
    r = _symplectic(residual)
    for w in _span_words(stabs):
        v = r ^ w
        best = min(best, bin((v & mask) | (v >> k)).count("1"))
    return best


# ----------------------------------------------------------------------------
# circuit views


@dataclass(frozen=True)
class _View:
    """A circuit plus where data and parity wires end up."""

    circuit: Circuit
    data_out: tuple[int, ...]
    parity_out: tuple[int, ...]


def _view(c) -> _View:
    if isinstance(c, RoutedCircuit):
        c = c.full_circuit()
    elif isinstance(c, GateSeq):
        c = c.to_circuit()
    at = list(range(c.n_qubits))
    for g in c.gates:
        if g.kind == "SWAP":
            a, b = g.qubits
            at[a], at[b] = at[b], at[a]
    final = [0] * c.n_qubits
    for p, w in enumerate(at):
        final[w] = p
    data = tuple(final[q] for q in c.data_qubits)
    parity = tuple(final[q] for q in c.parity_qubits)
    return _View(c, data, parity)


def _check_stabs(view: _View, stabs: Sequence[PauliString]) -> None:
    k = len(view.data_out)
    for s in stabs:
        if s.n != k:
            raise DimensionError(f"stabilizer {s} does not act on the {k} data qubits")


# ----------------------------------------------------------------------------
# single cycle


def run_cycle(c, input_stabilizers: Sequence[PauliString], e: PauliString) -> CycleOutcome:
    """Inject ``e`` at the wait stage and read off syndrome and data residual."""
    v = _view(c)
    _check_stabs(v, input_stabilizers)
    if v.circuit.wait_marker is None:
        from cpccodes.core import CircuitStructureError

        raise CircuitStructureError("run_cycle needs a wait marker")
    final = propagate(v.circuit, e, v.circuit.wait_marker)
    syndrome = tuple((final.x >> q) & 1 for q in v.parity_out)
    residual = final.restrict(v.data_out)
    table = _span_table(input_stabilizers, len(v.data_out))
    return CycleOutcome(syndrome, residual, not bool(table[_symplectic(residual)]))


@dataclass(frozen=True)
class _Linear:
    """Syndrome and residual responses of X and Z on every qubit, packed as ints."""

    sx: tuple[int, ...]
    sz: tuple[int, ...]
    rx: tuple[int, ...]
    rz: tuple[int, ...]
    k: int
    m: int


def _linear_response(v: _View) -> _Linear:
    c = v.circuit
    n = c.n_qubits
    sx, sz, rx, rz = [], [], [], []
    for q in range(n):
        for letter, s_out, r_out in (("X", sx, rx), ("Z", sz, rz)):
            f = propagate(c, PauliString.single(n, q, letter), c.wait_marker)
            s_out.append(sum(((f.x >> p) & 1) << j for j, p in enumerate(v.parity_out)))
            r_out.append(_symplectic(f.restrict(v.data_out)))
    return _Linear(tuple(sx), tuple(sz), tuple(rx), tuple(rz), len(v.data_out), len(v.parity_out))


def _lookup_table(lin: _Linear, letters: str = "XZ") -> dict[int, int]:
    """Syndrome -> data residual of the first single error producing it."""
    table: dict[int, int] = {}
    for q in range(len(lin.sx)):
        for ch in letters:
            s = (lin.sx[q] if ch in "XY" else 0) ^ (lin.sz[q] if ch in "ZY" else 0)
            r = (lin.rx[q] if ch in "XY" else 0) ^ (lin.rz[q] if ch in "ZY" else 0)
            if s:
                table.setdefault(s, r)
    return table


def estimate_rates(
    c,
    stabs: Sequence[PauliString],
    nm: NoiseModel,
    shots: int | None = None,
    exact_weight: int | None = None,
    seed: int = 0,
    correction: str | None = None,
    chunk: int = 100_000,
) -> RateEstimate:
    """Raw failure, failure given a zero syndrome, and the zero-syndrome yield.

    Give ``exact_weight`` to enumerate every pattern with at most that many
    elementary X/Z faults (the result is conditioned on that event; its
    probability is returned as ``covered_mass``), or ``shots`` to sample.
    ``correction="lookup"`` applies the single-error lookup correction before
    judging failure.
    """
    if (shots is None) == (exact_weight is None):
        raise ValueError("give exactly one of shots or exact_weight")
    if correction not in (None, "lookup"):
        raise ValueError("correction must be None or 'lookup'")
    v = _view(c)
    _check_stabs(v, stabs)
    lin = _linear_response(v)
    span = _span_table(stabs, lin.k)
    fix = _lookup_table(lin) if correction else {}
    if exact_weight is not None:
        if exact_weight < 0:
            raise ValueError("exact_weight must be nonnegative")
        return _exact(lin, span, fix, nm, exact_weight)
    if shots < 1:
        raise ValueError("shots must be positive")
    return _sample(lin, span, fix, nm, shots, seed, chunk)


def _exact(lin: _Linear, span: np.ndarray, fix: dict, nm: NoiseModel, w: int) -> RateEstimate:
    n = len(lin.sx)
    sites = [(q, b) for q in range(n) for b in (0, 1)]  # b=0: X draw, b=1: Z draw
    p_site = (nm.p_x, nm.p_z)
    base = float(((1 - nm.p_x) * (1 - nm.p_z)) ** n)
    mass = fail = zero = fail_zero = 0.0
    for r in range(w + 1):
        for combo in itertools.combinations(range(len(sites)), r):
            prob = base
            s = res = 0
            for i in combo:
                q, b = sites[i]
                p = p_site[b]
                if p >= 1.0:
                    prob = 0.0
                    break
                prob *= p / (1 - p)
                s ^= lin.sz[q] if b else lin.sx[q]
                res ^= lin.rz[q] if b else lin.rx[q]
            # sites that are certain (p == 1) never occur as 'absent'; keep it simple
            if prob == 0.0:
                continue
            res ^= fix.get(s, 0)
            bad = not span[res]
            mass += prob
            fail += prob * bad
            if s == 0:
                zero += prob
                fail_zero += prob * bad
    if mass == 0:
        return RateEstimate(0.0, 0.0, 1.0, "exact", 0, 0.0)
    post = fail_zero / zero if zero else 0.0
    return RateEstimate(fail / mass, post, zero / mass, "exact", w, mass)


def _sample(lin, span, fix, nm, shots, seed, chunk) -> RateEstimate:
    n = len(lin.sx)
    sx = np.array(lin.sx, np.int64)
    sz = np.array(lin.sz, np.int64)
    rx = np.array(lin.rx, np.int64)
    rz = np.array(lin.rz, np.int64)
    fix_s = np.array(sorted(fix), np.int64)
    fix_r = np.array([fix[s] for s in sorted(fix)], np.int64)
    n_chunks = -(-shots // chunk)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    fail = zero = fail_zero = 0
    for i, ss in enumerate(children):
        size = min(chunk, shots - i * chunk)
        rng = np.random.default_rng(ss)
        ex = rng.random((size, n)) < nm.p_x
        ez = rng.random((size, n)) < nm.p_z
        s = _xor_reduce(ex, sx) ^ _xor_reduce(ez, sz)
        r = _xor_reduce(ex, rx) ^ _xor_reduce(ez, rz)
        if len(fix_s):
            pos = np.searchsorted(fix_s, s)
            pos = np.minimum(pos, len(fix_s) - 1)
            hit = fix_s[pos] == s
            r = np.where(hit, r ^ fix_r[pos], r)
        bad = ~span[r]
        z = s == 0
        fail += int(bad.sum())
        zero += int(z.sum())
        fail_zero += int((bad & z).sum())
    post = fail_zero / zero if zero else 0.0
    return RateEstimate(fail / shots, post, zero / shots, "sampled", shots)


def _xor_reduce(mask: np.ndarray, values: np.ndarray) -> np.ndarray:
    out = np.zeros(mask.shape[0], np.int64)
    for q in range(mask.shape[1]):
        out ^= np.where(mask[:, q], values[q], 0)
    return out


# ----------------------------------------------------------------------------
# fault scan


@dataclass(frozen=True)
class FaultLocation:
    gate_index: int
    qubit: int
    letter: str
    residual: str

    def __str__(self) -> str:
        return f"{self.letter}{self.qubit} after gate {self.gate_index} -> {self.residual}"


def fault_scan(c, stabs: Sequence[PauliString] = ()) -> list[FaultLocation]:
    """Single faults that reach the register as a multi-qubit error unseen.

    A Pauli X, Y or Z is placed on each qubit of each gate right after that
    gate and pushed to the end of the circuit.  A location is reported when
    no parity measurement flips and the data residual acts on two or more
    qubits, unless the residual is a stabilizer of the input state (and so
    harmless).
    """
    v = _view(c)
    _check_stabs(v, stabs)
    circ = v.circuit
    n = circ.n_qubits
    span = _span_table(stabs, len(v.data_out))
    out = []
    for i, g in enumerate(circ.gates):
        for q in g.qubits:
            for letter in "XYZ":
                f = propagate(circ, PauliString.single(n, q, letter), i + 1)
                if any((f.x >> p) & 1 for p in v.parity_out):
                    continue
                res = f.restrict(v.data_out)
                if res.weight >= 2 and not span[_symplectic(res)]:
                    out.append(FaultLocation(i, q, letter, res.letters()))
    return out


def hardened_422_circuit() -> Circuit:
    """Rearranged, green-gate-free [[4,2,2]] circuit with a parity SWAP.

    Qubits are A, B, p1, p2.  The encoder originally opened with CPG(A, p2),
    which acts as the identity on |+_A 0_B 0 0> and is left out.  In the
    decoder, SWAP(p1, p2) brings p2 next to A so that CPG(A, p2) is a
    nearest-neighbour gate on a bow-tie chip without an A-p2 link; from
    there on p1 and p2 sit at positions 3 and 2.  This circuit only works
    for the |+_A 0_B> input.
    """
    roles = (DATA, DATA, PARITY, PARITY)
    enc = [CPG(2, 3), CNOT(0, 2), CPG(1, 3), CNOT(1, 2)]
    dec = [CNOT(1, 2), CPG(1, 3), CNOT(0, 2), Gate("SWAP", (2, 3)), CPG(0, 2), CPG(3, 2)]
    return Circuit(4, roles, tuple(enc + dec), len(enc))


def cross_checkless_422_circuit() -> Circuit:
    """Canonical [[4,2,2]] circuit with the p1-p2 cross-check removed."""
    from cpccodes.model import AdjacencyTriple, build_circuit

    return build_circuit(AdjacencyTriple(2, 2, [[1, 0], [1, 0]], [[0, 1], [0, 1]], [[0, 0], [0, 0]]))


def plus_zero_stabilizers() -> list[PauliString]:
    """Stabilizers X_A and Z_B of the |+_A 0_B> input."""
    return [PauliString.from_letters("XI"), PauliString.from_letters("IZ")]
