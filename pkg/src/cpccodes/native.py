"""Lowering to the SP native gate, peephole simplification and cost metrics.

The SP gate is ``F = diag(1, i, i, 1)``.  With ``P = diag(1, -i)`` we have
``(P (x) P) F = CZ``, which gives the two lowering recipes used here (gates in
time order):

    CNOT(c, t) -> H_t, SP(c, t), P_c, P_t, H_t                  4 locals
    CPG(a, b)  -> H_a, H_b, SP(a, b), P_a, P_b, H_a, H_b        6 locals

Both are checked numerically against the source gate when the module loads.

Simplification works on per-wire token streams.  A SWAP only relabels wires,
so 1-qubit gates are tracked by wire identity rather than trap position.  All
diagonal gates (P, PDAG, Z and SP itself) commute, so the diagonals between two
Hadamards on a wire can be merged into a single power of P.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from cpccodes.core import (
    DATA,
    GATE_MATRICES,
    INVERSE_CONJUGATION_TABLES,
    PARITY,
    Circuit,
    Gate,
    PauliString,
    parity_observables,
)
from cpccodes.model import alphabet as _alphabet
from cpccodes.route import RoutedCircuit

NATIVE_KINDS = ("SP", "SWAP", "H", "P", "PDAG", "Z", "X")
LOCAL_KINDS = ("H", "P", "PDAG", "Z", "X")

# powers of P = diag(1, -i)
_DIAG_POWER = {"P": 1, "Z": 2, "PDAG": 3}
_POWER_KIND = {1: "P", 2: "Z", 3: "PDAG"}

_RECIPES = {
    # (kind, which operand) in time order; "2q" marks the SP itself
    "CNOT": (("H", 1), ("SP", None), ("P", 0), ("P", 1), ("H", 1)),
    "CPG": (("H", 0), ("H", 1), ("SP", None), ("P", 0), ("P", 1), ("H", 0), ("H", 1)),
    "CZ": (("SP", None), ("P", 0), ("P", 1)),
}


def _recipe_matrix(kind: str) -> np.ndarray:
    eye = np.eye(2, dtype=complex)
    u = np.eye(4, dtype=complex)
    for g, which in _RECIPES[kind]:
        if which is None:
            m = GATE_MATRICES[g]
        elif which == 0:
            m = np.kron(GATE_MATRICES[g], eye)
        else:
            m = np.kron(eye, GATE_MATRICES[g])
        u = m @ u
    return u


def _equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-12) -> bool:
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(a[idx]) < tol:
        return False
    ph = a[idx] / b[idx]
    return abs(abs(ph) - 1) < tol and np.allclose(a, ph * b, atol=tol, rtol=0)


def check_lowering_soundness(tol: float = 1e-12) -> None:
    for kind in _RECIPES:
        if not _equal_up_to_phase(_recipe_matrix(kind), GATE_MATRICES[kind], tol):
            raise AssertionError(f"lowering of {kind} is not equal to the gate up to phase")


check_lowering_soundness()


# ----------------------------------------------------------------------------
# gate sequences


@dataclass(frozen=True)
class GateSeq:
    """Native-level circuit on trap positions.

    ``provenance[i]`` is the index of the source gate that ``gates[i]`` came
    from (-1 when none).  ``layout`` and ``wait_layout`` map positions to
    logical qubits at the start and at the wait stage.  ``frame`` records
    the Clifford bookkeeping introduced by simplification as
    ``(where, logical qubit, gate kind)`` triples, where ``where`` is
    ``"input"``, ``"output"`` or ``"wait"``.
    """

    n_qubits: int
    roles: tuple[str, ...]
    gates: tuple[Gate, ...]
    wait_marker: int
    provenance: tuple[int, ...]
    layout: tuple[int, ...]
    wait_layout: tuple[int, ...]
    frame: tuple[tuple[str, int, str], ...] = field(default=())

    def __post_init__(self) -> None:
        if len(self.provenance) != len(self.gates):
            raise ValueError("one provenance tag per gate is required")
        if not 0 <= self.wait_marker <= len(self.gates):
            raise IndexError("wait marker outside the gate list")

    @property
    def encoder(self) -> tuple[Gate, ...]:
        return self.gates[: self.wait_marker]

    @property
    def decoder(self) -> tuple[Gate, ...]:
        return self.gates[self.wait_marker:]

    def to_circuit(self) -> Circuit:
        return Circuit(self.n_qubits, self.roles, self.gates, self.wait_marker)

    def final_positions(self) -> list[int]:
        """Position at the end of the circuit of the wire starting at each position."""
        at = list(range(self.n_qubits))
        for g in self.gates:
            if g.kind == "SWAP":
                a, b = g.qubits
                at[a], at[b] = at[b], at[a]
        out = [0] * self.n_qubits
        for p, w in enumerate(at):
            out[w] = p
        return out

    def measured_positions(self, parity_logical: Sequence[int]) -> list[int]:
        """Output positions read for each logical parity qubit, in the given order."""
        final = self.final_positions()
        return [final[self.layout.index(q)] for q in parity_logical]

    def without(self, index: int) -> GateSeq:
        wm = self.wait_marker - (index < self.wait_marker)
        return replace(
            self,
            gates=self.gates[:index] + self.gates[index + 1:],
            provenance=self.provenance[:index] + self.provenance[index + 1:],
            wait_marker=wm,
        )

    def to_json(self) -> dict:
        return {
            "n": self.n_qubits,
            "roles": list(self.roles),
            "wait_marker": self.wait_marker,
            "gates": [g.to_json() for g in self.gates],
            "layout": list(self.layout),
            "wait_layout": list(self.wait_layout),
            "frame": [list(f) for f in self.frame],
        }

    @classmethod
    def from_json(cls, obj: dict) -> GateSeq:
        gates = tuple(Gate.from_json(g) for g in obj["gates"])
        n = int(obj["n"])
        return cls(
            n,
            tuple(obj["roles"]),
            gates,
            int(obj["wait_marker"]),
            (-1,) * len(gates),
            tuple(obj.get("layout", range(n))),
            tuple(obj.get("wait_layout", range(n))),
            tuple((w, int(q), k) for w, q, k in obj.get("frame", ())),
        )


def lower_to_native(c: Circuit | RoutedCircuit) -> GateSeq:
    """Replace every CNOT and CPG with SP plus local Cliffords; SWAPs pass through."""
    if isinstance(c, RoutedCircuit):
        layout = c.initial_layout.positions
        wait_layout = c.final_layout.positions
        c = c.full_circuit()
    else:
        layout = wait_layout = tuple(range(c.n_qubits))
    if c.wait_marker is None:
        c = Circuit(c.n_qubits, c.roles, c.gates, len(c.gates))
    gates: list[Gate] = []
    prov: list[int] = []
    marker = 0
    for i, g in enumerate(c.gates):
        if i == c.wait_marker:
            marker = len(gates)
        if g.kind in _RECIPES:
            for kind, which in _RECIPES[g.kind]:
                qs = g.qubits if which is None else (g.qubits[which],)
                gates.append(Gate(kind, qs))
                prov.append(i)
        elif g.kind in NATIVE_KINDS:
            gates.append(g)
            prov.append(i)
        else:
            raise ValueError(f"cannot lower {g.kind} gates")
    if c.wait_marker == len(c.gates):
        marker = len(gates)
    return GateSeq(c.n_qubits, c.roles, tuple(gates), marker, tuple(prov), tuple(layout), tuple(wait_layout))


def local_gate_count(g: GateSeq) -> int:
    """Single-qubit gates in the encoder."""
    return sum(1 for x in g.encoder if x.kind in LOCAL_KINDS)


def native_gate_count(g: GateSeq) -> int:
    return sum(1 for x in g.encoder if x.kind == "SP")


def swap_gate_count(g: GateSeq) -> int:
    return sum(1 for x in g.encoder if x.kind == "SWAP")


def total_length(g: GateSeq) -> int:
    """L = SP + SWAP + local count over the encoder."""
    return native_gate_count(g) + swap_gate_count(g) + local_gate_count(g)


@dataclass(frozen=True)
class CostWeights:
    cpc: Fraction | float | int = 1
    swap: Fraction | float | int = 1
    local: Fraction | float | int = 1

    def __post_init__(self) -> None:
        for w in (self.cpc, self.swap, self.local):
            if not np.isfinite(float(w)) or w < 0:
                raise ValueError(f"cost weights must be finite and nonnegative, got {w}")

    @classmethod
    def parse(cls, text: str) -> CostWeights:
        parts = [Fraction(s.strip()) for s in text.split(",")]
        if len(parts) != 3:
            raise ValueError("expected three comma-separated weights")
        return cls(*parts)


def weighted_cost(counts: Sequence[int], w: CostWeights | Sequence = CostWeights()):
    """gamma_1 |CPC| + gamma_2 |SWAP| + gamma_3 |LOCAL|."""
    if not isinstance(w, CostWeights):
        w = CostWeights(*w)
    cpc, swap, local = counts
    total = w.cpc * cpc + w.swap * swap + w.local * local
    if isinstance(total, Fraction) and total.denominator == 1:
        return int(total)
    return total


def unsimplified_local_count(n_cnot: int, n_cpg: int) -> int:
    return 4 * n_cnot + 6 * n_cpg


# ----------------------------------------------------------------------------
# simplification

_H, _D, _F, _W, _B = "H", "D", "F", "W", "B"


def _streams(g: GateSeq):
    """Token list per wire; also the wire -> position maps at the wait and at the end."""
    n = g.n_qubits
    at = list(range(n))  # position -> wire
    streams: list[list[list]] = [[] for _ in range(n)]
    wait_pos = None
    for i, gate in enumerate(g.gates):
        if i == g.wait_marker:
            wait_pos = _inverse(at)
            for s in streams:
                s.append([_W, 0, -1])
        k = gate.kind
        if k == "SWAP":
            a, b = gate.qubits
            at[a], at[b] = at[b], at[a]
        elif k in ("SP", "CZ"):
            for q in gate.qubits:
                streams[at[q]].append([_F, 0, i])
        elif k == "H":
            streams[at[gate.qubits[0]]].append([_H, 0, i])
        elif k in _DIAG_POWER:
            streams[at[gate.qubits[0]]].append([_D, _DIAG_POWER[k], i])
        else:
            for q in gate.qubits:
                streams[at[q]].append([_B, 0, i])
    if wait_pos is None:
        wait_pos = _inverse(at)
        for s in streams:
            s.append([_W, 0, -1])
    return streams, wait_pos


def _inverse(at: list[int]) -> list[int]:
    out = [0] * len(at)
    for p, w in enumerate(at):
        out[w] = p
    return out


def _merge(s: list) -> bool:
    """Fold the diagonals of every H/wait-bounded run into one power of P."""
    out, run, power, last = [], [], 0, None
    changed = False
    n_diag = 0

    def flush():
        nonlocal run, power, last, n_diag, changed
        kept = [t for t in run if t[0] != _D]
        if power % 4:
            d = [_D, power % 4, last]
            kept.append(d)
            if n_diag != 1:
                changed = True
        elif n_diag:
            changed = True
        out.extend(kept)
        run, power, last, n_diag = [], 0, None, 0

    for t in s:
        if t[0] in (_H, _W, _B):
            flush()
            out.append(t)
        else:
            if t[0] == _D:
                power += t[1]
                last = t[2]
                n_diag += 1
            run.append(t)
    flush()
    s[:] = out
    return changed


def _cancel_hh(s: list) -> bool:
    out: list = []
    changed = False
    for t in s:
        if t[0] == _H and out and out[-1][0] == _H:
            out.pop()
            changed = True
        else:
            out.append(t)
    s[:] = out
    return changed


def _green(s: list, role: str, dropped: list) -> bool:
    """Drop gates that act trivially at the circuit ends.

    Data wires: every local before the first check and after the last one
    (an input/output basis change, recorded as frame).  On both roles,
    diagonals in the run touching either end: parity wires start in |0> and
    end in a Z measurement, and diagonals float through SP.
    """
    changed = False
    for reverse in (False, True):
        seq = s[::-1] if reverse else s
        where = "output" if reverse else "input"
        keep = []
        # 0: any leading local droppable (data only), 1: diagonals droppable, 2: done
        phase = 0 if role == DATA else 1
        for t in seq:
            kind = t[0]
            if phase == 0:
                if kind in (_H, _D):
                    dropped.append((where, t))
                    changed = True
                    continue
                phase = 1
            if phase == 1:
                if kind == _D:
                    dropped.append((where, t))
                    changed = True
                    continue
                if kind in (_H, _W, _B):
                    phase = 2
            keep.append(t)
        s[:] = keep[::-1] if reverse else keep
    return changed


def _wait_runs(s: list):
    """Indices of the diagonal (or None) closest to the wait on each side, and the wait index."""
    w = next(i for i, t in enumerate(s) if t[0] == _W)
    enc_d = dec_d = None
    i = w - 1
    while i >= 0 and s[i][0] in (_F, _D):
        if s[i][0] == _D:
            enc_d = i
        i -= 1
    enc_bare = w - 1 >= 0 and s[w - 1][0] == _H
    j = w + 1
    while j < len(s) and s[j][0] in (_F, _D):
        if s[j][0] == _D:
            dec_d = j
        j += 1
    dec_bare = w + 1 < len(s) and s[w + 1][0] == _H
    return w, enc_d, dec_d, enc_bare, dec_bare


class _FlipMap:
    """Syndrome flips of X and Z at each wait position, with a refinement test."""

    def __init__(self, fx: Sequence[int], fz: Sequence[int], letters: str, mode: str | None = None):
        self.fx = list(fx)
        self.fz = list(fz)
        self.letters = letters
        self.reference = self.values()
        self.mode = infer_mode(self.reference) if mode is None else mode

    def flip(self, p: int, code: int) -> int:
        return (self.fx[p] if code & 1 else 0) ^ (self.fz[p] if code & 2 else 0)

    def values(self) -> list[int]:
        return [self.flip(p, "IXZY".index(ch)) for p in range(len(self.fx)) for ch in self.letters]

    def conjugated(self, p: int, kind: str) -> tuple[int, int]:
        """Flips at ``p`` once the wait error is replaced by G^dag E G."""
        table = INVERSE_CONJUGATION_TABLES[kind]
        return self.flip(p, table[(1,)][1][0]), self.flip(p, table[(2,)][1][0])

    def acceptable(self, p: int, fx: int, fz: int) -> bool:
        old = self.fx[p], self.fz[p]
        self.fx[p], self.fz[p] = fx, fz
        vals = self.values()
        self.fx[p], self.fz[p] = old
        if any(v == 0 for v in vals):
            return False
        if self.mode == "detect":
            return True
        seen: dict[int, int] = {}
        for v, r in zip(vals, self.reference):
            if seen.setdefault(v, r) != r:
                return False
        return True


def infer_mode(flips: Sequence) -> str:
    """``"correct"`` when every single error already has its own nonzero syndrome."""
    zero = 0 if not flips or isinstance(flips[0], int) else (0,) * len(flips[0])
    distinct = len(set(flips)) == len(flips)
    return "correct" if distinct and zero not in flips else "detect"


def reference_flips(g: GateSeq) -> tuple[list[int], list[int]]:
    """Per wait position, the syndrome flips caused by X and by Z (bit j = parity j)."""
    c = g.to_circuit()
    parity_logical = sorted(g.layout[p] for p, r in enumerate(g.roles) if r == PARITY)
    obs = parity_observables(c, g.measured_positions(parity_logical))
    fx, fz = [], []
    for p in range(g.n_qubits):
        sx = obs.syndrome(PauliString.single(g.n_qubits, p, "X"))
        sz = obs.syndrome(PauliString.single(g.n_qubits, p, "Z"))
        base = tuple(b or 0 for b in obs.base)
        fx.append(sum((a ^ b) << j for j, (a, b) in enumerate(zip(sx, base))))
        fz.append(sum((a ^ b) << j for j, (a, b) in enumerate(zip(sz, base))))
    return fx, fz


def _elide(streams, wait_pos, flips: _FlipMap, frame: list, layout_at_wait) -> bool:
    changed = False
    for wire, s in enumerate(streams):
        while True:
            w, ei, di, enc_bare, dec_bare = _wait_runs(s)
            e = s[ei][1] if ei is not None else 0
            d = s[di][1] if di is not None else 0
            p = wait_pos[wire]
            if (e or d) and (e + d) % 2 == 0:
                kind = _POWER_KIND.get(d)
                fx, fz = flips.conjugated(p, kind) if kind else (flips.fx[p], flips.fz[p])
                if flips.acceptable(p, fx, fz):
                    flips.fx[p], flips.fz[p] = fx, fz
                    q = layout_at_wait[p]
                    if kind:
                        frame.append(("wait", q, kind))
                    if (e + d) % 4 == 2:
                        frame.append(("wait", q, "Z"))
                    for idx in sorted((i for i in (ei, di) if i is not None), reverse=True):
                        del s[idx]
                    changed = True
                    continue
            if enc_bare and dec_bare and not e and not d:
                fx, fz = flips.conjugated(p, "H")
                if flips.acceptable(p, fx, fz):
                    flips.fx[p], flips.fz[p] = fx, fz
                    frame.append(("wait", layout_at_wait[p], "H"))
                    del s[w + 1]
                    del s[w - 1]
                    changed = True
                    continue
            break
    return changed


@dataclass
class SimplifyResult:
    seq: GateSeq
    flips_x: list[int]
    flips_z: list[int]


def simplify(
    g: GateSeq,
    errset: str = "xz",
    reference: tuple[Sequence[int], Sequence[int]] | None = None,
    mode: str | None = None,
) -> GateSeq:
    """Peephole passes to a fixpoint: H-H cancellation, diagonal merging,
    symmetric elision at the wait and end-of-circuit drops.

    A pair of gates mirrored across the wait is removed only if the resulting
    change of wait errors (conjugation by the decoder-side gate) keeps every
    error in ``errset`` detectable and keeps apart every pair of errors that
    were told apart before (the latter only in ``"correct"`` mode, which is
    inferred from the input when ``mode`` is None).  ``reference`` supplies the per-position X/Z flip
    masks of ``g`` when already known; otherwise they are computed with the
    Pauli-frame engine.
    """
    return _simplify(g, errset, reference, mode).seq


def _simplify(g, errset, reference, mode=None) -> SimplifyResult:
    letters = _alphabet(errset)
    fx, fz = reference_flips(g) if reference is None else reference
    flips = _FlipMap(fx, fz, letters, mode)
    streams, wait_pos = _streams(g)
    roles = g.roles
    frame: list = list(g.frame)
    dropped: list = []
    changed = True
    while changed:
        changed = False
        for s in streams:
            changed |= _cancel_hh(s)
            changed |= _merge(s)
        changed |= _elide(streams, wait_pos, flips, frame, g.wait_layout)
        for w, s in enumerate(streams):
            changed |= _green(s, roles[w], dropped)
    for where, t in dropped:
        gate = g.gates[t[2]]
        frame.append((where, g.layout[_wire_of(g, t[2], gate)], gate.kind))
    return SimplifyResult(_emit(g, streams, frame), flips.fx, flips.fz)


def _wire_of(g: GateSeq, index: int, gate: Gate) -> int:
    at = list(range(g.n_qubits))
    for x in g.gates[:index]:
        if x.kind == "SWAP":
            a, b = x.qubits
            at[a], at[b] = at[b], at[a]
    return at[gate.qubits[0]]


def _emit(g: GateSeq, streams, frame) -> GateSeq:
    keep: dict[int, str | None] = {}
    for s in streams:
        for t in s:
            if t[0] == _D:
                keep[t[2]] = _POWER_KIND[t[1]]
            elif t[0] in (_H, _B):
                keep[t[2]] = None
    gates, prov, marker = [], [], 0
    for i, gate in enumerate(g.gates):
        if i == g.wait_marker:
            marker = len(gates)
        if gate.kind in LOCAL_KINDS:
            if i not in keep:
                continue
            if keep[i] is not None:
                gate = Gate(keep[i], gate.qubits)
        gates.append(gate)
        prov.append(g.provenance[i])
    if g.wait_marker == len(g.gates):
        marker = len(gates)
    return GateSeq(
        g.n_qubits, g.roles, tuple(gates), marker, tuple(prov), g.layout, g.wait_layout, tuple(frame)
    )


# ----------------------------------------------------------------------------
# equivalence


def _single_errors(n: int, letters: str):
    return [(q, ch) for q in range(n) for ch in letters]


def verify_native_equivalence(
    original: Circuit, simplified: GateSeq, errset: str = "xz", mode: str | None = None
) -> bool:
    """Check a native sequence still works as the original code.

    (a) the no-error parity outcomes are deterministic, (b) every single
    error in ``errset`` changes them, and (c) for correct-mode codes, errors
    the original code tells apart stay apart (a relabelling of syndromes is
    allowed).  The mode is inferred from the original when not given.
    """
    if original.n_qubits != simplified.n_qubits:
        return False
    letters = _alphabet(errset)
    n = original.n_qubits
    try:
        measured = simplified.measured_positions(original.parity_qubits)
    except ValueError:
        return False
    new = parity_observables(simplified.to_circuit(), measured)
    if not new.deterministic:
        return False
    ref = parity_observables(original)
    base = new.base
    pos_at_wait = {q: p for p, q in enumerate(simplified.wait_layout)}
    errors = _single_errors(n, letters)
    s_ref = [ref.syndrome(PauliString.single(n, q, ch)) for q, ch in errors]
    if mode is None:
        mode = infer_mode(s_ref)
    seen: dict[tuple, tuple] = {}
    for (q, ch), r in zip(errors, s_ref):
        s_new = new.syndrome(PauliString.single(n, pos_at_wait[q], ch))
        if s_new == base:
            return False
        if mode == "correct" and seen.setdefault(s_new, r) != r:
            return False
    return True


# ----------------------------------------------------------------------------
# bulk counting


def _lowered_streams(n: int, ops: Sequence[tuple[str, tuple[int, ...]]]):
    """Token streams of the lowered mirrored circuit built from (kind, qubits) pairs.

    Same tokens as ``_streams(lower_to_native(...))`` for an unrouted
    mirrored circuit, without building Gate objects.  Also returns the
    lowered gate list and the wait index, so kept tokens can be emitted.
    """
    streams: list[list[list]] = [[] for _ in range(n)]
    lowered: list[tuple[str, tuple[int, ...]]] = []
    wait = 0
    for op in list(ops) + [None] + list(reversed(ops)):
        if op is None:
            wait = len(lowered)
            for s in streams:
                s.append([_W, 0, -1])
            continue
        kind, qs = op
        for g, which in _RECIPES[kind]:
            i = len(lowered)
            if which is None:
                lowered.append((g, qs))
                for q in qs:
                    streams[q].append([_F, 0, i])
            else:
                q = qs[which]
                lowered.append((g, (q,)))
                if g == "H":
                    streams[q].append([_H, 0, i])
                else:
                    streams[q].append([_D, _DIAG_POWER[g], i])
    return streams, lowered, wait


def fast_simplify(t, errset: str = "xz", order: str = "row", mode: str | None = None):
    """Simplified canonical circuit of ``t`` as ``(ops, wait_marker, encoder_locals)``.

    ``ops`` is a list of ``(kind, qubits)`` pairs.  This is the rewrite
    pipeline of :func:`simplify` run on streams built straight from the
    triple; it exists so whole code sets can be processed quickly.
    """
    from cpccodes.model import encoder_gates, single_error_syndromes

    n = t.n
    ops = [(g.kind, g.qubits) for g in encoder_gates(t, order)]
    streams, lowered, wait = _lowered_streams(n, ops)
    sx, sz = single_error_syndromes(t)
    w = 1 << np.arange(t.m)
    flips = _FlipMap((sx @ w).tolist(), (sz @ w).tolist(), _alphabet(errset), mode)
    roles = (DATA,) * t.k + (PARITY,) * t.m
    frame: list = []
    dropped: list = []
    ident = list(range(n))
    changed = True
    while changed:
        changed = False
        for s in streams:
            changed |= _cancel_hh(s)
            changed |= _merge(s)
        changed |= _elide(streams, ident, flips, frame, ident)
        for q, s in enumerate(streams):
            changed |= _green(s, roles[q], dropped)
    keep: dict[int, str] = {}
    for s in streams:
        for tok in s:
            if tok[0] == _D:
                keep[tok[2]] = _POWER_KIND[tok[1]]
            elif tok[0] in (_H, _F):
                keep[tok[2]] = lowered[tok[2]][0]
    idx = sorted(keep)
    out = [(keep[i], lowered[i][1]) for i in idx]
    marker = sum(1 for i in idx if i < wait)
    count = sum(1 for i in idx if i < wait and keep[i] != "SP")
    return out, marker, count


def simplified_local_count(t, errset: str = "xz", order: str = "row", mode: str | None = None) -> int:
    """Encoder local count after :func:`simplify`, for the canonical circuit of ``t``."""
    return fast_simplify(t, errset, order, mode)[2]


def batch_verify_native(
    k: int,
    m: int,
    seqs: Sequence[tuple[Sequence[tuple[str, tuple[int, ...]]], int]],
    ref_fx: np.ndarray,
    ref_fz: np.ndarray,
    errset: str = "xz",
    mode: str | None = None,
) -> np.ndarray:
    """:func:`verify_native_equivalence` for many unrouted sequences at once.

    ``seqs`` holds ``(ops, wait_marker)`` pairs on qubits D_1..D_k, p_1..p_m;
    ``ref_fx``/``ref_fz`` are (N, n) integer masks giving the original code's
    syndrome (bit j = parity j) for X and Z on each qubit.  The parity
    measurements are pulled back with the batched frame engine.
    """
    from cpccodes.core import batch_conjugate, pack_gate_lists

    n = k + m
    N = len(seqs)
    letters_ = _alphabet(errset)
    if N == 0:
        return np.zeros(0, bool)
    rows = np.repeat(np.arange(N), m)
    R = len(rows)
    lt = np.zeros((R, n), np.uint8)
    lt[np.arange(R), k + np.tile(np.arange(m), N)] = 2  # Z on each parity wire
    ph = np.zeros(R, np.uint8)
    batch_conjugate(lt, ph, pack_gate_lists([ops[mk:] for ops, mk in seqs]), rows, inverse=True, reverse=True)
    at_wait = lt.copy()
    batch_conjugate(lt, ph, pack_gate_lists([ops[:mk] for ops, mk in seqs]), rows, inverse=True, reverse=True)
    det = ~np.any(lt & 1, axis=1) & ~np.any(lt[:, :k] & 2, axis=1) & (ph % 2 == 0)
    ok = det.reshape(N, m).all(axis=1)
    # flip masks: X anticommutes with a Z component, Z with an X component
    weights = (1 << np.arange(m)).astype(np.int64)
    q = at_wait.reshape(N, m, n).astype(np.int64)
    fx = np.einsum("jab,b->ja", ((q >> 1) & 1).transpose(0, 2, 1), weights)
    fz = np.einsum("jab,b->ja", (q & 1).transpose(0, 2, 1), weights)

    def per_letter(ax, az):
        cols = []
        for ch in letters_:
            cols.append({"X": ax, "Z": az, "Y": ax ^ az}[ch])
        return np.stack(cols, axis=2).reshape(N, -1)

    new = per_letter(fx, fz)
    ref = per_letter(np.asarray(ref_fx, np.int64), np.asarray(ref_fz, np.int64))
    ok &= np.all(new != 0, axis=1)
    if mode is None:
        srt = np.sort(ref, axis=1)
        distinct = np.all(srt[:, 1:] != srt[:, :-1], axis=1) & np.all(ref != 0, axis=1)
        correct = distinct
    else:
        correct = np.full(N, mode == "correct")
    if correct.any():
        eq_new = new[:, :, None] == new[:, None, :]
        eq_ref = ref[:, :, None] == ref[:, None, :]
        finer = ~np.any(eq_new & ~eq_ref, axis=(1, 2))
        ok &= finer | ~correct
    return ok
