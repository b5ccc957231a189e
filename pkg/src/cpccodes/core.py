"""Pauli operators, Clifford gates and a Pauli-frame propagation engine.

Pauli strings are stored as packed integer bit words (one X word, one Z word)
with an explicit phase, so ``PauliString(n, x, z, phase)`` represents

    i**phase * L_0 (x) L_1 (x) ... (x) L_{n-1}

where the letter ``L_q`` on qubit ``q`` is I, X, Z or Y according to the bits
``(x_q, z_q)`` = (0,0), (1,0), (0,1), (1,1).  Letters are Hermitian, so a Y
carries no hidden phase.

Gate conjugation rules are not written out by hand.  They are generated once,
at import time, by conjugating every one- and two-qubit Pauli with the explicit
unitary of each gate and reading off the resulting Pauli and phase.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

MAX_QUBITS = 64

LETTERS = "IXZY"  # index = x + 2*z

DATA = "data"
PARITY = "parity"

ONE_QUBIT_KINDS = ("H", "P", "PDAG", "Z", "X")
TWO_QUBIT_KINDS = ("CNOT", "CPG", "SP", "SWAP", "CZ")
SYMMETRIC_KINDS = ("CPG", "SP", "SWAP", "CZ")
GATE_KINDS = ONE_QUBIT_KINDS + TWO_QUBIT_KINDS

# Gates that are their own inverse; P pairs with PDAG, SP with its adjoint.
SELF_INVERSE = frozenset({"H", "Z", "X", "CNOT", "CPG", "SWAP", "CZ"})
INVERSE_KIND = {"P": "PDAG", "PDAG": "P"}


class DimensionError(ValueError):
    """Operands act on different numbers of qubits."""


class CircuitStructureError(ValueError):
    """A circuit lacks structure an operation depends on (e.g. a wait marker)."""


# ----------------------------------------------------------------------------
# gate matrices


def _kron(*ms: np.ndarray) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for m in ms:
        out = np.kron(out, m)
    return out


_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_P = np.diag([1, -1j]).astype(complex)
_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)
_HH = _kron(_H, _H)

GATE_MATRICES: dict[str, np.ndarray] = {
    "H": _H,
    "P": _P,
    "PDAG": _P.conj().T,
    "Z": _Z,
    "X": _X,
    "CNOT": _CNOT,  # first qubit is the control
    "CZ": _CZ,
    "CPG": _HH @ _CZ @ _HH,
    "SP": np.diag([1, 1j, 1j, 1]).astype(complex),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}

PAULI_MATRICES = {"I": _I2, "X": _X, "Z": _Z, "Y": _Y}


def _letter_matrix(code: int) -> np.ndarray:
    return PAULI_MATRICES[LETTERS[code]]


def _identify_pauli(m: np.ndarray, nq: int) -> tuple[int, tuple[int, ...]]:
    """Write ``m`` as i**phase times a tensor product of Pauli letters."""
    dim = 2**nq
    for codes in itertools.product(range(4), repeat=nq):
        basis = _kron(*(_letter_matrix(c) for c in codes))
        coeff = np.trace(basis.conj().T @ m) / dim
        if abs(abs(coeff) - 1) < 1e-9:
            for phase in range(4):
                if abs(coeff - 1j**phase) < 1e-9:
                    if not np.allclose(m, coeff * basis, atol=1e-9):
                        break
                    return phase, codes
            raise ValueError("matrix is not a Pauli operator up to a power of i")
    raise ValueError("matrix is not a Pauli operator")


def _conjugation_table(u: np.ndarray, nq: int) -> dict[tuple[int, ...], tuple[int, tuple[int, ...]]]:
    table = {}
    for codes in itertools.product(range(4), repeat=nq):
        p = _kron(*(_letter_matrix(c) for c in codes))
        table[codes] = _identify_pauli(u @ p @ u.conj().T, nq)
    return table


def _build_tables():
    fwd, inv = {}, {}
    for kind, u in GATE_MATRICES.items():
        nq = 1 if u.shape[0] == 2 else 2
        fwd[kind] = _conjugation_table(u, nq)
        inv[kind] = _conjugation_table(u.conj().T, nq)
    return fwd, inv


# (gate kind) -> {input letter codes: (phase increment, output letter codes)}
CONJUGATION_TABLES, INVERSE_CONJUGATION_TABLES = _build_tables()


# ----------------------------------------------------------------------------
# Pauli strings


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliString:
    """An n-qubit Pauli operator ``i**phase * (letters)`` with packed X/Z words."""

    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.n <= MAX_QUBITS:
            raise DimensionError(f"qubit count {self.n} outside 0..{MAX_QUBITS}")
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask or self.x < 0 or self.z < 0:
            raise DimensionError("bit words carry bits beyond the qubit count")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n: int) -> PauliString:
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str, phase: int = 0) -> PauliString:
        """Pauli acting as ``letter`` on one qubit."""
        if not 0 <= qubit < n:
            raise IndexError(f"qubit {qubit} out of range for {n} qubits")
        code = LETTERS.index(letter)
        return cls(n, (code & 1) << qubit, (code >> 1) << qubit, phase)

    @classmethod
    def from_letters(cls, letters: str, phase: int = 0) -> PauliString:
        """Build from a string such as ``"XIZY"`` (qubit 0 first)."""
        x = z = 0
        for q, ch in enumerate(letters):
            code = LETTERS.index(ch)
            x |= (code & 1) << q
            z |= (code >> 1) << q
        return cls(len(letters), x, z, phase)

    @property
    def xbits(self) -> tuple[int, ...]:
        return tuple((self.x >> q) & 1 for q in range(self.n))

    @property
    def zbits(self) -> tuple[int, ...]:
        return tuple((self.z >> q) & 1 for q in range(self.n))

    def letter(self, qubit: int) -> str:
        return LETTERS[((self.x >> qubit) & 1) | (((self.z >> qubit) & 1) << 1)]

    def letters(self) -> str:
        return "".join(self.letter(q) for q in range(self.n))

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def support(self) -> list[int]:
        s = self.x | self.z
        return [q for q in range(self.n) if (s >> q) & 1]

    def restrict(self, qubits: Sequence[int]) -> PauliString:
        """Letters on ``qubits`` (in the given order) with the phase dropped."""
        x = z = 0
        for i, q in enumerate(qubits):
            x |= ((self.x >> q) & 1) << i
            z |= ((self.z >> q) & 1) << i
        return PauliString(len(qubits), x, z)

    def without_phase(self) -> PauliString:
        return PauliString(self.n, self.x, self.z)

    def __mul__(self, other: PauliString) -> PauliString:
        return pauli_mul(self, other)

    def to_matrix(self) -> np.ndarray:
        """Dense matrix with qubit 0 as the most significant tensor factor."""
        return (1j**self.phase) * _kron(*(PAULI_MATRICES[ch] for ch in self.letters()))

    def __str__(self) -> str:
        sign = ("+", "+i", "-", "-i")[self.phase]
        return f"{sign}{self.letters()}"


def _check_same_size(a: PauliString, b: PauliString) -> None:
    if a.n != b.n:
        raise DimensionError(f"Pauli strings act on {a.n} and {b.n} qubits")


def pauli_mul(a: PauliString, b: PauliString) -> PauliString:
    """Product ``a * b`` with the phase tracked mod 4."""
    _check_same_size(a, b)
    # Letters -> X^x Z^z form costs a factor i per Y; reordering Z_a past X_b costs -1.
    x = a.x ^ b.x
    z = a.z ^ b.z
    phase = (
        a.phase
        + b.phase
        + _popcount(a.x & a.z)
        + _popcount(b.x & b.z)
        + 2 * _popcount(a.z & b.x)
        - _popcount(x & z)
    )
    return PauliString(a.n, x, z, phase)


def symplectic_product(a: PauliString, b: PauliString) -> int:
    """Parity of the number of sites where the two letters anticommute."""
    _check_same_size(a, b)
    return (_popcount(a.x & b.z) + _popcount(a.z & b.x)) & 1


def commutes(a: PauliString, b: PauliString) -> bool:
    return symplectic_product(a, b) == 0


# ----------------------------------------------------------------------------
# gates and circuits


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        want = 1 if self.kind in ONE_QUBIT_KINDS else 2
        if len(self.qubits) != want:
            raise ValueError(f"{self.kind} acts on {want} qubit(s), got {self.qubits}")
        if want == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"{self.kind} needs two distinct qubits, got {self.qubits}")

    @property
    def is_two_qubit(self) -> bool:
        return len(self.qubits) == 2

    def inverse(self) -> Gate:
        if self.kind in SELF_INVERSE:
            return self
        if self.kind in INVERSE_KIND:
            return Gate(INVERSE_KIND[self.kind], self.qubits)
        raise ValueError(f"{self.kind} has no inverse in the gate set")

    def to_json(self) -> dict:
        return {"kind": self.kind, "qubits": list(self.qubits)}

    @classmethod
    def from_json(cls, obj: dict) -> Gate:
        return cls(obj["kind"], tuple(obj["qubits"]))

    def __str__(self) -> str:
        return f"{self.kind}({','.join(map(str, self.qubits))})"


def CNOT(c: int, t: int) -> Gate:
    return Gate("CNOT", (c, t))


def CPG(a: int, b: int) -> Gate:
    return Gate("CPG", (a, b))


@dataclass(frozen=True)
class Circuit:
    """Ordered gates over data/parity roles, split by an optional wait marker.

    ``gates[:wait_marker]`` is the encoder and ``gates[wait_marker:]`` the
    decoder; errors are injected at the marker.
    """

    n_qubits: int
    roles: tuple[str, ...]
    gates: tuple[Gate, ...] = ()
    wait_marker: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "roles", tuple(self.roles))
        object.__setattr__(self, "gates", tuple(self.gates))
        if len(self.roles) != self.n_qubits:
            raise DimensionError("one role tag per qubit is required")
        if any(r not in (DATA, PARITY) for r in self.roles):
            raise ValueError(f"roles must be {DATA!r} or {PARITY!r}")
        for g in self.gates:
            if max(g.qubits) >= self.n_qubits or min(g.qubits) < 0:
                raise IndexError(f"gate {g} outside {self.n_qubits} qubits")
        if self.wait_marker is not None and not 0 <= self.wait_marker <= len(self.gates):
            raise IndexError("wait marker outside the gate list")

    @property
    def data_qubits(self) -> list[int]:
        return [q for q, r in enumerate(self.roles) if r == DATA]

    @property
    def parity_qubits(self) -> list[int]:
        return [q for q, r in enumerate(self.roles) if r == PARITY]

    @property
    def encoder(self) -> tuple[Gate, ...]:
        return self.gates[: self._marker()]

    @property
    def decoder(self) -> tuple[Gate, ...]:
        return self.gates[self._marker():]

    def _marker(self) -> int:
        if self.wait_marker is None:
            raise CircuitStructureError("circuit has no wait marker")
        return self.wait_marker

    def is_mirrored(self) -> bool:
        """True when the decoder undoes the encoder gate by gate."""
        enc, dec = self.encoder, self.decoder
        return len(enc) == len(dec) and all(
            d == e.inverse() for d, e in zip(dec, reversed(enc))
        )

    def without(self, index: int) -> Circuit:
        """Copy with one gate removed (used for mutation tests)."""
        gates = self.gates[:index] + self.gates[index + 1:]
        wm = self.wait_marker
        if wm is not None and index < wm:
            wm -= 1
        return Circuit(self.n_qubits, self.roles, gates, wm)


def mirrored_circuit(n_qubits: int, roles: Sequence[str], encoder: Iterable[Gate]) -> Circuit:
    enc = tuple(encoder)
    dec = tuple(g.inverse() for g in reversed(enc))
    return Circuit(n_qubits, tuple(roles), enc + dec, len(enc))


# ----------------------------------------------------------------------------
# propagation


def conjugate_pauli(g: Gate, p: PauliString, inverse: bool = False) -> PauliString:
    """Return ``g p g^dagger`` (or ``g^dagger p g`` with ``inverse=True``)."""
    if max(g.qubits) >= p.n:
        raise IndexError(f"gate {g} outside a {p.n}-qubit Pauli")
    table = (INVERSE_CONJUGATION_TABLES if inverse else CONJUGATION_TABLES)[g.kind]
    codes = tuple(((p.x >> q) & 1) | (((p.z >> q) & 1) << 1) for q in g.qubits)
    dphase, out = table[codes]
    x, z = p.x, p.z
    for q, c in zip(g.qubits, out):
        bit = 1 << q
        x = (x & ~bit) | ((c & 1) << q)
        z = (z & ~bit) | ((c >> 1) << q)
    return PauliString(p.n, x, z, p.phase + dphase)


def propagate(c: Circuit, e: PauliString, from_index: int = 0) -> PauliString:
    """Push ``e`` forward through ``c.gates[from_index:]``."""
    if e.n != c.n_qubits:
        raise DimensionError("Pauli and circuit sizes differ")
    if not 0 <= from_index <= len(c.gates):
        raise IndexError(f"start index {from_index} outside 0..{len(c.gates)}")
    for g in c.gates[from_index:]:
        e = conjugate_pauli(g, e)
    return e


def back_propagate(c: Circuit, p: PauliString, to_index: int = 0) -> PauliString:
    """Heisenberg-picture pull of ``p`` from the circuit output back to ``to_index``."""
    if not 0 <= to_index <= len(c.gates):
        raise IndexError(f"index {to_index} outside 0..{len(c.gates)}")
    for g in reversed(c.gates[to_index:]):
        p = conjugate_pauli(g, p, inverse=True)
    return p


def oracle_syndrome(c: Circuit, e: PauliString) -> tuple[int, ...]:
    """Syndrome bits (parity qubits in index order) for a wait-stage error.

    A parity bit flips when the propagated error carries an X or Y on that
    qubit at the end of the decoder.
    """
    if c.wait_marker is None:
        raise CircuitStructureError("oracle syndrome needs a wait marker")
    final = propagate(c, e, c.wait_marker)
    return tuple((final.x >> q) & 1 for q in c.parity_qubits)


@dataclass(frozen=True)
class ParityObservables:
    """Heisenberg view of each parity measurement around the wait stage.

    ``at_wait[j]`` is the measured Z of parity qubit j pulled back to the wait
    point; a wait error flips bit j iff it anticommutes with it.  ``base`` is
    the error-free outcome, ``None`` entries mark outcomes that are not
    deterministic.
    """

    at_wait: tuple[PauliString, ...]
    base: tuple[int | None, ...]
    measured: tuple[int, ...] = field(default=())

    @property
    def deterministic(self) -> bool:
        return all(b is not None for b in self.base)

    def syndrome(self, e: PauliString) -> tuple[int, ...]:
        return tuple(
            (b or 0) ^ symplectic_product(e, q) for b, q in zip(self.base, self.at_wait)
        )


def parity_observables(
    c: Circuit, measured: Sequence[int] | None = None
) -> ParityObservables:
    """Pull each parity-qubit Z measurement back through the circuit.

    ``measured`` gives the output wire read for each parity qubit (defaults to
    the parity qubits themselves).  Parity wires start in |0>, data wires are
    arbitrary, so an outcome is deterministic iff the fully pulled-back
    operator is Z-type and supported on parity wires only.
    """
    if c.wait_marker is None:
        raise CircuitStructureError("circuit has no wait marker")
    measured = tuple(c.parity_qubits if measured is None else measured)
    data_mask = sum(1 << q for q in c.data_qubits)
    at_wait, base = [], []
    for q in measured:
        obs = back_propagate(c, PauliString.single(c.n_qubits, q, "Z"), c.wait_marker)
        at_wait.append(obs)
        full = back_propagate(
            Circuit(c.n_qubits, c.roles, c.encoder, None), obs, 0
        )
        if full.x == 0 and full.z & data_mask == 0 and full.phase % 2 == 0:
            base.append(full.phase // 2)
        else:
            base.append(None)
    return ParityObservables(tuple(at_wait), tuple(base), measured)


def single_qubit_errors(n: int, qubits: Iterable[int], alphabet: str) -> list[PauliString]:
    return [PauliString.single(n, q, ch) for q in qubits for ch in alphabet]


# ----------------------------------------------------------------------------
# batched Pauli frames

_BATCH_KINDS = ("I",) + GATE_KINDS
BATCH_KIND_ID = {k: i for i, k in enumerate(_BATCH_KINDS)}


def _batch_luts(inverse: bool):
    tables = INVERSE_CONJUGATION_TABLES if inverse else CONJUGATION_TABLES
    nk = len(_BATCH_KINDS)
    ph = np.zeros((nk, 16), np.uint8)
    o0 = np.zeros((nk, 16), np.uint8)
    o1 = np.zeros((nk, 16), np.uint8)
    for k, kind in enumerate(_BATCH_KINDS):
        for c0 in range(4):
            for c1 in range(4):
                i = c0 + 4 * c1
                if kind == "I":
                    ph[k, i], o0[k, i], o1[k, i] = 0, c0, c1
                elif kind in ONE_QUBIT_KINDS:
                    # one-qubit gates are stored with both operands on the same wire
                    d, (u,) = tables[kind][(c0,)]
                    ph[k, i], o0[k, i], o1[k, i] = d, u, u
                else:
                    d, (u, v) = tables[kind][(c0, c1)]
                    ph[k, i], o0[k, i], o1[k, i] = d, u, v
    return ph, o0, o1


_BATCH_LUTS = {False: _batch_luts(False), True: _batch_luts(True)}


def pack_gate_lists(gate_lists: Sequence[Sequence[tuple[str, tuple[int, ...]]]]):
    """Pad ``(kind, qubits)`` lists into ``(kinds, qa, qb)`` arrays of shape (N, T)."""
    T = max((len(g) for g in gate_lists), default=0)
    N = len(gate_lists)
    kinds = np.zeros((N, T), np.uint8)
    qa = np.zeros((N, T), np.uint8)
    qb = np.zeros((N, T), np.uint8)
    for r, gates in enumerate(gate_lists):
        for t, (kind, qs) in enumerate(gates):
            kinds[r, t] = BATCH_KIND_ID[kind]
            qa[r, t] = qs[0]
            qb[r, t] = qs[-1]
    return kinds, qa, qb


def batch_conjugate(
    letters: np.ndarray,
    phase: np.ndarray,
    packed,
    rows: np.ndarray,
    inverse: bool = False,
    reverse: bool = False,
) -> None:
    """Conjugate many Pauli frames in place, one gate list per frame.

    ``letters`` is (R, n) with codes ``x + 2z``, ``phase`` is (R,) mod 4 and
    frame ``r`` follows gate list ``rows[r]`` of ``packed``.  With
    ``inverse=True`` each gate acts as ``g^dag p g``; ``reverse=True`` walks
    the lists back to front (a Heisenberg pull-back).
    """
    kinds, qa, qb = packed
    ph_lut, o0_lut, o1_lut = _BATCH_LUTS[inverse]
    r_idx = np.arange(len(rows))
    steps = range(kinds.shape[1] - 1, -1, -1) if reverse else range(kinds.shape[1])
    for t in steps:
        k = kinds[rows, t]
        a = qa[rows, t]
        b = qb[rows, t]
        i = letters[r_idx, a] + 4 * letters[r_idx, b]
        phase += ph_lut[k, i]
        phase &= 3
        letters[r_idx, a] = o0_lut[k, i]
        letters[r_idx, b] = o1_lut[k, i]
