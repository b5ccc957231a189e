"""Adjacency-matrix description of CPC codes.

A code with ``k`` data qubits and ``m`` parity qubits is fixed by three GF(2)
matrices: bit-checks ``m_b`` (k x m, CNOT data -> parity), phase-checks
``m_p`` (k x m, conjugate propagators data -- parity) and cross-checks ``m_c``
(m x m strictly upper triangular, conjugate propagators parity -- parity).

Qubit order everywhere is D_1..D_k followed by p_1..p_m.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from cpccodes.core import (
    CPG,
    CNOT,
    DATA,
    PARITY,
    Circuit,
    DimensionError,
    PauliString,
    mirrored_circuit,
)

ALPHABETS = {"xz": "XZ", "xyz": "XYZ"}
MODES = ("detect", "correct")


def _as_bits(a, shape: tuple[int, int], name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=np.uint8)
    if arr.shape != shape:
        raise DimensionError(f"{name} has shape {arr.shape}, expected {shape}")
    if np.any(arr > 1):
        raise ValueError(f"{name} must be a 0/1 matrix")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class AdjacencyTriple:
    k: int
    m: int
    m_b: np.ndarray
    m_p: np.ndarray
    m_c: np.ndarray

    def __post_init__(self) -> None:
        if self.k < 0 or self.m < 1:
            raise DimensionError("need k >= 0 data qubits and m >= 1 parity qubits")
        object.__setattr__(self, "m_b", _as_bits(self.m_b, (self.k, self.m), "m_b"))
        object.__setattr__(self, "m_p", _as_bits(self.m_p, (self.k, self.m), "m_p"))
        object.__setattr__(self, "m_c", _as_bits(self.m_c, (self.m, self.m), "m_c"))
        if np.any(np.tril(self.m_c)):
            raise ValueError("m_c must be strictly upper triangular")

    @property
    def n(self) -> int:
        return self.k + self.m

    @classmethod
    def zeros(cls, k: int, m: int) -> AdjacencyTriple:
        z = np.zeros((k, m), np.uint8)
        return cls(k, m, z, z, np.zeros((m, m), np.uint8))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AdjacencyTriple):
            return NotImplemented
        return (
            self.k == other.k
            and self.m == other.m
            and np.array_equal(self.m_b, other.m_b)
            and np.array_equal(self.m_p, other.m_p)
            and np.array_equal(self.m_c, other.m_c)
        )

    def __hash__(self) -> int:
        return hash((self.k, self.m, to_index(self)))

    def __repr__(self) -> str:
        j = to_json(self)
        return f"AdjacencyTriple(k={self.k}, m={self.m}, m_b={j['m_b']}, m_p={j['m_p']}, m_c={j['m_c']})"


class ErrorVector(NamedTuple):
    """X/Z components of a Pauli error split into data and parity blocks."""

    e_dx: np.ndarray
    e_dz: np.ndarray
    e_px: np.ndarray
    e_pz: np.ndarray

    @classmethod
    def zeros(cls, k: int, m: int) -> ErrorVector:
        return cls(
            np.zeros(k, np.uint8), np.zeros(k, np.uint8), np.zeros(m, np.uint8), np.zeros(m, np.uint8)
        )

    @classmethod
    def from_pauli(cls, p: PauliString, k: int) -> ErrorVector:
        x = np.array(p.xbits, np.uint8)
        z = np.array(p.zbits, np.uint8)
        return cls(x[:k], z[:k], x[k:], z[k:])

    def to_pauli(self) -> PauliString:
        x = np.concatenate([self.e_dx, self.e_px]).astype(int)
        z = np.concatenate([self.e_dz, self.e_pz]).astype(int)
        return PauliString(
            len(x), int(sum(int(b) << q for q, b in enumerate(x))), int(sum(int(b) << q for q, b in enumerate(z)))
        )

    def __xor__(self, other: ErrorVector) -> ErrorVector:  # type: ignore[override]
        return ErrorVector(*(a ^ b for a, b in zip(self, other)))


class SingleError(NamedTuple):
    letter: str  # "I", "X", "Y" or "Z"
    qubit: int | None

    def label(self, k: int) -> str:
        if self.letter == "I":
            return "I"
        return f"{self.letter}_{qubit_name(self.qubit, k)}"


def qubit_name(q: int, k: int) -> str:
    """D1..Dk / p1..pm labels; the [[4,2,2]] data qubits read A, B."""
    if q < k:
        return "AB"[q] if k == 2 else f"D{q + 1}"
    return f"p{q - k + 1}"


# ----------------------------------------------------------------------------
# circuits


def encoder_gates(t: AdjacencyTriple, order: str = "row"):
    """Canonical encoder: cross-checks, then bit-checks, then phase-checks.

    ``order`` picks the scan within each round: ``"row"`` walks matrices
    row-major, ``"col"`` column-major.
    """
    if order not in ("row", "col"):
        raise ValueError("order must be 'row' or 'col'")
    k, m = t.k, t.m
    gates = []
    if order == "row":
        cross = [(u, v) for u in range(m) for v in range(u + 1, m)]
        cells = [(r, c) for r in range(k) for c in range(m)]
    else:
        cross = [(u, v) for v in range(m) for u in range(v)]
        cells = [(r, c) for c in range(m) for r in range(k)]
    gates += [CPG(k + u, k + v) for u, v in cross if t.m_c[u, v]]
    gates += [CNOT(r, k + c) for r, c in cells if t.m_b[r, c]]
    gates += [CPG(r, k + c) for r, c in cells if t.m_p[r, c]]
    return gates


def build_circuit(t: AdjacencyTriple, order: str = "row") -> Circuit:
    roles = (DATA,) * t.k + (PARITY,) * t.m
    return mirrored_circuit(t.n, roles, encoder_gates(t, order))


def cpc_gate_count(t: AdjacencyTriple) -> int:
    return int(t.m_b.sum()) + int(t.m_p.sum()) + int(t.m_c.sum())


# ----------------------------------------------------------------------------
# syndromes


def syndrome_formula(t: AdjacencyTriple, e: ErrorVector) -> np.ndarray:
    """Closed-form syndrome of a wait-stage error, all arithmetic mod 2."""
    e_dx, e_dz, e_px, e_pz = (np.asarray(v, dtype=np.int64) for v in e)
    if e_dx.shape != (t.k,) or e_dz.shape != (t.k,) or e_px.shape != (t.m,) or e_pz.shape != (t.m,):
        raise DimensionError("error vector does not match the code shape")
    m_b = t.m_b.astype(np.int64)
    m_p = t.m_p.astype(np.int64)
    m_c = t.m_c.astype(np.int64)
    s = e_dx @ m_b + e_dz @ m_p + e_px + e_pz @ m_p.T @ m_b + e_pz @ (m_c + m_c.T)
    return (s % 2).astype(np.uint8)


def single_error_syndromes(t: AdjacencyTriple) -> tuple[np.ndarray, np.ndarray]:
    """Syndromes of X and of Z on every qubit, as two (n, m) arrays."""
    m_b = t.m_b.astype(np.int64)
    m_p = t.m_p.astype(np.int64)
    sym_c = t.m_c.astype(np.int64) + t.m_c.T
    sx = np.vstack([m_b, np.eye(t.m, dtype=np.int64)]) % 2
    sz = np.vstack([m_p, m_p.T @ m_b + sym_c]) % 2
    return sx.astype(np.uint8), sz.astype(np.uint8)


def alphabet(errset: str) -> str:
    """Normalise ``"xz"``/``"xyz"`` (or letter strings) to ordered letters."""
    letters = ALPHABETS.get(errset.lower(), "") if errset else ""
    if not letters or not set(errset.upper()) <= set("XYZ"):
        raise ValueError(f"unknown error alphabet {errset!r}")
    return letters


def syndrome_table(t: AdjacencyTriple, errset: str = "xyz") -> list[tuple[SingleError, tuple[int, ...]]]:
    """No-error row followed by one row per (qubit, letter)."""
    letters = alphabet(errset)
    sx, sz = single_error_syndromes(t)
    rows = [(SingleError("I", None), (0,) * t.m)]
    for q in range(t.n):
        for ch in letters:
            s = {"X": sx[q], "Z": sz[q], "Y": sx[q] ^ sz[q]}[ch]
            rows.append((SingleError(ch, q), tuple(int(b) for b in s)))
    return rows


def is_valid_code(t: AdjacencyTriple, errset: str = "xz", mode: str = "correct") -> bool:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    rows = syndrome_table(t, errset)
    zero = rows[0][1]
    synd = [s for _, s in rows[1:]]
    if any(s == zero for s in synd):
        return False
    return mode == "detect" or len(set(synd)) == len(synd)


# ----------------------------------------------------------------------------
# serialization


def to_json(t: AdjacencyTriple) -> dict:
    def rows(a):
        return ["".join(str(int(b)) for b in r) for r in a]

    return {"n": t.n, "k": t.k, "m_b": rows(t.m_b), "m_p": rows(t.m_p), "m_c": rows(t.m_c)}


def from_json(obj: dict) -> AdjacencyTriple:
    def mat(rows, ncols):
        if not rows:
            return np.zeros((0, ncols), np.uint8)
        return np.array([[int(ch) for ch in r] for r in rows], np.uint8)

    k = int(obj["k"])
    m = int(obj["n"]) - k
    return AdjacencyTriple(k, m, mat(obj["m_b"], m), mat(obj["m_p"], m), mat(obj["m_c"], m))


def index_bits(k: int, m: int) -> int:
    """Width of the compact integer form: 2km check bits plus m(m-1)/2 cross-checks."""
    return 2 * k * m + m * (m - 1) // 2


def to_index(t: AdjacencyTriple) -> int:
    """Compact integer: m_b row-major, then m_p row-major, then the upper triangle of m_c."""
    v = 0
    bit = 0
    for mat in (t.m_b, t.m_p):
        for b in mat.reshape(-1):
            v |= int(b) << bit
            bit += 1
    for u in range(t.m):
        for w in range(u + 1, t.m):
            v |= int(t.m_c[u, w]) << bit
            bit += 1
    return v


def from_index(index: int, k: int, m: int) -> AdjacencyTriple:
    if not 0 <= index < 1 << index_bits(k, m):
        raise ValueError(f"index {index} outside the ({k},{m}) code space")
    km = k * m
    m_b = np.array([(index >> i) & 1 for i in range(km)], np.uint8).reshape(k, m)
    m_p = np.array([(index >> (km + i)) & 1 for i in range(km)], np.uint8).reshape(k, m)
    m_c = np.zeros((m, m), np.uint8)
    bit = 2 * km
    for u in range(m):
        for w in range(u + 1, m):
            m_c[u, w] = (index >> bit) & 1
            bit += 1
    return AdjacencyTriple(k, m, m_b, m_p, m_c)


def code_422() -> AdjacencyTriple:
    """The [[4,2,2]] detection code: data A, B and parity p1, p2."""
    return AdjacencyTriple(2, 2, [[1, 0], [1, 0]], [[0, 1], [0, 1]], [[0, 1], [0, 0]])


def error_vector(t: AdjacencyTriple, letter: str, qubit: int) -> ErrorVector:
    return ErrorVector.from_pauli(PauliString.single(t.n, qubit, letter), t.k)


def permute(t: AdjacencyTriple, data_perm: Sequence[int], parity_perm: Sequence[int]) -> AdjacencyTriple:
    """Relabel qubits: new data row i is old row ``data_perm[i]``, likewise for parity."""
    dp = list(data_perm)
    pp = list(parity_perm)
    sym = (t.m_c + t.m_c.T)[np.ix_(pp, pp)]
    return AdjacencyTriple(t.k, t.m, t.m_b[np.ix_(dp, pp)], t.m_p[np.ix_(dp, pp)], np.triu(sym, 1))
