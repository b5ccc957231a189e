"""Shared fixtures and independent oracles for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from cpccodes import model

SQ2 = np.sqrt(0.5)

# Explicit matrices, written out here rather than imported, so the tests do
# not lean on the tables the library builds for itself.
MATS_1Q = {
    "H": np.array([[SQ2, SQ2], [SQ2, -SQ2]], complex),
    "P": np.diag([1, -1j]),
    "PDAG": np.diag([1, 1j]),
    "Z": np.diag([1, -1]).astype(complex),
    "X": np.array([[0, 1], [1, 0]], complex),
}
_CZ = np.diag([1, 1, 1, -1]).astype(complex)
_HH = np.kron(MATS_1Q["H"], MATS_1Q["H"])
MATS_2Q = {
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], complex),
    "CZ": _CZ,
    "CPG": _HH @ _CZ @ _HH,
    "SP": np.diag([1, 1j, 1j, 1]),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], complex),
}
PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": MATS_1Q["X"],
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": MATS_1Q["Z"],
}


def embed(u: np.ndarray, qubits, n: int) -> np.ndarray:
    """Lift a 1- or 2-qubit matrix onto n qubits (qubit 0 is the leftmost factor)."""
    dim = 1 << n
    out = np.zeros((dim, dim), complex)
    nq = len(qubits)
    for col in range(dim):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        sub_in = 0
        for q in qubits:
            sub_in = (sub_in << 1) | bits[q]
        for sub_out in range(1 << nq):
            amp = u[sub_out, sub_in]
            if amp == 0:
                continue
            nb = list(bits)
            for i, q in enumerate(qubits):
                nb[q] = (sub_out >> (nq - 1 - i)) & 1
            row = 0
            for b in nb:
                row = (row << 1) | b
            out[row, col] += amp
    return out


def gate_matrix(kind: str, qubits, n: int) -> np.ndarray:
    return embed(MATS_1Q[kind] if kind in MATS_1Q else MATS_2Q[kind], tuple(qubits), n)


def pauli_matrix(letters: str, phase: int = 0) -> np.ndarray:
    m = np.array([[1]], complex)
    for ch in letters:
        m = np.kron(m, PAULI[ch])
    return (1j ** phase) * m


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_triple(rng, k: int, m: int) -> model.AdjacencyTriple:
    return model.from_index(int(rng.integers(0, 1 << model.index_bits(k, m))), k, m)


@pytest.fixture(scope="session")
def sample_valid_indices():
    """Valid [[7,3,3]] indices from a slice of the space that holds good codes."""
    from cpccodes import search

    spec = search.SearchSpec(3, 4, "xz", "correct", 563_000_000, 566_000_000)
    return search.valid_indices(spec)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
