"""Unitary matrices of the supported gate kinds.

Multi-qubit matrices use the gate's own qubit order with the first qubit as
the most significant index bit (control first for CNOT/CP/TOFFOLI).
"""
from math import cos, pi, sin, sqrt

import numpy as np

from app.models.enums import GateKind

_SQRT2_INV = 1 / sqrt(2)
_T_PHASE = np.exp(1j * pi / 4)

_FIXED: dict[GateKind, np.ndarray] = {
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV,
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
    GateKind.T: np.array([[1, 0], [0, _T_PHASE]], dtype=complex),
    GateKind.TDG: np.array([[1, 0], [0, np.conj(_T_PHASE)]], dtype=complex),
    GateKind.CNOT: np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    GateKind.CZ: np.diag([1, 1, 1, -1]).astype(complex),
    GateKind.SWAP: np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}

_toffoli = np.eye(8, dtype=complex)
_toffoli[[6, 7]] = _toffoli[[7, 6]]
_FIXED[GateKind.TOFFOLI] = _toffoli

# Paulis indexed 1..3 as drawn by the trajectory sampler
PAULIS: tuple[np.ndarray, ...] = (
    np.eye(2, dtype=complex),
    _FIXED[GateKind.X],
    _FIXED[GateKind.Y],
    _FIXED[GateKind.Z],
)


def _rx(theta: float) -> np.ndarray:
    return np.array(
        [[cos(theta / 2), -1j * sin(theta / 2)], [-1j * sin(theta / 2), cos(theta / 2)]],
        dtype=complex,
    )


def _ry(theta: float) -> np.ndarray:
    return np.array(
        [[cos(theta / 2), -sin(theta / 2)], [sin(theta / 2), cos(theta / 2)]], dtype=complex
    )


def _rz(theta: float) -> np.ndarray:
    return np.array([[np.exp(-1j * theta / 2), 0], [0, np.exp(1j * theta / 2)]], dtype=complex)


def _u3(theta: float, phi: float, lam: float) -> np.ndarray:
    return np.array(
        [
            [cos(theta / 2), -np.exp(1j * lam) * sin(theta / 2)],
            [np.exp(1j * phi) * sin(theta / 2), np.exp(1j * (phi + lam)) * cos(theta / 2)],
        ],
        dtype=complex,
    )


def _cp(lam: float) -> np.ndarray:
    return np.diag([1, 1, 1, np.exp(1j * lam)]).astype(complex)


_PARAMETRIC = {
    GateKind.RX: _rx,
    GateKind.RY: _ry,
    GateKind.RZ: _rz,
    GateKind.U3: _u3,
    GateKind.CP: _cp,
}


def gate_matrix(kind: GateKind, params: tuple[float, ...] = ()) -> np.ndarray:
    """Unitary of a gate kind; raises KeyError for pseudo-ops."""
    if kind in _FIXED:
        return _FIXED[kind]
    return _PARAMETRIC[kind](*params)


def apply_unitary(state: np.ndarray, matrix: np.ndarray, qubits: tuple[int, ...]) -> np.ndarray:
    """Apply a k-qubit unitary to a state tensor of shape ``[2] * n``."""
    k = len(qubits)
    tensor = matrix.reshape([2] * (2 * k))
    out = np.tensordot(tensor, state, axes=(list(range(k, 2 * k)), list(qubits)))
    return np.moveaxis(out, list(range(k)), list(qubits))
