"""Enum definitions for circuit, simulation and learning types."""
from enum import Enum


class GateKind(str, Enum):
    """Gate kinds of the feature schema plus two non-feature pseudo-ops."""
    H = "h"
    CNOT = "cx"
    X = "x"
    Y = "y"
    Z = "z"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    CZ = "cz"
    CP = "cp"  # also parsed from cu1
    T = "t"
    TOFFOLI = "ccx"
    SWAP = "swap"
    TDG = "tdg"
    S = "s"
    SDG = "sdg"
    U3 = "u3"
    MEASURE = "measure"
    BARRIER = "barrier"

    @property
    def is_pseudo(self) -> bool:
        return self in (GateKind.MEASURE, GateKind.BARRIER)

    @property
    def arity(self) -> int | None:
        """Qubit count; None for pseudo-ops, which take any number of wires."""
        if self.is_pseudo:
            return None
        if self in _TWO_QUBIT:
            return 2
        if self is GateKind.TOFFOLI:
            return 3
        return 1

    @property
    def n_params(self) -> int:
        if self in (GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.CP):
            return 1
        if self is GateKind.U3:
            return 3
        return 0


_TWO_QUBIT = frozenset({GateKind.CNOT, GateKind.CZ, GateKind.CP, GateKind.SWAP})

# Fixed column order of the gate-count features
FEATURE_GATE_ORDER: tuple[GateKind, ...] = (
    GateKind.H,
    GateKind.CNOT,
    GateKind.X,
    GateKind.Y,
    GateKind.Z,
    GateKind.RX,
    GateKind.RY,
    GateKind.RZ,
    GateKind.CZ,
    GateKind.CP,
    GateKind.T,
    GateKind.TOFFOLI,
    GateKind.SWAP,
    GateKind.TDG,
    GateKind.S,
    GateKind.SDG,
    GateKind.U3,
)

FEATURE_COLUMNS: tuple[str, ...] = (
    "n_qubits", "depth",
    "h", "cnot", "x", "y", "z", "rx", "ry", "rz", "cz", "cp",
    "t", "toffoli", "swap", "tdg", "s", "sdg", "u3",
)
LABEL_COLUMN = "error"


class PauliBasis(str, Enum):
    """Terminating measurement basis of an outgoing cut wire."""
    X = "X"
    Y = "Y"
    Z = "Z"


class InitState(str, Enum):
    """Preparation of an incoming cut wire."""
    ZERO = "0"
    ONE = "1"
    PLUS = "+"
    PLUS_I = "+i"


class Observable(str, Enum):
    """Single-wire Pauli observable of the reconstruction expansion."""
    I = "I"  # noqa: E741
    X = "X"
    Y = "Y"
    Z = "Z"


class BackendMode(str, Enum):
    """How circuits and fragments are executed."""
    EXACT = "exact"
    NOISY_SHOTS = "noisy-shots"


class ModelFamily(str, Enum):
    """Regression model families."""
    LINEAR = "linear"
    LASSO = "lasso"
    FOREST = "forest"
    SVR = "svr"
