"""Circuit intermediate representation."""
from dataclasses import dataclass, field

from app.errors import CircuitError
from app.models.enums import FEATURE_COLUMNS, FEATURE_GATE_ORDER, GateKind


@dataclass(frozen=True)
class Gate:
    """A gate application: kind, ordered wires, angles in radians."""
    kind: GateKind
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        arity = self.kind.arity
        if arity is not None and len(self.qubits) != arity:
            raise CircuitError(
                f"{self.kind.name} acts on {arity} qubit(s), got {len(self.qubits)}"
            )
        if len(self.params) != self.kind.n_params:
            raise CircuitError(
                f"{self.kind.name} takes {self.kind.n_params} angle(s), got {len(self.params)}"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"{self.kind.name} repeats a qubit: {self.qubits}")

    @property
    def is_pseudo(self) -> bool:
        return self.kind.is_pseudo

    def remap(self, wire_map: dict[int, int]) -> "Gate":
        """Return the same gate acting on relabelled wires."""
        return Gate(self.kind, tuple(wire_map[q] for q in self.qubits), self.params)


@dataclass(frozen=True)
class QuantumCircuit:
    """Gate sequence over ``n_qubits`` wires; program order is temporal order."""
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.n_qubits < 1:
            raise CircuitError("a circuit needs at least one qubit")
        for gate in self.gates:
            for q in gate.qubits:
                if not 0 <= q < self.n_qubits:
                    raise CircuitError(
                        f"qubit {q} out of range for a {self.n_qubits}-qubit circuit"
                    )

    @property
    def operations(self) -> tuple[Gate, ...]:
        """Gates without MEASURE/BARRIER pseudo-ops."""
        return tuple(g for g in self.gates if not g.is_pseudo)

    def strip_pseudo(self) -> "QuantumCircuit":
        return QuantumCircuit(self.n_qubits, self.operations, self.name)

    def wire_gates(self, qubit: int) -> list[int]:
        """Indices (into ``gates``) of the operations acting on ``qubit``, in order."""
        return [
            i for i, g in enumerate(self.gates)
            if not g.is_pseudo and qubit in g.qubits
        ]

    def active_wires(self) -> list[int]:
        return sorted({q for g in self.operations for q in g.qubits})

    def concat(self, other: "QuantumCircuit") -> "QuantumCircuit":
        if other.n_qubits != self.n_qubits:
            raise CircuitError("cannot concatenate circuits of different widths")
        return QuantumCircuit(self.n_qubits, self.gates + other.gates, self.name)

    def __len__(self) -> int:
        return len(self.gates)


@dataclass(frozen=True)
class FeatureVector:
    """Qubit count, depth and the 17 gate counts in schema column order."""
    n_qubits: int
    depth: int
    gate_counts: tuple[int, ...] = field(default=(0,) * len(FEATURE_GATE_ORDER))

    def __post_init__(self):
        counts = tuple(int(c) for c in self.gate_counts)
        if len(counts) != len(FEATURE_GATE_ORDER):
            raise CircuitError(
                f"expected {len(FEATURE_GATE_ORDER)} gate counts, got {len(counts)}"
            )
        if self.n_qubits < 0 or self.depth < 0 or any(c < 0 for c in counts):
            raise CircuitError("feature entries must be nonnegative")
        object.__setattr__(self, "gate_counts", counts)

    def count(self, kind: GateKind) -> int:
        return self.gate_counts[FEATURE_GATE_ORDER.index(kind)]

    @property
    def total_gates(self) -> int:
        return sum(self.gate_counts)

    def as_tuple(self) -> tuple[int, ...]:
        return (self.n_qubits, self.depth, *self.gate_counts)

    def as_dict(self) -> dict[str, int]:
        return dict(zip(FEATURE_COLUMNS, self.as_tuple()))

    @classmethod
    def from_values(cls, values) -> "FeatureVector":
        values = [int(round(float(v))) for v in values]
        if len(values) != len(FEATURE_COLUMNS):
            raise CircuitError(
                f"expected {len(FEATURE_COLUMNS)} feature values, got {len(values)}"
            )
        return cls(values[0], values[1], tuple(values[2:]))


@dataclass(frozen=True, order=True)
class WireCutPoint:
    """Cut wire ``qubit`` immediately after gate index ``position`` acts on it."""
    qubit: int
    position: int

    def label(self) -> str:
        return f"q{self.qubit}@{self.position}"
