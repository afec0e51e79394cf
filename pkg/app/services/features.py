"""Circuit analysis: depth, feature extraction and wire-cut positions."""
import csv
import io
from collections import Counter

from app.models.circuit import FeatureVector, QuantumCircuit, WireCutPoint
from app.models.enums import FEATURE_COLUMNS, FEATURE_GATE_ORDER


class CircuitAnalysisService:
    """Pure functions over circuits; MEASURE/BARRIER never count."""

    @staticmethod
    def depth(circuit: QuantumCircuit) -> int:
        """
        Longest path through the gate dependency DAG.

        Gates sharing a wire are ordered by program order, so the depth is
        computed by a single sweep keeping the current layer of every wire.
        """
        layer = [0] * circuit.n_qubits
        for gate in circuit.operations:
            level = 1 + max(layer[q] for q in gate.qubits)
            for q in gate.qubits:
                layer[q] = level
        return max(layer, default=0)

    @staticmethod
    def extract_features(circuit: QuantumCircuit) -> FeatureVector:
        """
        Build the feature vector of a circuit.

        Args:
            circuit: Parsed circuit

        Returns:
            FeatureVector with qubit count, depth and the 17 gate counts
        """
        counts = Counter(g.kind for g in circuit.operations)
        return FeatureVector(
            n_qubits=circuit.n_qubits,
            depth=CircuitAnalysisService.depth(circuit),
            gate_counts=tuple(counts.get(kind, 0) for kind in FEATURE_GATE_ORDER),
        )

    @staticmethod
    def enumerate_wire_cut_positions(circuit: QuantumCircuit) -> list[WireCutPoint]:
        """
        Interior wire segments: positions with a gate before and after on the same wire.

        Cutting before the first gate or after the last gate of a wire would
        leave one side of the wire empty, so those positions are not returned.
        """
        points = []
        for q in range(circuit.n_qubits):
            wire = circuit.wire_gates(q)
            points.extend(WireCutPoint(q, g) for g in wire[:-1])
        return sorted(points)

    @staticmethod
    def features_csv_row(features: FeatureVector, label: float | None = None) -> str:
        """One CSV row in dataset column order (label appended when given)."""
        buf = io.StringIO()
        row: list = list(features.as_tuple())
        if label is not None:
            row.append(repr(float(label)))
        csv.writer(buf, lineterminator="\n").writerow(row)
        return buf.getvalue()

    @staticmethod
    def features_csv_header(with_label: bool = True) -> str:
        columns = list(FEATURE_COLUMNS) + (["error"] if with_label else [])
        return ",".join(columns) + "\n"


# Singleton instance
circuit_analysis_service = CircuitAnalysisService()


# Standalone function exports for convenience
def depth(circuit: QuantumCircuit) -> int:
    return CircuitAnalysisService.depth(circuit)


def extract_features(circuit: QuantumCircuit) -> FeatureVector:
    return CircuitAnalysisService.extract_features(circuit)


def enumerate_wire_cut_positions(circuit: QuantumCircuit) -> list[WireCutPoint]:
    return CircuitAnalysisService.enumerate_wire_cut_positions(circuit)
