"""
Unit tests for CircuitAnalysisService.

Tests depth, feature extraction and wire-cut positions.
"""

from app.models.circuit import Gate, QuantumCircuit, WireCutPoint
from app.models.enums import FEATURE_COLUMNS, GateKind
from app.services.features import (
    circuit_analysis_service,
    depth,
    enumerate_wire_cut_positions,
    extract_features,
)


def test_bell_features(bell_circuit):
    """Test the feature vector of the Bell circuit."""
    f = extract_features(bell_circuit)

    assert f.n_qubits == 2
    assert f.depth == 2
    assert f.count(GateKind.H) == 1
    assert f.count(GateKind.CNOT) == 1
    assert f.total_gates == 2
    assert len(f.as_tuple()) == len(FEATURE_COLUMNS)


def test_depth_of_parallel_gates():
    """Test that gates on disjoint wires share a layer."""
    g = Gate
    circuit = QuantumCircuit(
        3, (g(GateKind.H, (0,)), g(GateKind.H, (1,)), g(GateKind.H, (2,)), g(GateKind.CNOT, (0, 2)))
    )

    assert depth(circuit) == 2


def test_pseudo_ops_are_ignored():
    """Test that MEASURE and BARRIER change neither depth nor counts."""
    g = Gate
    plain = QuantumCircuit(2, (g(GateKind.H, (0,)), g(GateKind.CNOT, (0, 1))))
    noisy = QuantumCircuit(
        2,
        (
            g(GateKind.H, (0,)),
            g(GateKind.BARRIER, (0, 1)),
            g(GateKind.CNOT, (0, 1)),
            g(GateKind.MEASURE, (0,)),
            g(GateKind.MEASURE, (1,)),
        ),
    )

    assert extract_features(noisy) == extract_features(plain)


def test_empty_circuit_depth_zero():
    """Test a circuit without gates."""
    f = extract_features(QuantumCircuit(3))

    assert f.depth == 0
    assert f.total_gates == 0


def test_feature_dict_uses_schema_columns(chain4):
    """Test column names and ordering of the feature dict."""
    values = extract_features(chain4).as_dict()

    assert list(values) == list(FEATURE_COLUMNS)
    assert values["cz"] == 1
    assert values["u3"] == 1


def test_wire_cut_positions_are_interior_segments(bell_circuit):
    """Test that only segments with gates on both sides are candidates."""
    # H(0) -> CNOT(0,1) on wire 0; wire 1 has a single gate
    assert enumerate_wire_cut_positions(bell_circuit) == [WireCutPoint(0, 0)]


def test_wire_cut_positions_sorted(ghz3):
    """Test the ordering of cut positions."""
    positions = enumerate_wire_cut_positions(ghz3)

    assert positions == sorted(positions)
    assert positions == [WireCutPoint(0, 0), WireCutPoint(1, 1)]


def test_csv_row_matches_header(bell_circuit):
    """Test that CSV rows line up with the header."""
    header = circuit_analysis_service.features_csv_header().strip().split(",")
    row = circuit_analysis_service.features_csv_row(extract_features(bell_circuit), 12.5)

    assert len(row.strip().split(",")) == len(header)
    assert row.strip().endswith("12.5")
