"""
Unit tests for FragmentationService.

Tests cut enumeration on the gate DAG, error-balanced cut selection, the
recursive fragmentation tree and its JSON form.
"""

import pytest

from app.errors import FragmentationError
from app.models.circuit import Gate, QuantumCircuit, WireCutPoint
from app.models.enums import GateKind
from app.parsing.qasm import emit_qasm
from app.services.fragmentation import (
    FragmentationService,
    enumerate_cuts,
    fragment_recursively,
    select_cut,
)

# Predicted (upstream, downstream) errors of five Shor-5 bipartitions
SHOR5_PAIRS = [
    (2.54, 46.112),
    (7.51, 43.89),
    (10.05, 25.99),
    (2.444, 46.858),
    (2.444, 46.58),
]


def _stub_from_pairs(candidates, pairs):
    """Predictor returning the given errors for each candidate's fragments."""
    table = {}
    for cand, (e1, e2) in zip(candidates, pairs):
        table[id(cand.upstream)] = e1
        table[id(cand.downstream)] = e2
    return lambda circuit: table[id(circuit)]


# ============== Enumeration ==============

def test_bell_has_one_cut(bell_circuit):
    """Test the single cut of the Bell circuit."""
    candidates = enumerate_cuts(bell_circuit, 2)

    assert len(candidates) == 1
    cand = candidates[0]
    assert cand.cut_points == (WireCutPoint(0, 0),)
    assert (cand.k, cand.d) == (1, 2)
    assert cand.upstream.n_qubits == 1
    assert cand.label() == "{q0}; {q0, q1}"


def test_ghz3_cuts(ghz3):
    """Test that cutting both GHZ wires at once is rejected as three fragments."""
    candidates = enumerate_cuts(ghz3, 2)

    assert [c.cut_points for c in candidates] == [
        (WireCutPoint(0, 0),),
        (WireCutPoint(1, 1),),
    ]


def test_candidates_partition_the_gates(chain4):
    """Test that fragments hold every gate once and cut wires appear on both sides."""
    candidates = enumerate_cuts(chain4, 2)

    assert candidates
    for cand in candidates:
        assert len(cand.upstream.gates) + len(cand.downstream.gates) == len(chain4.gates)
        for wire in cand.cut_wires:
            assert wire in cand.upstream_map
            assert wire in cand.downstream_map
        assert cand.d == max(cand.upstream.n_qubits, cand.downstream.n_qubits)


def test_candidates_sorted_by_cut_points(chain4):
    """Test the lexicographic candidate order."""
    points = [c.cut_points for c in enumerate_cuts(chain4, 2)]

    assert points == sorted(points)


def test_cut_budget_limits_cut_size(chain4):
    """Test that K bounds the number of cut wires."""
    assert all(c.k == 1 for c in enumerate_cuts(chain4, 1))
    assert len(enumerate_cuts(chain4, 2)) >= len(enumerate_cuts(chain4, 1))


def test_shor5_contains_balanced_bipartition(shor5):
    """Test that {q0, q1, q2}; {q2, q3, q4} is among the candidates."""
    labels = {c.label() for c in enumerate_cuts(shor5, 2)}

    assert "{q0, q1, q2}; {q2, q3, q4}" in labels


def test_disconnected_circuit_has_no_cut():
    """Test a circuit whose gate graph is already in pieces."""
    g = Gate
    circuit = QuantumCircuit(2, (g(GateKind.X, (0,)), g(GateKind.X, (0,)), g(GateKind.H, (1,))))

    assert enumerate_cuts(circuit, 2) == []


def test_measurements_do_not_block_cuts(bell_circuit):
    """Test that trailing MEASURE pseudo-ops are ignored."""
    measured = QuantumCircuit(
        2,
        (*bell_circuit.gates, Gate(GateKind.MEASURE, (0,)), Gate(GateKind.MEASURE, (1,))),
    )

    assert len(enumerate_cuts(measured, 1)) == 1


def test_cut_budget_guard(bell_circuit):
    """Test K below one."""
    with pytest.raises(FragmentationError):
        enumerate_cuts(bell_circuit, 0)


# ============== Selection ==============

def test_select_cut_on_shor5_pairs(shor5):
    """Test the balanced-error rule on the five stubbed bipartitions."""
    candidates = enumerate_cuts(shor5, 2)[:5]
    index = select_cut(candidates, _stub_from_pairs(candidates, SHOR5_PAIRS))
    scored = FragmentationService.score_cuts(candidates, _stub_from_pairs(candidates, SHOR5_PAIRS))

    assert index == 2
    assert scored[index].distance == pytest.approx(15.94, abs=1e-3)


def test_argmin_distance_tie_rules():
    """Test ties: lower max error first, then lower index."""
    assert FragmentationService.argmin_distance([(10, 30), (40, 60), (5, 25)]) == 2
    assert FragmentationService.argmin_distance([(1, 2), (2, 1)]) == 0


def test_selection_is_scale_invariant():
    """Test that scaling every prediction keeps the chosen index."""
    scaled = [(2.5 * a, 2.5 * b) for a, b in SHOR5_PAIRS]

    assert FragmentationService.argmin_distance(scaled) == FragmentationService.argmin_distance(
        SHOR5_PAIRS
    )


def test_select_cut_needs_candidates(constant_predictor):
    """Test an empty candidate list."""
    with pytest.raises(FragmentationError):
        select_cut([], constant_predictor(1.0))


# ============== Recursion ==============

def test_below_threshold_is_single_leaf(chain4, constant_predictor):
    """Test that a good enough circuit is not cut."""
    tree = fragment_recursively(chain4, constant_predictor(10.0), threshold=50)

    assert tree.root.is_leaf
    assert not tree.root.unsplittable
    assert len(tree.nodes()) == 1


def test_shor5_splits_once(shor5, shor5_predictor):
    """Test one split into two leaves below threshold."""
    tree = fragment_recursively(shor5, shor5_predictor, threshold=50, max_cut=2)

    assert len(tree.leaves()) == 2
    assert tree.height == 1
    assert tree.root.predicted_error == pytest.approx(59.210)
    assert [leaf.predicted_error for leaf in tree.leaves()] == [10.05, 25.99]
    assert tree.root.cut.distance == pytest.approx(15.94)


def test_constant_predictor_hits_max_depth(chain4, constant_predictor):
    """Test termination when splitting never lowers the prediction."""
    tree = fragment_recursively(chain4, constant_predictor(60.0), threshold=50, max_depth=2)

    assert tree.height <= 2
    for leaf in tree.leaves():
        assert leaf.unsplittable
        if leaf.level == 2:
            assert leaf.reason == "max depth reached"
        else:
            assert leaf.reason == "no valid cut"


def test_leaf_invariant(shor5, chain4, shor5_predictor, constant_predictor):
    """Test that each leaf is below threshold or flagged, never both."""
    trees = [
        fragment_recursively(shor5, shor5_predictor, threshold=50),
        fragment_recursively(chain4, constant_predictor(60.0), threshold=50, max_depth=3),
    ]
    for tree in trees:
        for leaf in tree.leaves():
            assert (leaf.predicted_error <= tree.threshold) != leaf.unsplittable


def test_internal_nodes_have_two_children(chain4, constant_predictor):
    """Test the binary shape of the tree."""
    tree = fragment_recursively(chain4, constant_predictor(60.0), threshold=50, max_depth=3)

    for node in tree.nodes():
        assert len(node.children) in (0, 2)
        assert (node.cut is None) == node.is_leaf


@pytest.mark.parametrize("threshold", [0, -1, 100.5])
def test_threshold_guard(bell_circuit, constant_predictor, threshold):
    """Test thresholds outside (0, 100]."""
    with pytest.raises(FragmentationError):
        fragment_recursively(bell_circuit, constant_predictor(1.0), threshold=threshold)


# ============== Serialization ==============

def test_tree_json_keeps_structure(chain4, constant_predictor):
    """Test writing and reading a fragmentation tree."""
    tree = fragment_recursively(chain4, constant_predictor(60.0), threshold=50, max_depth=2)
    again = FragmentationService.tree_from_json(FragmentationService.tree_to_json(tree))

    assert (again.threshold, again.max_cut, again.max_depth) == (50, tree.max_cut, 2)
    assert [n.node_id for n in again.nodes()] == [n.node_id for n in tree.nodes()]
    for a, b in zip(again.nodes(), tree.nodes()):
        assert emit_qasm(a.circuit) == emit_qasm(b.circuit)
        assert a.unsplittable == b.unsplittable
        if b.cut is not None:
            assert a.cut.candidate.cut_points == b.cut.candidate.cut_points
            assert dict(a.cut.candidate.upstream_map) == dict(b.cut.candidate.upstream_map)


def test_tree_summary_counts(shor5, shor5_predictor):
    """Test the summary block of the tree document."""
    summary = FragmentationService.tree_summary(
        fragment_recursively(shor5, shor5_predictor, threshold=50)
    )

    assert (summary["nodes"], summary["leaves"], summary["height"]) == (3, 2, 1)
    assert summary["unsplittable"] == 0


def test_invalid_tree_document():
    """Test a document missing its root."""
    with pytest.raises(FragmentationError):
        FragmentationService.tree_from_json('{"threshold": 50}')
