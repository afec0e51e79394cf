"""
Unit tests for DatasetService and CorpusService.

Tests labelling, CSV storage, splitting, the shot sweep and corpus generation.
"""

import pytest

from app.errors import DatasetError
from app.models.circuit import Gate, QuantumCircuit
from app.models.enums import FEATURE_COLUMNS, GateKind
from app.parsing.qasm import emit_qasm
from app.schemas.simulation import NoiseModel
from app.services.corpus import (
    bernstein_vazirani,
    load_corpus,
    random_corpus,
    random_cuttable_circuit,
)
from app.services.dataset import (
    DatasetService,
    build_dataset,
    fit_shot_curve,
    train_test_split,
)
from app.services.fragmentation import enumerate_cuts
from app.services.simulator import simulate_ideal


def test_noiseless_bell_label_near_zero(bell_circuit, noiseless):
    """Test that sampling error alone keeps the label small."""
    rows = build_dataset([bell_circuit], noiseless, shots=20000)

    assert rows[0].label < 1.5
    assert rows[0].name == "bell"


def test_symmetric_readout_flip_is_invisible(bell_circuit):
    """Test Bell under p_ro = 1: both bits flip, leaving only sampling error."""
    noise = NoiseModel(p1=0.0, p2=0.0, p_ro=1.0, seed=1)

    assert build_dataset([bell_circuit], noise, shots=20000)[0].label < 1.5


def test_certain_flip_gives_full_error():
    """Test the largest possible label."""
    circuit = QuantumCircuit(1, (Gate(GateKind.X, (0,)),), "x")
    noise = NoiseModel(p1=0.0, p2=0.0, p_ro=1.0, seed=1)

    assert build_dataset([circuit], noise, shots=16)[0].label == pytest.approx(100.0)


def test_build_dataset_is_reproducible(ghz3, chain4, default_noise):
    """Test that labels depend only on corpus position and seed."""
    first = build_dataset([ghz3, chain4], default_noise, shots=64)
    second = build_dataset([ghz3, chain4], default_noise, shots=64)

    assert first == second


def test_empty_corpus_rejected(default_noise):
    """Test the empty-corpus guard."""
    with pytest.raises(DatasetError):
        build_dataset([], default_noise)


def test_csv_keeps_features_and_labels(synthetic_rows):
    """Test writing and reading the dataset file."""
    text = DatasetService.to_csv(synthetic_rows)
    rows = DatasetService.from_csv(text)

    assert text.splitlines()[0] == ",".join([*FEATURE_COLUMNS, "error"])
    assert [r.features for r in rows] == [r.features for r in synthetic_rows]
    assert [r.label for r in rows] == [r.label for r in synthetic_rows]


def test_csv_rejects_bad_header():
    """Test the header check."""
    with pytest.raises(DatasetError):
        DatasetService.from_csv("a,b,c\n1,2,3\n")


def test_csv_reports_bad_line(synthetic_rows):
    """Test that malformed rows name their line."""
    text = DatasetService.to_csv(synthetic_rows[:1]) + "1,2,x\n"
    with pytest.raises(DatasetError, match="line 3"):
        DatasetService.from_csv(text)


def test_read_csv_missing_file(tmp_path):
    """Test a missing dataset path."""
    with pytest.raises(DatasetError):
        DatasetService.read_csv(tmp_path / "none.csv")


def test_train_test_split_sizes(synthetic_rows):
    """Test the seeded 80/20 split."""
    train, test = train_test_split(synthetic_rows, 0.8, seed=7)
    again, _ = train_test_split(synthetic_rows, 0.8, seed=7)

    assert (len(train), len(test)) == (32, 8)
    assert train == again
    assert {r.name for r in train}.isdisjoint({r.name for r in test})


@pytest.mark.parametrize("fraction", [0.0, 1.0, 1.5])
def test_train_test_split_fraction_guard(synthetic_rows, fraction):
    """Test fractions outside (0, 1)."""
    with pytest.raises(DatasetError):
        train_test_split(synthetic_rows, fraction)


def test_shot_curve_picks_minimum():
    """Test a sweep whose error bottoms out at 2^7 shots."""
    exponents = list(range(1, 14))
    errors = [(x - 7) ** 2 + 5.0 for x in exponents]
    result = fit_shot_curve(exponents, errors, degree=3)

    assert result.best_exponent == 7
    assert result.best_shots == 128
    assert len(result.coefficients) == 4


def test_flat_shot_curve_picks_smallest_exponent():
    """Test the tie rule for a flat curve."""
    result = fit_shot_curve([5, 3, 4], [2.0, 2.0, 2.0])

    assert result.best_exponent == 3
    assert result.exponents == [3, 4, 5]


def test_shots_sweep_runs_each_exponent(bell_circuit, default_noise):
    """Test that the sweep reports one mean per exponent."""
    result = DatasetService.shots_sweep([bell_circuit], default_noise, exponents=[2, 4, 6])

    assert result.exponents == [2, 4, 6]
    assert len(result.mean_errors) == 3
    assert result.best_exponent in (2, 4, 6)


def test_random_corpus_is_seeded():
    """Test widths, names and reproducibility of generated corpora."""
    corpus = random_corpus(6, 2, 4, 10, seed=9)

    assert corpus == random_corpus(6, 2, 4, 10, seed=9)
    assert all(2 <= c.n_qubits <= 4 for c in corpus)
    assert all(len(c.gates) == 10 for c in corpus)
    assert corpus[0].name.startswith("random-000-")


def test_random_cuttable_circuit_has_a_cut():
    """Test that generated circuits admit a cut of at most two wires."""
    circuit = random_cuttable_circuit(4, 8, seed=2, max_cut=2)

    assert enumerate_cuts(circuit, 2)


def test_load_corpus_sorted_by_file_name(tmp_path, bell_circuit, ghz3):
    """Test directory loading."""
    (tmp_path / "b.qasm").write_text(emit_qasm(ghz3), encoding="utf-8")
    (tmp_path / "a.qasm").write_text(emit_qasm(bell_circuit), encoding="utf-8")
    (tmp_path / "notes.txt").write_text("skip", encoding="utf-8")

    corpus = load_corpus(tmp_path)

    assert [c.name for c in corpus] == ["a", "b"]
    assert corpus[1].n_qubits == 3


def test_bernstein_vazirani_reads_its_secret():
    """Test that the data wires carry the secret and the ancilla is uniform."""
    circuit = bernstein_vazirani(4, "101")

    assert simulate_ideal(circuit).probs == pytest.approx({"1010": 0.5, "1011": 0.5})


def test_bernstein_vazirani_secret_guard():
    """Test a secret of the wrong length."""
    with pytest.raises(DatasetError):
        bernstein_vazirani(4, "11")
