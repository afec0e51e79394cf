"""
Unit tests for the qfrag command line.

Tests each subcommand through ``main`` and the exit code of every error family.
"""

import json

import pytest

from app.cli import main
from app.config.settings import get_settings
from app.models.distribution import OutcomeDistribution
from app.parsing.qasm import emit_qasm
from app.services.dataset import DatasetService
from app.services.fragmentation import FragmentationService
from app.services.training import load_model


@pytest.fixture
def bell_file(tmp_path, bell_circuit):
    path = tmp_path / "bell.qasm"
    path.write_text(emit_qasm(bell_circuit), encoding="utf-8")
    return path


def test_no_command_prints_help(capsys):
    """Test the bare invocation."""
    assert main([]) == 0
    assert "usage: qfrag" in capsys.readouterr().out


def test_simulate_exact(bell_file, capsys):
    """Test the exact distribution of the Bell circuit on stdout."""
    assert main(["--backend", "exact", "simulate", str(bell_file)]) == 0

    dist = OutcomeDistribution.from_csv(capsys.readouterr().out)
    assert dist.probs == pytest.approx({"00": 0.5, "11": 0.5})


def test_simulate_noisy_to_file(tmp_path, bell_file):
    """Test shot-mode simulation written to --output."""
    out = tmp_path / "dist.csv"
    assert main(["--shots", "64", "simulate", str(bell_file), "--output", str(out)]) == 0

    assert OutcomeDistribution.from_csv(out.read_text()).total() == pytest.approx(1.0)


def test_dataset_from_random_corpus(tmp_path):
    """Test labelling a generated corpus."""
    out = tmp_path / "data.csv"
    code = main(
        [
            "--shots", "32", "dataset", "--random", "3",
            "--min-qubits", "2", "--max-qubits", "3", "--gates", "6", "--output", str(out),
        ]
    )

    assert code == 0
    assert len(DatasetService.read_csv(out)) == 3


def test_dataset_needs_a_corpus():
    """Test the missing-corpus configuration error."""
    assert main(["dataset"]) == 5


def test_train_linear_model(tmp_path, synthetic_rows):
    """Test fitting and writing a degree-1 linear model."""
    data = tmp_path / "data.csv"
    data.write_text(DatasetService.to_csv(synthetic_rows), encoding="utf-8")
    out = tmp_path / "model.json"

    code = main(["train", str(data), "--family", "linear", "--degree", "1", "--output", str(out)])

    assert code == 0
    assert load_model(out).family == "linear"


def test_predict_prints_json(bell_file, constant_model_file, capsys):
    """Test the prediction document."""
    assert main(["predict", str(bell_file), "--model", str(constant_model_file(33.0))]) == 0

    payload = json.loads(capsys.readouterr().out)
    assert payload["circuit"] == "bell"
    assert payload["predicted_error"] == pytest.approx(33.0)
    assert payload["features"]["n_qubits"] == 2


def test_cut_lists_candidates(bell_file, capsys):
    """Test one JSON line per candidate."""
    assert main(["cut", str(bell_file)]) == 0

    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 1
    entry = json.loads(lines[0])
    assert entry["label"] == "{q0}; {q0, q1}"
    assert "selected" not in entry


def test_cut_with_model_marks_selection(bell_file, constant_model_file, capsys):
    """Test scored candidates with the chosen one marked."""
    assert main(["cut", str(bell_file), "--model", str(constant_model_file(20.0))]) == 0

    entry = json.loads(capsys.readouterr().out.splitlines()[0])
    assert entry["selected"] is True
    assert entry["distance"] == pytest.approx(0.0)


def test_cut_study_needs_model(bell_file):
    """Test --study without --model."""
    assert main(["cut", str(bell_file), "--study"]) == 5


def test_run_writes_files(tmp_path, bell_file, constant_model_file, capsys):
    """Test the end-to-end subcommand."""
    out_dir = tmp_path / "runs"
    code = main(
        [
            "--backend", "exact", "--out-dir", str(out_dir),
            "run", str(bell_file), "--model", str(constant_model_file(60.0)), "--max-depth", "1",
        ]
    )

    assert code == 0
    printed = capsys.readouterr().out
    assert "report:" in printed
    assert (out_dir / "bell.tree.json").exists()
    assert (out_dir / "bell.distribution.csv").exists()


def test_bench_writes_csv(tmp_path, constant_model_file, capsys):
    """Test the benchmark table and its CSV."""
    code = main(
        [
            "--backend", "exact", "--out-dir", str(tmp_path),
            "bench", "--random", "2", "--min-qubits", "3", "--max-qubits", "3", "--gates", "8",
            "--model", str(constant_model_file(60.0)), "--max-depth", "1",
        ]
    )

    assert code == 0
    assert "mean reduction: n/a" in capsys.readouterr().out
    assert len((tmp_path / "bench.csv").read_text().splitlines()) == 3


# ============== Exit codes ==============

def test_missing_circuit_exit_code(tmp_path):
    """Test that circuit errors exit with 2."""
    assert main(["simulate", str(tmp_path / "absent.qasm")]) == 2


def test_bad_model_exit_code(tmp_path, bell_file):
    """Test that learning errors exit with 3."""
    model = tmp_path / "bad.json"
    model.write_text("{}", encoding="utf-8")

    assert main(["predict", str(bell_file), "--model", str(model)]) == 3


def test_qubit_limit_exit_code(bell_file, monkeypatch):
    """Test that execution errors exit with 4."""
    monkeypatch.setenv("QFRAG_MAX_QUBITS", "1")
    get_settings.cache_clear()

    assert main(["--backend", "exact", "simulate", str(bell_file)]) == 4


def test_zero_shots_exit_code(bell_file):
    """Test that a bad --shots is a configuration error."""
    assert main(["--shots", "0", "simulate", str(bell_file)]) == 5


def test_invalid_threshold_exit_code(tmp_path, bell_file, constant_model_file):
    """Test that run configuration validation failures exit with 5."""
    code = main(
        [
            "--out-dir", str(tmp_path), "run", str(bell_file),
            "--model", str(constant_model_file(1.0)), "--threshold", "0",
        ]
    )

    assert code == 5


def test_invalid_noise_key_exit_code(tmp_path, bell_file):
    """Test that a misspelled noise parameter is a configuration error."""
    noise = tmp_path / "noise.txt"
    noise.write_text("p1 = 0.01\np_r0 = 0.5\n", encoding="utf-8")

    assert main(["--noise", str(noise), "simulate", str(bell_file)]) == 5


def test_missing_noise_file_exit_code(tmp_path, bell_file):
    """Test that an absent noise file exits with 5, before or after the subcommand."""
    missing = str(tmp_path / "absent.json")

    assert main(["--noise", missing, "simulate", str(bell_file)]) == 5
    assert main(["simulate", str(bell_file), "--noise", missing]) == 5


def test_missing_circuit_argument_exit_code():
    """Test a circuit subcommand given neither a positional nor --circuit."""
    assert main(["predict", "--model", "model.json"]) == 5


# ============== Flag spellings ==============

def test_global_flags_after_subcommand(bell_file, capsys):
    """Test that --seed and --shots work on either side of the subcommand."""
    assert main(["--seed", "3", "--shots", "64", "simulate", str(bell_file)]) == 0
    before = capsys.readouterr().out
    assert main(["simulate", str(bell_file), "--seed", "3", "--shots", "64"]) == 0
    after = capsys.readouterr().out

    assert before == after
    assert OutcomeDistribution.from_csv(after).total() == pytest.approx(1.0)


def test_dataset_with_corpus_noise_and_out(tmp_path, bell_file):
    """Test the --corpus / --noise / --shots / --out spelling."""
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    (corpus / "bell.qasm").write_text(bell_file.read_text(), encoding="utf-8")
    noise = tmp_path / "noise.json"
    noise.write_text(json.dumps({"p1": 0.0, "p2": 0.0, "p_ro": 0.0}), encoding="utf-8")
    out = tmp_path / "data.csv"

    code = main(
        ["dataset", "--corpus", str(corpus), "--noise", str(noise), "--shots", "8", "--out", str(out)]
    )

    assert code == 0
    rows = DatasetService.read_csv(out)
    assert len(rows) == 1
    assert 0.0 <= rows[0].label <= 100.0


def test_train_with_data_and_model_flags(tmp_path, synthetic_rows):
    """Test the --data / --model / --grid / --out spelling."""
    data = tmp_path / "data.csv"
    data.write_text(DatasetService.to_csv(synthetic_rows), encoding="utf-8")
    out = tmp_path / "model.json"

    code = main(
        [
            "train", "--data", str(data), "--model", "linear", "--degree", "1",
            "--grid", "coarse-fine", "--out", str(out),
        ]
    )

    assert code == 0
    assert load_model(out).family == "linear"


def test_train_needs_data():
    """Test train with no dataset."""
    assert main(["train", "--model", "linear"]) == 5


def test_predict_with_circuit_flag(bell_file, constant_model_file, capsys):
    """Test the --model / --circuit spelling."""
    model = constant_model_file(12.0)
    assert main(["predict", "--model", str(model), "--circuit", str(bell_file)]) == 0

    assert json.loads(capsys.readouterr().out)["predicted_error"] == pytest.approx(12.0)


# ============== Fragmentation plans ==============

def test_cut_writes_plan(tmp_path, bell_file, constant_model_file, capsys):
    """Test cut --threshold --plan-out: a recursive split written as tree JSON."""
    plan = tmp_path / "plan.json"
    code = main(
        [
            "cut", "--circuit", str(bell_file), "--model", str(constant_model_file(60.0)),
            "--threshold", "50", "--max-cut", "2", "--max-depth", "1", "--plan-out", str(plan),
        ]
    )

    assert code == 0
    assert json.loads(capsys.readouterr().out)["leaves"] == 2
    tree = FragmentationService.tree_from_json(plan.read_text())
    assert tree.height == 1
    assert tree.threshold == 50


def test_cut_below_threshold_plans_one_leaf(tmp_path, bell_file, constant_model_file, capsys):
    """Test a plan whose root is already below the threshold."""
    plan = tmp_path / "plan.json"
    model = constant_model_file(10.0)
    code = main(
        ["cut", str(bell_file), "--model", str(model), "--threshold", "50", "--plan-out", str(plan)]
    )

    assert code == 0
    assert json.loads(capsys.readouterr().out)["leaves"] == 1
    assert json.loads(plan.read_text())["summary"]["height"] == 0


def test_cut_plan_needs_model(tmp_path, bell_file):
    """Test --plan-out without --model."""
    assert main(["cut", str(bell_file), "--plan-out", str(tmp_path / "plan.json")]) == 5


def test_run_writes_plan_copy(tmp_path, bell_file, constant_model_file, capsys):
    """Test run --plan-out beside the usual output files."""
    out_dir = tmp_path / "runs"
    plan = tmp_path / "bell.plan.json"
    code = main(
        [
            "run", "--circuit", str(bell_file), "--model", str(constant_model_file(60.0)),
            "--max-depth", "1", "--plan-out", str(plan),
            "--backend", "exact", "--out-dir", str(out_dir),
        ]
    )

    assert code == 0
    assert f"plan: {plan}" in capsys.readouterr().out
    assert plan.read_text() == (out_dir / "bell.tree.json").read_text()
