"""
Unit tests for TrainingService.

Tests the two-stage grid search, model comparison, inference clamping and
model documents.
"""

import numpy as np
import pytest

from app.errors import DatasetError, ModelError, SchemaVersionError
from app.learn import LinearModel
from app.models.circuit import Gate, QuantumCircuit
from app.models.enums import FEATURE_COLUMNS, GateKind
from app.schemas.learn import GridSpec, GridStage
from app.services.corpus import random_corpus
from app.services.dataset import DatasetService, train_test_split
from app.services.features import extract_features
from app.services.training import (
    TrainingService,
    compare_models,
    grid_search,
    load_model,
    make_predictor,
    predict_error,
)

SMALL_GRID = GridSpec(
    coarse=GridStage(c_values=[1.0, 10.0], gamma_values=[0.1, 1.0]),
    fine=GridStage(c_values=[5.0, 10.0], gamma_values=[0.05, 0.1]),
    folds=4,
    seed=7,
)


def test_grid_search_equals_exhaustive_search(synthetic_rows):
    """Test that the reported optimum is the argmin over every evaluated cell."""
    result = grid_search(synthetic_rows, SMALL_GRID)

    X, y = DatasetService.to_matrix(synthetic_rows)
    folds = TrainingService.make_folds(len(synthetic_rows), SMALL_GRID.folds, SMALL_GRID.seed)
    cells = {*SMALL_GRID.coarse.cells(), *SMALL_GRID.fine.cells()}
    scores = {
        (c, g): TrainingService.cv_rmse(X, y, folds, c, g, SMALL_GRID.epsilon) for c, g in cells
    }
    best = min(scores, key=lambda cell: (scores[cell], *cell))

    assert (result.best_c, result.best_gamma) == best
    assert result.best_rmse == pytest.approx(scores[best])
    # (10, 0.1) is in both stages and evaluated once
    assert len(result.cells) == len(cells) == 7


def test_grid_stage_bests(synthetic_rows):
    """Test that each stage reports its own best cell."""
    result = grid_search(synthetic_rows, SMALL_GRID)

    assert result.coarse_best.stage == "coarse"
    assert result.best_rmse <= result.coarse_best.cv_rmse
    assert result.best_rmse <= result.fine_best.cv_rmse


def test_too_many_folds(synthetic_rows):
    """Test the fold-count guard."""
    grid = GridSpec.single(1.0, 1.0, folds=50)
    with pytest.raises(DatasetError):
        grid_search(synthetic_rows, grid)


def test_linear_fits_linear_labels(synthetic_rows):
    """Test that a degree-1 model recovers a linear label function."""
    model = TrainingService.train(synthetic_rows, "linear", degree=1)
    card = TrainingService.score(model, synthetic_rows)

    assert card.r2 > 0.999
    assert card.rmse < 0.05


def test_svr_with_fixed_hyperparameters_skips_search(synthetic_rows):
    """Test that explicit C and gamma are used as given."""
    model = TrainingService.train(synthetic_rows, "svr", c=50.0, gamma=0.01)

    assert (model.c, model.gamma) == (50.0, 0.01)


def test_compare_models_scores_every_family(synthetic_rows, monkeypatch):
    """Test the four-family comparison on one split."""
    from app.config.settings import get_settings

    monkeypatch.setenv("QFRAG_POLY_DEGREE", "1")
    monkeypatch.setenv("QFRAG_FOREST_TREES", "10")
    get_settings.cache_clear()
    train, test = train_test_split(synthetic_rows, 0.8, seed=7)
    cards = compare_models(train, test, grid=GridSpec.single(10.0, 0.1))

    assert set(cards) == {"linear", "lasso", "forest", "svr"}
    # 8 test rows are too few for k = 19 features
    assert all(card.n_features == len(FEATURE_COLUMNS) for card in cards.values())
    assert all(card.adjusted_r2 is None for card in cards.values())
    assert all(card.r2 is not None for card in cards.values())


def test_predictions_are_clamped(bell_circuit, constant_model):
    """Test the [0, 100] clamp on model output."""
    assert predict_error(constant_model(150.0), bell_circuit) == 100.0
    assert predict_error(constant_model(-5.0), bell_circuit) == 0.0
    assert predict_error(constant_model(42.5), bell_circuit) == pytest.approx(42.5)


def test_prediction_ignores_feature_preserving_reorder(synthetic_rows):
    """Test that swapping gates on disjoint wires leaves the prediction unchanged."""
    g = Gate
    first = QuantumCircuit(
        3,
        (
            g(GateKind.H, (0,)),
            g(GateKind.RY, (1,), (0.4,)),
            g(GateKind.CNOT, (0, 1)),
            g(GateKind.T, (2,)),
            g(GateKind.CZ, (1, 2)),
        ),
    )
    second = QuantumCircuit(
        3,
        (
            g(GateKind.T, (2,)),
            g(GateKind.RY, (1,), (0.4,)),
            g(GateKind.H, (0,)),
            g(GateKind.CNOT, (0, 1)),
            g(GateKind.CZ, (1, 2)),
        ),
    )
    model = TrainingService.train(synthetic_rows, "linear", degree=1)

    assert extract_features(first) == extract_features(second)
    assert predict_error(model, first) == predict_error(model, second)
    assert predict_error(model, first) != predict_error(model, QuantumCircuit(3, first.gates[:2]))


def test_predictor_memoizes_by_features(bell_circuit, ghz3, constant_model):
    """Test the per-feature-vector cache."""
    predict = make_predictor(constant_model(30.0))
    predict(bell_circuit)
    predict(bell_circuit)
    predict(ghz3)

    assert len(predict.cache) == 2


def test_load_model_file(constant_model_file, chain4):
    """Test reading a persisted model."""
    model = load_model(constant_model_file(12.0))

    assert isinstance(model, LinearModel)
    assert predict_error(model, chain4) == pytest.approx(12.0)


def test_load_model_missing(tmp_path):
    """Test a missing model path."""
    with pytest.raises(ModelError):
        load_model(tmp_path / "absent.json")


def test_invalid_document():
    """Test a file that is not a model document."""
    with pytest.raises(ModelError):
        TrainingService.loads('{"schema_version": 1, "params": {"family": "quantum"}}')


def test_schema_version_mismatch(constant_model):
    """Test that documents from another schema version are rejected."""
    document = TrainingService.to_document(constant_model(1.0))
    stale = document.model_copy(update={"schema_version": document.schema_version + 1})

    with pytest.raises(SchemaVersionError):
        TrainingService.from_document(stale)


def test_feature_schema_mismatch(constant_model):
    """Test that documents trained on other feature columns are rejected."""
    document = TrainingService.to_document(constant_model(1.0))
    other = document.model_copy(update={"feature_columns": ["n_qubits", "depth"]})

    with pytest.raises(SchemaVersionError):
        TrainingService.from_document(other)


def test_document_is_plain_json(constant_model):
    """Test that the persisted form is self-describing."""
    text = TrainingService.dumps(constant_model(3.0))

    assert '"family": "linear"' in text
    assert '"schema_version": 1' in text
    assert np.isclose(TrainingService.loads(text).intercept, 3.0)


@pytest.mark.slow
def test_svr_generalizes_on_random_circuits(default_noise):
    """Test held-out R^2 >= 0.7 for grid-searched SVR on 70 noisy-labelled random circuits."""
    corpus = random_corpus(70, 3, 6, 20, seed=7)
    rows = DatasetService.build_dataset(corpus, default_noise, 128)
    train, test = train_test_split(rows, 0.8, seed=7)

    svr = TrainingService.score(TrainingService.train(train, "svr"), test)
    linear = TrainingService.score(TrainingService.train(train, "linear"), test)

    assert len(test) == 14
    assert svr.r2 >= 0.7
    assert svr.r2 > linear.r2
