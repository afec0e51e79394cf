"""
TrainingService - fits, tunes, persists and applies circuit-error models.
"""

import json
import logging
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from pydantic import ValidationError
from sklearn.model_selection import KFold

from app.config.settings import get_settings
from app.errors import DatasetError, ModelError, SchemaVersionError
from app.learn import (
    ErrorModel,
    ForestModel,
    LassoModel,
    LinearModel,
    SVRModel,
    model_from_params,
)
from app.models.circuit import FeatureVector, QuantumCircuit
from app.models.enums import FEATURE_COLUMNS, ModelFamily
from app.schemas.learn import DatasetRow, GridCell, GridResult, GridSpec, ModelDocument
from app.schemas.metrics import Scorecard
from app.services.dataset import DatasetService
from app.services.features import extract_features
from app.services.metrics import MetricsService

logger = logging.getLogger(__name__)

Predictor = Callable[[QuantumCircuit], float]


class TrainingService:
    """Model fitting and inference entry points."""

    # ---- fitting ----

    @staticmethod
    def fit_linear(rows: Sequence[DatasetRow], degree: int | None = None) -> LinearModel:
        degree = get_settings().poly_degree if degree is None else degree
        X, y = DatasetService.to_matrix(rows)
        return LinearModel(degree).fit(X, y)

    @staticmethod
    def fit_lasso(
        rows: Sequence[DatasetRow], strength: float, degree: int | None = None
    ) -> LassoModel:
        degree = get_settings().poly_degree if degree is None else degree
        X, y = DatasetService.to_matrix(rows)
        return LassoModel(strength, degree).fit(X, y)

    @staticmethod
    def fit_forest(
        rows: Sequence[DatasetRow],
        n_trees: int | None = None,
        max_depth: int | None = None,
        feature_subset: int | None = None,
        seed: int = 7,
        bootstrap: bool = True,
    ) -> ForestModel:
        X, y = DatasetService.to_matrix(rows)
        return ForestModel(n_trees, max_depth, feature_subset, seed, bootstrap).fit(X, y)

    @staticmethod
    def fit_svr(
        rows: Sequence[DatasetRow], c: float, gamma: float, epsilon: float | None = None
    ) -> SVRModel:
        X, y = DatasetService.to_matrix(rows)
        return SVRModel(c, gamma, epsilon).fit(X, y)

    # ---- grid search ----

    @staticmethod
    def cv_rmse(
        X: np.ndarray,
        y: np.ndarray,
        folds: list[tuple[np.ndarray, np.ndarray]],
        c: float,
        gamma: float,
        epsilon: float,
    ) -> float:
        """Mean over folds of the held-out RMSE of an SVR fitted on the other folds."""
        scores = []
        for train_idx, test_idx in folds:
            model = SVRModel(c, gamma, epsilon).fit(X[train_idx], y[train_idx])
            residual = model.predict(X[test_idx]) - y[test_idx]
            scores.append(float(np.sqrt(np.mean(residual ** 2))))
        return float(np.mean(scores))

    @staticmethod
    def make_folds(n: int, k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
        if k > n:
            raise DatasetError(f"{k} folds need at least {k} rows, got {n}")
        return list(KFold(n_splits=k, shuffle=True, random_state=seed).split(np.arange(n)))

    @staticmethod
    def grid_search(rows: Sequence[DatasetRow], grid: GridSpec) -> GridResult:
        """
        Two-stage cross-validated search over (C, gamma).

        Both stages share one set of folds. The returned cell is the argmin over
        every evaluated cell; ties go to smaller C, then smaller gamma.
        """
        X, y = DatasetService.to_matrix(rows)
        folds = TrainingService.make_folds(len(rows), grid.folds, grid.seed)
        evaluated: dict[tuple[float, float], GridCell] = {}
        key = lambda cell: (cell.cv_rmse, cell.c, cell.gamma)  # noqa: E731

        stage_best = {}
        for stage_name, stage in (("coarse", grid.coarse), ("fine", grid.fine)):
            stage_cells = []
            for c, gamma in stage.cells():
                if (c, gamma) not in evaluated:
                    rmse = TrainingService.cv_rmse(X, y, folds, c, gamma, grid.epsilon)
                    evaluated[(c, gamma)] = GridCell(
                        c=c, gamma=gamma, cv_rmse=rmse, stage=stage_name
                    )
                stage_cells.append(evaluated[(c, gamma)])
            stage_best[stage_name] = min(stage_cells, key=key)
            logger.info(
                f"{stage_name} grid: best C={stage_best[stage_name].c}, "
                f"gamma={stage_best[stage_name].gamma}, "
                f"CV RMSE={stage_best[stage_name].cv_rmse:.4f}"
            )

        cells = list(evaluated.values())
        best = min(cells, key=key)
        return GridResult(
            best_c=best.c,
            best_gamma=best.gamma,
            best_rmse=best.cv_rmse,
            coarse_best=stage_best["coarse"],
            fine_best=stage_best["fine"],
            cells=cells,
        )

    @staticmethod
    def train(
        rows: Sequence[DatasetRow],
        family: ModelFamily | str,
        grid: GridSpec | None = None,
        **kwargs,
    ) -> ErrorModel:
        """Fit one family with defaults from settings; SVR tunes (C, gamma) on ``grid`` first."""
        family = ModelFamily(family)
        if family is ModelFamily.LINEAR:
            return TrainingService.fit_linear(rows, kwargs.get("degree"))
        if family is ModelFamily.LASSO:
            return TrainingService.fit_lasso(rows, kwargs.get("strength", 0.0), kwargs.get("degree"))
        if family is ModelFamily.FOREST:
            return TrainingService.fit_forest(
                rows,
                kwargs.get("n_trees"),
                kwargs.get("max_depth"),
                kwargs.get("feature_subset"),
                kwargs.get("seed", get_settings().seed),
                kwargs.get("bootstrap", True),
            )
        if "c" in kwargs and "gamma" in kwargs:
            return TrainingService.fit_svr(rows, kwargs["c"], kwargs["gamma"], kwargs.get("epsilon"))
        grid = grid or GridSpec.coarse_to_fine(get_settings().cv_folds, get_settings().seed)
        result = TrainingService.grid_search(rows, grid)
        return TrainingService.fit_svr(rows, result.best_c, result.best_gamma, grid.epsilon)

    # ---- evaluation ----

    @staticmethod
    def score(model: ErrorModel, rows: Sequence[DatasetRow]) -> Scorecard:
        """Scorecard of clamped predictions; adjusted R^2 is None for small row sets."""
        X, y = DatasetService.to_matrix(rows)
        predicted = np.clip(model.predict(X), 0.0, 100.0)
        return MetricsService.model_scorecard(y, predicted, X.shape[1], require_adjusted=False)

    @staticmethod
    def compare_models(
        train_rows: Sequence[DatasetRow],
        test_rows: Sequence[DatasetRow],
        grid: GridSpec | None = None,
        lasso_strength: float = 0.1,
        seed: int = 7,
    ) -> dict[str, Scorecard]:
        """Fit all four families on one split and score them on the test rows.

        Adjusted R^2 needs more test rows than features + 1; with fewer it is
        reported as None.
        """
        models = {
            ModelFamily.LINEAR.value: TrainingService.train(train_rows, ModelFamily.LINEAR),
            ModelFamily.LASSO.value: TrainingService.train(
                train_rows, ModelFamily.LASSO, strength=lasso_strength
            ),
            ModelFamily.FOREST.value: TrainingService.train(train_rows, ModelFamily.FOREST, seed=seed),
            ModelFamily.SVR.value: TrainingService.train(train_rows, ModelFamily.SVR, grid=grid),
        }
        X, y = DatasetService.to_matrix(test_rows)
        k = X.shape[1]
        if len(test_rows) <= k + 1:
            logger.warning(
                f"{len(test_rows)} test rows for {k} features; adjusted R2 not reported"
            )
        cards = {}
        for name, model in models.items():
            predicted = np.clip(model.predict(X), 0.0, 100.0)
            cards[name] = MetricsService.model_scorecard(
                y, predicted, k, require_adjusted=False
            )
            logger.info(f"{name}: RMSE={cards[name].rmse:.3f} R2={cards[name].r2:.3f}")
        return cards

    # ---- inference ----

    @staticmethod
    def predict_features(model: ErrorModel, features: FeatureVector) -> float:
        value = float(model.predict(np.array([features.as_tuple()], dtype=float))[0])
        return float(np.clip(value, 0.0, 100.0))

    @staticmethod
    def predict_error(model: ErrorModel, circuit: QuantumCircuit) -> float:
        """Predicted error percent of a circuit, clamped to [0, 100]."""
        return TrainingService.predict_features(model, extract_features(circuit))

    @staticmethod
    def make_predictor(model: ErrorModel) -> Predictor:
        """Circuit -> predicted error, memoized by feature vector."""
        cache: dict[tuple[int, ...], float] = {}

        def predict(circuit: QuantumCircuit) -> float:
            features = extract_features(circuit)
            key = features.as_tuple()
            if key not in cache:
                cache[key] = TrainingService.predict_features(model, features)
            return cache[key]

        predict.cache = cache
        return predict

    # ---- persistence ----

    @staticmethod
    def to_document(model: ErrorModel) -> ModelDocument:
        return ModelDocument(
            schema_version=get_settings().model_schema_version,
            feature_columns=list(FEATURE_COLUMNS),
            params=model.to_params(),
        )

    @staticmethod
    def from_document(document: ModelDocument) -> ErrorModel:
        version = get_settings().model_schema_version
        if document.schema_version != version:
            raise SchemaVersionError(
                f"model schema version {document.schema_version}, expected {version}"
            )
        if list(document.feature_columns) != list(FEATURE_COLUMNS):
            raise SchemaVersionError("model was trained on a different feature schema")
        return model_from_params(document.params)

    @staticmethod
    def dumps(model: ErrorModel) -> str:
        return TrainingService.to_document(model).model_dump_json(indent=2) + "\n"

    @staticmethod
    def loads(text: str) -> ErrorModel:
        try:
            document = ModelDocument.model_validate_json(text)
        except ValidationError as exc:
            raise ModelError(f"invalid model document: {exc}") from exc
        return TrainingService.from_document(document)

    @staticmethod
    def load_model(path: str | Path) -> ErrorModel:
        path = Path(path)
        if not path.is_file():
            raise ModelError(f"model file not found: {path}")
        return TrainingService.loads(path.read_text(encoding="utf-8"))


# Singleton instance
training_service = TrainingService()


# Standalone function exports for convenience
def fit_linear(rows, degree=None) -> LinearModel:
    return TrainingService.fit_linear(rows, degree)


def fit_lasso(rows, strength, degree=None) -> LassoModel:
    return TrainingService.fit_lasso(rows, strength, degree)


def fit_forest(rows, n_trees=None, max_depth=None, feature_subset=None, seed=7, bootstrap=True):
    return TrainingService.fit_forest(rows, n_trees, max_depth, feature_subset, seed, bootstrap)


def fit_svr(rows, c, gamma, epsilon=None) -> SVRModel:
    return TrainingService.fit_svr(rows, c, gamma, epsilon)


def grid_search(rows, grid: GridSpec) -> GridResult:
    return TrainingService.grid_search(rows, grid)


def predict_error(model: ErrorModel, circuit: QuantumCircuit) -> float:
    return TrainingService.predict_error(model, circuit)


def make_predictor(model: ErrorModel) -> Predictor:
    return TrainingService.make_predictor(model)


def load_model(path) -> ErrorModel:
    return TrainingService.load_model(path)


def compare_models(train_rows, test_rows, grid=None, lasso_strength=0.1, seed=7):
    return TrainingService.compare_models(train_rows, test_rows, grid, lasso_strength, seed)
