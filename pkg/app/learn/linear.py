"""Polynomial least-squares regression solved by the normal equations."""
import logging

import numpy as np

from app.errors import ModelError
from app.learn.base import ErrorModel, check_design, polynomial_expansion
from app.schemas.learn import LinearParams

logger = logging.getLogger(__name__)

RIDGE = 1e-10


class LinearModel(ErrorModel):
    """y = w . phi(x) + b with phi the polynomial expansion of the raw features."""

    family = "linear"

    def __init__(self, degree: int = 1):
        super().__init__()
        if degree < 1:
            raise ModelError(f"polynomial degree must be >= 1, got {degree}")
        self.degree = degree
        self.n_features: int | None = None
        self.weights: np.ndarray | None = None
        self.intercept = 0.0
        self.ridge = 0.0

    def expand(self, X: np.ndarray) -> np.ndarray:
        if self.degree == 1:
            return X
        return polynomial_expansion(self.degree, X.shape[1]).transform(X)

    def fit(self, X, y) -> "LinearModel":
        X, y = check_design(X, y)
        self.n_features = X.shape[1]
        Z = self.expand(X)
        z_mean = Z.mean(axis=0)
        y_mean = y.mean()
        Zc = Z - z_mean
        gram = Zc.T @ Zc
        rhs = Zc.T @ (y - y_mean)

        self.ridge = 0.0
        if np.linalg.matrix_rank(gram) < gram.shape[0]:
            # Rank-deficient (e.g. gate kinds absent from the corpus)
            self.ridge = RIDGE
            logger.debug(f"normal equations singular, adding ridge {RIDGE}")
        try:
            w = np.linalg.solve(gram + self.ridge * np.eye(gram.shape[0]), rhs)
        except np.linalg.LinAlgError as exc:
            raise ModelError(f"normal equations not solvable: {exc}") from exc
        if not np.all(np.isfinite(w)):
            raise ModelError("normal equations produced non-finite weights")

        self.weights = w
        self.intercept = float(y_mean - z_mean @ w)
        return self

    def predict(self, X) -> np.ndarray:
        if self.weights is None:
            raise ModelError("linear model is not fitted")
        X, _ = check_design(X)
        return self.expand(X) @ self.weights + self.intercept

    def to_params(self) -> LinearParams:
        return LinearParams(
            degree=self.degree,
            n_features=self.n_features,
            weights=[float(w) for w in self.weights],
            intercept=self.intercept,
            ridge=self.ridge,
        )

    @classmethod
    def from_params(cls, params: LinearParams) -> "LinearModel":
        model = cls(params.degree)
        model.n_features = params.n_features
        model.weights = np.asarray(params.weights, dtype=float)
        model.intercept = params.intercept
        model.ridge = params.ridge
        expected = model.expand(np.zeros((1, params.n_features))).shape[1]
        if model.weights.shape[0] != expected:
            raise ModelError(
                f"linear model has {model.weights.shape[0]} weights, expansion needs {expected}"
            )
        return model
