"""Regression model interface and shared helpers."""
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from sklearn.preprocessing import PolynomialFeatures

from app.errors import DatasetError


@dataclass
class FitInfo:
    """Solver outcome recorded on a fitted model."""
    converged: bool = True
    n_iter: int = 0
    achieved: float = 0.0  # final step size, KKT violation, ...


class ErrorModel(ABC):
    """Abstract base class for circuit-error regressors.

    Models take raw feature matrices (rows in FEATURE_COLUMNS order) and
    return unclamped predictions; clamping to [0, 100] is the caller's job.
    """

    family: str = ""

    def __init__(self):
        self.info = FitInfo()

    @abstractmethod
    def fit(self, X: np.ndarray, y: np.ndarray) -> "ErrorModel":
        """
        Fit on a design matrix.

        Args:
            X: (n_samples, n_features) raw feature values
            y: (n_samples,) error labels in percent

        Returns:
            self
        """
        pass

    @abstractmethod
    def predict(self, X: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def to_params(self):
        """Pydantic parameter document of the fitted model."""
        pass

    @classmethod
    @abstractmethod
    def from_params(cls, params) -> "ErrorModel":
        pass

    @property
    def is_fitted(self) -> bool:
        return True


def check_design(X, y=None, min_rows: int = 2) -> tuple[np.ndarray, np.ndarray | None]:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DatasetError(f"design matrix must be 2-D, got shape {X.shape}")
    if y is None:
        return X, None
    y = np.asarray(y, dtype=float).reshape(-1)
    if X.shape[0] != y.shape[0]:
        raise DatasetError(f"{X.shape[0]} rows but {y.shape[0]} labels")
    if X.shape[0] < min_rows:
        raise DatasetError(f"need at least {min_rows} rows, got {X.shape[0]}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise DatasetError("design matrix or labels contain non-finite values")
    return X, y


def polynomial_expansion(degree: int, n_features: int) -> PolynomialFeatures:
    """Expansion without the bias column; column order depends only on (degree, n_features)."""
    poly = PolynomialFeatures(degree=degree, include_bias=False)
    return poly.fit(np.zeros((1, n_features)))
