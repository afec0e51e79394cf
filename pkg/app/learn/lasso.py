"""L1-penalized polynomial regression by cyclic coordinate descent.

Objective on standardized expanded columns Z and centered labels:

    (1 / 2n) ||y - Z beta||^2 + strength * ||beta||_1

Weights are mapped back to the raw expansion, so strength 0 reproduces the
least-squares fit of ``LinearModel`` with the same degree.
"""
import logging

import numpy as np
from sklearn.preprocessing import StandardScaler

from app.config.settings import get_settings
from app.errors import ModelError
from app.learn.base import ErrorModel, check_design
from app.learn.linear import LinearModel
from app.schemas.learn import LassoParams, LinearParams

logger = logging.getLogger(__name__)


def soft_threshold(value: float, threshold: float) -> float:
    if value > threshold:
        return value - threshold
    if value < -threshold:
        return value + threshold
    return 0.0


class LassoModel(ErrorModel):
    family = "lasso"

    def __init__(
        self,
        strength: float = 0.0,
        degree: int = 1,
        tol: float | None = None,
        max_iter: int | None = None,
    ):
        super().__init__()
        if strength < 0:
            raise ModelError(f"lasso strength must be >= 0, got {strength}")
        settings = get_settings()
        self.strength = strength
        self.degree = degree
        self.tol = settings.lasso_tol if tol is None else tol
        self.max_iter = settings.lasso_max_iter if max_iter is None else max_iter
        self._linear = LinearModel(degree)

    def fit(self, X, y) -> "LassoModel":
        X, y = check_design(X, y)
        n = X.shape[0]
        self._linear.n_features = X.shape[1]
        Z = self._linear.expand(X)
        scaler = StandardScaler().fit(Z)
        Zs = scaler.transform(Z)
        y_mean = y.mean()
        residual = y - y_mean

        p = Zs.shape[1]
        beta = np.zeros(p)
        col_sq = (Zs ** 2).sum(axis=0) / n
        active = col_sq > 0

        converged = False
        max_step = np.inf
        sweep = 0
        for sweep in range(1, self.max_iter + 1):
            max_step = 0.0
            for j in np.flatnonzero(active):
                old = beta[j]
                rho = Zs[:, j] @ residual / n + col_sq[j] * old
                new = soft_threshold(rho, self.strength) / col_sq[j]
                if new != old:
                    residual -= Zs[:, j] * (new - old)
                    beta[j] = new
                    max_step = max(max_step, abs(new - old))
            if max_step < self.tol:
                converged = True
                break

        if not converged:
            logger.warning(
                f"lasso did not converge in {self.max_iter} sweeps "
                f"(last step {max_step:.3e}); keeping the last iterate"
            )
        self.info.converged = converged
        self.info.n_iter = sweep
        self.info.achieved = float(max_step)

        w = beta / scaler.scale_
        self._linear.weights = w
        self._linear.intercept = float(y_mean - scaler.mean_ @ w)
        return self

    def predict(self, X) -> np.ndarray:
        return self._linear.predict(X)

    @property
    def weights(self) -> np.ndarray:
        return self._linear.weights

    @property
    def intercept(self) -> float:
        return self._linear.intercept

    def to_params(self) -> LassoParams:
        return LassoParams(
            degree=self.degree,
            n_features=self._linear.n_features,
            strength=self.strength,
            weights=[float(w) for w in self._linear.weights],
            intercept=self._linear.intercept,
            converged=self.info.converged,
            n_iter=self.info.n_iter,
        )

    @classmethod
    def from_params(cls, params: LassoParams) -> "LassoModel":
        model = cls(params.strength, params.degree)
        model._linear = LinearModel.from_params(
            LinearParams(
                degree=params.degree,
                n_features=params.n_features,
                weights=params.weights,
                intercept=params.intercept,
            )
        )
        model.info.converged = params.converged
        model.info.n_iter = params.n_iter
        return model
