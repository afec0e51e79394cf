"""Epsilon-insensitive support vector regression with an RBF kernel.

The dual is solved in the signed form beta = alpha - alpha*:

    min  1/2 beta' K beta - y' beta + eps * sum |beta_i|
    s.t. sum beta_i = 0,  -C <= beta_i <= C

by sequential minimal optimization: each step moves the maximal violating
pair along e_i - e_j and minimizes the piecewise quadratic exactly.
"""
import logging

import numpy as np
from sklearn.metrics.pairwise import rbf_kernel
from sklearn.preprocessing import StandardScaler

from app.config.settings import get_settings
from app.errors import ConvergenceError, ModelError
from app.learn.base import ErrorModel, check_design
from app.schemas.learn import SVRParams

logger = logging.getLogger(__name__)

# |beta| below this (relative to C) counts as zero
_ZERO = 1e-12


def kernel_matrix(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    """K(a, b) = exp(-gamma * ||a - b||^2)."""
    return rbf_kernel(np.atleast_2d(A), np.atleast_2d(B), gamma=gamma)


def dual_objective(beta: np.ndarray, K: np.ndarray, y: np.ndarray, epsilon: float) -> float:
    return float(0.5 * beta @ K @ beta - y @ beta + epsilon * np.abs(beta).sum())


class SVRModel(ErrorModel):
    family = "svr"

    def __init__(
        self,
        c: float = 1.0,
        gamma: float = 1.0,
        epsilon: float | None = None,
        tol: float | None = None,
        max_iter: int | None = None,
        strict: bool = False,
    ):
        super().__init__()
        settings = get_settings()
        if c <= 0 or gamma <= 0:
            raise ModelError(f"C and gamma must be positive, got C={c}, gamma={gamma}")
        self.c = float(c)
        self.gamma = float(gamma)
        self.epsilon = settings.svr_epsilon if epsilon is None else float(epsilon)
        if self.epsilon < 0:
            raise ModelError(f"epsilon must be >= 0, got {self.epsilon}")
        self.tol = settings.svr_tol if tol is None else tol
        self.max_iter = settings.svr_max_iter if max_iter is None else max_iter
        self.strict = strict

        self.scaler: StandardScaler | None = None
        self.support_vectors: np.ndarray | None = None
        self.dual_coef: np.ndarray | None = None
        self.bias = 0.0
        self.objective = 0.0
        # Full dual vector of the last fit, kept for diagnostics
        self.beta: np.ndarray | None = None

    # ---- KKT bookkeeping ----

    def _bounds(self, beta: np.ndarray, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Interval [lo_i, hi_i] the bias must lie in for point i to satisfy KKT."""
        eps, c = self.epsilon, self.c
        tiny = _ZERO * c
        lo = np.full_like(r, -np.inf)
        hi = np.full_like(r, np.inf)

        zero = np.abs(beta) <= tiny
        pos = beta > tiny
        neg = beta < -tiny
        at_upper = beta >= c - tiny
        at_lower = beta <= -c + tiny

        lo[zero] = r[zero] - eps
        hi[zero] = r[zero] + eps
        # 0 < beta < C pins b = r - eps; beta = C only bounds it from above
        lo[pos & ~at_upper] = r[pos & ~at_upper] - eps
        hi[pos] = r[pos] - eps
        lo[neg] = r[neg] + eps
        hi[neg & ~at_lower] = r[neg & ~at_lower] + eps
        return lo, hi

    def _pair_step(self, beta, r, K, i: int, j: int) -> float:
        """Exact minimizer t in [0, H] of the objective along beta + t (e_i - e_j)."""
        c, eps = self.c, self.epsilon
        bi, bj = beta[i], beta[j]
        upper = min(c - bi, c + bj)
        if upper <= 0:
            return 0.0
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        slope = r[j] - r[i]

        def phi(t: float) -> float:
            return (
                slope * t + 0.5 * eta * t * t
                + eps * (abs(bi + t) + abs(bj - t) - abs(bi) - abs(bj))
            )

        points = sorted({0.0, upper, *(p for p in (-bi, bj) if 0.0 < p < upper)})
        candidates = list(points)
        if eta > 1e-12:
            for a, b in zip(points[:-1], points[1:]):
                mid = 0.5 * (a + b)
                s_i = np.sign(bi + mid)
                s_j = np.sign(bj - mid)
                t = -(slope + eps * (s_i - s_j)) / eta
                candidates.append(min(max(t, a), b))
        return min(candidates, key=lambda t: (phi(t), t))

    # ---- fitting ----

    def fit(self, X, y) -> "SVRModel":
        X, y = check_design(X, y)
        self.scaler = StandardScaler().fit(X)
        Xs = self.scaler.transform(X)
        K = kernel_matrix(Xs, Xs, self.gamma)
        n = y.shape[0]

        beta = np.zeros(n)
        r = y.copy()  # r = y - K beta
        violation = np.inf
        converged = False
        it = 0
        for it in range(1, self.max_iter + 1):
            lo, hi = self._bounds(beta, r)
            i = int(np.argmax(lo))
            j = int(np.argmin(hi))
            violation = float(lo[i] - hi[j])
            if violation < self.tol:
                converged = True
                break
            t = self._pair_step(beta, r, K, i, j)
            if t <= 0.0:
                logger.debug(f"SMO stalled at iteration {it} with violation {violation:.3e}")
                break
            new_i = min(beta[i] + t, self.c)
            new_j = max(beta[j] - t, -self.c)
            r -= (new_i - beta[i]) * K[:, i] + (new_j - beta[j]) * K[:, j]
            beta[i], beta[j] = new_i, new_j

        lo, hi = self._bounds(beta, r)
        lo_max, hi_min = float(lo.max()), float(hi.min())
        violation = max(0.0, lo_max - hi_min)
        if not converged:
            message = f"SMO stopped after {it} iterations"
            if self.strict:
                raise ConvergenceError(message, violation)
            logger.warning(f"{message}; KKT violation {violation:.3e}, keeping the last iterate")

        if np.isfinite(lo_max) and np.isfinite(hi_min):
            self.bias = 0.5 * (lo_max + hi_min)
        elif np.isfinite(lo_max):
            self.bias = lo_max
        elif np.isfinite(hi_min):
            self.bias = hi_min
        else:
            self.bias = float(np.mean(r))

        self.info.converged = converged
        self.info.n_iter = it
        self.info.achieved = violation
        self.beta = beta
        self.objective = dual_objective(beta, K, y, self.epsilon)
        support = np.abs(beta) > _ZERO * self.c
        self.support_vectors = Xs[support]
        self.dual_coef = beta[support]
        return self

    def decision(self, Xs: np.ndarray) -> np.ndarray:
        if self.support_vectors.shape[0] == 0:
            return np.full(Xs.shape[0], self.bias)
        return kernel_matrix(Xs, self.support_vectors, self.gamma) @ self.dual_coef + self.bias

    def predict(self, X) -> np.ndarray:
        if self.scaler is None:
            raise ModelError("SVR model is not fitted")
        X, _ = check_design(X)
        return self.decision(self.scaler.transform(X))

    def to_params(self) -> SVRParams:
        return SVRParams(
            support_vectors=self.support_vectors.tolist(),
            dual_coef=[float(b) for b in self.dual_coef],
            bias=self.bias,
            c=self.c,
            gamma=self.gamma,
            epsilon=self.epsilon,
            scaler_mean=[float(m) for m in self.scaler.mean_],
            scaler_scale=[float(s) for s in self.scaler.scale_],
            converged=self.info.converged,
            kkt_violation=self.info.achieved,
            dual_objective=self.objective,
        )

    @classmethod
    def from_params(cls, params: SVRParams) -> "SVRModel":
        model = cls(params.c, params.gamma, params.epsilon)
        scaler = StandardScaler()
        scaler.mean_ = np.asarray(params.scaler_mean, dtype=float)
        scaler.scale_ = np.asarray(params.scaler_scale, dtype=float)
        scaler.var_ = scaler.scale_ ** 2
        scaler.n_features_in_ = scaler.mean_.shape[0]
        model.scaler = scaler
        n_features = scaler.mean_.shape[0]
        model.support_vectors = np.asarray(params.support_vectors, dtype=float).reshape(-1, n_features)
        model.dual_coef = np.asarray(params.dual_coef, dtype=float)
        model.bias = params.bias
        model.objective = params.dual_objective
        model.info.converged = params.converged
        model.info.achieved = params.kkt_violation
        return model
