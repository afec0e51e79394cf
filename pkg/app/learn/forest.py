"""Random forest regression: bootstrap-aggregated variance-reduction trees."""
import logging
from dataclasses import dataclass, field

import numpy as np

from app.config.settings import get_settings
from app.errors import ModelError
from app.learn.base import ErrorModel, check_design
from app.schemas.learn import ForestParams, TreeParams

logger = logging.getLogger(__name__)

LEAF = -1


@dataclass
class RegressionTree:
    """Flat-array binary tree; rows with ``x[feature] < threshold`` go left."""
    feature: list[int] = field(default_factory=list)
    threshold: list[float] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    value: list[float] = field(default_factory=list)

    def _add(self, value: float) -> int:
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(float(value))
        return len(self.value) - 1

    @staticmethod
    def best_split(
        X: np.ndarray, y: np.ndarray, features
    ) -> tuple[int, float, float] | None:
        """
        Lowest total squared error split over ``features``.

        Candidate thresholds are midpoints between consecutive distinct values.
        Ties keep the first candidate in (feature, threshold) order.

        Returns:
            (feature, threshold, sse) or None when no split reduces the error
        """
        n = y.shape[0]
        parent_sse = float(((y - y.mean()) ** 2).sum())
        best: tuple[int, float, float] | None = None
        best_sse = parent_sse - 1e-12 * max(1.0, parent_sse)
        for f in sorted(int(f) for f in features):
            order = np.argsort(X[:, f], kind="stable")
            xs, ys = X[order, f], y[order]
            csum = np.cumsum(ys)
            csq = np.cumsum(ys ** 2)
            total, total_sq = csum[-1], csq[-1]
            for i in range(1, n):
                if xs[i] == xs[i - 1]:
                    continue
                n_left, n_right = i, n - i
                left_sse = csq[i - 1] - csum[i - 1] ** 2 / n_left
                right_sum = total - csum[i - 1]
                right_sse = (total_sq - csq[i - 1]) - right_sum ** 2 / n_right
                sse = float(left_sse + right_sse)
                if sse < best_sse:
                    best_sse = sse
                    best = (f, float((xs[i - 1] + xs[i]) / 2), sse)
        return best

    @classmethod
    def grow(
        cls,
        X: np.ndarray,
        y: np.ndarray,
        max_depth: int,
        max_features: int | None,
        rng: np.random.Generator,
    ) -> "RegressionTree":
        tree = cls()
        n_features = X.shape[1]
        k = n_features if max_features is None else min(max_features, n_features)

        def build(rows: np.ndarray, depth: int) -> int:
            node = tree._add(y[rows].mean())
            if depth >= max_depth or rows.shape[0] < 2:
                return node
            features = rng.choice(n_features, size=k, replace=False) if k < n_features else range(n_features)
            split = cls.best_split(X[rows], y[rows], features)
            if split is None:
                return node
            f, threshold, _ = split
            mask = X[rows, f] < threshold
            tree.feature[node] = f
            tree.threshold[node] = threshold
            tree.left[node] = build(rows[mask], depth + 1)
            tree.right[node] = build(rows[~mask], depth + 1)
            return node

        build(np.arange(X.shape[0]), 0)
        return tree

    def predict(self, X: np.ndarray) -> np.ndarray:
        out = np.empty(X.shape[0])
        for r, x in enumerate(X):
            node = 0
            while self.feature[node] != LEAF:
                f = self.feature[node]
                node = self.left[node] if x[f] < self.threshold[node] else self.right[node]
            out[r] = self.value[node]
        return out

    def to_params(self) -> TreeParams:
        return TreeParams(
            feature=self.feature,
            threshold=self.threshold,
            left=self.left,
            right=self.right,
            value=self.value,
        )

    @classmethod
    def from_params(cls, params: TreeParams) -> "RegressionTree":
        return cls(
            list(params.feature),
            list(params.threshold),
            list(params.left),
            list(params.right),
            list(params.value),
        )


class ForestModel(ErrorModel):
    """Mean of ``n_trees`` regression trees.

    Tree m draws its bootstrap sample and per-node feature subsets from
    ``SeedSequence(seed, spawn_key=(m,))``.
    """

    family = "forest"

    def __init__(
        self,
        n_trees: int | None = None,
        max_depth: int | None = None,
        max_features: int | None = None,
        seed: int = 7,
        bootstrap: bool = True,
    ):
        super().__init__()
        settings = get_settings()
        self.n_trees = settings.forest_trees if n_trees is None else n_trees
        self.max_depth = settings.forest_max_depth if max_depth is None else max_depth
        if self.n_trees < 1:
            raise ModelError(f"a forest needs at least one tree, got {self.n_trees}")
        self.max_features = max_features
        self.seed = seed
        self.bootstrap = bootstrap
        self.trees: list[RegressionTree] = []
        self.tree_seeds: list[list[int]] = []

    def fit(self, X, y) -> "ForestModel":
        X, y = check_design(X, y)
        n = X.shape[0]
        self.trees, self.tree_seeds = [], []
        for m in range(self.n_trees):
            seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(m,))
            rng = np.random.default_rng(seq)
            rows = rng.integers(0, n, size=n) if self.bootstrap else np.arange(n)
            tree = RegressionTree.grow(X[rows], y[rows], self.max_depth, self.max_features, rng)
            self.trees.append(tree)
            self.tree_seeds.append([self.seed, m])
        logger.debug(
            f"forest fitted: {self.n_trees} trees, "
            f"{sum(len(t.value) for t in self.trees)} nodes"
        )
        return self

    def predict(self, X) -> np.ndarray:
        if not self.trees:
            raise ModelError("forest is not fitted")
        X, _ = check_design(X)
        return np.mean([tree.predict(X) for tree in self.trees], axis=0)

    def to_params(self) -> ForestParams:
        return ForestParams(
            trees=[t.to_params() for t in self.trees],
            tree_seeds=self.tree_seeds,
            max_depth=self.max_depth,
            max_features=self.max_features,
            bootstrap=self.bootstrap,
        )

    @classmethod
    def from_params(cls, params: ForestParams) -> "ForestModel":
        model = cls(
            n_trees=len(params.trees),
            max_depth=params.max_depth,
            max_features=params.max_features,
            seed=params.tree_seeds[0][0] if params.tree_seeds else 7,
            bootstrap=params.bootstrap,
        )
        model.trees = [RegressionTree.from_params(t) for t in params.trees]
        model.tree_seeds = [list(s) for s in params.tree_seeds]
        return model
