"""Pydantic schemas for datasets, grids and persisted regression models."""
from typing import Annotated, Literal, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from app.models.enums import FEATURE_COLUMNS, ModelFamily


# ============== Dataset Schemas ==============

class DatasetRow(BaseModel):
    """Feature values in column order plus the E_mean label (percent)."""
    features: tuple[int, ...]
    label: float = Field(ge=0)
    name: str | None = None

    model_config = {"frozen": True}

    @field_validator("features")
    @classmethod
    def validate_features(cls, v: tuple[int, ...]) -> tuple[int, ...]:
        if len(v) != len(FEATURE_COLUMNS):
            raise ValueError(f"expected {len(FEATURE_COLUMNS)} features, got {len(v)}")
        if any(x < 0 for x in v):
            raise ValueError("feature values must be nonnegative")
        return v


# ============== Grid Schemas ==============

class GridStage(BaseModel):
    c_values: list[float] = Field(min_length=1)
    gamma_values: list[float] = Field(min_length=1)

    @field_validator("c_values", "gamma_values")
    @classmethod
    def validate_positive(cls, v: list[float]) -> list[float]:
        if any(x <= 0 for x in v):
            raise ValueError("grid values must be positive")
        return v

    def cells(self) -> list[tuple[float, float]]:
        return [(c, g) for c in self.c_values for g in self.gamma_values]


class GridSpec(BaseModel):
    """Coarse then fine (C, gamma) grid with k-fold cross-validation."""
    coarse: GridStage
    fine: GridStage
    folds: int = Field(default=5, ge=2)
    seed: int = 7
    epsilon: float = Field(default=0.1, ge=0)

    @classmethod
    def coarse_to_fine(cls, folds: int = 5, seed: int = 7) -> "GridSpec":
        return cls(
            coarse=GridStage(
                c_values=[1.0] + [float(c) for c in range(1000, 50001, 1000)],
                gamma_values=[1.0, 2.0, 3.0],
            ),
            fine=GridStage(
                c_values=[float(c) for c in range(10, 1001, 10)],
                gamma_values=[0.001, 0.01, 0.1, 1.0],
            ),
            folds=folds,
            seed=seed,
        )

    @classmethod
    def single(cls, c: float, gamma: float, folds: int = 2) -> "GridSpec":
        stage = GridStage(c_values=[c], gamma_values=[gamma])
        return cls(coarse=stage, fine=stage, folds=folds)


class GridCell(BaseModel):
    c: float
    gamma: float
    cv_rmse: float
    stage: Literal["coarse", "fine"]


class GridResult(BaseModel):
    best_c: float
    best_gamma: float
    best_rmse: float
    coarse_best: GridCell
    fine_best: GridCell
    cells: list[GridCell]


# ============== Model Parameter Schemas ==============

class LinearParams(BaseModel):
    family: Literal["linear"] = "linear"
    degree: int = Field(default=1, ge=1)
    n_features: int = len(FEATURE_COLUMNS)
    weights: list[float]
    intercept: float = 0.0
    ridge: float = 0.0


class LassoParams(BaseModel):
    family: Literal["lasso"] = "lasso"
    degree: int = Field(default=1, ge=1)
    n_features: int = len(FEATURE_COLUMNS)
    strength: float = Field(ge=0)
    weights: list[float]
    intercept: float = 0.0
    converged: bool = True
    n_iter: int = 0


class TreeParams(BaseModel):
    """Flat node arrays; ``feature == -1`` marks a leaf."""
    feature: list[int]
    threshold: list[float]
    left: list[int]
    right: list[int]
    value: list[float]

    @model_validator(mode="after")
    def validate_arrays(self) -> "TreeParams":
        n = len(self.feature)
        if n == 0:
            raise ValueError("a tree needs at least one node")
        if not all(len(a) == n for a in (self.threshold, self.left, self.right, self.value)):
            raise ValueError("tree node arrays differ in length")
        return self


class ForestParams(BaseModel):
    family: Literal["forest"] = "forest"
    trees: list[TreeParams] = Field(min_length=1)
    tree_seeds: list[list[int]]
    max_depth: int
    max_features: int | None = None
    bootstrap: bool = True


class SVRParams(BaseModel):
    family: Literal["svr"] = "svr"
    support_vectors: list[list[float]]
    dual_coef: list[float]
    bias: float
    c: float = Field(gt=0)
    gamma: float = Field(gt=0)
    epsilon: float = Field(ge=0)
    scaler_mean: list[float]
    scaler_scale: list[float]
    converged: bool = True
    kkt_violation: float = 0.0
    dual_objective: float = 0.0

    @model_validator(mode="after")
    def validate_box(self) -> "SVRParams":
        if len(self.support_vectors) != len(self.dual_coef):
            raise ValueError("support vectors and dual coefficients differ in length")
        if any(abs(b) > self.c * (1 + 1e-9) for b in self.dual_coef):
            raise ValueError("dual coefficient outside [-C, C]")
        return self


ModelParams = Annotated[
    Union[LinearParams, LassoParams, ForestParams, SVRParams],
    Field(discriminator="family"),
]


class ModelDocument(BaseModel):
    """Self-describing persisted model."""
    schema_version: int
    feature_columns: list[str] = Field(default_factory=lambda: list(FEATURE_COLUMNS))
    params: ModelParams

    @property
    def family(self) -> ModelFamily:
        return ModelFamily(self.params.family)


# ============== Prediction API Schemas ==============

class PredictionRequest(BaseModel):
    qasm: str
    model: ModelDocument


class PredictionResponse(BaseModel):
    predicted_error: float
    family: ModelFamily
    features: dict[str, int]


# ============== Shot Sweep Schemas ==============

class ShotSweepResult(BaseModel):
    """Mean E_mean per log2(shots) exponent and the fitted polynomial curve."""
    best_exponent: int
    exponents: list[int]
    mean_errors: list[float]
    coefficients: list[float] = Field(default_factory=list)  # highest power first
    fitted: list[float] = Field(default_factory=list)

    @property
    def best_shots(self) -> int:
        return 2 ** self.best_exponent
