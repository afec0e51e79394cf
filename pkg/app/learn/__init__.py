"""Regression model package."""
from app.learn.base import ErrorModel, FitInfo, check_design, polynomial_expansion
from app.learn.forest import ForestModel, RegressionTree
from app.learn.lasso import LassoModel
from app.learn.linear import LinearModel
from app.learn.svr import SVRModel, dual_objective, kernel_matrix
from app.errors import ModelError
from app.models.enums import ModelFamily

__all__ = [
    "ErrorModel",
    "FitInfo",
    "ForestModel",
    "LassoModel",
    "LinearModel",
    "RegressionTree",
    "SVRModel",
    "check_design",
    "dual_objective",
    "kernel_matrix",
    "polynomial_expansion",
    "get_model",
    "model_from_params",
]

_FAMILIES: dict[ModelFamily, type[ErrorModel]] = {
    ModelFamily.LINEAR: LinearModel,
    ModelFamily.LASSO: LassoModel,
    ModelFamily.FOREST: ForestModel,
    ModelFamily.SVR: SVRModel,
}


def get_model(family: ModelFamily | str, **kwargs) -> ErrorModel:
    """
    Build an unfitted model of the given family.

    Keyword arguments go to the family's constructor.
    """
    try:
        cls = _FAMILIES[ModelFamily(family)]
    except ValueError as exc:
        raise ModelError(f"unknown model family: {family}") from exc
    return cls(**kwargs)


def model_from_params(params) -> ErrorModel:
    """Rebuild a fitted model from its parameter document."""
    return _FAMILIES[ModelFamily(params.family)].from_params(params)
