"""Pydantic schemas for error reports and model scorecards."""
from pydantic import BaseModel, Field


# ============== Error Schemas ==============

class ErrorReport(BaseModel):
    """Distance between an ideal and an observed distribution.

    E_mean and E_rmse are on the 0-100 scale, Hellinger values on 0-1.
    """
    e_mean: float = Field(ge=0)
    e_rmse: float = Field(ge=0)
    hellinger_distance: float = Field(ge=0, le=1)
    hellinger_fidelity: float = Field(ge=0, le=1)
    n_states: int = Field(ge=0)


# ============== Model Quality Schemas ==============

class Scorecard(BaseModel):
    """Regression quality on held-out data.

    ``r2`` uses raw sums of squares of the actual values; ``r2_centered`` is
    the usual mean-centered coefficient of determination.
    """
    rmse: float
    mse: float
    mean_error: float
    r2: float
    r2_centered: float | None = None
    adjusted_r2: float | None = None
    n_samples: int
    n_features: int
