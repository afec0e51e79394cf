"""Pydantic schemas package."""
from app.schemas.circuit import CircuitRequest, FeaturesResponse, FragmentationResponse
from app.schemas.learn import (
    DatasetRow,
    ForestParams,
    GridCell,
    GridResult,
    GridSpec,
    GridStage,
    LassoParams,
    LinearParams,
    ModelDocument,
    ModelParams,
    PredictionRequest,
    PredictionResponse,
    ShotSweepResult,
    SVRParams,
    TreeParams,
)
from app.schemas.metrics import ErrorReport, Scorecard
from app.schemas.run import (
    BenchRow,
    BenchSummary,
    CandidateListResponse,
    CutCandidateResponse,
    CutsRequest,
    CutStudyRow,
    FragmentationRequest,
    NodeReport,
    ReconstructionReport,
    RunConfig,
    RunOutput,
    RunReport,
    RunRequest,
)
from app.schemas.simulation import (
    DistributionResponse,
    NoiseModel,
    SimulateRequest,
    load_noise_model,
)

__all__ = [
    # Circuit schemas
    "CircuitRequest",
    "FeaturesResponse",
    "FragmentationResponse",
    # Learning schemas
    "DatasetRow",
    "ForestParams",
    "GridCell",
    "GridResult",
    "GridSpec",
    "GridStage",
    "LassoParams",
    "LinearParams",
    "ModelDocument",
    "ModelParams",
    "PredictionRequest",
    "PredictionResponse",
    "ShotSweepResult",
    "SVRParams",
    "TreeParams",
    # Metric schemas
    "ErrorReport",
    "Scorecard",
    # Run schemas
    "BenchRow",
    "BenchSummary",
    "CandidateListResponse",
    "CutCandidateResponse",
    "CutsRequest",
    "CutStudyRow",
    "FragmentationRequest",
    "NodeReport",
    "ReconstructionReport",
    "RunConfig",
    "RunOutput",
    "RunReport",
    "RunRequest",
    # Simulation schemas
    "DistributionResponse",
    "NoiseModel",
    "SimulateRequest",
    "load_noise_model",
]
