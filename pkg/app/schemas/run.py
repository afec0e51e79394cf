"""Pydantic schemas for pipeline runs, reports and benchmark tables."""
from pathlib import Path

from pydantic import BaseModel, Field, field_validator

from app.models.enums import BackendMode
from app.schemas.learn import ModelDocument
from app.schemas.metrics import ErrorReport
from app.schemas.simulation import NoiseModel


# ============== Run Configuration ==============

class RunConfig(BaseModel):
    """Inputs of one predict -> fragment -> execute -> reconstruct run."""
    circuit_path: Path
    model_path: Path
    threshold: float = Field(default=50.0, gt=0, le=100)
    max_cut: int = Field(default=2, ge=1)
    max_depth: int = Field(default=8, ge=0)
    shots: int = Field(default=128, ge=1)
    noise_path: Path | None = None
    seed: int = 7
    backend: BackendMode = BackendMode.NOISY_SHOTS
    out_dir: Path = Path("runs")
    plan_path: Path | None = None

    @field_validator("backend", mode="before")
    @classmethod
    def normalize_backend(cls, v):
        return v.lower() if isinstance(v, str) else v


# ============== Report Schemas ==============

class NodeReport(BaseModel):
    id: str
    level: int
    n_qubits: int
    predicted_error: float
    is_leaf: bool
    unsplittable: bool = False
    cut_label: str | None = None
    cut_points: list[str] = Field(default_factory=list)
    measured: ErrorReport | None = None


class ReconstructionReport(BaseModel):
    exact: bool
    run_count: int
    clipped_mass: float
    unsplittable_leaves: list[str] = Field(default_factory=list)


class RunReport(BaseModel):
    """Deterministic run payload; wall-clock timings live beside it, never inside."""
    circuit: str
    n_qubits: int
    backend: BackendMode
    shots: int
    seed: int
    threshold: float
    max_cut: int
    noise: NoiseModel
    model_family: str
    root_predicted_error: float
    nodes: list[NodeReport]
    full_circuit: ErrorReport | None = None
    reconstructed: ErrorReport | None = None
    reduction_percent: float | None = None
    reconstruction: ReconstructionReport


class RunOutput(BaseModel):
    report: RunReport
    timings: dict[str, float] = Field(default_factory=dict)
    files: dict[str, str] = Field(default_factory=dict)


# ============== Study Schemas ==============

class CutStudyRow(BaseModel):
    """One cut candidate evaluated end to end."""
    index: int
    label: str
    cut_points: list[str]
    k: int
    d: int
    e_p1: float
    e_p2: float
    distance: float
    measured_p1: float | None = None
    measured_p2: float | None = None
    reconstructed_error: float | None = None
    selected: bool = False


class BenchRow(BaseModel):
    circuit: str
    n_qubits: int
    leaves: int
    full_error: float
    reconstructed_error: float
    full_fidelity: float
    reconstructed_fidelity: float
    reduction_percent: float | None = None


class BenchSummary(BaseModel):
    rows: list[BenchRow]
    mean_reduction_percent: float | None = None


# ============== API Schemas ==============

class FragmentationRequest(BaseModel):
    qasm: str
    model: ModelDocument
    threshold: float = Field(default=50.0, gt=0, le=100)
    max_cut: int = Field(default=2, ge=1)
    max_depth: int = Field(default=8, ge=0)


class CutsRequest(BaseModel):
    qasm: str
    max_cut: int = Field(default=2, ge=1)


class CutCandidateResponse(BaseModel):
    cut_points: list[str]
    label: str
    k: int
    d: int
    upstream_qubits: list[int]
    downstream_qubits: list[int]


class CandidateListResponse(BaseModel):
    count: int
    candidates: list[CutCandidateResponse]


class RunRequest(BaseModel):
    qasm: str
    model: ModelDocument
    threshold: float = Field(default=50.0, gt=0, le=100)
    max_cut: int = Field(default=2, ge=1)
    max_depth: int = Field(default=8, ge=0)
    shots: int = Field(default=128, ge=1)
    noise: NoiseModel | None = None
    seed: int = 7
    backend: BackendMode = BackendMode.NOISY_SHOTS
