from pydantic import BaseModel, Field


class CircuitRequest(BaseModel):
    """OpenQASM 2.0 source text."""
    qasm: str
    name: str | None = None


class FeaturesResponse(BaseModel):
    name: str | None = None
    n_qubits: int
    depth: int
    total_gates: int
    features: dict[str, int]
    cut_positions: int = Field(ge=0)


class FragmentationResponse(BaseModel):
    threshold: float
    max_cut: int
    max_depth: int
    summary: dict
    root: dict
