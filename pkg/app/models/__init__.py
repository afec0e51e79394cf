"""Domain models package."""
from app.models.enums import (
    FEATURE_COLUMNS,
    FEATURE_GATE_ORDER,
    LABEL_COLUMN,
    BackendMode,
    GateKind,
    InitState,
    ModelFamily,
    Observable,
    PauliBasis,
)
from app.models.circuit import FeatureVector, Gate, QuantumCircuit, WireCutPoint
from app.models.distribution import OutcomeDistribution
from app.models.fragment import (
    CutBoundarySpec,
    CutCandidate,
    FragmentationTree,
    FragmentNode,
    FragmentRunSet,
    ReconstructionTerm,
    ScoredCut,
)

__all__ = [
    "FEATURE_COLUMNS",
    "FEATURE_GATE_ORDER",
    "LABEL_COLUMN",
    "BackendMode",
    "GateKind",
    "InitState",
    "ModelFamily",
    "Observable",
    "PauliBasis",
    "FeatureVector",
    "Gate",
    "QuantumCircuit",
    "WireCutPoint",
    "OutcomeDistribution",
    "CutBoundarySpec",
    "CutCandidate",
    "FragmentationTree",
    "FragmentNode",
    "FragmentRunSet",
    "ReconstructionTerm",
    "ScoredCut",
]
