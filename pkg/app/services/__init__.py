"""Business logic services package."""
from app.services.corpus import CorpusService, corpus_service
from app.services.dataset import DatasetService, dataset_service
from app.services.features import CircuitAnalysisService, circuit_analysis_service
from app.services.fragmentation import FragmentationService, fragmentation_service
from app.services.metrics import MetricsService, metrics_service
from app.services.pipeline import PipelineService, pipeline_service
from app.services.reconstruction import FoldResult, ReconstructionService, reconstruction_service
from app.services.simulator import Backend, SimulatorService, simulator_service
from app.services.training import TrainingService, training_service

__all__ = [
    "CorpusService",
    "corpus_service",
    "DatasetService",
    "dataset_service",
    "CircuitAnalysisService",
    "circuit_analysis_service",
    "FragmentationService",
    "fragmentation_service",
    "MetricsService",
    "metrics_service",
    "PipelineService",
    "pipeline_service",
    "FoldResult",
    "ReconstructionService",
    "reconstruction_service",
    "Backend",
    "SimulatorService",
    "simulator_service",
    "TrainingService",
    "training_service",
]
