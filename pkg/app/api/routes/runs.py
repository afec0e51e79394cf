from fastapi import APIRouter

from app.parsing.qasm import parse_qasm
from app.schemas.run import RunOutput, RunRequest
from app.schemas.simulation import NoiseModel
from app.services.pipeline import PipelineService
from app.services.training import TrainingService

router = APIRouter()


@router.post("", response_model=RunOutput)
async def run_circuit(payload: RunRequest):
    """Predict, fragment, execute and reconstruct; nothing is written to disk."""
    model = TrainingService.from_document(payload.model)
    noise = (payload.noise or NoiseModel.default()).with_seed(payload.seed)
    backend = PipelineService.make_backend(payload.backend, payload.shots, noise)
    output, _, _ = PipelineService.run_circuit(
        parse_qasm(payload.qasm, name="request"),
        model,
        backend,
        payload.seed,
        payload.threshold,
        payload.max_cut,
        payload.max_depth,
    )
    return output
