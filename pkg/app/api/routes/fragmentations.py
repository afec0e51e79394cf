import json

from fastapi import APIRouter

from app.parsing.qasm import parse_qasm
from app.schemas.circuit import FragmentationResponse
from app.schemas.run import FragmentationRequest
from app.services.fragmentation import FragmentationService
from app.services.training import TrainingService

router = APIRouter()


@router.post("", response_model=FragmentationResponse)
async def fragment_circuit(payload: FragmentationRequest):
    model = TrainingService.from_document(payload.model)
    tree = FragmentationService.fragment_recursively(
        parse_qasm(payload.qasm),
        TrainingService.make_predictor(model),
        payload.threshold,
        payload.max_cut,
        payload.max_depth,
    )
    return json.loads(FragmentationService.tree_to_json(tree))
