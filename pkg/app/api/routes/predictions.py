from fastapi import APIRouter

from app.models.enums import ModelFamily
from app.parsing.qasm import parse_qasm
from app.schemas.learn import PredictionRequest, PredictionResponse
from app.services.features import extract_features
from app.services.training import TrainingService

router = APIRouter()


@router.post("", response_model=PredictionResponse)
async def predict_error(payload: PredictionRequest):
    """Predicted error percent of a circuit under a posted model document."""
    model = TrainingService.from_document(payload.model)
    circuit = parse_qasm(payload.qasm)
    return PredictionResponse(
        predicted_error=TrainingService.predict_error(model, circuit),
        family=ModelFamily(model.family),
        features=extract_features(circuit).as_dict(),
    )
