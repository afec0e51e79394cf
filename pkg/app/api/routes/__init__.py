"""API routes module."""
from app.api.routes.circuits import router as circuits_router
from app.api.routes.fragmentations import router as fragmentations_router
from app.api.routes.predictions import router as predictions_router
from app.api.routes.runs import router as runs_router

__all__ = [
    "circuits_router",
    "fragmentations_router",
    "predictions_router",
    "runs_router",
]
