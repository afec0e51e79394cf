"""Main FastAPI application."""
import logging

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from app.config.settings import get_settings
from app.errors import QFragError

logger = logging.getLogger(__name__)


def create_app() -> FastAPI:
    """Create and configure the FastAPI application."""
    settings = get_settings()

    app = FastAPI(
        title=settings.app_name,
        description="Error-prediction-driven quantum circuit fragmentation",
        version="0.1.0",
    )

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_credentials=True,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(QFragError)
    async def qfrag_error_handler(request: Request, exc: QFragError):
        logger.warning(f"{request.url.path}: {exc}")
        return JSONResponse(
            status_code=422,
            content={"detail": str(exc), "module": exc.module},
        )

    @app.get("/health")
    async def health_check():
        """Health check endpoint."""
        return {"status": "healthy", "app": settings.app_name, "backend": settings.backend}

    from app.api.routes import (
        circuits_router,
        fragmentations_router,
        predictions_router,
        runs_router,
    )
    app.include_router(circuits_router, prefix="/circuits", tags=["Circuits"])
    app.include_router(predictions_router, prefix="/predictions", tags=["Predictions"])
    app.include_router(fragmentations_router, prefix="/fragmentations", tags=["Fragmentation"])
    app.include_router(runs_router, prefix="/runs", tags=["Runs"])

    return app


# Create app instance
app = create_app()


if __name__ == "__main__":
    import uvicorn
    uvicorn.run("app.main:app", host="0.0.0.0", port=8000, reload=True)
