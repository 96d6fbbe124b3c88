"""HTTP facade over the reduction service.

Routes delegate to the handlers in :mod:`quadisrk.service`; numerical
failures surface as 422 responses carrying the error class name and
message, so remote clients can distinguish usage problems from solver
problems the same way local callers do.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__, schemas, service
from .errors import QuadISRKError

__all__ = ["create_app"]


def create_app() -> FastAPI:
    app = FastAPI(
        title="quadisrk",
        version=__version__,
        description="Sample-based and intrusive model order reduction service.",
    )

    @app.exception_handler(QuadISRKError)
    async def _numerical_error(request: Request, exc: QuadISRKError) -> JSONResponse:
        return JSONResponse(
            status_code=422,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/reduce", response_model=schemas.ReduceResponse)
    def reduce(req: schemas.ReduceRequest) -> schemas.ReduceResponse:
        return service.reduce_endpoint(req)

    @app.post("/sweep", response_model=schemas.SweepResponse)
    def sweep(req: schemas.SweepRequest) -> schemas.SweepResponse:
        return service.sweep_endpoint(req)

    @app.post("/validate", response_model=schemas.ValidateResponse)
    def validate(req: schemas.ValidateRequest) -> schemas.ValidateResponse:
        return service.validate_endpoint(req)

    @app.post("/sample-export", response_model=schemas.SampleExportResponse)
    def sample_export(req: schemas.SampleExportRequest) -> schemas.SampleExportResponse:
        return service.sample_export_endpoint(req)

    return app
