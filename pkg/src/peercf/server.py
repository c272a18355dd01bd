"""HTTP JSON API over :class:`AnalysisService`.

Routes, bodies, and error shapes are a stable contract: every error body is
``{"code": <machine string>, "message": <human string>}``. Handlers share
the immutable service state and are safe to run concurrently.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse, Response
from pydantic import BaseModel

from .config import ServiceConfig
from .errors import PeercfError
from .service import AnalysisService, dumps

_STATUS = {
    "unknown_unit": 404,
    "no_geometry": 404,
    "insufficient_data": 422,
}


class JsonResponse(Response):
    media_type = "application/json"

    def render(self, content) -> bytes:
        return dumps(content).encode("utf-8")


class InterventionRequest(BaseModel):
    unit_id: str
    attribute: str
    value: float
    n: int | None = None


class ExplainRequest(BaseModel):
    unit_id: str
    n: int | None = None
    n_samples: int | None = None
    kernel_width: float | None = None
    seed: int | None = None


class RecommendRequest(BaseModel):
    unit_id: str
    target: float
    n: int | None = None
    grid_size: int | None = None


def create_app(source: ServiceConfig | AnalysisService) -> FastAPI:
    service = source if isinstance(source, AnalysisService) else AnalysisService(source)
    app = FastAPI(title="peercf", docs_url=None, redoc_url=None)
    app.state.service = service
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(PeercfError)
    async def domain_error(_: Request, exc: PeercfError):
        return JsonResponse(
            {"code": exc.code, "message": exc.message},
            status_code=_STATUS.get(exc.code, 400),
        )

    @app.exception_handler(RequestValidationError)
    async def validation_error(_: Request, exc: RequestValidationError):
        return JsonResponse(
            {"code": "bad_request", "message": str(exc.errors()[:1])},
            status_code=400,
        )

    @app.get("/api/config")
    def get_config():
        return JsonResponse(service.config_payload())

    @app.get("/api/units")
    def get_units():
        return JsonResponse(service.units_payload())

    @app.get("/api/units/{unit_id}/neighbors")
    def get_neighbors(unit_id: str, n: int | None = None):
        return JsonResponse(service.neighbors_payload(unit_id, n))

    @app.post("/api/intervene")
    def post_intervene(body: InterventionRequest):
        return JsonResponse(
            service.intervene_payload(body.unit_id, body.attribute, body.value, body.n)
        )

    @app.post("/api/explain/lime")
    def post_lime(body: ExplainRequest):
        return JsonResponse(
            service.lime_payload(
                body.unit_id, body.n, body.n_samples, body.kernel_width, body.seed
            )
        )

    @app.post("/api/explain/shap")
    def post_shap(body: ExplainRequest):
        return JsonResponse(service.shap_payload(body.unit_id, body.n))

    @app.get("/api/explain/global")
    def get_global(n_background: int | None = None):
        return JsonResponse(service.global_payload(n_background))

    @app.post("/api/recommend")
    def post_recommend(body: RecommendRequest):
        return JsonResponse(
            service.recommend_payload(body.unit_id, body.target, body.grid_size, body.n)
        )

    @app.get("/api/geo")
    def get_geo():
        return FileResponse(service.geo_file(), media_type="application/geo+json")

    return app


def serve(config: ServiceConfig, host: str = "127.0.0.1") -> None:
    """Build the app and block serving it (used by `peercf serve`)."""
    import uvicorn

    service = AnalysisService(config)
    print(
        f"loaded {len(service.dataset)} units, "
        f"{len(service.schema.treatments)} treatments",
        flush=True,
    )
    app = create_app(service)
    uvicorn.run(app, host=host, port=config.port, log_level="warning")
