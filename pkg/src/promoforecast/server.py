"""HTTP service exposing one dataset, its models, and the what-if loop.

The process loads a single dataset at startup, builds the feature context
and attribution background once, and serves reads concurrently. Training
runs on a small worker pool and registers finished models atomically under
a key that includes the dataset fingerprint, so a model can never serve
data it was not trained on.
"""

from __future__ import annotations

import argparse
import logging
import os
import threading
from collections import OrderedDict
from datetime import date
from pathlib import Path
from typing import Mapping

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from ._kernels import ACTIVE_BACKEND
from .analytics import normalized_stat_vectors, project_products, top_competitors
from .domain import Dataset, ModelKind
from .explain import make_background
from .features import InsufficientHistory
from .ingest import dataset_fingerprint, load_dataset
from .models import BoostingConfig, ForestConfig, MLPConfig, train_model
from .pipeline import (
    DEFAULT_HORIZON_CAP,
    ForecastContext,
    HorizonError,
    LayoutMismatch,
    UnknownProduct,
    forecast,
    result_to_wire,
)
from .promos import UnrecognizedPromotion
from .whatif import InvalidEdit, promotion_to_wire, run_scenario, scenario_from_wire

__all__ = ["ServerState", "create_app", "main"]

log = logging.getLogger(__name__)

_CONFIG_CLASSES = {
    ModelKind.RANDOM_FOREST: ForestConfig,
    ModelKind.GRADIENT_BOOSTING: BoostingConfig,
    ModelKind.MLP: MLPConfig,
}
_BASELINE_CACHE_LIMIT = 128


class ApiError(Exception):
    """An error with an explicit HTTP status and machine-readable kind."""

    def __init__(self, status: int, kind: str, message: str):
        super().__init__(message)
        self.status = status
        self.kind = kind


class ServerState:
    """Everything one server process owns: the dataset, its feature
    context, the shared attribution background, trained models, and
    training jobs."""

    def __init__(
        self,
        dataset: Dataset,
        horizon_cap: int = DEFAULT_HORIZON_CAP,
        seed: int = 0,
        background_size: int = 64,
        max_workers: int = 2,
    ):
        from concurrent.futures import ThreadPoolExecutor

        self.dataset = dataset
        self.fingerprint = dataset_fingerprint(dataset)
        self.horizon_cap = horizon_cap
        self.seed = seed
        self.context = ForecastContext(dataset, seed=seed)
        self.rows = self.context.training_rows()
        self.background = make_background(self.rows.X, size=background_size, seed=seed)

        self._lock = threading.Lock()
        self._models: dict[tuple[ModelKind, str], object] = {}
        self._jobs: dict[str, dict] = {}
        self._job_counter = 0
        self._baselines: OrderedDict[tuple, object] = OrderedDict()
        self._executor = ThreadPoolExecutor(
            max_workers=max_workers, thread_name_prefix="train"
        )

        self.projection_method: str | None = None
        self.projection: dict[str, tuple[float, float]] = {}
        scored = [p.id for p in dataset.products if p.id in self.context.stats]
        if len(scored) >= 2:
            vectors = normalized_stat_vectors([self.context.stats[pid] for pid in scored])
            proj = project_products(vectors, seed=seed)
            self.projection_method = proj.method
            self.projection = {
                pid: (float(x), float(y)) for pid, (x, y) in zip(scored, proj.coords)
            }

    # -- models and jobs --------------------------------------------------

    def model_for(self, kind: ModelKind):
        with self._lock:
            model = self._models.get((kind, self.fingerprint))
        if model is None:
            raise ApiError(
                404, "UnknownModel",
                f"no trained {kind.value} model; POST /train first",
            )
        return model

    def registered_kinds(self) -> list[str]:
        with self._lock:
            return sorted(kind.value for kind, _ in self._models)

    def submit_training(self, kind: ModelKind, config) -> dict:
        with self._lock:
            self._job_counter += 1
            job = {
                "job_id": f"job-{self._job_counter:04d}",
                "model_kind": kind.value,
                "status": "queued",
                "error": None,
            }
            self._jobs[job["job_id"]] = job
        self._executor.submit(self._run_training, job, kind, config)
        return dict(job)

    def _run_training(self, job: dict, kind: ModelKind, config) -> None:
        with self._lock:
            job["status"] = "running"
        try:
            model = train_model(
                kind, self.rows.X, self.rows.y, config,
                layout_fingerprint=self.context.layout.fingerprint,
            )
            with self._lock:
                self._models[(kind, self.fingerprint)] = model
                job["status"] = "done"
        except Exception as exc:  # surfaced through GET /jobs/{id}
            log.exception("training job %s failed", job["job_id"])
            with self._lock:
                job["status"] = "error"
                job["error"] = str(exc)

    def job(self, job_id: str) -> dict:
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None:
                raise ApiError(404, "UnknownJob", f"no job {job_id!r}")
            return dict(job)

    # -- scenario baseline cache ------------------------------------------

    def cached_baseline(self, key: tuple):
        with self._lock:
            return self._baselines.get(key)

    def store_baseline(self, key: tuple, result) -> None:
        with self._lock:
            self._baselines[key] = result
            while len(self._baselines) > _BASELINE_CACHE_LIMIT:
                self._baselines.popitem(last=False)


# --- wire helpers -------------------------------------------------------------


def _product_wire(state: ServerState, product) -> dict:
    stats = state.context.stats.get(product.id)
    coords = state.projection.get(product.id)
    return {
        "id": product.id,
        "title": product.title,
        "category": product.category,
        "brand": product.brand,
        "store": product.store,
        "base_price": product.base_price,
        "stats": stats.as_dict() if stats is not None else None,
        "projection": list(coords) if coords is not None else None,
    }


def _parse_query_date(raw: str | None, param: str) -> date | None:
    if raw is None:
        return None
    try:
        return date.fromisoformat(raw)
    except ValueError:
        raise ApiError(422, "BadDate", f"bad {param!r} date {raw!r}: expected YYYY-MM-DD")


def _required(payload: Mapping, key: str):
    if key not in payload:
        raise ApiError(422, "MissingField", f"request body needs {key!r}")
    return payload[key]


def _model_kind(value) -> ModelKind:
    try:
        return ModelKind(value)
    except ValueError:
        valid = ", ".join(k.value for k in ModelKind)
        raise ApiError(422, "UnknownModelKind", f"model_kind {value!r}; expected one of {valid}")


# --- application ---------------------------------------------------------------


def create_app(
    dataset: Dataset,
    horizon_cap: int = DEFAULT_HORIZON_CAP,
    seed: int = 0,
    background_size: int = 64,
) -> FastAPI:
    state = ServerState(
        dataset, horizon_cap=horizon_cap, seed=seed, background_size=background_size
    )
    app = FastAPI(title="promoforecast", docs_url=None, redoc_url=None)
    app.state.engine = state

    def error_body(status: int, kind: str, message: str) -> JSONResponse:
        return JSONResponse(
            status_code=status,
            content={"error": {"status": status, "kind": kind, "message": message}},
        )

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return error_body(exc.status, exc.kind, str(exc))

    @app.exception_handler(UnknownProduct)
    async def _unknown_product(request: Request, exc: UnknownProduct):
        return error_body(404, "UnknownProduct", str(exc))

    @app.exception_handler(LayoutMismatch)
    async def _layout_mismatch(request: Request, exc: LayoutMismatch):
        return error_body(409, "LayoutMismatch", str(exc))

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        # Covers UnrecognizedPromotion, InvalidEdit, HorizonError,
        # InsufficientHistory, and plain validation failures.
        return error_body(422, type(exc).__name__, str(exc))

    @app.exception_handler(RequestValidationError)
    async def _request_invalid(request: Request, exc: RequestValidationError):
        return error_body(422, "RequestInvalid", str(exc.errors()[:1]))

    @app.exception_handler(Exception)
    async def _internal(request: Request, exc: Exception):
        log.exception("unhandled error on %s", request.url.path)
        return error_body(500, "InternalError", "internal server error")

    # -- read routes ------------------------------------------------------

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "products": len(state.dataset.products),
            "dataset_fingerprint": state.fingerprint,
            "layout_fingerprint": state.context.layout.fingerprint,
            "kernel_backend": ACTIVE_BACKEND,
            "trained_models": state.registered_kinds(),
            "projection_method": state.projection_method,
        }

    @app.get("/products")
    def products():
        return {
            "products": [_product_wire(state, p) for p in state.dataset.products],
            "projection_method": state.projection_method,
        }

    @app.get("/products/{product_id}")
    def product_detail(product_id: str):
        product = state.context.product(product_id)
        series = state.dataset.series_by_product(product_id)
        summary = None
        if series is not None and series.days:
            summary = {
                "first_day": series.days[0].date.isoformat(),
                "last_day": series.days[-1].date.isoformat(),
                "n_days": len(series.days),
            }
        body = _product_wire(state, product)
        body["series"] = summary
        body["n_promotions"] = len(state.dataset.promotions_for(product_id))
        return body

    @app.get("/products/{product_id}/sales")
    def product_sales(product_id: str, request: Request):
        state.context.product(product_id)
        lo = _parse_query_date(request.query_params.get("from"), "from")
        hi = _parse_query_date(request.query_params.get("to"), "to")
        series = state.dataset.series_by_product(product_id)
        days = series.days if series is not None else ()
        out = [
            {"date": d.date.isoformat(), "units_sold": d.units_sold, "price": d.price}
            for d in days
            if (lo is None or d.date >= lo) and (hi is None or d.date <= hi)
        ]
        return {"product_id": product_id, "days": out}

    @app.get("/products/{product_id}/promotions")
    def product_promotions(product_id: str):
        state.context.product(product_id)
        return {
            "product_id": product_id,
            "promotions": [
                promotion_to_wire(p) for p in state.dataset.promotions_for(product_id)
            ],
        }

    @app.get("/products/{product_id}/competitors")
    def product_competitors(product_id: str, k: int = 5):
        state.context.product(product_id)
        if product_id not in state.context.stats:
            return {"product_id": product_id, "ids": [], "short_list": True}
        scored = [p for p in state.dataset.products if p.id in state.context.stats]
        ranked = top_competitors(product_id, scored, state.context.stats, k=k)
        return {
            "product_id": product_id,
            "ids": list(ranked.ids),
            "short_list": ranked.short_list,
        }

    @app.get("/jobs/{job_id}")
    def job_status(job_id: str):
        return state.job(job_id)

    # -- write routes -----------------------------------------------------

    @app.post("/train", status_code=202)
    def train(payload: dict = Body(...)):
        kind = _model_kind(_required(payload, "model_kind"))
        overrides = payload.get("config") or {}
        if not isinstance(overrides, dict):
            raise ApiError(422, "BadConfig", "config must be an object")
        try:
            config = _CONFIG_CLASSES[kind](**overrides)
        except TypeError as exc:
            raise ApiError(422, "BadConfig", str(exc))
        return state.submit_training(kind, config)

    @app.post("/predict")
    def predict(payload: dict = Body(...)):
        product_id = _required(payload, "product_id")
        horizon = _required(payload, "horizon")
        kind = _model_kind(_required(payload, "model_kind"))
        try:
            start = date.fromisoformat(horizon["start"])
            end = date.fromisoformat(horizon["end"])
        except (KeyError, TypeError, ValueError):
            raise ApiError(422, "BadHorizon", "horizon needs start and end as YYYY-MM-DD")
        model = state.model_for(kind)
        result = forecast(
            state.context, product_id, model, start, end,
            state.background, horizon_cap=state.horizon_cap,
        )
        return result_to_wire(result, list(state.context.layout.groups))

    @app.post("/whatif")
    def whatif(payload: dict = Body(...)):
        scenario = scenario_from_wire(payload)
        model = state.model_for(scenario.model_kind)
        cache_key = (
            scenario.product_id,
            scenario.start.isoformat(),
            scenario.end.isoformat(),
            scenario.model_kind.value,
        )
        run = run_scenario(
            state.context, scenario, model, state.background,
            horizon_cap=state.horizon_cap,
            baseline=state.cached_baseline(cache_key),
        )
        state.store_baseline(cache_key, run.baseline)
        comparison = run.comparison()
        groups = list(state.context.layout.groups)
        return {
            "baseline": result_to_wire(run.baseline, groups),
            "scenario": result_to_wire(run.edited, groups),
            "comparison": {
                "deltas": list(comparison.deltas),
                "total_delta": comparison.total_delta,
                "growth_before": comparison.growth_before,
                "growth_after": comparison.growth_after,
            },
            "promotions_after": [promotion_to_wire(p) for p in run.promotions_after],
        }

    return app


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="promoforecast-server",
        description="Serve a dataset over HTTP for the decision UI.",
    )
    parser.add_argument(
        "--data-dir",
        default=os.environ.get("PROMOFORECAST_DATA_DIR"),
        help="dataset directory (CSV) or .json file",
    )
    parser.add_argument(
        "--host", default=os.environ.get("PROMOFORECAST_HOST", "127.0.0.1")
    )
    parser.add_argument(
        "--port", type=int, default=int(os.environ.get("PROMOFORECAST_PORT", "8765"))
    )
    parser.add_argument(
        "--horizon-cap",
        type=int,
        default=int(os.environ.get("PROMOFORECAST_HORIZON_CAP", str(DEFAULT_HORIZON_CAP))),
    )
    parser.add_argument(
        "--seed", type=int, default=int(os.environ.get("PROMOFORECAST_SEED", "0"))
    )
    args = parser.parse_args(argv)
    if not args.data_dir:
        parser.error("--data-dir (or PROMOFORECAST_DATA_DIR) is required")

    import uvicorn

    dataset = load_dataset(Path(args.data_dir))
    app = create_app(dataset, horizon_cap=args.horizon_cap, seed=args.seed)
    log.info("serving %d products on %s:%d", len(dataset.products), args.host, args.port)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
