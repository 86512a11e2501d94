"""HTTP facade over the core library.

One endpoint per CLI subcommand plus /health. Handlers validate shape via
the request models, delegate to the core modules, and map the library's
error taxonomy onto status codes: domain/range/capacity problems are 400
(client fixable), numeric failures are 500.
"""

import numpy as np
from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__, convergence, fields, integrals, means
from .._util import resolve_threads
from ..errors import (
    CapacityError,
    CesaroFieldsError,
    DomainError,
    NumericError,
    RangeError,
)
from ..fields import FieldSpec
from ..weights import CesaroOrder, weight_row
from . import schemas

_SAMPLE_CELL_CAP = 4_194_304  # JSON payload guard for /v1/sample


def _error_payload(exc: Exception) -> dict:
    return {"error": {"type": type(exc).__name__, "message": str(exc)}}


def create_app() -> FastAPI:
    app = FastAPI(title="cesaro-fields", version=__version__)

    @app.exception_handler(CesaroFieldsError)
    async def _core_error(request, exc: CesaroFieldsError):
        status = 500 if isinstance(exc, NumericError) else 400
        return JSONResponse(status_code=status, content=_error_payload(exc))

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/v1/weights", response_model=schemas.WeightsResponse)
    def weights(req: schemas.WeightsRequest):
        table = weight_row(req.alpha, req.n)
        logs = table.log_weights
        return schemas.WeightsResponse(
            alpha=req.alpha,
            k=list(range(req.n + 1)),
            log_weight=[float(v) for v in logs],
            weight=[float(v) for v in table.weights()],
        )

    @app.post("/v1/sample", response_model=schemas.SampleResponse)
    def sample(req: schemas.SampleRequest):
        mm, nn = req.extent
        cells = (mm + 1) * (nn + 1)
        if cells > _SAMPLE_CELL_CAP:
            raise CapacityError(
                f"extent {mm}x{nn} has {cells} cells, cap {_SAMPLE_CELL_CAP}"
            )
        spec = FieldSpec(req.profile.to_profile(), req.seed, (mm, nn))
        block = fields.sample_block(spec, 0, mm, 0, nn)
        return schemas.SampleResponse(
            extent=(mm, nn), values=[[float(v) for v in row] for row in block]
        )

    @app.post("/v1/mean1d", response_model=schemas.Mean1DResponse)
    def mean1d(req: schemas.Mean1DRequest):
        if (req.values is None) == (req.profile is None):
            raise DomainError("provide exactly one of values or profile")
        if req.values is not None:
            xs = np.asarray(req.values, dtype=np.float64)
        else:
            if req.n is None:
                raise DomainError("profile sampling needs n")
            spec = FieldSpec(req.profile.to_profile(), req.seed, (req.n - 1, 0))
            xs = fields.sample_block(spec, 0, req.n - 1, 0, 0)[:, 0]
        ms = means.cesaro_mean_1d(xs, req.alpha, method=req.method)
        return schemas.Mean1DResponse(
            alpha=req.alpha,
            n=list(range(len(ms))),
            mean=[float(v) for v in ms],
        )

    @app.post("/v1/mean2d", response_model=schemas.Mean2DResponse)
    def mean2d(req: schemas.Mean2DRequest):
        order = CesaroOrder(req.alpha, req.beta)
        profile = req.profile.to_profile()
        spec = FieldSpec(profile, req.seed, tuple(req.extent))
        if req.checkpoints == "dyadic":
            pts = means.dyadic_checkpoints(spec.extent)
        else:
            pts = req.checkpoints
        grid = means.cesaro_mean_2d(spec, order, pts, method=req.method)
        rows = [
            schemas.Mean2DRow(m=m, n=n, mean=float(v), abs_dev_from_mu=float(d))
            for (m, n), v, d in zip(
                grid.checkpoints, grid.values, grid.abs_deviations()
            )
        ]
        return schemas.Mean2DResponse(
            alpha=req.alpha, beta=req.beta, mu=grid.mu_ref, rows=rows
        )

    @app.post("/v1/verdict", response_model=schemas.VerdictResponse)
    def verdict(req: schemas.VerdictRequest):
        order = CesaroOrder(req.alpha, req.beta)
        v = convergence.verdict(
            req.profile.to_profile(),
            order,
            req.mode,
            master_seed=req.master_seed,
            threads=resolve_threads(req.threads),
            preset=req.preset,
        )
        return schemas.VerdictResponse(
            mode=v.mode,
            predicted=v.predicted,
            observed=v.observed,
            concordant=v.concordant,
            statistics=v.statistics,
        )

    @app.post("/v1/complete-sum", response_model=schemas.CompleteSumResponse)
    def complete_sum(req: schemas.CompleteSumRequest):
        profile = req.profile.to_profile()
        if req.beta is None:
            res = convergence.complete_convergence_sum_1d(
                profile, req.alpha, n_base=req.n_base
            )
        else:
            order = CesaroOrder(req.alpha, req.beta)
            res = convergence.complete_convergence_sum(
                profile, order, n_base=req.n_base
            )
        return schemas.CompleteSumResponse(
            levels=res.levels,
            values=res.values,
            increments=res.increments,
            increment_ratio=res.increment_ratio,
            classification=res.classification,
        )

    @app.post("/v1/appendix-verify")
    def appendix_verify(req: schemas.AppendixVerifyRequest):
        gammas = req.gamma_grid or integrals.DEFAULT_GAMMA_GRID
        for g in gammas:
            if not (0.0 < g < 1.0):
                raise DomainError(f"gamma grid values must lie in (0, 1): {g}")
        return integrals.verify_report(gammas=gammas, n_base=req.n_base)

    @app.post("/v1/matrix")
    def matrix(req: schemas.MatrixRequest):
        return convergence.run_matrix(
            master_seed=req.master_seed,
            preset=req.preset,
            threads=resolve_threads(req.threads),
        )

    return app
