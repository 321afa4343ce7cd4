"""HTTP front end wrapping the synthesis and simulation pipeline.

Input problems map to 422, numeric breakdowns (singular or resonant
configurations) to 409; both carry {"code", "message"} in the detail so
clients can branch without parsing text.
"""
from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from . import __version__, pipeline, serialize
from .errors import InputError, NumericError, ShapeFilterError
from .presets import PRESETS
from .schemas import (
    ErrorRow,
    ErrorTableRequest,
    ErrorTableResponse,
    OperatorRequest,
    PresetInfo,
    SimulateRequest,
    SynthesizeRequest,
    TransferFunctionSpec,
)
from .simulation import ensemble_stats

app = FastAPI(
    title="shapefilter",
    version=__version__,
    description="Shaping-filter synthesis and Gaussian process simulation service",
)


@app.exception_handler(ShapeFilterError)
async def _domain_error(request: Request, exc: ShapeFilterError):
    status = 409 if isinstance(exc, NumericError) else 422
    return JSONResponse(
        status_code=status,
        content={"detail": {"code": type(exc).__name__, "message": str(exc)}},
    )


def _resolve(spec: TransferFunctionSpec | None):
    if spec is None:
        return None, ""
    return pipeline.resolve_tf(spec.preset, spec.num, spec.den)


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.get("/presets", response_model=list[PresetInfo])
def list_presets():
    return [
        PresetInfo(
            name=p.name, num=list(p.tf.num), den=list(p.tf.den), description=p.description
        )
        for p in PRESETS.values()
    ]


@app.post("/synthesize")
def synthesize(req: SynthesizeRequest):
    tf, label = _resolve(req.tf)
    return pipeline.synthesize_report(tf, label, req.interpolation_points)


@app.post("/simulate")
def simulate(req: SimulateRequest):
    tf, label = _resolve(req.tf)
    runs, metadata = pipeline.run_simulation(
        tf,
        label,
        method=req.method,
        horizon=req.T,
        order=req.L,
        seed=req.seed,
        stream_id=req.stream_id,
        trajectories=req.trajectories,
        grid=req.grid,
    )
    if req.format == "json":
        return {
            "metadata": metadata,
            "grid": runs[0].grid.tolist(),
            "trajectories": [r.values.tolist() for r in runs],
        }
    if req.format == "stats":
        stats = ensemble_stats(runs)
        return PlainTextResponse(
            serialize.stats_csv(stats, metadata), media_type="text/csv"
        )
    return PlainTextResponse(
        serialize.trajectories_csv(runs, metadata), media_type="text/csv"
    )


@app.post("/error-table")
def error_table(req: ErrorTableRequest):
    tf, label = _resolve(req.tf)
    reports, rate = pipeline.run_error_table(tf, req.T, req.orders, w_form=req.w_form)
    if req.format == "json":
        return ErrorTableResponse(
            source=label,
            T=req.T,
            w_form=req.w_form,
            kernel_norm_sq=reports[0].kernel_norm_sq,
            rows=[
                ErrorRow(
                    L=r.order,
                    epsilon=r.epsilon,
                    epsilon1=r.epsilon1,
                    epsilon2=r.epsilon2,
                )
                for r in reports
            ],
            convergence_rate=rate,
        )
    metadata = {"source": label, "T": req.T, "w_form": req.w_form, "version": __version__}
    if rate is not None:
        metadata["convergence_rate"] = f"{rate:.6f}"
    return PlainTextResponse(
        serialize.error_table_csv(reports, metadata), media_type="text/csv"
    )


@app.post("/operator")
def operator(req: OperatorRequest):
    tf, label = _resolve(req.tf)
    op = pipeline.build_operator(tf, req.name, req.T, req.L, w_form=req.w_form)
    metadata = {"tf": label or "none", "version": __version__}
    if req.format == "json":
        return serialize.operator_json(op, metadata)
    return PlainTextResponse(serialize.operator_csv(op, metadata), media_type="text/csv")


def main():  # pragma: no cover - thin uvicorn wrapper
    import uvicorn

    uvicorn.run(app, host="127.0.0.1", port=8000)


if __name__ == "__main__":  # pragma: no cover
    main()
