"""FastAPI application.  Run with ``uvicorn garrows.service.app:app``."""
from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__, workflows
from ..errors import GarrowError, UserError
from .schemas import CheckRequest, FlattenRequest, LawsRequest, Result, RunRequest, StageRequest

app = FastAPI(title="garrows", version=__version__)


@app.exception_handler(GarrowError)
async def _garrow_error(request, exc: GarrowError):
    status = 422 if isinstance(exc, UserError) else 500
    body = Result(ok=False, result="", diagnostics=[exc.render()])
    return JSONResponse(status_code=status, content=body.model_dump())


def _ok(outcome: workflows.Outcome, ok: bool = True) -> Result:
    return Result(ok=ok, result=outcome.result, diagnostics=outcome.diagnostics)


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/check", response_model=Result)
def check(req: CheckRequest) -> Result:
    return _ok(workflows.check(req.source))


@app.post("/flatten", response_model=Result)
def flatten(req: FlattenRequest) -> Result:
    return _ok(workflows.flatten(req.source, req.entry, req.args, req.format,
                                 req.dump_derivation))


@app.post("/diagram", response_model=Result)
def diagram(req: StageRequest) -> Result:
    return _ok(workflows.diagram(req.source, req.entry, req.args))


@app.post("/run", response_model=Result)
def run(req: RunRequest) -> Result:
    return _ok(workflows.run(req.source, req.entry, req.args, req.input, req.backend, req.fuel))


@app.post("/laws", response_model=Result)
def laws(req: LawsRequest) -> Result:
    outcome, ok = workflows.laws(req.backend, req.seed, req.cases, "json")
    return _ok(outcome, ok)
