"""Request and response bodies."""
from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

from ..backends.evaluate import DEFAULT_FUEL


class CheckRequest(BaseModel):
    source: str


class StageRequest(BaseModel):
    source: str
    entry: str
    args: list[str] = Field(default_factory=list)


class FlattenRequest(StageRequest):
    format: Literal["ir", "dot"] = "ir"
    dump_derivation: bool = False


class RunRequest(StageRequest):
    input: str | None = None
    backend: Literal["eval", "residual", "bi"] = "eval"
    fuel: int = Field(DEFAULT_FUEL, gt=0)


class LawsRequest(BaseModel):
    backend: Literal["eval", "bi"] = "eval"
    seed: int = 42
    cases: int = Field(100, gt=0, le=10_000)


class Result(BaseModel):
    ok: bool
    result: str
    diagnostics: list[str] = Field(default_factory=list)
