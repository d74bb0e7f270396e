"""Request and response models shared by the HTTP service and the CLI.

Complex numbers are accepted as a plain number, a ``"re,im"`` string or a
two-element list, and are always emitted as ``[re, im]``.
"""
from __future__ import annotations

from typing import Annotated, Any, Literal

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer, field_validator


def parse_complex(v: Any) -> complex:
    if isinstance(v, complex):
        return v
    if isinstance(v, bool):
        raise ValueError("boolean is not a number")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError("complex pair needs exactly two entries")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        parts = [p.strip() for p in v.split(",")]
        if len(parts) == 1:
            return complex(float(parts[0]))
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    raise ValueError(f"cannot read {v!r} as a complex number (use re,im)")


Complex = Annotated[complex, BeforeValidator(parse_complex),
                    PlainSerializer(lambda z: [z.real, z.imag], return_type=list)]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ProblemSpec(_Strict):
    """A potential and an energy; the graph is built at phase ``arg_lambda``."""

    potential: str
    energy: Complex = 0j
    arg_lambda: float = 0.0


class Tolerances(_Strict):
    eigen: float = Field(1e-10, gt=0)


class StokesRequest(ProblemSpec):
    pass


class CoeffsRequest(ProblemSpec):
    sector: int = 1
    x: Complex
    order: int = Field(20, ge=0, le=24)


class BorelRequest(ProblemSpec):
    sector: int = 1
    x: Complex
    order: int = Field(20, ge=2, le=24)
    pade: tuple[int, int] = (10, 10)
    lambdas: list[Complex] = [10.0]
    rays: list[float] | None = None
    oracle: bool = False


class ConnectRequest(ProblemSpec):
    source: int
    basis: tuple[int, int]
    lambdas: list[Complex] = [10.0]
    probes: list[Complex] | None = None


class EigenRequest(_Strict):
    potential: str
    lam: float = 1.0
    bracket: tuple[float, float] = (0.0, 10.0)
    count: int = Field(1, ge=0)
    method: Literal["wronskian", "shooting", "both"] = "wronskian"
    tolerances: Tolerances = Tolerances()


SUITES = ("eq21", "appendix2", "lemma3", "connection", "eigen-ho")


class VerifyRequest(_Strict):
    suite: str

    @field_validator("suite")
    @classmethod
    def _known(cls, v):
        v = {"eigen": "eigen-ho"}.get(v, v)
        if v not in SUITES:
            raise ValueError(f"unknown suite {v!r}; choose from {', '.join(SUITES)}")
        return v


class CheckLine(BaseModel):
    name: str
    passed: bool
    value: float
    threshold: float
    detail: dict = {}


class VerifyReport(BaseModel):
    suite: str
    passed: bool
    checks: list[CheckLine]
    data: dict = {}


class ErrorBody(BaseModel):
    error: str
    kind: str
    exit_code: int
