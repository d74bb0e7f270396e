"""HTTP service exposing the package capabilities.

Every endpoint is a thin wrapper around a pure handler function taking a
request model and returning a JSON-ready dict; the CLI talks to the same
endpoints, either in process or over HTTP.  Package errors become an
:class:`~exactwkb.schemas.ErrorBody` that carries the CLI exit code.
"""
from __future__ import annotations

import cmath
import json
import logging
import math
from importlib import metadata

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import borel, oracle, series, stokes
from .errors import CanonicityError, ExactWKBError, InputError, PoleOnRayError
from .path import QUAD_TOL
from .potential import characteristic, format_polynomial, parse_polynomial
from .schemas import (BorelRequest, CoeffsRequest, ConnectRequest, EigenRequest, ErrorBody,
                      StokesRequest, VerifyRequest)
from .verify import run_suite

log = logging.getLogger(__name__)


def finite_json(obj):
    """Replace non-finite floats by None so the payload is strict JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: finite_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [finite_json(v) for v in obj]
    return obj


class StrictJSONResponse(JSONResponse):
    def render(self, content) -> bytes:
        return json.dumps(finite_json(content), ensure_ascii=False, separators=(",", ":")).encode("utf-8")


def _pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _wrap(a: float) -> float:
    """Angle folded into (-pi, pi]."""
    return float(math.pi - (math.pi - a) % (2 * math.pi))


def _graph(req):
    V = parse_polynomial(req.potential)
    q = characteristic(V, req.energy)
    return V, stokes.build_graph(q, req.arg_lambda)


def constants() -> dict:
    """Fixed numerical settings that every result depends on."""
    return {"ode_rtol": oracle.ODE_TOL, "quad_tol": QUAD_TOL, "cheb_tol": series.CHEB_TOL,
            "line_tol": stokes.LINE_TOL, "series_clearance": series.SERIES_CLEARANCE, "anchor_scale": oracle.ANCHOR_SCALE}


def versions() -> dict:
    out = {}
    for name in ("artifact", "numpy", "scipy", "pydantic", "fastapi"):
        try:
            out[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            out[name] = None
    return out


# ---------------------------------------------------------------------------
# handlers


def handle_stokes(req: StokesRequest) -> dict:
    V, g = _graph(req)
    return {"potential": format_polynomial(V), "energy": _pair(req.energy), "degree": V.degree,
            "n_sectors": g.n_sectors, "graph": g.to_json()}


def _series_rows(ser) -> list:
    b = borel.to_borel(ser).coeffs if ser.order >= 1 else np.array([ser.coeffs[0]])
    return [{"n": n, "c": _pair(c), "abs_c": abs(c), "b": _pair(bb)}
            for n, (c, bb) in enumerate(zip(ser.coeffs, b))]


def handle_coeffs(req: CoeffsRequest) -> dict:
    _, g = _graph(req)
    cls = stokes.classify_point(g, req.x)
    ser = series.chi_series(g, req.sector, req.x, req.order)
    return {"sector": req.sector, "x": _pair(req.x), "signature": ser.sigma,
            "classification": cls.to_json(), "xi": _pair(stokes.xi_of(g, req.sector, req.x)),
            "rows": _series_rows(ser)}


def _ray_sum(pa, lower, lam, gamma):
    """Sum along one ray with an error bar from the next lower diagonal approximant."""
    r = borel.laplace_sum(pa, lam, gamma)
    err = r.error
    if lower is not None:
        try:
            err += abs(borel.laplace_sum(lower, lam, gamma).value - r.value)
        except PoleOnRayError:
            log.debug("lower approximant has a pole on ray %.4g; error bar is quadrature only", gamma)
    return r.value, err


def handle_borel(req: BorelRequest) -> dict:
    _, g = _graph(req)
    k, x = req.sector, req.x
    L, M = req.pade
    cls = stokes.classify_point(g, x)
    ser = series.chi_series(g, k, x, req.order)
    bs = borel.to_borel(ser)
    pa = borel.pade(bs, L, M)
    lower = borel.pade(bs, L - 1, M - 1) if L > 0 and M > 0 else None
    fc = borel.predicted_singularities(g, x, k)
    near = pa.nearest_pole()
    ray0 = stokes.summation_ray(g, k, x)
    sums, dirs = [], set()
    for lam in req.lambdas:
        if req.rays is not None:
            gammas = [th - math.pi for th in req.rays]
        elif ray0 is None:
            raise CanonicityError(f"no admissible Laplace ray for sector {k} at x = {x}")
        else:
            gammas = [ray0 + g.phase - cmath.phase(lam)]
        ref = None
        if req.oracle:
            ref = oracle.fundamental_chi(g, k, x, lam).chi
        vals = []
        for gm in gammas:
            v, err = _ray_sum(pa, lower, lam, gm)
            d = _wrap(gm + math.pi)
            dirs.add(round(d, 12))
            row = {"lambda": _pair(lam), "ray": d, "value": _pair(v), "error": err}
            if ref is not None:
                row["oracle"] = _pair(ref)
                row["oracle_gap"] = abs(v - ref)
            vals.append((v, err))
            sums.append(row)
        spread = max((abs(a[0] - b[0]) - a[1] - b[1] for a in vals for b in vals), default=0.0)
        for row in sums[-len(vals):]:
            row["rays_consistent"] = bool(spread <= 0.0)
    detected = None if near is None else {
        "pole": _pair(near), "gap_to_moving": abs(near - fc.moving),
        "arg_gap_deg": abs(math.degrees(_wrap(cmath.phase(near) - cmath.phase(fc.moving)))),
    }
    return {
        "sector": k, "x": _pair(x), "signature": ser.sigma, "classification": cls.to_json(),
        "rows": _series_rows(ser), "radius_estimate": bs.radius_estimate,
        "pade": pa.to_json(), "forecast": fc.to_json(), "nearest_pole": detected,
        "summation_ray": None if ray0 is None else _wrap(ray0 + math.pi),
        "rays": sorted(dirs), "sums": sums,
    }


def handle_connect(req: ConnectRequest) -> dict:
    _, g = _graph(req)
    rows = [oracle.connection(g, req.source, tuple(req.basis), lam, req.probes).to_json()
            for lam in req.lambdas]
    return {"source": req.source, "basis": list(req.basis), "rows": rows}


def handle_eigen(req: EigenRequest) -> dict:
    V = parse_polynomial(req.potential)
    lo, hi = req.bracket
    if not hi > lo:
        raise InputError(f"empty energy bracket [{lo}, {hi}]")
    out = {"potential": format_polynomial(V), "lambda": req.lam, "bracket": [lo, hi]}
    if req.method in ("wronskian", "both"):
        out["wronskian"] = [r.to_json() for r in oracle.eigenvalues(
            V, req.lam, (lo, hi), req.count, tol=req.tolerances.eigen)]
    if req.method in ("shooting", "both"):
        out["shooting"] = [r.to_json() for r in oracle.shooting_eigenvalues(V, req.lam, (lo, hi), req.count)]
    if req.method == "both":
        gaps = [math.hypot(a["E"][0] - b["E"][0], a["E"][1] - b["E"][1])
                for a, b in zip(out["wronskian"], out["shooting"])]
        out["method_gap"] = max(gaps, default=0.0)
    return out


def handle_verify(req: VerifyRequest) -> dict:
    return run_suite(req.suite).model_dump()


# ---------------------------------------------------------------------------
# app


def _error(exc: Exception, code: int, status: int) -> JSONResponse:
    body = ErrorBody(error=str(exc), kind=type(exc).__name__, exit_code=code)
    return StrictJSONResponse(body.model_dump(), status_code=status)


def create_app() -> FastAPI:
    app = FastAPI(title="exactwkb", version=versions()["artifact"] or "0",
                  default_response_class=StrictJSONResponse)

    @app.exception_handler(ExactWKBError)
    async def _pkg_error(request: Request, exc: ExactWKBError):
        log.info("%s on %s: %s", type(exc).__name__, request.url.path, exc)
        return _error(exc, exc.exit_code, 400 if exc.exit_code == 2 else 422)

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request: Request, exc: RequestValidationError):
        msgs = "; ".join(f"{'.'.join(str(p) for p in e['loc'][1:])}: {e['msg']}" for e in exc.errors())
        return StrictJSONResponse(ErrorBody(error=msgs, kind="ConfigError", exit_code=2).model_dump(),
                            status_code=400)

    @app.get("/health")
    def health():
        return {"status": "ok", "versions": versions(), "constants": constants()}

    @app.post("/stokes")
    def stokes_ep(req: StokesRequest):
        return handle_stokes(req)

    @app.post("/coeffs")
    def coeffs_ep(req: CoeffsRequest):
        return handle_coeffs(req)

    @app.post("/borel")
    def borel_ep(req: BorelRequest):
        return handle_borel(req)

    @app.post("/connect")
    def connect_ep(req: ConnectRequest):
        return handle_connect(req)

    @app.post("/eigen")
    def eigen_ep(req: EigenRequest):
        return handle_eigen(req)

    @app.post("/verify")
    def verify_ep(req: VerifyRequest):
        return handle_verify(req)

    return app


app = create_app()
