"""Command-line client for the exactwkb service.

Each subcommand validates its inputs into a request model, posts it to the
service (in process by default, or to ``--server``), and writes the JSON
result, an optional CSV table, an SVG figure where one exists, and a
manifest that records everything needed to reproduce the run.

Exit codes: 0 success, 2 parse or configuration error, 3 numeric failure
(including a failed verification suite).
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import sys
import warnings
from pathlib import Path

import click
from pydantic import ValidationError

from . import schemas, svg
from .errors import ConfigError
from .potential import Polynomial, format_polynomial

log = logging.getLogger(__name__)

OUT_ENV = "EXACTWKB_OUT"
SERVER_ENV = "EXACTWKB_SERVER"
DEFAULT_OUT = "exactwkb-out"

REQUESTS = {
    "stokes": schemas.StokesRequest,
    "coeffs": schemas.CoeffsRequest,
    "borel": schemas.BorelRequest,
    "connect": schemas.ConnectRequest,
    "eigen": schemas.EigenRequest,
    "verify": schemas.VerifyRequest,
}


class Failure(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# inputs


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except (OSError, ValueError) as exc:
        raise Failure(f"cannot read config {path}: {exc}", 2) from exc
    if not isinstance(data, dict):
        raise Failure(f"config {path} must hold a table of settings", 2)
    return data


def read_potential(value: str) -> str:
    """A polynomial expression, or ``@file`` holding one or a JSON coefficient list.

    Coefficients are ascending; complex entries are ``[re, im]`` pairs.
    """
    if not value.startswith("@"):
        return value
    p = Path(value[1:])
    try:
        text = p.read_text().strip()
    except OSError as exc:
        raise Failure(f"cannot read potential file {p}: {exc}", 2) from exc
    if text.startswith("["):
        try:
            coeffs = [schemas.parse_complex(c) for c in json.loads(text)]
        except ValueError as exc:
            raise Failure(f"bad coefficient list in {p}: {exc}", 2) from exc
        return format_polynomial(Polynomial(tuple(coeffs)))
    return text


def build_request(command: str, flags: dict, config: dict):
    """Merge flags with the config file (the file wins) and validate."""
    merged = {k: v for k, v in flags.items() if v is not None and v != ()}
    overridden = sorted(k for k in config if k in merged and merged[k] != config[k])
    if overridden:
        log.warning("config file overrides flags: %s", ", ".join(overridden))
    merged.update(config)
    if isinstance(merged.get("potential"), str):
        merged["potential"] = read_potential(merged["potential"])
    try:
        req = REQUESTS[command].model_validate(merged)
    except ValidationError as exc:
        msgs = "; ".join(f"{'.'.join(str(p) for p in e['loc']) or command}: {e['msg']}"
                         for e in exc.errors())
        raise Failure(f"invalid {command} input: {msgs}", 2) from exc
    return req, sorted(merged)


# ---------------------------------------------------------------------------
# transport


class _Client:
    def __init__(self, server: str | None):
        self.server = server
        if server is None:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient
            from .service import app
            self._http = TestClient(app)
            self._base = ""
        else:
            import httpx
            self._http = httpx.Client(timeout=None)
            self._base = server.rstrip("/")

    def call(self, method: str, path: str, payload=None) -> dict:
        try:
            if method == "GET":
                r = self._http.get(self._base + path)
            else:
                r = self._http.post(self._base + path, json=payload)
        except Exception as exc:
            if self.server is None:
                raise
            raise Failure(f"cannot reach server {self.server}: {exc}", 2) from exc
        body = r.json()
        if r.status_code != 200:
            raise Failure(f"[{body.get('kind', 'error')}] {body.get('error', r.text)}",
                          int(body.get("exit_code", 3)))
        return body


# ---------------------------------------------------------------------------
# outputs


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _table(command: str, result: dict):
    """(header, rows) for the CSV view of a result, or None."""
    if command in ("coeffs", "borel"):
        return (["n", "c_re", "c_im", "abs_c", "b_re", "b_im"],
                [[r["n"], *r["c"], r["abs_c"], *r["b"]] for r in result["rows"]])
    if command == "connect":
        return (["lambda_re", "lambda_im", "alpha_re", "alpha_im", "beta_re", "beta_im", "residual"],
                [[*r["lambda"], *r["alpha"], *r["beta"], r["residual"]] for r in result["rows"]])
    if command == "eigen":
        rows = []
        for method in ("wronskian", "shooting"):
            for j, r in enumerate(result.get(method, [])):
                rows.append([method, j, *r["E"], r["wronskian_residual"]])
        return ["method", "n", "E_re", "E_im", "residual"], rows
    if command == "verify":
        return (["check", "passed", "value", "threshold"],
                [[c["name"], c["passed"], c["value"], c["threshold"]] for c in result["checks"]])
    return None


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _figure(command: str, result: dict):
    if command == "stokes":
        return svg.stokes_svg(result["graph"], title=f"Stokes graph of {result['potential']}")
    if command == "borel":
        return svg.pole_map_svg(result, title=f"Borel plane, sector {result['sector']}")
    return None


def write_outputs(out: Path, command: str, result: dict, manifest: dict, want_csv: bool) -> dict:
    files = {f"{command}.json": dumps(result)}
    fig = _figure(command, result)
    if fig is not None:
        files[f"{command}.svg"] = fig
    if want_csv:
        tab = _table(command, result)
        if tab is not None:
            files[f"{command}.csv"] = _csv_text(*tab)
    out.mkdir(parents=True, exist_ok=True)
    digests = {}
    for name in sorted(files):
        data = files[name].encode("utf-8")
        (out / name).write_bytes(data)
        digests[name] = hashlib.sha256(data).hexdigest()
    manifest = dict(manifest, outputs=digests)
    (out / f"{command}.manifest.json").write_text(dumps(manifest), encoding="utf-8")
    return digests


# ---------------------------------------------------------------------------
# orchestration


def run(ctx: click.Context, command: str, flags: dict) -> dict:
    """Validate, call the service, write files; returns the result."""
    opts = ctx.obj
    config = _load_config(opts["config"])
    out = Path(config.pop("output", None) or opts["out"])
    want_csv = bool(config.pop("csv", opts["csv"]))
    req, given = build_request(command, flags, config)
    payload = req.model_dump(mode="json")
    client = _Client(opts["server"])
    health = client.call("GET", "/health")
    result = client.call("POST", f"/{command}", payload)
    manifest = {
        "command": command,
        "request": payload,
        "given": given,
        "defaults": sorted(set(payload) - set(given)),
        "config_file": opts["config"],
        "server": opts["server"] or "in-process",
        "versions": health["versions"],
        "constants": health["constants"],
        "python": sys.version.split()[0],
    }
    digests = write_outputs(out, command, result, manifest, want_csv)
    for name in digests:
        click.echo(str(out / name))
    return result


def _invoke(ctx, command, flags):
    try:
        return run(ctx, command, flags)
    except Failure as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(exc.code)
    except ConfigError as exc:
        click.echo(f"error: [{type(exc).__name__}] {exc}", err=True)
        ctx.exit(2)


def _complex_list(values):
    return list(values) if values else None


problem_options = [
    click.option("-p", "--potential", help="Polynomial V(x), e.g. 'x^4/4 - x^2/2', or @file."),
    click.option("-E", "--energy", help="Energy as re or re,im."),
    click.option("--arg-lambda", type=float, help="Phase of lambda used for the graph."),
]


def _problem(f):
    for opt in reversed(problem_options):
        f = opt(f)
    return f


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--out", type=click.Path(file_okay=False), envvar=OUT_ENV, default=DEFAULT_OUT,
              show_default=True, help=f"Output directory (env {OUT_ENV}).")
@click.option("--config", type=click.Path(dir_okay=False), help="JSON settings file; wins over flags.")
@click.option("--server", envvar=SERVER_ENV, help=f"Service URL; in process when absent (env {SERVER_ENV}).")
@click.option("--csv", "csv_", is_flag=True, help="Also write CSV tables.")
@click.option("-v", "--verbose", count=True)
@click.pass_context
def main(ctx, out, config, server, csv_, verbose):
    """Exact WKB toolkit: Stokes graphs, WKB series, Borel sums, connections, spectra."""
    logging.basicConfig(level=[logging.WARNING, logging.INFO, logging.DEBUG][min(verbose, 2)],
                        format="%(levelname)s %(name)s: %(message)s")
    ctx.obj = {"out": out, "config": config, "server": server, "csv": csv_}


@main.command()
@_problem
@click.pass_context
def stokes(ctx, potential, energy, arg_lambda):
    """Stokes graph: turning points, lines, sectors and signatures."""
    res = _invoke(ctx, "stokes", dict(potential=potential, energy=energy, arg_lambda=arg_lambda))
    click.echo(f"{res['n_sectors']} sectors, {len(res['graph']['turning_points'])} turning points")


@main.command()
@_problem
@click.option("-k", "--sector", type=int)
@click.option("-x", "--x", "x", help="Point as re or re,im.")
@click.option("-N", "--order", type=int)
@click.pass_context
def coeffs(ctx, potential, energy, arg_lambda, sector, x, order):
    """WKB chi-factor coefficients of a sector solution at a point."""
    _invoke(ctx, "coeffs", dict(potential=potential, energy=energy, arg_lambda=arg_lambda,
                                sector=sector, x=x, order=order))


@main.command()
@_problem
@click.option("-k", "--sector", type=int)
@click.option("-x", "--x", "x", help="Point as re or re,im.")
@click.option("-N", "--order", type=int)
@click.option("--pade", help="Pade orders L,M.")
@click.option("-l", "--lambda", "lambdas", multiple=True, help="lambda (re or re,im); repeatable.")
@click.option("--ray", "rays", type=float, multiple=True,
              help="Direction arg(s) of an integration ray in radians; repeatable.")
@click.option("--oracle/--no-oracle", default=None, help="Compare with the ODE solution.")
@click.pass_context
def borel(ctx, potential, energy, arg_lambda, sector, x, order, pade, lambdas, rays, oracle):
    """Borel transform, Pade pole map and Laplace sums."""
    pl = None
    if pade is not None:
        try:
            pl = [int(v) for v in pade.split(",")]
        except ValueError:
            click.echo(f"error: --pade expects L,M, got {pade!r}", err=True)
            ctx.exit(2)
    res = _invoke(ctx, "borel", dict(potential=potential, energy=energy, arg_lambda=arg_lambda,
                                     sector=sector, x=x, order=order, pade=pl,
                                     lambdas=_complex_list(lambdas), rays=_complex_list(rays),
                                     oracle=oracle))
    for s in res["sums"]:
        v = s["value"]
        click.echo(f"lambda={s['lambda'][0]:g}{s['lambda'][1]:+g}j ray={s['ray']:.4f}: "
                   f"{v[0]:.12g}{v[1]:+.12g}j +- {s['error']:.1e}")


@main.command()
@_problem
@click.option("--source", type=int)
@click.option("--basis", help="Two sector indices a,b.")
@click.option("-l", "--lambda", "lambdas", multiple=True)
@click.option("--probe", "probes", multiple=True, help="Probe point re,im; repeatable.")
@click.pass_context
def connect(ctx, potential, energy, arg_lambda, source, basis, lambdas, probes):
    """Connection coefficients psi_source = alpha psi_a + beta psi_b."""
    b = None
    if basis is not None:
        b = [v.strip() for v in basis.split(",")]
    _invoke(ctx, "connect", dict(potential=potential, energy=energy, arg_lambda=arg_lambda,
                                 source=source, basis=b, lambdas=_complex_list(lambdas),
                                 probes=_complex_list(probes)))


@main.command()
@click.option("-p", "--potential")
@click.option("-l", "--lambda", "lam", type=float)
@click.option("--bracket", help="Energy range lo,hi.")
@click.option("-n", "--count", type=int)
@click.option("--method", type=click.Choice(["wronskian", "shooting", "both"]))
@click.pass_context
def eigen(ctx, potential, lam, bracket, count, method):
    """Eigenvalues of a confining potential."""
    br = None if bracket is None else [v.strip() for v in bracket.split(",")]
    res = _invoke(ctx, "eigen", dict(potential=potential, lam=lam, bracket=br, count=count,
                                     method=method))
    for m in ("wronskian", "shooting"):
        for j, r in enumerate(res.get(m, [])):
            click.echo(f"{m} E_{j} = {r['E'][0]:.14g}")


@main.command()
@click.argument("suite", required=False)
@click.pass_context
def verify(ctx, suite):
    """Run a named verification suite (eq21, appendix2, lemma3, connection, eigen-ho)."""
    res = _invoke(ctx, "verify", dict(suite=suite))
    for c in res["checks"]:
        click.echo(f"{'PASS' if c['passed'] else 'FAIL'} {res['suite']}/{c['name']}: "
                   f"{c['value']:.3e} (threshold {c['threshold']:.3e})")
    if not res["passed"]:
        ctx.exit(3)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service (needs uvicorn)."""
    try:
        import uvicorn
    except ImportError:
        click.echo("error: serving needs uvicorn (pip install uvicorn)", err=True)
        sys.exit(2)
    uvicorn.run("exactwkb.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
