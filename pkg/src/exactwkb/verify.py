"""Named verification suites.

Each suite returns a :class:`~exactwkb.schemas.VerifyReport` with one
check line per threshold.  The suites are the operational form of the
package's main consistency claims and are what ``exactwkb verify`` runs.
"""
from __future__ import annotations

import logging
import time

import numpy as np

from . import oracle, series, stokes
from .errors import CanonicityError
from .path import continue_branch, line_path
from .potential import characteristic, parse_polynomial
from .schemas import CheckLine, VerifyReport

log = logging.getLogger(__name__)

AIRY = "x/2"
HARMONIC = "x^2/2"
SEED = 20240611


def _graph(potential: str, energy: complex = 0.0):
    return stokes.build_graph(characteristic(parse_polynomial(potential), energy))


def translation_residual(graph, k: int, x: complex, x0: complex, nmax: int = 12) -> float:
    """max_n |chi_n(x) - sum_p chi_p(x0) I_{n-p}(x, x0)| relative to max |chi_n(x)|."""
    p0 = stokes.canonical_path(graph, k, x0)
    if p0 is None:
        raise CanonicityError(f"no canonical path from sector {k} to {x0}")
    at_x0 = series.chi_series(graph, k, x0, nmax, p0)
    at_x = series.chi_series(graph, k, x, nmax)
    s0 = continue_branch(graph.characteristic, p0, graph.sqrt_far(p0.start), graph.turning_points).final
    I = series.iterated_I(graph.characteristic, x, x0, line_path(x0, x), nmax, s0, graph.turning_points)
    rebuilt = np.array([sum(at_x0.coeffs[p] * I[n - p] for p in range(n + 1)) for n in range(nmax + 1)])
    scale = np.maximum(np.abs(at_x.coeffs), 1.0)
    return float(np.max(np.abs(at_x.coeffs - rebuilt) / scale))


def random_sector_pairs(graph, k: int, count: int, rng, r_lo: float = 0.8, r_hi: float = 2.0):
    """Pairs of points in the middle of sector ``k``.

    Radii are drawn from ``[r_lo, r_hi]`` beyond the outermost turning
    point, where the coefficients stay moderate.
    """
    lo, hi = graph.sector(k).direction_interval
    reach = float(np.max(np.abs(graph.turning_points.locations)))
    out = []
    while len(out) < count:
        pts = []
        for _ in range(2):
            r = reach + rng.uniform(r_lo, r_hi)
            th = lo + (hi - lo) * rng.uniform(0.3, 0.7)
            pts.append(complex(r * np.exp(1j * th)))
        if abs(pts[0] - pts[1]) > 0.1:
            out.append(tuple(pts))
    return out


def suite_translation(pairs: int = 5, nmax: int = 12, tol: float = 1e-8) -> VerifyReport:
    rng = np.random.default_rng(SEED)
    checks = []
    for name, pot, energy in (("airy", AIRY, 0.0), ("harmonic", HARMONIC, 0.5)):
        g = _graph(pot, energy)
        worst, rows = 0.0, []
        for x, x0 in random_sector_pairs(g, 1, pairs, rng):
            r = translation_residual(g, 1, x, x0, nmax)
            rows.append({"x": [x.real, x.imag], "x0": [x0.real, x0.imag], "residual": r})
            worst = max(worst, r)
        checks.append(CheckLine(name=f"translation-{name}", passed=worst < tol, value=worst,
                                threshold=tol, detail={"pairs": rows}))
    return _report("eq21", checks)


def suite_summed_ode(lam: float = 5.0, tol: float = 1e-6) -> VerifyReport:
    """Borel sums of every sector's series at that sector's own probes solve the chi-ODE."""
    g = _graph(AIRY)
    rows, worst = [], 0.0
    for sec in g.sectors:
        for x in oracle.sector_probes(g, sec.index):
            if sec.index not in [k for k, _ in stokes.summable_set(g, x)]:
                continue
            r = oracle.summed_chi_residual(g, sec.index, x, lam)
            rows.append({"sector": sec.index, "x": [x.real, x.imag], "residual": r})
            worst = max(worst, r)
    ok = worst < tol and len(rows) > 0
    return _report("appendix2", [CheckLine(name="chi-ode-residual", passed=ok, value=worst,
                                           threshold=tol, detail={"lambda": lam, "points": rows})])


def suite_base_pair(x: complex = 2.0, x0: complex = 1.0, lams=(6.0, 9.0, 12.0, 15.0),
                 lam_check: float = 10.0, tol: float = 1e-5, slope_tol: float = 0.10) -> VerifyReport:
    g = _graph(AIRY)
    rep = oracle.lemma3_experiment(g, x, x0, list(lams))
    chk = oracle.lemma3_experiment(g, x, x0, [lam_check])
    three = chk.rows[0]["residuals"]["bs_vs_rhs"]
    rel = abs(rep.slope_fit - rep.slope_expected) / abs(rep.slope_expected)
    gap_c = abs(rep.bs_at_x0 - rep.c_at_x0)
    gap_one = abs(rep.bs_at_x0 - 1.0)
    checks = [
        CheckLine(name="three-way-residual", passed=three < tol, value=three, threshold=tol,
                  detail={"lambda": lam_check, "row": chk.rows[0]}),
        CheckLine(name="discrepancy-slope", passed=rel < slope_tol, value=rel, threshold=slope_tol,
                  detail={"slope_fit": rep.slope_fit, "slope_expected": rep.slope_expected}),
        CheckLine(name="sum-at-x0-is-prefactor", passed=gap_c < gap_one, value=gap_c, threshold=gap_one,
                  detail={"bs_at_x0": [rep.bs_at_x0.real, rep.bs_at_x0.imag],
                          "prefactor": [rep.c_at_x0.real, rep.c_at_x0.imag]}),
    ]
    return _report("lemma3", checks, rep.to_json())


def suite_connection(lam_check: float = 10.0, lams=(5.0, 10.0, 20.0, 40.0),
                     tol: float = 1e-6) -> VerifyReport:
    """psi_3 = alpha psi_1 + beta psi_2 on the Airy graph with beta = -i chi_{3->1}."""
    g = _graph(AIRY)
    rows = []
    for lam in sorted(set(lams) | {lam_check}):
        c = oracle.connection(g, 3, (1, 2), lam)
        t = oracle.chi_transition_limit(g, 3, 1, lam)
        rows.append({"lambda": lam, "alpha": [c.alpha.real, c.alpha.imag],
                     "beta": [c.beta.real, c.beta.imag], "chi_3_1": [t.real, t.imag],
                     "fit_residual": c.residual, "beta_gap": abs(c.beta + 1j * t),
                     "C_gap": abs(c.beta + 1j)})
    at = next(r for r in rows if r["lambda"] == lam_check)
    trend = [r for r in rows if r["lambda"] in lams]
    worst_trend = max(r["C_gap"] for r in trend)
    checks = [
        CheckLine(name="beta-equals-minus-i-chi31", passed=at["beta_gap"] < tol, value=at["beta_gap"],
                  threshold=tol, detail=at),
        CheckLine(name="C-trend-to-minus-i", passed=worst_trend < tol, value=worst_trend, threshold=tol,
                  detail={"rows": trend}),
    ]
    return _report("connection", checks)


def suite_eigen_ho(count: int = 6, tol: float = 1e-8) -> VerifyReport:
    V = parse_polynomial(HARMONIC)
    res = oracle.eigenvalues(V, 1.0, (0.0, count + 0.0), count)
    gaps = [r.E.real - (n + 0.5) for n, r in enumerate(res)]
    worst = max((abs(d) for d in gaps), default=float("inf"))
    ok = len(res) == count and worst < tol
    return _report("eigen-ho", [CheckLine(name="harmonic-spectrum", passed=ok, value=worst, threshold=tol,
                                          detail={"residuals": gaps})])


def _report(name, checks, data=None) -> VerifyReport:
    return VerifyReport(suite=name, passed=all(c.passed for c in checks), checks=checks, data=data or {})


SUITE_FUNCS = {
    "eq21": suite_translation,
    "appendix2": suite_summed_ode,
    "lemma3": suite_base_pair,
    "connection": suite_connection,
    "eigen-ho": suite_eigen_ho,
}


def run_suite(name: str) -> VerifyReport:
    t0 = time.perf_counter()
    rep = SUITE_FUNCS[name]()
    log.info("suite %s: %s in %.1f s", name, "pass" if rep.passed else "FAIL", time.perf_counter() - t0)
    return rep
