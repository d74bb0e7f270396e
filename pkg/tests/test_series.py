import math

import numpy as np
import pytest
from scipy.special import gamma

from exactwkb import oracle, series, stokes, verify
from exactwkb.errors import InputError


def _u(n):
    return gamma(3 * n + 0.5) / (54**n * math.factorial(n) * gamma(n + 0.5))


@pytest.mark.parametrize("x", [1.0, 2.5])
def test_airy_coefficients_through_order_12(airy, x):
    ser = series.chi_series(airy, 1, x, 12)
    assert ser.coeffs[0] == pytest.approx(1.0)
    for n in range(1, 13):
        got = series.airy_u_from_chi(ser.coeffs[n], n, x)
        assert abs(got - _u(n)) < 1e-9 * _u(n)


def test_airy_u_recurrence_matches_gamma_form():
    for n in range(8):
        assert series.airy_u(n) == pytest.approx(_u(n), rel=1e-13)


def test_exponential_representation_matches_recursion(double_well):
    """Two routes to the same coefficients: the chi recursion and exp of Riccati integrals."""
    x = 2.0 + 0.4j
    path = stokes.canonical_path(double_well, 1, x, clearance=series.SERIES_CLEARANCE)
    direct = series.chi_series(double_well, 1, x, 10, path)
    sec = double_well.sector(1)
    rep = series.rho_pm(double_well.characteristic, path, sec.sqrt_anchor(path.start, double_well),
                        sec.signature, 10, double_well.turning_points)
    via_rho = rep.chi_series(10)
    scale = np.maximum(np.abs(direct.coeffs), 1.0)
    assert np.max(np.abs(via_rho.coeffs - direct.coeffs) / scale) < 1e-9


def test_translation_identity_double_well(double_well):
    rng = np.random.default_rng(3)
    (x, x0), = verify.random_sector_pairs(double_well, 1, 1, rng)
    assert verify.translation_residual(double_well, 1, x, x0) < 1e-8


def test_reciprocal_routes_agree():
    rng = np.random.default_rng(0)
    a = series.AsymptoticSeries(-1, rng.normal(size=12) + 1j * rng.normal(size=12))
    a.coeffs[0] = 2.0
    b1 = series.series_reciprocal(a).coeffs
    b2 = series.series_reciprocal(a, "geometric").coeffs
    assert np.max(np.abs(b1 - b2)) < 1e-10 * np.max(np.abs(b1))
    a.coeffs[0] = 0.0
    with pytest.raises(InputError):
        series.series_reciprocal(a)


def test_exp_log_inverse():
    a = np.array([0.3, -1.0, 0.5j, 2.0, 0.1])
    back = series.series_log(series.series_exp(a))
    np.testing.assert_allclose(back, a, atol=1e-14)


def test_with_sigma_preserves_value():
    a = series.AsymptoticSeries(-1, [1.0, 0.5, 0.25, 0.125])
    lam = 3.0 + 1.0j
    assert a.with_sigma(1).value(lam) == pytest.approx(a.value(lam), abs=1e-15)


def test_json_round_trip():
    a = series.AsymptoticSeries(1, [1.0, 2.0j, -3.0], at_point=1.5 + 0.5j)
    b = series.AsymptoticSeries.from_json(a.to_json())
    assert b.sigma == 1 and b.at_point == a.at_point
    np.testing.assert_array_equal(b.coeffs, a.coeffs)


def test_first_order_bound_deep_in_sector(airy):
    # |chi - 1| shrinks like 1/lam deep inside the sector
    x = 3.0
    d = [abs(oracle.fundamental_chi(airy, 1, x, lam).chi - 1.0) for lam in (5.0, 10.0, 20.0)]
    assert d[0] > d[1] > d[2]
    assert max(lam * v for lam, v in zip((5.0, 10.0, 20.0), d)) < 2 * min(
        lam * v for lam, v in zip((5.0, 10.0, 20.0), d))


def test_rho_plus_loops_vanish_relative(double_well):
    tp = complex(double_well.turning_points.locations[0])
    vals, scales = series.rho_plus_loop_integrals(double_well.characteristic, tp, 0.3, 3)
    assert np.all(np.abs(vals) < 1e-12 * scales)
