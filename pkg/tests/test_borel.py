import math

import numpy as np
import pytest
from scipy.special import airye

from exactwkb import borel, oracle, series
from exactwkb.errors import DivergenceError, InputError, PoleOnRayError


def airy_chi(x, lam):
    """chi-factor of the decaying Airy solution from scipy's scaled Ai."""
    z = lam ** (2.0 / 3.0) * x
    return 2.0 * math.sqrt(math.pi) * z**0.25 * airye(z)[0]


def test_borel_round_trip():
    a = series.AsymptoticSeries(1, [1.0, -2.0, 6.0j, 24.0])
    b = borel.to_borel(a)
    np.testing.assert_allclose(b.coeffs, [1.0, -2.0, 3.0j, 4.0])
    np.testing.assert_allclose(borel.from_borel(b).coeffs, a.coeffs)
    with pytest.raises(InputError):
        borel.to_borel(series.AsymptoticSeries(1, [1.0]))


def test_pade_recovers_simple_pole():
    r = 0.75 * np.exp(0.4j)
    b = borel.BorelSeries(r ** -np.arange(21.0), radius_estimate=borel.radius_estimate(r ** -np.arange(21.0)))
    assert b.radius_estimate == pytest.approx(abs(r), rel=1e-6)
    pa = borel.pade(b, 10, 10)
    assert abs(pa.nearest_pole() - r) < 1e-10
    s = 0.3 - 0.2j
    assert abs(pa(s) - 1.0 / (1.0 - s / r)) < 1e-12


def test_pade_order_check():
    with pytest.raises(InputError):
        borel.pade(borel.BorelSeries(np.ones(5)), 3, 3)


@pytest.mark.parametrize("lam", [3.0, 2.0 + 1.5j])
def test_laplace_moments(lam):
    # s^n maps to n! (-1/(2 lam))^n
    for n in range(4):
        c = np.zeros(n + 1)
        c[n] = 1.0
        got = borel.laplace_sum(borel.BorelSeries(c), lam).value
        assert abs(got - math.factorial(n) * (-1.0 / (2 * lam)) ** n) < 1e-12


def test_laplace_errors():
    b = borel.BorelSeries((-1.0) ** np.arange(21.0))  # 1/(1+s): pole at s = -1
    pa = borel.pade(b, 10, 10)
    with pytest.raises(PoleOnRayError, match="pole-on-ray"):
        borel.laplace_sum(pa, 5.0)  # default ray runs along negative s
    with pytest.raises(DivergenceError):
        borel.laplace_sum(borel.BorelSeries([1.0]), 5.0, ray_angle=np.pi)


@pytest.mark.parametrize("x", [1.0, 1.5])
def test_airy_borel_pade_sum_matches_scipy(airy, x):
    ser = series.chi_series(airy, 1, x, 20)
    for lam in (5.0, 10.0):
        val, err, _ = oracle.borel_pade_sum(ser, lam)
        assert abs(val - airy_chi(x, lam)) < 1e-9


def test_airy_forecast_has_no_fixed_points(airy, harmonic):
    fc = borel.predicted_singularities(airy, 1.0)
    assert fc.fixed == ()
    assert abs(fc.moving - 2.0 / 3.0) < 1e-12
    # x^2 - 1: the action between the turning points is +-i pi/2
    fixed = borel.predicted_singularities(harmonic, 2.0).fixed
    assert fixed and min(abs(abs(z) - np.pi / 2) for z in fixed) < 1e-10


def test_topological_expansion_is_third_order_accurate(airy):
    od = borel.omega_data(airy, 1, 1.0)
    b = borel.to_borel(series.chi_series(airy, 1, 1.0, 20)).coeffs

    def gap(s):
        v = borel.phi_topological(od, s, 0) + borel.phi_topological(od, s, 1)
        return abs(v - (b[0] + b[1] * s + b[2] * s * s))

    ratio = gap(0.04) / gap(0.02)
    assert 5.0 < ratio < 11.0
