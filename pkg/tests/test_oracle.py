import numpy as np
import pytest

from exactwkb import oracle
from exactwkb.errors import BracketExhaustedError, InputError
from exactwkb.potential import parse_polynomial
from test_borel import airy_chi


@pytest.mark.parametrize("x", [1.0, 2.0 + 1.0j, 0.5 + 0.5j, -1.0 + 0.2j, 0.3])
def test_fundamental_chi_matches_scipy_airy(airy, x):
    lam = 5.0
    f = oracle.fundamental_chi(airy, 1, x, lam)
    assert abs(f.chi - airy_chi(x, lam)) < 1e-8 * abs(airy_chi(x, lam))


def test_transition_routes_agree(airy):
    lam = 10.0
    wr = oracle.chi_transition(airy, 3, 1, lam, 0.4 + 0.6j)
    lim = oracle.chi_transition_limit(airy, 3, 1, lam)
    assert abs(wr - lim) < 1e-9
    assert abs(lim - 1.0) < 1e-9  # Airy: the transition factor is exactly one


def test_airy_connection_coefficients(airy):
    c = oracle.connection(airy, 3, (1, 2), 10.0)
    assert abs(c.alpha - 1.0) < 1e-8
    assert abs(c.beta + 1j) < 1e-8
    assert c.residual < 1e-8


def test_harmonic_spectrum_both_routes():
    V = parse_polynomial("x^2/2")
    w = oracle.eigenvalues(V, 1.0, (0.0, 3.0), 3)
    s = oracle.shooting_eigenvalues(V, 1.0, (0.0, 3.0), 3)
    for n, (a, b) in enumerate(zip(w, s)):
        assert abs(a.E - (n + 0.5)) < 1e-9
        assert abs(b.E - (n + 0.5)) < 1e-9


def test_semiclassical_scaling():
    # with lam = 2 the harmonic levels are (n + 1/2) / 2
    w = oracle.eigenvalues(parse_polynomial("x^2/2"), 2.0, (0.0, 1.5), 2)
    assert abs(w[0].E - 0.25) < 1e-9 and abs(w[1].E - 0.75) < 1e-9


def test_eigen_errors():
    with pytest.raises(BracketExhaustedError):
        oracle.eigenvalues(parse_polynomial("x^2/2"), 1.0, (0.0, 1.0), 2)
    with pytest.raises(InputError):
        oracle.eigenvalues(parse_polynomial("x^3"), 1.0, (0.0, 1.0), 1)


def test_non_summability_report_shape(airy):
    rep = oracle.lemma3_experiment(airy, 2.0, 1.0, [10.0])
    row = rep.rows[0]
    assert {"lambda", "bs_value", "oracle_value", "rhs_factorized", "residuals"} <= set(row)
    assert row["residuals"]["bs_vs_rhs"] < 1e-5


def test_summed_chi_residual_small(airy):
    assert oracle.summed_chi_residual(airy, 1, 1.5 + 0.3j, 5.0) < 1e-6


def test_sector_probes_inside_sector(double_well):
    for sec in double_well.sectors:
        for p in oracle.sector_probes(double_well, sec.index):
            assert sec.contains_angle(float(np.angle(p)))
