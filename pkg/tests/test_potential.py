import numpy as np
import pytest

from exactwkb.errors import (InputError, MultipleTurningPointError, ParseError,
                             TurningPointProximityError)
from exactwkb.potential import (characteristic, format_polynomial, horner, naive_eval, omega,
                                parse_polynomial, turning_points)
from exactwkb import stokes


def test_parse_basic():
    assert parse_polynomial("x^4 - 2*x").coefficients == (0j, -2 + 0j, 0j, 0j, 1 + 0j)
    assert parse_polynomial("x**2/2 + 0.5").coefficients == (0.5 + 0j, 0j, 0.5 + 0j)
    assert parse_polynomial("(x+1)^2").coefficients == (1 + 0j, 2 + 0j, 1 + 0j)
    assert parse_polynomial("i*x^2 + 1").coefficients == (1 + 0j, 0j, 1j)


@pytest.mark.parametrize("text,pos", [("x/x", 1), ("x^-1", 2), ("x^1.5", 2), ("(x+1", 4),
                                      ("2*y", 2), ("3 x", 2), ("x^^2", 2)])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(ParseError) as exc:
        parse_polynomial(text)
    assert exc.value.position == pos
    assert f"position {pos}" in str(exc.value)


def test_format_round_trip():
    for text in ("x^4/4 - x^2/2", "(1+2*i)*x^3 - 0.1", "x/2", "7"):
        p = parse_polynomial(text)
        assert parse_polynomial(format_polynomial(p)) == p


def test_characteristic_convention():
    q = characteristic(parse_polynomial("x^2/2"), 0.5)
    np.testing.assert_allclose(q.coeffs, [-1, 0, 1])
    with pytest.raises(InputError):
        characteristic(parse_polynomial("3"), 0.0)


def test_compensated_horner_beats_naive():
    c = parse_polynomial("(x-1)^7").coefficients
    x = 1.001
    exact = 1e-21
    assert abs(horner(c, x) - exact) < 1e-6 * exact
    assert abs(horner(c, x) - exact) < abs(naive_eval(c, x) - exact)


def test_turning_points_and_multiplicity():
    tps = turning_points(characteristic(parse_polynomial("x^4/4 - x^2/2"), -0.1))
    x = np.sort(tps.locations.real)
    # roots of x^4 - 2 x^2 + 0.4 = 0
    r = np.sqrt([1 - np.sqrt(0.6), 1 + np.sqrt(0.6)])
    np.testing.assert_allclose(x, [-r[1], -r[0], r[0], r[1]], atol=1e-13)
    assert tps.all_simple
    double = turning_points(characteristic(parse_polynomial("(x-1)^2*(x+2)"), 0.0))
    assert sorted(p.multiplicity for p in double) == [1, 2]
    with pytest.raises(MultipleTurningPointError):
        stokes.build_graph(characteristic(parse_polynomial("(x-1)^2*(x+2)"), 0.0))


def test_omega_closed_form_airy():
    q = characteristic(parse_polynomial("x/2"), 0.0)
    x = 2.0 + 0.5j
    r = np.sqrt(x)
    assert abs(omega(q, x, r) - (-5.0 / 16.0) / (x * x * r)) < 1e-15
    with pytest.raises(TurningPointProximityError):
        omega(q, 0.0, 0.0)
