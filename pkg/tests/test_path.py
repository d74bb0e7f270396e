import numpy as np
import pytest

from exactwkb import quadrature
from exactwkb.errors import InputError
from exactwkb.path import (action, circle_path, continue_branch, enclosing_contour, is_canonical,
                           line_path)
from exactwkb.potential import characteristic, parse_polynomial, turning_points


@pytest.fixture(scope="module")
def q_airy():
    return characteristic(parse_polynomial("x/2"), 0.0)


@pytest.fixture(scope="module")
def q_ho():
    return characteristic(parse_polynomial("x^2/2"), 0.5)


def test_quadrature_gk_oscillatory():
    val, err = quadrature.integrate(lambda t: np.exp(1j * 20 * t), 0.0, 1.0)
    assert abs(val - (np.exp(20j) - 1) / 20j) < 1e-13
    assert err < 1e-12


def test_quadrature_semi_infinite():
    val, _ = quadrature.integrate_semi_infinite(lambda t: np.exp(-2 * t))
    assert abs(val - 0.5) < 1e-12


def test_line_path_nodes():
    p = line_path(0, 1, 1 + 1j)
    assert list(p.nodes) == [0j, 1 + 0j, 1 + 1j]
    assert p.length() == pytest.approx(2.0)


def test_monodromy_around_simple_turning_point(q_airy):
    tps = turning_points(q_airy)
    loop = circle_path(0.0, 0.5)
    br = continue_branch(q_airy, loop, np.sqrt(0.5 + 0j), tps)
    assert abs(br.final + br.initial) < 1e-12  # sqrt(x) changes sign
    twice = circle_path(0.0, 0.5, turns=2)
    br2 = continue_branch(q_airy, twice, np.sqrt(0.5 + 0j), tps)
    assert abs(br2.final - br2.initial) < 1e-12


def test_action_from_turning_point(q_airy):
    p = line_path(0.0, 1.0, endpoint_turning=(True, False))
    br = continue_branch(q_airy, p, 1.0 + 0j, turning_points(q_airy))
    assert abs(action(br).value - 2.0 / 3.0) < 1e-12


def test_action_around_finite_line(q_ho):
    # closed loop around both turning points of x^2 - 1: |integral sqrt(q)| = pi
    tps = turning_points(q_ho)
    loop = enclosing_contour(tps)
    br = continue_branch(q_ho, loop, np.sqrt(complex(q_ho(loop.segments[0].start))), tps)
    assert abs(abs(action(br).value) - np.pi) < 1e-11


def test_action_needs_nodes(q_airy):
    br = continue_branch(q_airy, line_path(1.0, 2.0), 1.0 + 0j, turning_points(q_airy))
    with pytest.raises(InputError):
        action(br, start=1.5)


def test_canonicity_orientation(q_airy):
    tps = turning_points(q_airy)
    # on the positive axis Re W grows outward, so decay (sigma = -1) means moving inward
    inward = continue_branch(q_airy, line_path(4.0, 1.0), 2.0 + 0j, tps)
    outward = continue_branch(q_airy, line_path(1.0, 4.0), 1.0 + 0j, tps)
    assert is_canonical(inward, -1)
    assert not is_canonical(outward, -1)
    assert is_canonical(outward, 1)
