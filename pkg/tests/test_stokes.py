import numpy as np
import pytest

from exactwkb import oracle, stokes
from exactwkb.errors import TurningPointProximityError


def test_airy_sectors(airy):
    assert airy.n_sectors == 3
    lo, hi = airy.sector(1).direction_interval
    assert lo == pytest.approx(-np.pi / 3) and hi == pytest.approx(np.pi / 3)
    assert [s.signature for s in airy.sectors] == [-1, 1, -1]
    assert all(ln.drift < stokes.LINE_TOL for ln in airy.lines)


def test_harmonic_finite_line(harmonic):
    assert harmonic.n_sectors == 4
    finite = [ln for ln in harmonic.lines if ln.finite]
    assert finite
    pts = finite[0].polyline
    assert np.max(np.abs(pts.imag)) < 1e-8
    assert np.max(np.abs(pts.real)) == pytest.approx(1.0, abs=1e-8)


def test_double_well_six_sectors(double_well):
    assert double_well.n_sectors == 6
    assert sorted(s.signature for s in double_well.sectors) == [-1, -1, -1, 1, 1, 1]


def test_classify(airy, harmonic):
    assert stokes.classify_point(airy, 2.0).sector == 1
    on_line = stokes.classify_point(airy, 2 * np.exp(1j * np.pi / 3))
    assert on_line.kind == "infinite-line"
    assert stokes.classify_point(harmonic, 0.5).kind == "finite-line"
    with pytest.raises(TurningPointProximityError):
        stokes.classify_point(airy, 0.0)


def test_xi_matches_closed_form(airy):
    for x in (1.0, 2.0, 1.5 + 0.5j):
        assert abs(stokes.xi_of(airy, 1, x) - 2.0 / 3.0 * x**1.5) < 1e-12


def test_rotation_by_pi_flips_signatures(airy):
    rot = stokes.rotate(airy, np.pi)
    assert [s.signature for s in rot.sectors] == [-s.signature for s in airy.sectors]


def test_canonical_path_is_monotone(airy):
    for k in (1, 2, 3):
        path = stokes.canonical_path(airy, k, 2.0)
        assert path is not None
        stokes.sector_path_check(airy, k, path)


def test_summation_ray_default_and_tilted(airy):
    assert stokes.summation_ray(airy, 1, 2.0) == pytest.approx(0.0)
    # sector 2's moving singularity reaches the default ray at x > 0
    tilt = stokes.summation_ray(airy, 2, 2.0)
    assert tilt is not None and abs(tilt) > 0.1
    assert sorted(k for k, _ in stokes.summable_set(airy, 2.0)) == [1, 2, 3]


def test_tilted_ray_sum_returns_sector_solution(airy):
    (chk,) = oracle.summation_check(airy, 2, 2.0, [10.0])
    assert chk.relative < 1e-5
