import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paprhad.geometry import (
    ArrayGeometry,
    DegenerateGeometryError,
    Position3,
    RadiationPattern,
    build_default_geometry,
    build_feed_matrix,
    build_geometry,
    pattern_gain,
    relative_spherical,
)

LAM = 5e-3


def test_position_rejects_nan():
    with pytest.raises(ValueError):
        Position3(0.0, float("nan"), 0.0)


def test_default_layout():
    g = build_default_geometry(LAM)
    assert g.n_active == 4 and g.n_passive == 64
    assert g.separation == pytest.approx(0.02 / math.sqrt(math.pi), rel=1e-15)
    assert g.separation == pytest.approx(11.2838e-3, abs=1e-7)
    act = g.active_array()
    np.testing.assert_allclose(np.linalg.norm(act[:, 1:], axis=1), LAM, rtol=1e-15)
    np.testing.assert_array_equal(act[:, 0], 0.0)
    pas = g.passive_array()
    np.testing.assert_allclose(pas[:, 0], g.separation)
    # grid centred on the ring axis
    np.testing.assert_allclose(pas[:, 1:].mean(axis=0), 0.0, atol=1e-18)


def test_passive_spacing_is_half_wavelength():
    pas = build_default_geometry(LAM).passive_array()
    dist = np.linalg.norm(pas[:, None] - pas[None], axis=-1)
    dist[np.diag_indices_from(dist)] = np.inf
    assert dist.min() == pytest.approx(LAM / 2, rel=1e-12)


def test_relative_spherical_on_axis():
    r, theta, phi = relative_spherical(Position3(0, 0, 0), Position3(1.0, 0, 0))
    assert (r, theta, phi) == (1.0, pytest.approx(math.pi / 2), 0.0)


def test_relative_spherical_above():
    r, theta, _ = relative_spherical(Position3(0, 0, 0), Position3(0, 0, 2.0))
    assert r == 2.0 and theta == 0.0


def test_relative_spherical_azimuth_range():
    _, _, phi = relative_spherical(Position3(0, 0, 0), Position3(0, -1.0, 0))
    assert phi == pytest.approx(3 * math.pi / 2)


def test_coincident_points_raise():
    with pytest.raises(DegenerateGeometryError):
        relative_spherical(Position3(1, 2, 3), Position3(1, 2, 3))
    with pytest.raises(DegenerateGeometryError):
        build_feed_matrix(build_geometry(LAM, active_positions=[(0, 0, 0)], passive_positions=[(0, 0, 0)]))


def test_pattern_gain_closed_band():
    p = RadiationPattern()
    assert pattern_gain(p, math.pi / 2) == 1.0
    assert pattern_gain(p, 0.1) == 0.0
    assert pattern_gain(p, math.pi / 6) == 1.0
    assert pattern_gain(p, 5 * math.pi / 6) == 1.0
    assert pattern_gain(p, 5 * math.pi / 6 + 1e-9) == 0.0


def test_pattern_validation():
    with pytest.raises(ValueError):
        RadiationPattern(1.0, 0.5)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, math.pi), st.floats(-10.0, 10.0))
def test_pattern_independent_of_azimuth(theta, phi):
    p = RadiationPattern()
    assert pattern_gain(p, theta, phi) == pattern_gain(p, theta, 0.0)


def test_feed_single_wavelength_distance():
    g = build_geometry(LAM, active_positions=[(0, 0, 0)], passive_positions=[(LAM, 0, 0), (LAM / 2, 0, 0)])
    F = build_feed_matrix(g)
    np.testing.assert_allclose(F.entries[:, 0], [1.0, -1.0], atol=1e-12)


def test_feed_unnormalized_magnitude():
    g = build_default_geometry(LAM)
    one = build_geometry(LAM, active_positions=[(0, 0, 0)], passive_positions=[(g.separation, 0, 0)])
    F = build_feed_matrix(one, normalize=False)
    assert abs(F.entries[0, 0]) == pytest.approx(LAM / (4 * math.pi * g.separation), rel=1e-12)
    assert abs(F.entries[0, 0]) == pytest.approx(0.03526, abs=5e-6)


def test_feed_outside_pattern_is_zero(caplog):
    g = build_geometry(LAM, active_positions=[(0, 0, 0)], passive_positions=[(0, 0, LAM), (LAM, 0, 0)])
    F = build_feed_matrix(g)
    assert F.entries[0, 0] == 0 and abs(F.entries[1, 0]) == pytest.approx(1.0)
    assert F.n_zero == 1
    assert "zero entries" in caplog.text


def test_default_feed_unit_modulus(feed):
    assert feed.shape == (64, 4) and feed.n_zero == 0
    np.testing.assert_allclose(np.abs(feed.entries), 1.0, atol=1e-12)


def test_normalized_is_scaled_unnormalized():
    g = build_default_geometry(LAM)
    a = build_feed_matrix(g, normalize=True).entries
    b = build_feed_matrix(g, normalize=False).entries
    np.testing.assert_allclose(a, b / np.abs(b), atol=1e-12)


def test_efficiency_scales_magnitude():
    a = build_feed_matrix(build_geometry(LAM, efficiency=1.0), normalize=False).entries
    b = build_feed_matrix(build_geometry(LAM, efficiency=0.25), normalize=False).entries
    np.testing.assert_allclose(b, 0.5 * a, rtol=1e-14)


def test_geometry_type():
    assert isinstance(build_default_geometry(LAM), ArrayGeometry)
