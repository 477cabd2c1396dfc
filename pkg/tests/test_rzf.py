import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from paprhad.glse import GlseConfig, solve_glse
from paprhad.oracles import dense_rzf, random_instance
from paprhad.rzf import RzfConfig, SingularSystemError, clip, rzf_matched_identity_check, solve_rzf

cplx = st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False)


def test_identity_channel():
    x = solve_rzf(np.eye(2, dtype=complex), np.array([1.0, 1j]), 1.0)
    np.testing.assert_allclose(x, [0.5, 0.5j])


def test_zero_forcing_when_square(rng):
    A, s = random_instance(rng, 4, 4)
    np.testing.assert_allclose(A @ solve_rzf(A, s, 0.0), s, atol=1e-10)


def test_matches_dense_lu(rng):
    A, s = random_instance(rng, 8, 4)
    np.testing.assert_allclose(solve_rzf(A, s, RzfConfig(mu=0.5)), dense_rzf(A, s, 0.5), rtol=1e-10)


def test_linear_in_symbols(rng):
    A, s = random_instance(rng, 8, 4)
    s2 = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    a, b = 0.7 - 0.2j, -1.3j
    lhs = solve_rzf(A, a * s + b * s2, 0.1)
    rhs = a * solve_rzf(A, s, 0.1) + b * solve_rzf(A, s2, 0.1)
    np.testing.assert_allclose(lhs, rhs, atol=1e-10)


def test_push_through_identity(rng):
    A, s = random_instance(rng, 8, 4)
    assert rzf_matched_identity_check(A, s, 0.3) < 1e-10


def test_batched(rng):
    A = rng.standard_normal((3, 8, 4)) + 1j * rng.standard_normal((3, 8, 4))
    s = rng.standard_normal((3, 8)) + 0j
    x = solve_rzf(A, s, 0.2)
    np.testing.assert_allclose(x[2], solve_rzf(A[2], s[2], 0.2))


def test_singular_gram_raises(rng):
    A, s = random_instance(rng, 8, 4)
    with pytest.raises(SingularSystemError, match="singular"):
        solve_rzf(A, s, 0.0)


def test_agrees_with_glse_when_peak_is_loose(rng):
    A, s = random_instance(rng, 8, 4)
    x = solve_glse(A, s, GlseConfig(mu=0.1, peak_power=1e6, tol=1e-12)).x
    ref = solve_rzf(A, s, 0.1)
    assert np.linalg.norm(x - ref) / np.linalg.norm(ref) < 1e-5


def test_clip_examples():
    np.testing.assert_allclose(clip(np.array([2.0, 0.5]), 1.0), [1.0, 0.5])
    np.testing.assert_allclose(clip(np.array([-3j]), 4.0), [-2j])
    assert clip(np.array([0j]), 1.0)[0] == 0


def test_clip_keeps_boundary_value():
    x = np.array([1.0 + 0j])
    assert clip(x, 1.0)[0] == x[0]


@settings(max_examples=100, deadline=None)
@given(arrays(complex, 5, elements=cplx), st.floats(1e-3, 1e3))
def test_clip_feasible_idempotent_phase_preserving(x, P):
    c = clip(x, P)
    assert np.all(np.abs(c) ** 2 <= P * (1 + 4 * np.finfo(float).eps))
    np.testing.assert_allclose(clip(c, P), c, rtol=1e-15)
    nz = np.abs(x) > 0
    np.testing.assert_allclose(np.angle(c[nz]), np.angle(x[nz]), atol=1e-12)


def test_config_validation():
    with pytest.raises(ValueError):
        RzfConfig(mu=np.nan)
    with pytest.raises(ValueError):
        RzfConfig(peak_power=-1.0)
