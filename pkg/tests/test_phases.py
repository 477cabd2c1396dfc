import numpy as np
import pytest

from paprhad.glse import GlseConfig, solve_glse
from paprhad.oracles import enumerate_phases, naive_residual_energy, random_instance
from paprhad.phases import (
    AlternatingConfig,
    PhaseAlphabet,
    PhaseConfig,
    alternate_had,
    alternate_had_batch,
    coordinate_descent_phases,
    phase_objective,
    regularized_objective,
)

AL4 = PhaseAlphabet.uniform(4)


def test_uniform_alphabet():
    np.testing.assert_allclose(AL4.values, [1, 1j, -1, -1j], atol=1e-15)
    assert AL4.Q == len(AL4) == 4
    with pytest.raises(ValueError):
        AL4.values[0] = 2


def test_alphabet_from_fractions():
    al = PhaseAlphabet.from_fractions([0.0, 0.5])
    np.testing.assert_allclose(al.values, [1, -1], atol=1e-15)


@pytest.mark.parametrize("values", [[], [2.0], [1.0, 1.0]])
def test_alphabet_validation(values):
    with pytest.raises(ValueError):
        PhaseAlphabet(np.asarray(values, complex))


def test_phase_config_members(rng):
    d = PhaseConfig.random(16, AL4, rng)
    assert d.M == 16
    assert all(v in set(AL4.values.tolist()) for v in d.d.tolist())
    np.testing.assert_array_equal(PhaseConfig.ones(3, AL4).d, [1, 1, 1])


def test_phase_objective_matches_naive(rng):
    H, T, s = random_instance(rng, 3, 2, 6)
    x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    d = PhaseConfig.random(6, AL4, rng)
    assert phase_objective(d, x, H, T, s) == pytest.approx(naive_residual_energy(x, d.d, T, H, s), rel=1e-12)
    assert regularized_objective(x, d.d, H, T, s, 0.5) == pytest.approx(
        naive_residual_energy(x, d.d, T, H, s, 0.5), rel=1e-12
    )


def test_single_level_alphabet_is_fixed(rng):
    H, T, s = random_instance(rng, 2, 2, 4)
    al = PhaseAlphabet(np.array([1.0 + 0j]))
    d = coordinate_descent_phases(PhaseConfig.ones(4, al), rng.standard_normal(2) + 0j, H, T, s, sweeps=3)
    np.testing.assert_array_equal(d.indices, 0)


def test_descent_never_increases(rng):
    for _ in range(20):
        H, T, s = random_instance(rng, 3, 2, 8)
        x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        d0 = PhaseConfig.random(8, AL4, rng)
        hist = []
        d = coordinate_descent_phases(d0, x, H, T, s, sweeps=3, history=hist)
        f0 = phase_objective(d0, x, H, T, s)
        h = np.array([f0] + [float(v) for v in hist])
        assert np.all(np.diff(h) <= 1e-12 * h[:-1])
        assert phase_objective(d, x, H, T, s) == pytest.approx(h[-1], rel=1e-10)


def test_descent_result_is_coordinate_optimal(rng):
    for _ in range(20):
        H, T, s = random_instance(rng, 2, 2, 5)
        x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        d = coordinate_descent_phases(PhaseConfig.ones(5, AL4), x, H, T, s, sweeps=50)
        f = phase_objective(d, x, H, T, s)
        for m in range(5):
            for q in range(4):
                idx = d.indices.copy()
                idx[m] = q
                assert phase_objective(PhaseConfig(idx, AL4), x, H, T, s) >= f - 1e-12 * f


def test_never_below_exhaustive(rng):
    for _ in range(10):
        H, T, s = random_instance(rng, 2, 2, 4)
        x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        best, combo = enumerate_phases(x, H, T, s, AL4.values)
        d = coordinate_descent_phases(PhaseConfig.ones(4, AL4), x, H, T, s, sweeps=10)
        assert phase_objective(d, x, H, T, s) >= best - 1e-12
        opt = PhaseConfig(np.array(combo), AL4)
        np.testing.assert_array_equal(coordinate_descent_phases(opt, x, H, T, s, sweeps=3).indices, opt.indices)


def test_descent_batched_matches_single(rng):
    H = rng.standard_normal((4, 3, 6)) + 1j * rng.standard_normal((4, 3, 6))
    T = np.exp(2j * np.pi * rng.random((6, 2)))
    s = rng.standard_normal((4, 3)) + 0j
    x = rng.standard_normal((4, 2)) + 0j
    d = coordinate_descent_phases(PhaseConfig.ones(6, AL4), x, H, T, s, sweeps=2)
    for j in range(4):
        dj = coordinate_descent_phases(PhaseConfig.ones(6, AL4), x[j], H[j], T, s[j], sweeps=2)
        np.testing.assert_array_equal(d.indices[j], dj.indices)


def test_one_pass_equals_manual_composition(rng):
    H, T, s = random_instance(rng, 4, 2, 16)
    cfg = GlseConfig(mu=0.1)
    d0 = PhaseConfig.ones(16, AL4)
    res = alternate_had(s, H, T, cfg, AlternatingConfig(1e-6, 1), d0)
    x1 = solve_glse(H @ T, s, cfg).x
    d1 = coordinate_descent_phases(d0, x1, H, T, s)
    np.testing.assert_allclose(res.signal.x, x1, atol=1e-12)
    np.testing.assert_array_equal(res.phases.indices, d1.indices)
    assert res.iterations == 1 and res.stopped_by in ("threshold", "max_iter")


def test_huge_threshold_stops_after_one_pass(rng):
    H, T, s = random_instance(rng, 4, 2, 16)
    res = alternate_had(s, H, T, GlseConfig(mu=0.1), AlternatingConfig(1e9, 20), PhaseConfig.ones(16, AL4))
    assert res.iterations == 1 and res.stopped_by == "threshold"
    assert len(res.trace) == 2


def test_alternating_trace_monotone_and_closed(rng):
    for _ in range(5):
        H, T, s = random_instance(rng, 4, 2, 16)
        res = alternate_had(s, H, T, GlseConfig(mu=0.1), AlternatingConfig.default(16), PhaseConfig.ones(16, AL4))
        tr = np.asarray(res.trace)
        assert np.all(np.diff(tr) <= 1e-12 * tr[:-1])
        assert set(res.phases.d.tolist()) <= set(AL4.values.tolist())
        assert 1 <= res.iterations <= 20


def test_global_phase_covariance(rng):
    H, T, s = random_instance(rng, 4, 2, 16)
    cfg = GlseConfig(mu=0.1, tol=1e-12)
    alt = AlternatingConfig.default(16)
    a = alternate_had(s, H, T, cfg, alt, PhaseConfig.ones(16, AL4))
    rot = np.exp(0.7j)
    b = alternate_had(rot * s, H, T, cfg, alt, PhaseConfig.ones(16, AL4))
    assert b.signal.objective == pytest.approx(a.signal.objective, rel=1e-6)


def test_batch_trace_shape(rng):
    H = (rng.standard_normal((3, 4, 16)) + 1j * rng.standard_normal((3, 4, 16))) / np.sqrt(32)
    s = rng.standard_normal((3, 4)) + 0j
    T = np.exp(2j * np.pi * rng.random((16, 2)))
    out = alternate_had_batch(s, H, T, GlseConfig(0.1), AlternatingConfig(1e-6, 5), PhaseConfig.ones(16, AL4))
    trace, iters = out[-1], out[4]
    assert trace.shape == (3, 10)
    for j in range(3):
        n = 2 * iters[j]
        assert np.all(np.isfinite(trace[j, :n])) and np.all(np.isnan(trace[j, n:]))


def test_alternating_config_validation():
    with pytest.raises(ValueError):
        AlternatingConfig(0.0, 5)
    with pytest.raises(ValueError):
        AlternatingConfig(1e-6, 0)
    assert AlternatingConfig.default(64).threshold == pytest.approx(8e-6)
