import math

import numpy as np
import pytest

from features.beamform.closed_form import (
    phase_alignment_gain,
    random_baseline_beams,
    random_phase_baseline,
    rayleigh_objective,
    rayleigh_optimal_beams,
    transmit_alignment_gain,
)
from features.beamform.optimizer import (
    BeamPair,
    alternating_optimize,
    default_init,
    objective_p3,
    optimal_f_given_phase,
    optimal_phase_given_f,
    random_init,
)
from features.channel.models import AngleSet, LinkParams, SystemConfig
from features.channel.synthesis import derive_link_params, draw_angles, los_components
from features.shared.errors import ConfigError, ConstraintViolation
from features.shared.numerics import RngStream, StreamPurpose, steering_vector

INV_SQRT2 = 1 / math.sqrt(2)


def random_unit_vectors(rng, m, count):
    u = rng.standard_normal((m, count)) + 1j * rng.standard_normal((m, count))
    return u / np.linalg.norm(u, axis=0)


def test_beam_pair_validates_constraints():
    with pytest.raises(ConstraintViolation):
        BeamPair(phi=np.array([1.0, 0.5]), f=np.array([1.0]))
    with pytest.raises(ConstraintViolation):
        BeamPair(phi=np.array([1.0]), f=np.array([1.0, 1.0]))
    pair = default_init(3, 5)
    assert (pair.M, pair.N) == (3, 5)


def test_objective_zero_in_null_space(fixed_angles):
    los = los_components(fixed_angles, 3, 4)
    params = derive_link_params(SystemConfig(M=3, N=4, angles=fixed_angles))
    rows = np.vstack([steering_vector(fixed_angles.theta_aod_1, 3), los.g_bar])
    f = np.linalg.svd(rows)[2][-1].conj()
    f /= np.linalg.norm(f)
    assert objective_p3(los, params, np.ones(4), f) == pytest.approx(0.0, abs=1e-20)


def test_objective_isolates_irs_term(fixed_angles):
    los = los_components(fixed_angles, 2, 3)
    params = LinkParams(gamma0=1.0, lam=0.0, a0=INV_SQRT2, a1=INV_SQRT2, a2=1.0,
                        b0=INV_SQRT2, b1=INV_SQRT2, b2=0.0)
    phi = np.exp(1j * np.array([0.1, 1.2, -2.0]))
    f = np.array([0.6, 0.8j])
    expected = abs(params.a1 * (los.h2_bar * phi) @ los.H1_bar @ f) ** 2
    assert objective_p3(los, params, phi, f) == pytest.approx(expected, rel=1e-12)


def test_objective_hand_expansion(fixed_angles):
    los = los_components(fixed_angles, 2, 2)
    p = derive_link_params(SystemConfig(M=2, N=2, angles=fixed_angles, K0=2.0, K1=0.5, K2=3.0))
    phi = np.exp(1j * np.array([0.7, -1.9]))
    f = np.array([0.28 + 0.96j, 0.0]) * 0.6 + np.array([0.0, 0.8])
    coherent = p.lam * p.a0 * (los.g_bar[0] * f[0] + los.g_bar[1] * f[1])
    scattered = 0.0
    for i in range(2):
        H1f_i = los.H1_bar[i, 0] * f[0] + los.H1_bar[i, 1] * f[1]
        coherent += p.a2 * p.a1 * phi[i] * los.h2_bar[i] * H1f_i
        scattered += abs(H1f_i) ** 2
    expected = abs(coherent) ** 2 + p.b2 ** 2 * p.a1 ** 2 * scattered
    assert objective_p3(los, p, phi, f) == pytest.approx(expected, rel=1e-12)


def test_phase_step_single_element(fixed_angles):
    los = los_components(fixed_angles, 2, 1)
    params = derive_link_params(SystemConfig(M=2, N=1, angles=fixed_angles))
    f = np.array([0.6, 0.8j])
    phi = optimal_phase_given_f(los, params, f)
    expected = np.exp(1j * (np.angle(los.g_bar @ f) - np.angle(los.h2_bar[0] * (los.H1_bar @ f)[0])))
    np.testing.assert_allclose(phi, [expected], atol=1e-12)


def test_phase_step_aligns_irs_and_direct_terms(small_scenario):
    _, los, params = small_scenario
    f = random_unit_vectors(np.random.default_rng(4), los.M, 1)[:, 0]
    phi = optimal_phase_given_f(los, params, f)

    np.testing.assert_allclose(np.abs(phi), 1.0, rtol=1e-12)
    summands = phi * los.h2_bar * (los.H1_bar @ f)
    direct = los.g_bar @ f
    np.testing.assert_allclose(np.angle(summands * np.conj(direct)), 0.0, atol=1e-9)

    irs = summands.sum()
    assert abs(irs + direct) == pytest.approx(abs(irs) + abs(direct), rel=1e-9)


def test_phase_step_beats_exhaustive_grid():
    grid = np.exp(2j * np.pi * np.arange(64) / 64)
    for draw in range(20):
        angles = draw_angles(RngStream(draw, 0, StreamPurpose.ANGLES))
        los = los_components(angles, 2, 3)
        params = derive_link_params(SystemConfig(M=2, N=3, angles=angles))
        f = random_unit_vectors(np.random.default_rng(draw), 2, 1)[:, 0]

        phi = optimal_phase_given_f(los, params, f)
        best = objective_p3(los, params, phi, f)

        c = params.a2 * params.a1 * los.h2_bar * (los.H1_bar @ f)
        direct = params.lam * params.a0 * (los.g_bar @ f)
        sums = c[0] * grid[:, None, None] + c[1] * grid[None, :, None] + c[2] * grid[None, None, :] + direct
        scattered = (params.b2 * params.a1) ** 2 * np.linalg.norm(los.H1_bar @ f) ** 2
        grid_best = np.max(np.abs(sums) ** 2) + scattered
        assert best >= grid_best * (1 - 1e-9)


def test_transmit_step_single_antenna(small_scenario):
    config, _, params = small_scenario
    los = los_components(config.angles, 1, config.N)
    np.testing.assert_allclose(optimal_f_given_phase(los, params, np.ones(config.N)), [1.0], atol=1e-12)


def test_transmit_step_matched_filter_for_rank_one_row(fixed_angles):
    M, N = 4, 6
    los = los_components(fixed_angles, M, N)
    params = LinkParams(gamma0=1.0, lam=0.0, a0=INV_SQRT2, a1=INV_SQRT2, a2=1.0,
                        b0=INV_SQRT2, b1=INV_SQRT2, b2=0.0)
    f = optimal_f_given_phase(los, params, np.exp(1j * np.arange(N)))
    expected = np.conj(steering_vector(fixed_angles.theta_aod_1, M)) / np.sqrt(M)
    np.testing.assert_allclose(f, expected, atol=1e-9)


def test_transmit_step_beats_random_candidates(fixed_angles):
    los = los_components(fixed_angles, 2, 2)
    params = derive_link_params(SystemConfig(M=2, N=2, angles=fixed_angles))
    phi = np.exp(1j * np.array([0.5, 2.2]))
    best = objective_p3(los, params, phi, optimal_f_given_phase(los, params, phi))
    candidates = random_unit_vectors(np.random.default_rng(8), 2, 100_000)
    row = (params.a2 * params.a1) * ((los.h2_bar * phi) @ los.H1_bar) + params.lam * params.a0 * los.g_bar
    scattered = np.linalg.norm(los.H1_bar @ candidates, axis=0) ** 2
    values = np.abs(row @ candidates) ** 2 + (params.b2 * params.a1) ** 2 * scattered
    assert np.all(best - values >= -1e-9 * best)


def test_half_steps_are_argmax(small_scenario):
    _, los, params = small_scenario
    rng = np.random.default_rng(21)
    f = optimal_f_given_phase(los, params, np.ones(los.N))
    phi = optimal_phase_given_f(los, params, f)
    f_star = optimal_f_given_phase(los, params, phi)
    best_phi = objective_p3(los, params, phi, f)
    best_f = objective_p3(los, params, phi, f_star)
    for u in random_unit_vectors(rng, los.M, 1000).T:
        assert objective_p3(los, params, phi, u) <= best_f * (1 + 1e-9)
    for theta in rng.uniform(0, 2 * np.pi, size=(1000, los.N)):
        assert objective_p3(los, params, np.exp(1j * theta), f) <= best_phi * (1 + 1e-9)


def test_alternating_trace_non_decreasing_over_random_scenarios():
    rng = np.random.default_rng(2020)
    for draw in range(100):
        angles = draw_angles(RngStream(draw, 0, StreamPurpose.ANGLES))
        K0, K1, K2 = rng.choice([0.0, 0.5, 1.0, 4.0, math.inf], size=3)
        config = SystemConfig(M=int(rng.integers(1, 6)), N=int(rng.integers(1, 24)),
                              K0=K0, K1=K1, K2=K2, angles=angles)
        los = los_components(angles, config.M, config.N)
        params = derive_link_params(config)
        init = random_init(config.M, config.N, RngStream(draw, 0, StreamPurpose.INIT))
        beams, trace = alternating_optimize(los, params, init=init)
        assert trace.is_non_decreasing(1e-9), f"draw {draw}: {trace.objective_values}"
        assert len(trace.objective_values) == 2 * trace.iterations + 1
        assert trace.final_objective == pytest.approx(objective_p3(los, params, beams.phi, beams.f), rel=1e-12)


def test_alternating_converges_within_three_sweeps(angles):
    config = SystemConfig(M=8, N=32, angles=angles)
    los = los_components(angles, config.M, config.N)
    _, trace = alternating_optimize(los, derive_link_params(config))
    assert trace.converged
    after_three = trace.objective_values[min(6, len(trace.objective_values) - 1)]
    assert (trace.final_objective - after_three) / trace.final_objective <= 1e-3


def test_alternating_fixed_point_stops_after_one_sweep(small_scenario):
    _, los, params = small_scenario
    beams, _ = alternating_optimize(los, params, epsilon=1e-10)
    _, trace = alternating_optimize(los, params, init=beams)
    assert trace.iterations == 1
    assert trace.converged


def test_alternating_ignores_rotation_of_initial_f(small_scenario):
    config, los, params = small_scenario
    init = random_init(config.M, config.N, RngStream(3, 0, StreamPurpose.INIT))
    beams, trace = alternating_optimize(los, params, init=init)
    spun, spun_trace = alternating_optimize(los, params, init=BeamPair(phi=init.phi, f=init.f * np.exp(1.3j)))

    assert spun_trace.final_objective == pytest.approx(trace.final_objective, rel=1e-10)
    np.testing.assert_allclose(spun.phi, beams.phi, atol=1e-8)
    assert abs(np.vdot(beams.f, spun.f)) == pytest.approx(1.0, abs=1e-10)


def test_alternating_reports_non_convergence(small_scenario):
    _, los, params = small_scenario
    beams, trace = alternating_optimize(los, params, epsilon=1e-300, max_iter=1)
    assert trace.iterations == 1
    assert isinstance(beams, BeamPair)


def test_alternating_rejects_bad_stopping_rule(small_scenario):
    _, los, params = small_scenario
    with pytest.raises(ConfigError):
        alternating_optimize(los, params, epsilon=0.0)
    with pytest.raises(ConfigError):
        alternating_optimize(los, params, max_iter=0)


def test_alternating_handles_pure_scattering():
    config = SystemConfig(M=3, N=4, K0=0.0, K1=0.0, K2=0.0)
    los = los_components(config.angles, 3, 4)
    beams, trace = alternating_optimize(los, derive_link_params(config))
    assert trace.converged
    assert trace.final_objective == 0.0
    assert np.linalg.norm(beams.f) == pytest.approx(1.0)


@pytest.mark.parametrize("N", [1, 4, 128])
def test_rayleigh_phase_gain_is_n_squared(fixed_angles, N):
    beams = rayleigh_optimal_beams(fixed_angles, 2, N)
    assert phase_alignment_gain(fixed_angles, beams.phi) == pytest.approx(N ** 2, rel=1e-9)


@pytest.mark.parametrize("M", [1, 8])
def test_rayleigh_transmit_gain_is_m(fixed_angles, M):
    beams = rayleigh_optimal_beams(fixed_angles, M, 4)
    assert transmit_alignment_gain(fixed_angles, beams.f) == pytest.approx(M, rel=1e-9)


def test_rayleigh_beams_maximize_rayleigh_objective(fixed_angles):
    config = SystemConfig(M=3, N=8, angles=fixed_angles).rayleigh()
    los = los_components(fixed_angles, 3, 8)
    params = derive_link_params(config)
    beams = rayleigh_optimal_beams(fixed_angles, 3, 8)
    best = rayleigh_objective(los, params, beams.phi, beams.f)
    rng = np.random.default_rng(5)
    for u in random_unit_vectors(rng, 3, 200).T:
        phi = np.exp(1j * rng.uniform(0, 2 * np.pi, 8))
        assert rayleigh_objective(los, params, phi, u) <= best * (1 + 1e-9)


def test_random_phases_average_gain_n():
    angles = AngleSet(theta_aoa_1=0.4, theta_aod_2=1.3)
    gains = [phase_alignment_gain(angles, random_phase_baseline(64, RngStream(9, t, StreamPurpose.BASELINE)))
             for t in range(10_000)]
    assert np.mean(gains) == pytest.approx(64, rel=0.1)


def test_random_phase_baseline_properties():
    phi = random_phase_baseline(100_000, RngStream(1, 0, StreamPurpose.BASELINE))
    np.testing.assert_allclose(np.abs(phi), 1.0, rtol=1e-12)
    np.testing.assert_array_equal(phi, random_phase_baseline(100_000, RngStream(1, 0, StreamPurpose.BASELINE)))
    assert abs(np.mean(phi)) < 0.02


def test_random_baseline_beams_are_feasible(small_scenario):
    _, los, params = small_scenario
    stream = RngStream(3, 0, StreamPurpose.BASELINE)
    beams = random_baseline_beams(los, params, stream)
    assert (beams.M, beams.N) == (los.M, los.N)
    designed, _ = alternating_optimize(los, params)
    assert objective_p3(los, params, designed.phi, designed.f) > objective_p3(los, params, beams.phi, beams.f)
