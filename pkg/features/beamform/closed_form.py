"""Rayleigh-case closed-form beams and the random-phase baseline."""
import numpy as np

from features.beamform.optimizer import BeamPair, optimal_f_given_phase
from features.channel.models import AngleSet, LinkParams, LosComponents
from features.channel.synthesis import check_unit_modulus
from features.shared.errors import DegenerateMatrixError
from features.shared.numerics import (
    CVector,
    RngStream,
    as_cvector,
    sample_uniform_phase,
    steering_vector,
)


def _cascaded_steering(angles: AngleSet, N: int) -> CVector:
    """diag(a_N(aod_2)) a_N(aoa_1)"""
    return steering_vector(angles.theta_aod_2, N) * steering_vector(angles.theta_aoa_1, N)


def phase_alignment_gain(angles: AngleSet, phi) -> float:
    """f1(phi) = |phi^T diag(a_N(aod_2)) a_N(aoa_1)|^2, at most N^2"""
    phi = check_unit_modulus(phi)
    return float(abs(phi @ _cascaded_steering(angles, phi.size)) ** 2)


def transmit_alignment_gain(angles: AngleSet, f) -> float:
    """f2(f) = |a_M(aod_1)^T f|^2, at most M for unit-norm f"""
    f = as_cvector(f, name="f")
    return float(abs(steering_vector(angles.theta_aod_1, f.size) @ f) ** 2)


def rayleigh_optimal_beams(angles: AngleSet, M: int, N: int) -> BeamPair:
    """phi* = (diag(a_N(aod_2)) a_N(aoa_1))^*, f* = a_M(aod_1)^* / sqrt(M)"""
    phi = np.conj(_cascaded_steering(angles, N))
    f = np.conj(steering_vector(angles.theta_aod_1, M)) / np.sqrt(M)
    return BeamPair(phi=phi, f=f)


def rayleigh_objective(los: LosComponents, params: LinkParams, phi, f) -> float:
    """a2^2 a1^2 |h2_bar^T diag(phi) H1_bar f|^2 + b2^2 a1^2 ||H1_bar f||^2"""
    phi = check_unit_modulus(phi, los.N)
    f = as_cvector(f, los.M, name="f")
    irs = abs((los.h2_bar * phi) @ (los.H1_bar @ f)) ** 2
    scattered = np.linalg.norm(los.H1_bar @ f) ** 2
    return float((params.a2 * params.a1) ** 2 * irs + (params.b2 * params.a1) ** 2 * scattered)


def random_phase_baseline(N: int, stream: RngStream) -> CVector:
    """phi_i = e^{j theta_i}, theta_i uniform on [0, 2 pi)"""
    return np.exp(1j * sample_uniform_phase(N, stream))


def random_baseline_beams(los: LosComponents, params: LinkParams, stream: RngStream) -> BeamPair:
    """Random phases with the transmit beam matched to them"""
    phi = random_phase_baseline(los.N, stream)
    try:
        f = optimal_f_given_phase(los, params, phi)
    except DegenerateMatrixError:
        f = np.ones(los.M, dtype=np.complex128) / np.sqrt(los.M)
    return BeamPair(phi=phi, f=f)
