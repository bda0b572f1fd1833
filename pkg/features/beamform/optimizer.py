"""Statistical-CSI beam design for the Rician case (alternating optimization)."""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from config.settings import Settings
from features.channel.models import LinkParams, LosComponents
from features.channel.synthesis import check_unit_modulus
from features.shared.errors import ConfigError, ConstraintViolation, DegenerateMatrixError
from features.shared.numerics import (
    CVector,
    RngStream,
    as_cvector,
    dominant_right_singular_vector,
    sample_cn,
    sample_uniform_phase,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BeamPair:
    """Phase-shift beam phi (unit-modulus entries) and transmit beam f (unit norm)"""
    phi: CVector
    f: CVector

    def __post_init__(self):
        phi = check_unit_modulus(self.phi)
        f = as_cvector(self.f, name="f")
        norm = np.linalg.norm(f)
        if abs(norm - 1.0) > Settings.UNIT_MODULUS_TOL:
            raise ConstraintViolation(f"transmit beam must have unit norm, got {norm:.12g}")
        object.__setattr__(self, "phi", phi.copy())
        object.__setattr__(self, "f", f.copy())

    @property
    def M(self) -> int:
        return self.f.size

    @property
    def N(self) -> int:
        return self.phi.size


@dataclass
class OptimizationTrace:
    """P3 objective after every half-step; entry 0 is the initial pair"""
    objective_values: List[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    epsilon: float = Settings.EPSILON

    @property
    def final_objective(self) -> float:
        return self.objective_values[-1]

    def is_non_decreasing(self, rtol: float = 1e-9) -> bool:
        values = np.asarray(self.objective_values)
        if values.size < 2:
            return True
        slack = rtol * np.maximum(np.abs(values[:-1]), 1.0)
        return bool(np.all(np.diff(values) >= -slack))


def default_init(M: int, N: int) -> BeamPair:
    """phi_0 = all ones, f_0 = all ones / sqrt(M)"""
    return BeamPair(phi=np.ones(N, dtype=np.complex128),
                    f=np.ones(M, dtype=np.complex128) / np.sqrt(M))


def random_init(M: int, N: int, stream: RngStream) -> BeamPair:
    phi = np.exp(1j * sample_uniform_phase(N, stream))
    f = sample_cn(M, 1, stream)[:, 0]
    return BeamPair(phi=phi, f=f / np.linalg.norm(f))


def mean_row(los: LosComponents, params: LinkParams, phi) -> CVector:
    """a2 a1 h2_bar^T diag(phi) H1_bar + lambda a0 g_bar^T"""
    phi = check_unit_modulus(phi, los.N)
    return (params.a2 * params.a1) * ((los.h2_bar * phi) @ los.H1_bar) + (params.lam * params.a0) * los.g_bar


def objective_p3(los: LosComponents, params: LinkParams, phi, f) -> float:
    """|mean_row(phi) f|^2 + b2^2 a1^2 ||H1_bar f||^2"""
    f = as_cvector(f, los.M, name="f")
    coherent = abs(mean_row(los, params, phi) @ f) ** 2
    scattered = (params.b2 * params.a1) ** 2 * np.linalg.norm(los.H1_bar @ f) ** 2
    return float(coherent + scattered)


def optimal_phase_given_f(los: LosComponents, params: LinkParams, f) -> CVector:
    """Closed-form phase beam for a fixed transmit beam.

    Every summand of phi^T diag(h2_bar) H1_bar f is rotated onto the phase of
    the direct term g_bar^T f, so the IRS and direct contributions add
    coherently. Elements whose summand is zero are unconstrained and are set
    to the direct-term phase.
    """
    f = as_cvector(f, los.M, name="f")
    per_element = los.h2_bar * (los.H1_bar @ f)
    reference = np.angle(los.g_bar @ f)
    magnitudes = np.abs(per_element)
    scale = magnitudes.max()
    phi = np.exp(1j * (reference - np.angle(per_element)))
    unconstrained = magnitudes <= 1e-12 * scale if scale > 0 else np.ones(los.N, dtype=bool)
    phi[unconstrained] = np.exp(1j * reference)
    return phi


def stacked_matrix(los: LosComponents, params: LinkParams, phi) -> np.ndarray:
    """H = [mean_row(phi); b2 a1 H1_bar], so objective_p3 = ||H f||^2"""
    return np.vstack([mean_row(los, params, phi)[np.newaxis, :], (params.b2 * params.a1) * los.H1_bar])


def optimal_f_given_phase(los: LosComponents, params: LinkParams, phi) -> CVector:
    """Dominant right singular vector of the stacked matrix"""
    return dominant_right_singular_vector(stacked_matrix(los, params, phi))


def _fractional_increase(previous: float, current: float) -> float:
    if previous > 0:
        return (current - previous) / previous
    return 0.0 if current <= 0 else math.inf


def alternating_optimize(los: LosComponents, params: LinkParams,
                         init: Optional[BeamPair] = None,
                         epsilon: Optional[float] = None,
                         max_iter: Optional[int] = None) -> Tuple[BeamPair, OptimizationTrace]:
    """
    Alternate the closed-form phase step and the singular-vector transmit step.

    Parameters:
    - los: LoS components of the scenario
    - params: derived link parameters
    - init: feasible starting pair (default_init when omitted)
    - epsilon: stop once one sweep raises the objective by less than this fraction
    - max_iter: maximum number of sweeps

    Returns:
    - beams: final BeamPair
    - trace: objective after every half-step, sweep count and convergence flag
    """
    epsilon = Settings.EPSILON if epsilon is None else epsilon
    max_iter = Settings.MAX_ITER if max_iter is None else max_iter
    if not epsilon > 0:
        raise ConfigError(f"epsilon must be positive, got {epsilon!r}")
    if max_iter < 1:
        raise ConfigError(f"max_iter must be >= 1, got {max_iter!r}")

    init = default_init(los.M, los.N) if init is None else init
    phi, f = init.phi, init.f
    objective = objective_p3(los, params, phi, f)
    trace = OptimizationTrace(objective_values=[objective], epsilon=epsilon)

    for iteration in range(max_iter):
        previous = objective

        phi = optimal_phase_given_f(los, params, f)
        objective = objective_p3(los, params, phi, f)
        trace.objective_values.append(objective)

        try:
            candidate = optimal_f_given_phase(los, params, phi)
        except DegenerateMatrixError:
            # objective does not depend on f
            candidate = f
        candidate_objective = objective_p3(los, params, phi, candidate)
        if candidate_objective >= objective:
            f, objective = candidate, candidate_objective
        else:
            logger.debug(f"Transmit step rejected at sweep {iteration + 1} "
                         f"({candidate_objective:.12g} < {objective:.12g})")
        trace.objective_values.append(objective)
        trace.iterations = iteration + 1

        increase = _fractional_increase(previous, objective)
        logger.debug(f"Sweep {iteration + 1}: objective={objective:.10g}, increase={increase:.3g}")
        if increase < epsilon:
            trace.converged = True
            break

    if not trace.converged:
        logger.info(f"Alternating optimization stopped after {max_iter} sweeps without converging")
    return BeamPair(phi=phi, f=f), trace
