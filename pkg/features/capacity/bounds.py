"""Instantaneous capacity and the ergodic-capacity upper bounds."""
import math
from typing import Dict, Optional

import numpy as np

from features.beamform.optimizer import BeamPair, mean_row
from features.channel.models import ChannelRealization, LinkParams, LosComponents, SystemConfig
from features.channel.synthesis import effective_row
from features.shared.errors import DimensionError


def instantaneous_capacity(real: ChannelRealization, beams: BeamPair, params: LinkParams) -> float:
    """log2(1 + gamma0 |(h2^T Phi H1 + lambda g^T) f|^2) in bit/s/Hz"""
    if real.M != beams.M or real.N != beams.N:
        raise DimensionError(f"beams ({beams.M}, {beams.N}) do not match channel ({real.M}, {real.N})")
    gain = abs(effective_row(real, beams.phi, params.lam) @ beams.f) ** 2
    return math.log2(1.0 + params.gamma0 * gain)


def _check_beams(los: LosComponents, beams: BeamPair):
    if los.M != beams.M or los.N != beams.N:
        raise DimensionError(f"beams ({beams.M}, {beams.N}) do not match LoS components ({los.M}, {los.N})")


def deterministic_term(los: LosComponents, params: LinkParams, beams: BeamPair) -> complex:
    """x1 = (a2 a1 h2_bar^T Phi H1_bar + lambda a0 g_bar^T) f"""
    _check_beams(los, beams)
    return complex(mean_row(los, params, beams.phi) @ beams.f)


def analytic_moments(los: LosComponents, params: LinkParams, beams: BeamPair,
                     N: Optional[int] = None) -> Dict[str, float]:
    """Second moments E|x_i|^2 of the zero-mean terms x2..x5"""
    _check_beams(los, beams)
    N = los.N if N is None else N
    p = params
    return {
        'x2': p.a2 ** 2 * p.b1 ** 2 * N,
        'x3': p.b2 ** 2 * p.a1 ** 2 * float(np.linalg.norm(los.H1_bar @ beams.f) ** 2),
        'x4': p.b2 ** 2 * p.b1 ** 2 * N,
        'x5': p.lam ** 2 * p.b0 ** 2,
    }


def bound_argument(los: LosComponents, params: LinkParams, beams: BeamPair,
                   N: Optional[int] = None) -> float:
    """E|composite gain|^2, the bracket of the upper bound before gamma0 scaling"""
    N = los.N if N is None else N
    p = params
    x1_sq = abs(deterministic_term(los, params, beams)) ** 2
    scattered = p.b2 ** 2 * p.a1 ** 2 * float(np.linalg.norm(los.H1_bar @ beams.f) ** 2)
    # (a2^2 + b2^2) is 1; kept so the x2 and x4 terms stay separate
    return x1_sq + scattered + (p.a2 ** 2 + p.b2 ** 2) * p.b1 ** 2 * N + p.lam ** 2 * p.b0 ** 2


def capacity_upper_bound(los: LosComponents, params: LinkParams, beams: BeamPair,
                         N: Optional[int] = None) -> float:
    """Jensen upper bound log2(1 + gamma0 E|gain|^2) on the ergodic capacity"""
    return math.log2(1.0 + params.gamma0 * bound_argument(los, params, beams, N))


def bound_from_objective(params: LinkParams, objective: float, N: int) -> float:
    """Upper bound for a pair whose P3 objective is known"""
    p = params
    argument = objective + (p.a2 ** 2 + p.b2 ** 2) * p.b1 ** 2 * N + p.lam ** 2 * p.b0 ** 2
    return math.log2(1.0 + p.gamma0 * argument)


def rayleigh_upper_bound_closed(params: LinkParams, M: int, N: int) -> float:
    """Upper bound with the closed-form Rayleigh-case beams (K0 = 0)"""
    p = params
    argument = (p.a2 ** 2 * p.a1 ** 2 * M * N ** 2
                + p.b2 ** 2 * p.a1 ** 2 * M * N
                + (p.a2 ** 2 + p.b2 ** 2) * p.b1 ** 2 * N
                + p.lam ** 2)
    return math.log2(1.0 + p.gamma0 * argument)


def to_bits_per_second(capacity_bps_hz: float, config: SystemConfig) -> float:
    return capacity_bps_hz * config.bandwidth_hz
