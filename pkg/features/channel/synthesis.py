import logging
import math
from typing import Optional, Tuple

import numpy as np

from config.settings import Settings
from features.channel.models import (
    AngleSet,
    ChannelRealization,
    LinkParams,
    LosComponents,
    NlosComponents,
    SystemConfig,
)
from features.shared.errors import ConfigError, ConstraintViolation
from features.shared.numerics import (
    CVector,
    RngStream,
    as_cmatrix,
    as_cvector,
    sample_cn,
    sample_uniform_phase,
    steering_vector,
)

logger = logging.getLogger(__name__)


def dbm_to_watts(x_dbm: float) -> float:
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


def noise_power_watts(config: SystemConfig) -> float:
    """N0 = PSD + 10 log10(bandwidth), converted from dBm"""
    if not config.bandwidth_hz > 0:
        raise ConfigError(f"bandwidth_hz must be positive, got {config.bandwidth_hz!r}")
    return dbm_to_watts(config.noise_psd_dbm_hz + 10.0 * math.log10(config.bandwidth_hz))


def rician_weights(K: float) -> Tuple[float, float]:
    """(a, b) = (sqrt(K/(K+1)), sqrt(1/(K+1))); K = inf is pure LoS"""
    if math.isnan(K) or K < 0:
        raise ConfigError(f"Rician K-factor must be >= 0, got {K!r}")
    if math.isinf(K):
        return 1.0, 0.0
    return math.sqrt(K / (K + 1.0)), math.sqrt(1.0 / (K + 1.0))


def derive_link_params(config: SystemConfig) -> LinkParams:
    """gamma0, lambda and the Rician weights, all in linear units"""
    for name in ("d0", "d1", "d2"):
        if not getattr(config, name) > 0:
            raise ConfigError(f"{name} must be positive, got {getattr(config, name)!r}")

    cascaded_loss = config.d1 ** config.alpha1 * config.d2 ** config.alpha2
    direct_loss = config.d0 ** config.alpha0
    gamma0 = dbm_to_watts(config.P_dbm) / (cascaded_loss * noise_power_watts(config))
    lam = math.sqrt(cascaded_loss / direct_loss)

    (a0, b0), (a1, b1), (a2, b2) = (rician_weights(k) for k in (config.K0, config.K1, config.K2))
    logger.debug(f"Derived link params: gamma0={gamma0:.6g}, lambda={lam:.6g}")
    return LinkParams(gamma0=gamma0, lam=lam, a0=a0, a1=a1, a2=a2, b0=b0, b1=b1, b2=b2)


def los_components(angles: AngleSet, M: int, N: int) -> LosComponents:
    """H1_bar = a_N(aoa_1) a_M(aod_1)^T, h2_bar = a_N(aod_2), g_bar = a_M(aod_0)"""
    H1_bar = np.outer(steering_vector(angles.theta_aoa_1, N), steering_vector(angles.theta_aod_1, M))
    return LosComponents(
        H1_bar=H1_bar,
        h2_bar=steering_vector(angles.theta_aod_2, N),
        g_bar=steering_vector(angles.theta_aod_0, M),
    )


def draw_angles(stream: RngStream) -> AngleSet:
    """Angles drawn uniformly from [0, 2 pi)"""
    aoa_1, aod_1, aod_2, aod_0 = sample_uniform_phase(4, stream)
    return AngleSet(theta_aoa_1=aoa_1, theta_aod_1=aod_1, theta_aod_2=aod_2, theta_aod_0=aod_0)


def sample_fading(M: int, N: int, stream: RngStream) -> NlosComponents:
    # draw order is part of the reproducibility contract
    H1_tilde = sample_cn(N, M, stream)
    h2_tilde = sample_cn(N, 1, stream)[:, 0]
    g_tilde = sample_cn(M, 1, stream)[:, 0]
    return NlosComponents(H1_tilde=H1_tilde, h2_tilde=h2_tilde, g_tilde=g_tilde)


def mix_channel(los: LosComponents, params: LinkParams, nlos: NlosComponents) -> ChannelRealization:
    return ChannelRealization(
        H1=params.a1 * los.H1_bar + params.b1 * nlos.H1_tilde,
        h2=params.a2 * los.h2_bar + params.b2 * nlos.h2_tilde,
        g=params.a0 * los.g_bar + params.b0 * nlos.g_tilde,
    )


def sample_channel(los: LosComponents, params: LinkParams, stream: RngStream) -> ChannelRealization:
    """Rician mixture of the LoS parts with one draw of the NLoS parts"""
    return mix_channel(los, params, sample_fading(los.M, los.N, stream))


def check_unit_modulus(phi, N: Optional[int] = None) -> CVector:
    phi = as_cvector(phi, N, name="phi")
    deviation = np.max(np.abs(np.abs(phi) - 1.0))
    if deviation > Settings.UNIT_MODULUS_TOL:
        raise ConstraintViolation(f"phase-shift entries must be unit modulus (max deviation {deviation:.3g})")
    return phi


def effective_row(real: ChannelRealization, phi, lam: float) -> CVector:
    """Composite channel row h2^T diag(phi) H1 + lambda g^T (length M)"""
    H1 = as_cmatrix(real.H1, name="H1")
    N, M = H1.shape
    h2 = as_cvector(real.h2, N, name="h2")
    g = as_cvector(real.g, M, name="g")
    phi = check_unit_modulus(phi, N)
    if lam < 0:
        raise ConfigError(f"lambda must be >= 0, got {lam!r}")
    return (h2 * phi) @ H1 + lam * g
