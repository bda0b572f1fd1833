from dataclasses import dataclass, field, fields, replace
import math
from typing import Tuple

import numpy as np

from features.shared.errors import ConfigError
from features.shared.numerics import TWO_PI, CMatrix, CVector


@dataclass(frozen=True)
class AngleSet:
    """LoS angles (effective per-element phase increments), reduced to [0, 2 pi)"""
    theta_aoa_1: float = 0.0
    theta_aod_1: float = 0.0
    theta_aod_2: float = 0.0
    theta_aod_0: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            value = float(getattr(self, f.name))
            if not math.isfinite(value):
                raise ConfigError(f"{f.name} must be finite, got {value!r}")
            reduced = value % TWO_PI
            # -1e-17 % 2pi rounds up to 2pi itself
            if reduced >= TWO_PI:
                reduced = 0.0
            object.__setattr__(self, f.name, reduced)


@dataclass(frozen=True)
class SystemConfig:
    """Scenario constants. Defaults are the reference simulation setup."""
    M: int = 8                          # AP antennas
    N: int = 128                        # IRS elements
    P_dbm: float = -40.0                # transmit power
    noise_psd_dbm_hz: float = -170.0
    bandwidth_hz: float = 180e3
    d0: float = 200.0                   # AP-user
    d1: float = 250.0                   # AP-IRS
    d2: float = 50.0                    # IRS-user
    alpha0: float = 3.5
    alpha1: float = 2.5
    alpha2: float = 2.2
    K0: float = 1.0
    K1: float = 1.0
    K2: float = 1.0
    angles: AngleSet = field(default_factory=AngleSet)

    def __post_init__(self):
        for name in ("M", "N"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        for name in ("P_dbm", "noise_psd_dbm_hz"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite, got {getattr(self, name)!r}")
        for name in ("bandwidth_hz", "d0", "d1", "d2", "alpha0", "alpha1", "alpha2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be positive, got {value!r}")
        for name in ("K0", "K1", "K2"):
            value = getattr(self, name)
            if math.isnan(value) or value < 0:
                raise ConfigError(f"{name} must be >= 0, got {value!r}")
        if not isinstance(self.angles, AngleSet):
            raise ConfigError("angles must be an AngleSet")

    def replace(self, **overrides) -> "SystemConfig":
        return replace(self, **overrides)

    def with_k(self, K: float) -> "SystemConfig":
        """Same scenario with K0 = K1 = K2 = K"""
        return replace(self, K0=K, K1=K, K2=K)

    def rayleigh(self) -> "SystemConfig":
        """Same scenario with a Rayleigh-faded direct link (K0 = 0)"""
        return replace(self, K0=0.0)


@dataclass(frozen=True)
class LinkParams:
    """Derived link scalars: SNR scale, path-gain ratio and Rician weights"""
    gamma0: float
    lam: float
    a0: float
    a1: float
    a2: float
    b0: float
    b1: float
    b2: float

    def __post_init__(self):
        if not (math.isfinite(self.gamma0) and self.gamma0 > 0):
            raise ConfigError(f"gamma0 must be positive, got {self.gamma0!r}")
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise ConfigError(f"lambda must be >= 0, got {self.lam!r}")
        for i in range(3):
            a, b = getattr(self, f"a{i}"), getattr(self, f"b{i}")
            if a < 0 or b < 0 or abs(a * a + b * b - 1.0) > 1e-12:
                raise ConfigError(f"Rician weights a{i}={a}, b{i}={b} must satisfy a^2 + b^2 = 1")

    @property
    def weights(self) -> Tuple[Tuple[float, float], ...]:
        return ((self.a0, self.b0), (self.a1, self.b1), (self.a2, self.b2))


@dataclass(frozen=True)
class LosComponents:
    """Deterministic LoS parts: H1_bar (N x M), h2_bar (N), g_bar (M)"""
    H1_bar: CMatrix
    h2_bar: CVector
    g_bar: CVector

    @property
    def M(self) -> int:
        return self.H1_bar.shape[1]

    @property
    def N(self) -> int:
        return self.H1_bar.shape[0]


@dataclass(frozen=True)
class NlosComponents:
    """One draw of the CN(0, 1) scattered parts"""
    H1_tilde: CMatrix
    h2_tilde: CVector
    g_tilde: CVector


@dataclass(frozen=True)
class ChannelRealization:
    """One Monte Carlo draw of H1 (N x M), h2 (N), g (M)"""
    H1: CMatrix
    h2: CVector
    g: CVector

    @property
    def M(self) -> int:
        return self.H1.shape[1]

    @property
    def N(self) -> int:
        return self.H1.shape[0]

    @classmethod
    def from_los(cls, los: LosComponents) -> "ChannelRealization":
        return cls(np.array(los.H1_bar), np.array(los.h2_bar), np.array(los.g_bar))
