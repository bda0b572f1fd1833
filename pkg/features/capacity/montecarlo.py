"""Seeded Monte Carlo estimators.

Trial t always draws from RngStream(master_seed, t), and per-trial values are
reduced in trial order, so estimates do not depend on the worker count.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from config.settings import Settings
from features.beamform.optimizer import BeamPair
from features.capacity.bounds import (
    analytic_moments,
    bound_argument,
    deterministic_term,
    instantaneous_capacity,
)
from features.channel.models import LinkParams, LosComponents, SystemConfig
from features.channel.synthesis import derive_link_params, mix_channel, sample_fading
from features.shared.errors import ConfigError, DimensionError
from features.shared.numerics import RngStream

logger = logging.getLogger(__name__)

MOMENT_TERMS = ('x2', 'x3', 'x4', 'x5')


@dataclass(frozen=True)
class CapacityEstimate:
    mean_bps_hz: float
    std_error: float
    trials: int
    master_seed: int


def _trial_chunks(trials: int, workers: int) -> List[range]:
    workers = max(1, min(workers, trials))
    bounds = np.linspace(0, trials, workers + 1).astype(int)
    return [range(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]


def _run_trials(trials: int, workers: Optional[int], evaluate: Callable[[range], np.ndarray]) -> np.ndarray:
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials!r}")
    workers = Settings.worker_threads() if workers is None else workers
    chunks = _trial_chunks(trials, workers)
    if len(chunks) == 1:
        return evaluate(chunks[0])
    with ThreadPoolExecutor(max_workers=len(chunks)) as executor:
        # map keeps chunk order
        parts = list(executor.map(evaluate, chunks))
    return np.concatenate(parts)


def _check_scenario(los: LosComponents, config: SystemConfig, beams: BeamPair):
    if (los.M, los.N) != (config.M, config.N) or (beams.M, beams.N) != (config.M, config.N):
        raise DimensionError(
            f"LoS ({los.M}, {los.N}) and beams ({beams.M}, {beams.N}) must match config ({config.M}, {config.N})"
        )


def _mean_and_std_error(samples: np.ndarray) -> Tuple[float, float]:
    n = samples.size
    mean = float(np.mean(samples))
    if n < 2:
        return mean, 0.0
    # shifting by the first sample makes a constant sequence give exactly zero
    shifted = samples - samples[0]
    return mean, float(np.std(shifted, ddof=1) / math.sqrt(n))


def capacity_samples(los: LosComponents, config: SystemConfig, beams: BeamPair,
                     trials: int, master_seed: int, workers: Optional[int] = None,
                     params: Optional[LinkParams] = None) -> np.ndarray:
    """Instantaneous capacity of every trial, in trial order"""
    _check_scenario(los, config, beams)
    params = derive_link_params(config) if params is None else params

    def evaluate(chunk: range) -> np.ndarray:
        out = np.empty(len(chunk))
        for i, t in enumerate(chunk):
            nlos = sample_fading(config.M, config.N, RngStream(master_seed, t))
            out[i] = instantaneous_capacity(mix_channel(los, params, nlos), beams, params)
        return out

    return _run_trials(trials, workers, evaluate)


def ergodic_capacity_mc(los: LosComponents, config: SystemConfig, beams: BeamPair,
                        trials: int, master_seed: int, workers: Optional[int] = None) -> CapacityEstimate:
    """Monte Carlo estimate of E{C} with its standard error"""
    samples = capacity_samples(los, config, beams, trials, master_seed, workers)
    mean, std_error = _mean_and_std_error(samples)
    logger.info(f"Ergodic capacity over {trials} trials (seed {master_seed}): "
                f"{mean:.6f} +/- {std_error:.2g} bit/s/Hz")
    return CapacityEstimate(mean_bps_hz=mean, std_error=std_error, trials=trials, master_seed=master_seed)


@dataclass(frozen=True)
class MomentEstimate:
    empirical: float
    std_error: float
    analytic: float

    @property
    def deviation(self) -> float:
        """|empirical - analytic| in standard errors (0 for an exact match)"""
        gap = abs(self.empirical - self.analytic)
        if self.std_error == 0:
            return 0.0 if gap == 0 else math.inf
        return gap / self.std_error


@dataclass(frozen=True)
class CrossMoment:
    value: complex
    std_error: float

    @property
    def magnitude(self) -> float:
        return abs(self.value)


@dataclass(frozen=True)
class MomentReport:
    """Empirical vs analytic second moments of the zero-mean terms x2..x5"""
    x1_sq: float
    moments: Dict[str, MomentEstimate]
    cross_terms: Dict[Tuple[str, str], CrossMoment]
    bound_argument: float
    trials: int
    master_seed: int

    @property
    def e_x2_sq(self) -> float:
        return self.moments['x2'].empirical

    @property
    def e_x3_sq(self) -> float:
        return self.moments['x3'].empirical

    @property
    def e_x4_sq(self) -> float:
        return self.moments['x4'].empirical

    @property
    def e_x5_sq(self) -> float:
        return self.moments['x5'].empirical

    @property
    def max_cross_term(self) -> float:
        return max(c.magnitude for c in self.cross_terms.values())

    @property
    def analytic_sum(self) -> float:
        """|x1|^2 plus every analytic second moment"""
        return self.x1_sq + sum(m.analytic for m in self.moments.values())

    @property
    def sum_identity_error(self) -> float:
        """Relative mismatch between analytic_sum and the bound argument"""
        return abs(self.analytic_sum - self.bound_argument) / max(abs(self.bound_argument), 1e-300)

    def to_frame(self) -> pd.DataFrame:
        rows = [{'term': 'x1', 'empirical': self.x1_sq, 'analytic': self.x1_sq,
                 'std_error': 0.0, 'deviation_se': 0.0}]
        for name, m in self.moments.items():
            rows.append({'term': name, 'empirical': m.empirical, 'analytic': m.analytic,
                         'std_error': m.std_error, 'deviation_se': m.deviation})
        for (i, j), c in self.cross_terms.items():
            rows.append({'term': f'{i}*conj({j})', 'empirical': c.magnitude, 'analytic': 0.0,
                         'std_error': c.std_error,
                         'deviation_se': c.magnitude / c.std_error if c.std_error > 0 else 0.0})
        return pd.DataFrame(rows)


def _complex_std_error(z: np.ndarray) -> float:
    n = z.size
    if n < 2:
        return 0.0
    spread = np.var(z.real, ddof=1) + np.var(z.imag, ddof=1)
    return float(math.sqrt(spread / n))


def appendix_moments(los: LosComponents, config: SystemConfig, beams: BeamPair,
                     trials: int, master_seed: int, workers: Optional[int] = None) -> MomentReport:
    """Sample the random terms of the composite gain and compare their moments.

    The composite gain splits into a deterministic x1 and four zero-mean
    terms x2..x5 built from the NLoS draws; trial t uses the same stream as
    the capacity estimator, so both see identical fading.
    """
    _check_scenario(los, config, beams)
    params = derive_link_params(config)
    p = params
    phi, f = beams.phi, beams.f
    irs_los = los.h2_bar * phi
    H1_bar_f = los.H1_bar @ f

    def evaluate(chunk: range) -> np.ndarray:
        out = np.empty((len(chunk), len(MOMENT_TERMS)), dtype=np.complex128)
        for i, t in enumerate(chunk):
            nlos = sample_fading(config.M, config.N, RngStream(master_seed, t))
            w = nlos.H1_tilde @ f
            irs_nlos = nlos.h2_tilde * phi
            out[i, 0] = p.a2 * p.b1 * (irs_los @ w)
            out[i, 1] = p.b2 * p.a1 * (irs_nlos @ H1_bar_f)
            out[i, 2] = p.b2 * p.b1 * (irs_nlos @ w)
            out[i, 3] = p.lam * p.b0 * (nlos.g_tilde @ f)
        return out

    terms = _run_trials(trials, workers, evaluate)
    analytic = analytic_moments(los, params, beams, config.N)

    moments = {}
    for k, name in enumerate(MOMENT_TERMS):
        power = np.abs(terms[:, k]) ** 2
        mean, std_error = _mean_and_std_error(power)
        moments[name] = MomentEstimate(empirical=mean, std_error=std_error, analytic=analytic[name])

    cross_terms = {}
    for i, j in combinations(range(len(MOMENT_TERMS)), 2):
        z = terms[:, i] * np.conj(terms[:, j])
        cross_terms[(MOMENT_TERMS[i], MOMENT_TERMS[j])] = CrossMoment(
            value=complex(np.mean(z)), std_error=_complex_std_error(z)
        )

    report = MomentReport(
        x1_sq=abs(deterministic_term(los, params, beams)) ** 2,
        moments=moments,
        cross_terms=cross_terms,
        bound_argument=bound_argument(los, params, beams, config.N),
        trials=trials,
        master_seed=master_seed,
    )
    logger.info(f"Moment check over {trials} trials: max cross term {report.max_cross_term:.3g}")
    return report
