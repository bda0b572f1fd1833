"""Scenario runner: one pipeline per experiment kind, sweep points run concurrently."""
import asyncio
import logging
from pathlib import Path
from typing import List, Optional, Tuple

from tqdm import tqdm

from config.settings import Settings
from features.beamform.closed_form import random_baseline_beams, rayleigh_optimal_beams
from features.beamform.optimizer import BeamPair, OptimizationTrace, alternating_optimize, default_init, random_init
from features.capacity.bounds import (
    bound_from_objective,
    capacity_upper_bound,
    rayleigh_upper_bound_closed,
    to_bits_per_second,
)
from features.capacity.montecarlo import MomentReport, appendix_moments, ergodic_capacity_mc
from features.channel.models import LinkParams, LosComponents, SystemConfig
from features.channel.synthesis import derive_link_params, los_components
from features.experiments.export import ResultRow, header_lines, write_results
from features.experiments.scenario import Scenario
from features.shared.errors import ExperimentError, IrsBeamError
from features.shared.numerics import RngStream, StreamPurpose

logger = logging.getLogger(__name__)

SweepPoint = Tuple[Optional[float], SystemConfig]


class ScenarioRunner:
    """Runs every sweep point of a scenario and collects the result rows in sweep order"""

    def __init__(self, scenario: Scenario, threads: Optional[int] = None, progress: bool = True):
        self.scenario = scenario
        self.threads = Settings.worker_threads() if threads is None else max(1, int(threads))
        self.progress = progress
        # sweep points times trial workers stays within the thread cap
        self.concurrent_points = min(self.threads, len(scenario.sweep_points()))
        self.workers = max(1, self.threads // self.concurrent_points)
        self.semaphore = asyncio.Semaphore(self.concurrent_points)

    def _label(self, value: Optional[float]) -> str:
        if self.scenario.sweep is None:
            return self.scenario.kind
        return f"{self.scenario.kind} {self.scenario.sweep.variable}={value:g}"

    def _scenario_parts(self, config: SystemConfig) -> Tuple[LosComponents, LinkParams]:
        return los_components(config.angles, config.M, config.N), derive_link_params(config)

    def _design(self, los: LosComponents, params: LinkParams) -> Tuple[BeamPair, OptimizationTrace]:
        s = self.scenario
        if s.init == 'random':
            init = random_init(los.M, los.N, RngStream(s.seed, 0, StreamPurpose.INIT))
        else:
            init = default_init(los.M, los.N)
        return alternating_optimize(los, params, init=init, epsilon=s.epsilon, max_iter=s.max_iter)

    def _evaluate(self, value: Optional[float], scheme: str, los: LosComponents, config: SystemConfig,
                  beams: BeamPair, bound: float, iterations: Optional[int] = None) -> ResultRow:
        estimate = ergodic_capacity_mc(los, config, beams, self.scenario.trials, self.scenario.seed,
                                       workers=self.workers)
        return ResultRow(
            sweep_value=value,
            scheme=scheme,
            capacity_bps_hz=estimate.mean_bps_hz,
            std_error=estimate.std_error,
            bound_bps_hz=bound,
            iterations=iterations,
            seed=self.scenario.seed,
        )

    def _rician_row(self, value: Optional[float], scheme: str, config: SystemConfig) -> ResultRow:
        los, params = self._scenario_parts(config)
        beams, trace = self._design(los, params)
        return self._evaluate(value, scheme, los, config, beams,
                              capacity_upper_bound(los, params, beams), trace.iterations)

    def _rayleigh_row(self, value: Optional[float], scheme: str, config: SystemConfig) -> ResultRow:
        config = config.rayleigh()
        los, params = self._scenario_parts(config)
        beams = rayleigh_optimal_beams(config.angles, config.M, config.N)
        return self._evaluate(value, scheme, los, config, beams,
                              rayleigh_upper_bound_closed(params, config.M, config.N))

    def _random_row(self, value: Optional[float], config: SystemConfig) -> ResultRow:
        los, params = self._scenario_parts(config)
        beams = random_baseline_beams(los, params, RngStream(self.scenario.seed, 0, StreamPurpose.BASELINE))
        return self._evaluate(value, 'random', los, config, beams, capacity_upper_bound(los, params, beams))

    def _converge_rows(self, value: Optional[float], config: SystemConfig) -> List[ResultRow]:
        los, params = self._scenario_parts(config)
        _, trace = self._design(los, params)
        return [
            ResultRow(sweep_value=value, scheme='alternating',
                      bound_bps_hz=bound_from_objective(params, objective, config.N),
                      iterations=step, seed=self.scenario.seed)
            for step, objective in enumerate(trace.objective_values)
        ]

    def moment_report(self, config: SystemConfig) -> MomentReport:
        los, params = self._scenario_parts(config)
        beams, _ = self._design(los, params)
        return appendix_moments(los, config, beams, self.scenario.trials, self.scenario.seed,
                                workers=self.workers)

    def _moment_rows(self, value: Optional[float], config: SystemConfig) -> List[ResultRow]:
        report = self.moment_report(config)
        rows = [ResultRow(sweep_value=value, scheme='x1', capacity_bps_hz=report.x1_sq, std_error=0.0,
                          bound_bps_hz=report.x1_sq, seed=self.scenario.seed)]
        for name, moment in report.moments.items():
            rows.append(ResultRow(sweep_value=value, scheme=name, capacity_bps_hz=moment.empirical,
                                  std_error=moment.std_error, bound_bps_hz=moment.analytic,
                                  seed=self.scenario.seed))
        return rows

    def run_point(self, value: Optional[float], config: SystemConfig) -> List[ResultRow]:
        """Rows of one sweep point, in scheme order"""
        kind = self.scenario.kind
        if kind == 'bound-check':
            return [self._rician_row(value, 'proposed', config)]
        if kind == 'converge':
            return self._converge_rows(value, config)
        if kind == 'compare-rician':
            return [self._rician_row(value, 'proposed', config), self._random_row(value, config)]
        if kind == 'compare-rayleigh':
            return [self._rayleigh_row(value, 'proposed', config), self._random_row(value, config.rayleigh())]
        if kind in ('fading-compare', 'power-sweep'):
            return [self._rician_row(value, 'rician', config), self._rayleigh_row(value, 'rayleigh', config)]
        if kind == 'moments':
            return self._moment_rows(value, config)
        raise ExperimentError(f"unknown scenario kind {kind!r}")

    def summary(self, value: Optional[float], rows: List[ResultRow], config: SystemConfig) -> str:
        """One line per sweep point, capacities in bit/s/Hz and Mbit/s"""
        if self.scenario.kind == 'converge':
            last = rows[-1]
            return f"{self._label(value)}: {last.iterations} half-steps, bound {last.bound_bps_hz:.4f} bit/s/Hz"
        if self.scenario.kind == 'moments':
            parts = [f"{row.scheme} {row.capacity_bps_hz:.4g} (analytic {row.bound_bps_hz:.4g})" for row in rows]
            return f"{self._label(value)}: " + ", ".join(parts)
        parts = []
        for row in rows:
            mbps = to_bits_per_second(row.capacity_bps_hz, config) / 1e6
            parts.append(f"{row.scheme} {row.capacity_bps_hz:.4f} +/- {row.std_error:.2g} bit/s/Hz "
                         f"({mbps:.4f} Mbit/s, bound {row.bound_bps_hz:.4f})")
        return f"{self._label(value)}: " + "; ".join(parts)

    async def _guarded(self, value: Optional[float], work, progress: tqdm):
        async with self.semaphore:
            try:
                result = await asyncio.to_thread(work)
            except (IrsBeamError, FloatingPointError) as e:
                raise ExperimentError(f"{self._label(value)}: {e}") from e
        progress.update(1)
        return result

    async def _gather(self, make_work, desc: str):
        points = self.scenario.sweep_points()
        progress = tqdm(total=len(points), desc=desc, disable=not self.progress)
        try:
            tasks = [self._guarded(value, make_work(value, config), progress) for value, config in points]
            # gather keeps sweep order
            return points, await asyncio.gather(*tasks)
        finally:
            progress.close()

    async def run(self) -> List[ResultRow]:
        """Run every sweep point and print one summary per point"""
        s = self.scenario
        logger.info(f"Running {s.kind} scenario {s.source_name}: {len(s.sweep_points())} points, "
                    f"{s.trials} trials, seed {s.seed}, {self.threads} threads")
        points, results = await self._gather(
            lambda value, config: (lambda: self.run_point(value, config)), f"Running {s.kind}"
        )
        rows: List[ResultRow] = []
        for (value, config), point_rows in zip(points, results):
            tqdm.write(self.summary(value, point_rows, config))
            rows.extend(point_rows)
        return rows

    async def moment_reports(self) -> List[Tuple[Optional[float], MomentReport]]:
        points, reports = await self._gather(
            lambda value, config: (lambda: self.moment_report(config)), "Sampling moments"
        )
        return [(value, report) for (value, _), report in zip(points, reports)]


async def run_scenario(scenario: Scenario, threads: Optional[int] = None, progress: bool = True) -> Path:
    """Run a scenario and write its CSV; returns the output path"""
    rows = await ScenarioRunner(scenario, threads, progress).run()
    header = header_lines(scenario.source_name, scenario.source_digest, scenario.kind,
                          scenario.seed, scenario.trials)
    return write_results(scenario.output_path, rows, header)


async def moment_reports(scenario: Scenario, threads: Optional[int] = None,
                         progress: bool = True) -> List[Tuple[Optional[float], MomentReport]]:
    """MomentReport of the designed beams at every sweep point"""
    return await ScenarioRunner(scenario, threads, progress).moment_reports()
