from .export import COLUMNS, ResultRow, rows_to_frame, write_results
from .runner import ScenarioRunner, moment_reports, run_scenario
from .scenario import KINDS, SWEEP_VARIABLES, Scenario, Sweep, parse_scenario

__all__ = [
    'COLUMNS', 'ResultRow', 'rows_to_frame', 'write_results',
    'ScenarioRunner', 'moment_reports', 'run_scenario',
    'KINDS', 'SWEEP_VARIABLES', 'Scenario', 'Sweep', 'parse_scenario',
]
