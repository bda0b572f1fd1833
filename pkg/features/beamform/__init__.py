from .optimizer import (
    BeamPair,
    OptimizationTrace,
    alternating_optimize,
    default_init,
    mean_row,
    objective_p3,
    optimal_f_given_phase,
    optimal_phase_given_f,
    random_init,
    stacked_matrix,
)
from .closed_form import (
    phase_alignment_gain,
    random_baseline_beams,
    random_phase_baseline,
    rayleigh_objective,
    rayleigh_optimal_beams,
    transmit_alignment_gain,
)

__all__ = [
    'BeamPair', 'OptimizationTrace', 'alternating_optimize', 'default_init', 'mean_row',
    'objective_p3', 'optimal_f_given_phase', 'optimal_phase_given_f', 'random_init',
    'stacked_matrix', 'phase_alignment_gain', 'random_baseline_beams', 'random_phase_baseline',
    'rayleigh_objective', 'rayleigh_optimal_beams', 'transmit_alignment_gain',
]
