from .bounds import (
    analytic_moments,
    bound_argument,
    bound_from_objective,
    capacity_upper_bound,
    deterministic_term,
    instantaneous_capacity,
    rayleigh_upper_bound_closed,
    to_bits_per_second,
)
from .montecarlo import (
    CapacityEstimate,
    CrossMoment,
    MomentEstimate,
    MomentReport,
    appendix_moments,
    capacity_samples,
    ergodic_capacity_mc,
)

__all__ = [
    'analytic_moments', 'bound_argument', 'bound_from_objective', 'capacity_upper_bound', 'deterministic_term',
    'instantaneous_capacity', 'rayleigh_upper_bound_closed', 'to_bits_per_second',
    'CapacityEstimate', 'CrossMoment', 'MomentEstimate', 'MomentReport', 'appendix_moments',
    'capacity_samples', 'ergodic_capacity_mc',
]
