from .errors import (
    ConfigError,
    ConstraintViolation,
    DegenerateMatrixError,
    DimensionError,
    ExperimentError,
    IrsBeamError,
    ScenarioError,
)
from .numerics import (
    RngStream,
    StreamPurpose,
    canonicalize_phase,
    dominant_right_singular_vector,
    sample_cn,
    sample_uniform_phase,
    steering_vector,
)

__all__ = [
    'ConfigError', 'ConstraintViolation', 'DegenerateMatrixError', 'DimensionError',
    'ExperimentError', 'IrsBeamError', 'ScenarioError', 'RngStream', 'StreamPurpose', 'canonicalize_phase',
    'dominant_right_singular_vector', 'sample_cn', 'sample_uniform_phase', 'steering_vector',
]
