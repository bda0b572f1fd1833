from typing import Optional


class IrsBeamError(Exception):
    """Base class for every error raised by irsbeam"""


class DimensionError(IrsBeamError, ValueError):
    """Invalid dimension or shape mismatch"""


class DegenerateMatrixError(IrsBeamError, ArithmeticError):
    """Matrix has no dominant direction (all zero)"""


class ConstraintViolation(IrsBeamError, ValueError):
    """Beam violates the unit-modulus or unit-norm constraint"""


class ConfigError(IrsBeamError, ValueError):
    """Invalid system configuration or link parameters"""


class ScenarioError(ConfigError):
    """Scenario file could not be parsed"""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        location = []
        if key is not None:
            location.append(f"key '{key}'")
        if line is not None:
            location.append(f"line {line}")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class ExperimentError(IrsBeamError):
    """A scenario sweep point failed; the message carries the scenario context"""
