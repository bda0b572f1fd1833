"""Complex linear-algebra and random-sampling primitives.

Vectors and matrices are plain complex128 numpy arrays; the helpers here
validate their shapes so every other module can rely on them.
"""
import logging
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterator, Optional, Tuple

import numpy as np

from config.settings import Settings
from features.shared.errors import ConfigError, DegenerateMatrixError, DimensionError

logger = logging.getLogger(__name__)

CVector = np.ndarray
CMatrix = np.ndarray

TWO_PI = 2.0 * np.pi


def as_cvector(x, length: Optional[int] = None, name: str = "vector") -> CVector:
    """Coerce to a 1-D complex128 array, optionally checking its length"""
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size == 0:
        raise DimensionError(f"{name} must not be empty")
    if length is not None and arr.size != length:
        raise DimensionError(f"{name} has length {arr.size}, expected {length}")
    return arr


def as_cmatrix(x, shape: Optional[Tuple[int, int]] = None, name: str = "matrix") -> CMatrix:
    """Coerce to a 2-D complex128 array, optionally checking its shape"""
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must have at least one row and column, got {arr.shape}")
    if shape is not None and arr.shape != tuple(shape):
        raise DimensionError(f"{name} has shape {arr.shape}, expected {tuple(shape)}")
    return arr


def _check_count(n, name: str) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DimensionError(f"{name} must be a positive integer, got {n!r}")
    return int(n)


def steering_vector(theta: float, n: int) -> CVector:
    """ULA response a_n(theta) = [1, e^{j theta}, ..., e^{j (n-1) theta}]^T"""
    n = _check_count(n, "n")
    if not np.isfinite(theta):
        raise DimensionError(f"theta must be finite, got {theta!r}")
    return np.exp(1j * theta * np.arange(n))


def canonicalize_phase(v: CVector) -> CVector:
    """Rotate v so its first largest-magnitude entry is real and non-negative"""
    v = np.array(v, dtype=np.complex128)
    magnitudes = np.abs(v)
    peak = magnitudes.max()
    if peak == 0:
        return v
    # ties within rounding go to the lowest index
    idx = int(np.flatnonzero(magnitudes >= peak * (1.0 - 1e-9))[0])
    v *= np.exp(-1j * np.angle(v[idx]))
    v[idx] = magnitudes[idx]
    return v


def _start_vectors(H: CMatrix, gram: CMatrix, first: np.ndarray) -> Iterator[np.ndarray]:
    yield first
    # fallbacks: basis vectors ordered by column energy, all have e_k^H A e_k > 0
    column_energy = np.real(np.diag(gram))
    for k in np.argsort(-column_energy, kind="stable"):
        if column_energy[k] <= 0:
            break
        e = np.zeros(H.shape[1], dtype=np.complex128)
        e[k] = 1.0
        yield e


def _power_iterate(gram: CMatrix, start: np.ndarray, tol: float, vector_tol: float,
                   max_iter: int, collapse: float) -> Optional[Tuple[np.ndarray, float]]:
    x = start / np.linalg.norm(start)
    y = gram @ x
    if np.linalg.norm(y) <= collapse:
        return None
    eigenvalue = float(np.real(np.vdot(x, y)))
    for iteration in range(max_iter):
        norm_y = np.linalg.norm(y)
        if norm_y <= collapse:
            return None
        x_new = y / norm_y
        y = gram @ x_new
        eigenvalue_new = float(np.real(np.vdot(x_new, y)))
        converged = (
            abs(eigenvalue_new - eigenvalue) <= tol * eigenvalue_new
            and np.linalg.norm(x_new - x) <= vector_tol
        )
        x, eigenvalue = x_new, eigenvalue_new
        if converged:
            logger.debug(f"Power iteration converged after {iteration + 1} steps")
            return x, eigenvalue
    logger.debug(f"Power iteration stopped at max_iter={max_iter}")
    return x, eigenvalue


def dominant_right_singular_vector(H, tol: Optional[float] = None,
                                   vector_tol: Optional[float] = None,
                                   max_iter: Optional[int] = None) -> CVector:
    """Unit vector v maximizing ||H v||, by power iteration on H^H H.

    Starts from the all-ones vector. If that start is annihilated, or lands on
    an eigenvalue that cannot be the largest (below half the trace), the
    iteration is repeated from basis vectors and the best result is kept.
    The result is phase-canonicalized (see canonicalize_phase).
    """
    H = as_cmatrix(H, name="H")
    if not np.all(np.isfinite(H)):
        raise DegenerateMatrixError("H contains non-finite entries")
    scale = np.max(np.abs(H))
    if scale == 0:
        raise DegenerateMatrixError("H is all zero; no dominant singular vector")

    tol = Settings.POWER_ITER_TOL if tol is None else tol
    vector_tol = Settings.POWER_ITER_VECTOR_TOL if vector_tol is None else vector_tol
    max_iter = Settings.POWER_ITER_MAX if max_iter is None else max_iter

    Hs = H / scale
    gram = Hs.conj().T @ Hs
    trace = float(np.real(np.trace(gram)))
    collapse = 1e-13 * trace

    best: Optional[Tuple[np.ndarray, float]] = None
    ones = np.ones(H.shape[1], dtype=np.complex128)
    for start in _start_vectors(H, gram, ones):
        result = _power_iterate(gram, start, tol, vector_tol, max_iter, collapse)
        if result is None:
            logger.debug("Power iteration start vector annihilated, restarting")
            continue
        if best is None or result[1] > best[1]:
            best = result
        # only one eigenvalue of a PSD matrix can exceed half its trace
        if best[1] >= 0.5 * trace:
            break
    if best is None:
        raise DegenerateMatrixError("power iteration found no dominant direction")
    return canonicalize_phase(best[0])


class StreamPurpose(IntEnum):
    TRIALS = 0
    ANGLES = 1
    BASELINE = 2
    INIT = 3


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream addressed by (master_seed, stream_index).

    Backed by numpy's SeedSequence spawn keys, so streams with different
    indices (or purposes) are independent and a stream never depends on how
    many other streams were created before it. Single owner: the generator
    is stateful.
    """
    master_seed: int
    stream_index: int = 0
    purpose: StreamPurpose = StreamPurpose.TRIALS
    generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2**64:
            raise ConfigError(f"master_seed must fit in 64 unsigned bits, got {self.master_seed}")
        if int(self.stream_index) < 0:
            raise ConfigError(f"stream_index must be non-negative, got {self.stream_index}")
        seq = np.random.SeedSequence(
            int(self.master_seed), spawn_key=(int(self.purpose), int(self.stream_index))
        )
        object.__setattr__(self, "generator", np.random.Generator(np.random.PCG64(seq)))


def sample_cn(rows: int, cols: int, stream: RngStream) -> CMatrix:
    """rows x cols matrix of i.i.d. CN(0, 1) entries (each part variance 1/2)"""
    rows = _check_count(rows, "rows")
    cols = _check_count(cols, "cols")
    rng = stream.generator
    re = rng.standard_normal(size=(rows, cols))
    im = rng.standard_normal(size=(rows, cols))
    return (re + 1j * im) / np.sqrt(2.0)


def sample_uniform_phase(n: int, stream: RngStream) -> np.ndarray:
    """n angles drawn uniformly from [0, 2 pi)"""
    n = _check_count(n, "n")
    return stream.generator.uniform(0.0, TWO_PI, size=n)
