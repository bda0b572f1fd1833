# config/settings.py
from pathlib import Path
from dotenv import load_dotenv
import logging
import os

load_dotenv()

logger = logging.getLogger(__name__)


class Settings:
    # Base paths
    BASE_DIR = Path(__file__).parent.parent
    RESULTS_DIR = Path(os.getenv("IRSBEAM_RESULTS_DIR", str(BASE_DIR / "results")))
    SCENARIO_DIR = BASE_DIR / "scenarios"

    # Logging
    LOG_LEVEL = os.getenv("IRSBEAM_LOG_LEVEL", "WARNING").upper()

    # Monte Carlo protocol
    DEFAULT_TRIALS = 10_000
    DEFAULT_SEED = 2020

    # Alternating optimization
    EPSILON = 1e-4
    MAX_ITER = 50

    # Dominant singular vector (power iteration on H^H H)
    POWER_ITER_TOL = 1e-12          # relative eigenvalue change
    POWER_ITER_VECTOR_TOL = 1e-10   # iterate change
    POWER_ITER_MAX = 10_000

    # Accepted deviation of |phi_i| and ||f|| from 1
    UNIT_MODULUS_TOL = 1e-9

    THREADS_ENV = "IRSBEAM_THREADS"

    @staticmethod
    def worker_threads() -> int:
        """Worker cap from IRSBEAM_THREADS, read at call time"""
        raw = os.getenv(Settings.THREADS_ENV)
        if raw:
            try:
                value = int(raw)
                if value >= 1:
                    return value
            except ValueError:
                pass
            logger.warning(f"Ignoring {Settings.THREADS_ENV}={raw!r}: expected a positive integer")
        return os.cpu_count() or 1
