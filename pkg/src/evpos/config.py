"""Default tolerances and runtime settings."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv


@dataclass(frozen=True)
class Tolerances:
    """
    Every numerical threshold used by the analyses, in one place.

    Relative tolerances are scaled by the spectral scale of the matrix at hand
    (see :func:`evpos.linalg.spectral_scale`).
    """

    # entrywise sign decisions, relative to 1 + max |entry|
    tol_pos: float = 1e-10
    # eigenvalue separation, relative
    tol_sep: float = 1e-7
    # strict positivity of eigenvectors, relative to max |v|
    tol_vec: float = 1e-9
    # rank test on A - lambda I, relative
    tol_rank: float = 1e-7
    # symmetry test ||A - A^T||_max <= tol_sym * ||A||_max
    tol_sym: float = 1e-10
    max_dim: int = 4096
    # resolvent windows as a fraction of the distance to the next eigenvalue
    window_fraction: float = 0.2
    # row-uniformity cap for kernel and domination constants
    kernel_ratio_cap: float = 10.0
    t0_resolution: float = 1e-4
    t0_start: float = 1e-4
    growth_tolerance: float = 1e-3
    seed: int = 20240517

    def with_overrides(self, **overrides) -> Tolerances:
        """Return a copy with the non-None overrides applied."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


DEFAULT_TOLERANCES = Tolerances()


@dataclass
class RuntimeSettings:
    """Process-level settings; the scenario document configures everything else."""

    seed_override: Optional[int] = None
    log_file: Optional[str] = None
    log_level: str = "INFO"
    workers: int = 1

    @staticmethod
    def _load_from_env() -> RuntimeSettings:
        """Build settings from environment variables (and a local .env file if present)."""
        env_path = Path.cwd() / ".env"
        if env_path.exists():
            load_dotenv(env_path)

        seed = os.getenv("EVPOS_SEED")
        workers = os.getenv("EVPOS_WORKERS", "1")
        try:
            seed_override = int(seed) if seed not in (None, "") else None
            worker_count = max(1, int(workers))
        except ValueError as e:
            raise ValueError(f"EVPOS_SEED and EVPOS_WORKERS must be integers: {e}") from e

        return RuntimeSettings(
            seed_override=seed_override,
            log_file=os.getenv("EVPOS_LOG_FILE"),
            log_level=os.getenv("EVPOS_LOG_LEVEL", "INFO"),
            workers=worker_count,
        )


_settings: Optional[RuntimeSettings] = None


def get_settings(reload: bool = False) -> RuntimeSettings:
    """
    Return the process-wide settings.
    Loads them on the first call.
    """
    global _settings
    if _settings is None or reload:
        _settings = RuntimeSettings._load_from_env()
    return _settings
