"""
Dense linear algebra substrate: validation, matrix exponential, spectra, resolvents.

Matrices and vectors are plain float64 numpy arrays. Functions validate their
input through :func:`as_matrix` / :func:`as_vector`, which return read-only
copies, so nothing here mutates caller data.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
import numpy.typing as npt
import scipy.linalg

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import DimensionError, DomainError, NumericalError, ScaleError, SingularityError
from .util import get_logger

logger = get_logger(name="evpos.linalg")

Matrix = npt.NDArray[np.float64]
Vector = npt.NDArray[np.float64]
MatrixLike = Union[Matrix, list, tuple]

_MODULE = "core-linalg"


def as_matrix(A: MatrixLike, *, square: bool = True, operation: str = "as_matrix") -> Matrix:
    """
    Validate and copy a matrix.

    :param A: Anything numpy can turn into a 2D real array.
    :param square: Require rows == cols.
    :param operation: Name of the calling operation, used in error messages.
    :return: A read-only float64 copy.
    """
    arr = np.array(A, dtype=np.float64, copy=True)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2D matrix, got shape {arr.shape}",
                             module=_MODULE, operation=operation)
    if square and arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}",
                             module=_MODULE, operation=operation)
    if not np.all(np.isfinite(arr)):
        raise DomainError("matrix has non-finite entries", module=_MODULE, operation=operation)
    arr.flags.writeable = False
    return arr


def as_vector(v: Any, *, dim: Optional[int] = None, operation: str = "as_vector") -> Vector:
    """Validate and copy a vector, optionally checking its dimension."""
    arr = np.array(v, dtype=np.float64, copy=True).reshape(-1)
    if arr.size < 1:
        raise DimensionError("expected a non-empty vector", module=_MODULE, operation=operation)
    if dim is not None and arr.size != dim:
        raise DimensionError(f"expected a vector of dimension {dim}, got {arr.size}",
                             module=_MODULE, operation=operation)
    if not np.all(np.isfinite(arr)):
        raise DomainError("vector has non-finite entries", module=_MODULE, operation=operation)
    arr.flags.writeable = False
    return arr


def spectral_scale(A: Matrix, eigenvalues: Optional[np.ndarray] = None) -> float:
    """
    Scale used for relative tolerances: the larger of the spectral radius and max |a_jk|.

    Both are cheap once the eigenvalues are known and both are bounded by the
    2-norm, so separation tests stay meaningful for stiff discretizations.
    """
    entry_max = float(np.max(np.abs(A))) if A.size else 0.0
    if eigenvalues is None:
        return entry_max
    return max(entry_max, float(np.max(np.abs(eigenvalues))))


def mat_exp(A: MatrixLike, t: float = 1.0) -> Matrix:
    """
    Return e^{tA} by scaling and squaring with the degree-13 Pade approximant.

    :param A: Square generator.
    :param t: Nonnegative time.
    """
    A = as_matrix(A, operation="mat_exp")
    if not math.isfinite(t) or t < 0:
        raise DomainError(f"time must be finite and nonnegative, got {t}", module=_MODULE, operation="mat_exp")
    if t == 0:
        return np.eye(A.shape[0])
    return scipy.linalg.expm(t * A)


def mat_exp_eig(A: MatrixLike, t: float = 1.0) -> Matrix:
    """Cross-check exponential V e^{tD} V^{-1}; only valid for diagonalizable A."""
    A = as_matrix(A, operation="mat_exp_eig")
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t}", module=_MODULE, operation="mat_exp_eig")
    w, V = scipy.linalg.eig(A)
    scaled = V * np.exp(t * w)
    return np.real(scipy.linalg.solve(V.T, scaled.T).T)


@dataclass(frozen=True)
class Spectrum:
    """
    Full eigendecomposition of a real square matrix.

    ``right[:, i]`` and ``left[:, i]`` are eigenvectors of A and of A^T for
    ``eigenvalues[i]``. Complex data stays inside this object; use
    :meth:`eigenvalue_pairs` and :meth:`to_dict` for real-valued output.
    """

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    spectral_bound: float
    dominant_index: Optional[int]
    dominance_gap: float
    simple_dominant: bool
    scale: float
    separation: float

    @property
    def dominant_eigenvalue(self) -> complex:
        return complex(self.eigenvalues[self.dominant_index])

    def eigenvalue_pairs(self) -> list[tuple[float, float]]:
        """Eigenvalues as (re, im) pairs sorted by decreasing real part."""
        order = np.lexsort((-self.eigenvalues.imag, -self.eigenvalues.real))
        return [(float(self.eigenvalues[i].real), float(self.eigenvalues[i].imag)) for i in order]

    def dominant_vectors(self) -> tuple[Vector, Vector]:
        """Real right and left eigenvectors of the dominant eigenvalue."""
        i = self.dominant_index
        return np.real(self.right[:, i]).copy(), np.real(self.left[:, i]).copy()

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [list(p) for p in self.eigenvalue_pairs()],
            "spectral_bound": self.spectral_bound,
            "dominance_gap": finite_or_label(self.dominance_gap),
            "simple_dominant": self.simple_dominant,
        }


def eig(A: MatrixLike, tol: Optional[float] = None, tolerances: Tolerances = DEFAULT_TOLERANCES) -> Spectrum:
    """
    Compute the complex eigendecomposition together with dominance information.

    :param A: Square real matrix, dimension at most ``tolerances.max_dim``.
    :param tol: Relative separation and rank tolerance, ``tolerances.tol_sep`` when omitted.
    :return: The :class:`Spectrum`.
    """
    A = as_matrix(A, operation="eig")
    n = A.shape[0]
    if n > tolerances.max_dim:
        raise DimensionError(f"dimension {n} exceeds the dense cap {tolerances.max_dim}",
                             module=_MODULE, operation="eig")
    tol = tolerances.tol_sep if tol is None else tol
    try:
        w, vl, vr = scipy.linalg.eig(A, left=True, right=True)
    except np.linalg.LinAlgError as e:
        info = _lapack_info(str(e))
        raise NumericalError(f"eigenvalue iteration did not converge: {e}", iterations=info,
                             module=_MODULE, operation="eig") from e

    scale = spectral_scale(A, w)
    separation = tol * scale
    spb = float(np.max(w.real))
    # prefer the real member of a tie so the dominant index is stable
    dominant = int(np.lexsort((np.abs(w.imag), -w.real))[0])
    others = np.delete(w, dominant)
    gap = spb - float(np.max(others.real)) if others.size else math.inf
    candidates = np.flatnonzero(w.real >= spb - separation)

    simple = False
    if candidates.size == 1 and abs(w[dominant].imag) <= separation:
        lam = float(w[dominant].real)
        rank = np.linalg.matrix_rank(A - lam * np.eye(n), tol=tolerances.tol_rank * scale)
        simple = (n - rank) == 1

    logger.debug("eig: n=%d spb=%.6g gap=%.6g simple=%s", n, spb, gap, simple)
    return Spectrum(
        eigenvalues=w,
        right=vr,
        left=vl.conj(),
        spectral_bound=spb,
        dominant_index=dominant,
        dominance_gap=gap,
        simple_dominant=bool(simple),
        scale=scale,
        separation=separation,
    )


def resolvent(A: MatrixLike, lam: float, tol: Optional[float] = None,
              tolerances: Tolerances = DEFAULT_TOLERANCES) -> Matrix:
    """
    Return (lam I - A)^{-1}.

    :raises SingularityError: when an LU pivot falls below ``tol`` times the matrix scale;
        the error carries the eigenvalue of A nearest to ``lam``.
    """
    A = as_matrix(A, operation="resolvent")
    tol = tolerances.tol_sep if tol is None else tol
    n = A.shape[0]
    shifted = lam * np.eye(n) - A
    scale = max(float(np.max(np.abs(shifted))), float(np.max(np.abs(A))), np.finfo(float).tiny)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(shifted, check_finite=False)
    pivot = float(np.min(np.abs(np.diag(lu))))
    if pivot <= tol * scale:
        w = scipy.linalg.eigvals(A)
        nearest = complex(w[np.argmin(np.abs(w - lam))])
        raise SingularityError(
            f"lambda={lam:.12g} lies in the spectrum up to tolerance (pivot {pivot:.3g}), "
            f"nearest eigenvalue {nearest:.12g}",
            nearest_eigenvalue=nearest, module=_MODULE, operation="resolvent")
    X = scipy.linalg.lu_solve((lu, piv), np.eye(n), check_finite=False)
    residual = float(np.max(np.abs(shifted @ X - np.eye(n))))
    if residual > 1e-10 * (1.0 + scale * float(np.max(np.abs(X)))):
        logger.warning("resolvent residual %.3g at lambda=%.6g", residual, lam)
    return X


def estimate_growth_bound(A: MatrixLike, t_max: float, samples: int) -> float:
    """
    Fit the slope of log ||e^{tA}||_2 over the later half of ``samples`` times in (0, t_max].

    :raises ScaleError: when a sampled norm over- or underflows; see :func:`growth_horizon`.
    """
    A = as_matrix(A, operation="estimate_growth_bound")
    if not t_max > 0 or samples < 2:
        raise DomainError("need t_max > 0 and samples >= 2", module=_MODULE, operation="estimate_growth_bound")
    times = np.linspace(0.0, t_max, samples + 1)[1:]
    log_norms = np.empty_like(times)
    for i, t in enumerate(times):
        norm = float(np.linalg.norm(mat_exp(A, t), 2))
        if not math.isfinite(norm) or norm < 1e-300 or norm > 1e300:
            raise ScaleError(f"||e^(tA)|| left the floating point range at t={t:.6g}; use a smaller t_max",
                             module=_MODULE, operation="estimate_growth_bound")
        log_norms[i] = math.log(norm)
    tail = max(2, samples // 2)
    slope = np.polyfit(times[-tail:], log_norms[-tail:], 1)[0]
    return float(slope)


def growth_horizon(spectrum: Spectrum, cap: float = 100.0) -> float:
    """
    A horizon for :func:`estimate_growth_bound`: long enough for the dominant mode to win
    by a factor e^{40}, short enough that e^{t s(A)} stays representable.
    """
    gap = spectrum.dominance_gap if math.isfinite(spectrum.dominance_gap) else 1.0
    horizon = min(cap, 40.0 / max(gap, 1e-6))
    if spectrum.spectral_bound != 0.0:
        horizon = min(horizon, 300.0 / abs(spectrum.spectral_bound))
    return horizon


def perron_projection(spectrum: Spectrum) -> Matrix:
    """Rank-one spectral projection v w^T / (w^T v) of the dominant eigenvalue."""
    v, w = spectrum.dominant_vectors()
    denom = float(w @ v)
    if abs(denom) <= np.finfo(float).eps * np.linalg.norm(v) * np.linalg.norm(w):
        raise NumericalError("dominant left and right eigenvectors are orthogonal",
                             module=_MODULE, operation="perron_projection")
    return np.outer(v, w) / denom


def finite_or_label(x: float) -> Union[float, str]:
    """JSON has no infinities; label them."""
    if math.isfinite(x):
        return float(x)
    return "inf" if x > 0 else ("-inf" if x < 0 else "nan")


def _lapack_info(message: str) -> Optional[int]:
    digits = "".join(ch if ch.isdigit() else " " for ch in message).split()
    return int(digits[-1]) if digits else None


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def write_matrix_csv(path: Union[str, Path], A: MatrixLike) -> Path:
    """Write one row per line; 17 significant digits make the round trip exact."""
    A = as_matrix(A, square=False, operation="write_matrix_csv")
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(out, A, delimiter=",", fmt="%.17g")
    return out


def read_matrix_csv(path: Union[str, Path]) -> Matrix:
    try:
        data = np.loadtxt(Path(path), delimiter=",", ndmin=2, dtype=np.float64)
    except ValueError as e:
        raise DomainError(f"cannot parse matrix CSV {path}: {e}", module=_MODULE,
                          operation="read_matrix_csv") from e
    return as_matrix(data, square=False, operation="read_matrix_csv")


def matrix_to_json(A: MatrixLike) -> dict:
    A = as_matrix(A, square=False, operation="matrix_to_json")
    return {"rows": int(A.shape[0]), "cols": int(A.shape[1]), "entries": [float(x) for x in A.reshape(-1)]}


def matrix_from_json(obj: Union[dict, str]) -> Matrix:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        rows, cols, entries = int(obj["rows"]), int(obj["cols"]), list(obj["entries"])
    except (KeyError, TypeError, ValueError) as e:
        raise DomainError(f"matrix JSON needs rows, cols and entries: {e}", module=_MODULE,
                          operation="matrix_from_json") from e
    if rows * cols != len(entries):
        raise DimensionError(f"{len(entries)} entries do not fill a {rows}x{cols} matrix",
                             module=_MODULE, operation="matrix_from_json")
    return as_matrix(np.array(entries, dtype=np.float64).reshape(rows, cols), square=False,
                     operation="matrix_from_json")
