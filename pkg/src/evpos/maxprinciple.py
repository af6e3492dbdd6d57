"""
Sign analysis of resolvents (lambda I - A)^{-1} around a leading eigenvalue.

To the right of the spectral bound a positive resolvent is a maximum principle;
to the left of an isolated leading eigenvalue a negative resolvent is an
anti-maximum principle. For symmetric generators the uniform anti-maximum
principle is compared against an upper kernel estimate of the resolvent at a
point mu1 where it is positive.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Optional

import numpy as np
import pydantic
import scipy.linalg

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import DomainError, IsolationError, PreconditionError, SingularityError
from .linalg import MatrixLike, as_matrix, as_vector, resolvent, spectral_scale
from .positivity import oriented, row_uniformity
from .util import get_logger

logger = get_logger(name="evpos.maxprinciple")

_MODULE = "maxprinciple"


class SignClass(str, Enum):
    NONNEG = "EntrywiseNonneg"
    NONPOS = "EntrywiseNonpos"
    MIXED = "Mixed"
    NEAR_SINGULAR = "NearSingular"


class LeftVerdict(str, Enum):
    UNIFORM_ANTI_MAX = "UniformAntiMax"
    NO_ANTI_MAX = "NoAntiMax"
    INCONCLUSIVE = "Inconclusive"


class RightVerdict(str, Enum):
    UNIFORM_MAX = "UniformMax"
    NO_MAX = "NoMax"
    INCONCLUSIVE = "Inconclusive"


class SweepSample(pydantic.BaseModel):
    lam: float
    side: str
    min_entry: Optional[float] = None
    max_entry: Optional[float] = None
    classification: SignClass


class SignProfile(pydantic.BaseModel):
    """
    Resolvent signs sampled at lambda0 -/+ offsets, offsets in [band-excluded, window].

    ``individual_*_windows[k]`` is the largest sampled offset up to which column k of the
    resolvent keeps the expected sign on every nearer sample, None if even the nearest fails.
    """

    lambda0: float
    window: float
    band: float
    samples: list[SweepSample]
    left_window_verdict: LeftVerdict
    right_window_verdict: RightVerdict
    individual_left_windows: list[Optional[float]]
    individual_right_windows: list[Optional[float]]

    @property
    def sweep_points(self) -> list[float]:
        return [s.lam for s in self.samples]

    @property
    def classifications(self) -> list[SignClass]:
        return [s.classification for s in self.samples]

    @property
    def individual_antimax(self) -> bool:
        return all(w is not None for w in self.individual_left_windows)

    @property
    def individual_max(self) -> bool:
        return all(w is not None for w in self.individual_right_windows)


class KernelBoundReport(pydantic.BaseModel):
    holds: bool
    d_constant: Optional[float] = None
    failing_pair: Optional[tuple[int, int]] = None
    row_ratio: Optional[float] = None


class EquivalenceReport(pydantic.BaseModel):
    i_holds: bool
    ii_holds: bool
    consistent: bool
    resolvent_power: int
    domination_constant: float
    sweep: SignProfile
    kernel: KernelBoundReport


def _classify(R: np.ndarray, sign_tol: float) -> SignClass:
    scale = float(np.max(np.abs(R)))
    if float(np.min(R)) >= -sign_tol * scale:
        return SignClass.NONNEG
    if float(np.max(R)) <= sign_tol * scale:
        return SignClass.NONPOS
    return SignClass.MIXED


def _individual_windows(offsets: np.ndarray, column_ok: list[Optional[np.ndarray]], n: int) -> list[Optional[float]]:
    """Per column, the largest offset reached before the first failing (or singular) sample."""
    windows: list[Optional[float]] = []
    for k in range(n):
        reach = None
        for offset, ok in zip(offsets, column_ok):
            if ok is None or not ok[k]:
                break
            reach = float(offset)
        windows.append(reach)
    return windows


def resolvent_sign_sweep(A: MatrixLike, lambda0: float, window: Optional[float] = None, samples: int = 24,
                         tol: float = 1e-9, workers: int = 1,
                         tolerances: Tolerances = DEFAULT_TOLERANCES) -> SignProfile:
    """
    Classify (lambda I - A)^{-1} on both sides of the eigenvalue ``lambda0``.

    :param A: Square matrix.
    :param lambda0: An eigenvalue of A.
    :param window: Half-width of the sampled neighbourhood. Defaults to
        ``tolerances.window_fraction`` times the distance to the nearest other eigenvalue.
    :param samples: Number of geometric offsets per side.
    :param tol: Sign tolerance relative to the largest resolvent entry.
    :raises IsolationError: if another eigenvalue lies within the window.
    """
    A = as_matrix(A, operation="resolvent_sign_sweep")
    n = A.shape[0]
    w = scipy.linalg.eigvals(A)
    scale = spectral_scale(A, w)
    band = tolerances.tol_sep * max(scale, 1.0)
    distances = np.abs(w - lambda0)
    own = int(np.argmin(distances))
    if distances[own] > max(band, 1e-8 * max(1.0, abs(lambda0))):
        raise PreconditionError(f"lambda0={lambda0:.12g} is not an eigenvalue (nearest {complex(w[own]):.12g})",
                                module=_MODULE, operation="resolvent_sign_sweep")
    lambda0 = float(w[own].real)
    others = np.abs(np.delete(w, own) - lambda0)
    nearest = float(np.min(others)) if others.size else np.inf
    if window is None:
        window = tolerances.window_fraction * nearest if np.isfinite(nearest) else 1.0
    if nearest <= window:
        raise IsolationError(f"another eigenvalue lies {nearest:.6g} from lambda0, inside the window {window:.6g}",
                             module=_MODULE, operation="resolvent_sign_sweep")
    start = max(2.0 * band, 1e-3 * window)
    if start >= window:
        raise DomainError(f"window {window:.3g} does not clear the singular band {band:.3g}", module=_MODULE,
                          operation="resolvent_sign_sweep")
    offsets = np.geomspace(start, window, samples)

    def evaluate(lam: float):
        try:
            R = resolvent(A, lam, tolerances=tolerances)
        except SingularityError:
            return None
        return R

    lambdas = np.concatenate([lambda0 - offsets, lambda0 + offsets])
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            resolvents = list(pool.map(evaluate, lambdas))
    else:
        resolvents = [evaluate(lam) for lam in lambdas]

    sweep: list[SweepSample] = []
    left_ok: list[Optional[np.ndarray]] = []
    right_ok: list[Optional[np.ndarray]] = []
    for idx, (lam, R) in enumerate(zip(lambdas, resolvents)):
        side = "left" if idx < samples else "right"
        if R is None or float(np.min(np.abs(w - lam))) < band:
            sweep.append(SweepSample(lam=float(lam), side=side, classification=SignClass.NEAR_SINGULAR))
            (left_ok if side == "left" else right_ok).append(None)
            continue
        threshold = tol * float(np.max(np.abs(R)))
        if side == "left":
            left_ok.append(np.max(R, axis=0) <= threshold)
        else:
            right_ok.append(np.min(R, axis=0) >= -threshold)
        sweep.append(SweepSample(lam=float(lam), side=side, min_entry=float(np.min(R)), max_entry=float(np.max(R)),
                                 classification=_classify(R, tol)))

    left = [s.classification for s in sweep if s.side == "left" and s.classification != SignClass.NEAR_SINGULAR]
    right = [s.classification for s in sweep if s.side == "right" and s.classification != SignClass.NEAR_SINGULAR]
    if not left:
        left_verdict = LeftVerdict.INCONCLUSIVE
    elif all(c == SignClass.NONPOS for c in left):
        left_verdict = LeftVerdict.UNIFORM_ANTI_MAX
    else:
        left_verdict = LeftVerdict.NO_ANTI_MAX
    if not right:
        right_verdict = RightVerdict.INCONCLUSIVE
    elif all(c == SignClass.NONNEG for c in right):
        right_verdict = RightVerdict.UNIFORM_MAX
    else:
        right_verdict = RightVerdict.NO_MAX

    sweep.sort(key=lambda s: s.lam)
    logger.info("resolvent sweep at lambda0=%.6g, window %.4g: left %s, right %s",
                lambda0, window, left_verdict.value, right_verdict.value)
    return SignProfile(lambda0=lambda0, window=float(window), band=band, samples=sweep,
                       left_window_verdict=left_verdict, right_window_verdict=right_verdict,
                       individual_left_windows=_individual_windows(offsets, left_ok, n),
                       individual_right_windows=_individual_windows(offsets, right_ok, n))


# ---------------------------------------------------------------------------
# Kernel estimate
# ---------------------------------------------------------------------------

def _require_symmetric(A: np.ndarray, tolerances: Tolerances, operation: str) -> None:
    if float(np.max(np.abs(A - A.T))) > tolerances.tol_sym * max(float(np.max(np.abs(A))), np.finfo(float).tiny):
        raise PreconditionError("generator must be symmetric", module=_MODULE, operation=operation)


def _positive_resolvent(A: np.ndarray, mu1: float, tol: float, tolerances: Tolerances, operation: str) -> np.ndarray:
    try:
        R1 = resolvent(A, mu1, tolerances=tolerances)
    except SingularityError as e:
        raise PreconditionError(f"mu1={mu1:.6g} is not in the resolvent set", module=_MODULE,
                                operation=operation) from e
    if float(np.min(R1)) < -tol * float(np.max(np.abs(R1))):
        raise PreconditionError(f"hypothesis (mu1 I - A)^-1 >= 0 fails at mu1={mu1:.6g}", module=_MODULE,
                                operation=operation)
    return R1


def _require_leading_pair(A: np.ndarray, u: np.ndarray, lambda0: float, tolerances: Tolerances,
                          operation: str) -> None:
    w, V = scipy.linalg.eigh(A)
    scale = max(float(np.max(np.abs(w))), float(np.max(np.abs(A))), 1.0)
    i = int(np.argmin(np.abs(w - lambda0)))
    if abs(w[i] - lambda0) > tolerances.tol_sep * scale:
        raise PreconditionError(f"lambda0={lambda0:.6g} is not an eigenvalue", module=_MODULE, operation=operation)
    neighbours = np.abs(np.delete(w, i) - w[i])
    if neighbours.size and float(np.min(neighbours)) <= tolerances.tol_sep * scale:
        raise PreconditionError("hypothesis fails: lambda0 is not a simple eigenvalue", module=_MODULE,
                                operation=operation)
    c = float(np.min(oriented(V[:, i]) / (u / float(np.max(u)))))
    if c <= tolerances.tol_vec:
        raise PreconditionError("hypothesis fails: the eigenvector of lambda0 is not >= c u for any c > 0",
                                module=_MODULE, operation=operation)


def check_kernel_bound(A: MatrixLike, u, lambda0: float, mu1: float, tol: float = 1e-9, weight: float = 1.0,
                       tolerances: Tolerances = DEFAULT_TOLERANCES) -> KernelBoundReport:
    """
    Search the smallest d with (mu1 I - A)^{-1} e_k <= d <e_k, u> u for every basis vector e_k.

    The pairing carries ``weight`` (the grid spacing h for discretized operators). In finite
    dimensions some d always exists; the bound is reported to hold when the per-row
    constants are uniform, max_j d_j <= ``tolerances.kernel_ratio_cap`` * median_j d_j,
    which is what survives grid refinement.

    :raises PreconditionError: naming the failed hypothesis.
    """
    operation = "check_kernel_bound"
    A = as_matrix(A, operation=operation)
    u = as_vector(u, dim=A.shape[0], operation=operation)
    _require_symmetric(A, tolerances, operation)
    if np.any(u <= 0):
        raise PreconditionError("u must be strictly positive", module=_MODULE, operation=operation)
    if not mu1 > lambda0:
        raise PreconditionError(f"hypothesis mu1 > lambda0 fails ({mu1} <= {lambda0})", module=_MODULE,
                                operation=operation)
    R1 = _positive_resolvent(A, mu1, tol, tolerances, operation)
    _require_leading_pair(A, u, lambda0, tolerances, operation)

    ratios = np.where(R1 > 0, R1, 0.0) / (weight * np.outer(u, u))
    per_row = np.max(ratios, axis=1)
    d, spread, j = row_uniformity(per_row)
    k = int(np.argmax(ratios[j]))
    holds = spread <= tolerances.kernel_ratio_cap
    logger.info("kernel bound: d=%.4g row ratio %.3g -> %s", d, spread, "holds" if holds else "fails")
    return KernelBoundReport(holds=bool(holds), d_constant=d, row_ratio=spread,
                             failing_pair=None if holds else (k, j))


def domination_constant(R: np.ndarray, u: np.ndarray) -> tuple[float, float]:
    """Smallest C with |R e_k| <= C u for all k, and its row-uniformity ratio."""
    per_row = np.max(np.abs(R), axis=1) / u
    C, spread, _ = row_uniformity(per_row)
    return C, spread


def antimax_equivalence_test(A: MatrixLike, u, lambda0: float, mu1: float, tol: float = 1e-9,
                             weight: float = 1.0, window: Optional[float] = None, samples: int = 24,
                             resolvent_power: int = 1,
                             tolerances: Tolerances = DEFAULT_TOLERANCES) -> EquivalenceReport:
    """
    Compare (i) the uniform anti-maximum principle at lambda0 with (ii) the kernel bound at mu1.

    The domination hypothesis is checked on the columns of (mu1 I - A)^{-m}, m = ``resolvent_power``,
    with the same row-uniformity cap as the kernel bound. An inconsistent outcome is logged and
    reported, never reconciled.
    """
    operation = "antimax_equivalence_test"
    A = as_matrix(A, operation=operation)
    u = as_vector(u, dim=A.shape[0], operation=operation)
    if resolvent_power < 1:
        raise PreconditionError("resolvent power must be at least 1", module=_MODULE, operation=operation)
    kernel = check_kernel_bound(A, u, lambda0, mu1, tol=tol, weight=weight, tolerances=tolerances)

    R1 = _positive_resolvent(A, mu1, tol, tolerances, operation)
    Rm = np.linalg.matrix_power(R1, resolvent_power)
    C, spread = domination_constant(Rm, u / float(np.max(u)))
    if spread > tolerances.kernel_ratio_cap:
        raise PreconditionError(f"domination hypothesis fails for m={resolvent_power}: row ratio {spread:.3g}",
                                module=_MODULE, operation=operation)

    sweep = resolvent_sign_sweep(A, lambda0, window=window, samples=samples, tol=tol, tolerances=tolerances)
    i_holds = sweep.left_window_verdict == LeftVerdict.UNIFORM_ANTI_MAX
    consistent = i_holds == kernel.holds
    if not consistent:
        logger.warning("anti-maximum equivalence inconsistent: sweep says %s, kernel bound says %s",
                       sweep.left_window_verdict.value, "holds" if kernel.holds else "fails")
    return EquivalenceReport(i_holds=i_holds, ii_holds=kernel.holds, consistent=consistent,
                             resolvent_power=resolvent_power, domination_constant=C, sweep=sweep, kernel=kernel)
