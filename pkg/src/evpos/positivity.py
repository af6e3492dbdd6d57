"""
Positivity and eventual positivity of matrix semigroups e^{tA}.

A semigroup is positive for all t >= 0 exactly when A is Metzler. It is
eventually strictly positive exactly when the spectral bound is a real,
geometrically simple and strictly dominant eigenvalue whose right and left
eigenvectors are both strictly positive; :func:`check_noutsos` implements that
test with explicit margins and backs negative answers with a sampled witness.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Optional

import numpy as np
import pydantic
import scipy.linalg

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import HorizonError, PreconditionError
from .linalg import MatrixLike, Spectrum, as_matrix, as_vector, eig, finite_or_label, mat_exp, perron_projection
from .util import get_logger

logger = get_logger(name="evpos.positivity")

_MODULE = "positivity"


class Classification(str, Enum):
    POSITIVE = "Positive"
    EVENTUALLY_POSITIVE_STRICT = "EventuallyPositiveStrict"
    NOT_EVENTUALLY_POSITIVE = "NotEventuallyPositive"
    INCONCLUSIVE = "Inconclusive"


class ConditionResult(pydantic.BaseModel):
    """One condition of the spectral test; ``in_band`` marks margins inside the tolerance band."""

    passed: bool
    margin: Optional[float] = None
    in_band: bool = False


class ScanSample(pydantic.BaseModel):
    """Most negative entry of e^{t(A - sI)} at one sampled time."""

    t: float
    min_entry: float
    j: int
    k: int
    nonneg: bool


class EvPosVerdict(pydantic.BaseModel):
    classification: Classification
    spectral_bound: float
    t0_estimate: Optional[float] = None
    witness_time: Optional[float] = None
    witness_entry: Optional[tuple[int, int]] = None
    criterion_report: dict[str, ConditionResult] = pydantic.Field(default_factory=dict)

    @pydantic.model_validator(mode="after")
    def _check_consistency(self) -> EvPosVerdict:
        if self.classification == Classification.POSITIVE and self.t0_estimate != 0.0:
            raise ValueError("a Positive verdict has t0 = 0")
        if self.classification == Classification.NOT_EVENTUALLY_POSITIVE and (
                self.witness_time is None or self.witness_entry is None):
            raise ValueError("a NotEventuallyPositive verdict needs a witness")
        return self

    def to_report(self) -> dict:
        witness = None
        if self.witness_time is not None and self.witness_entry is not None:
            witness = {"t": self.witness_time, "j": self.witness_entry[0], "k": self.witness_entry[1]}
        return {
            "classification": self.classification.value,
            "t0": self.t0_estimate,
            "spectral_bound": self.spectral_bound,
            "witness": witness,
            "conditions": {
                name: {"passed": c.passed, "in_band": c.in_band,
                       "margin": None if c.margin is None else finite_or_label(c.margin)}
                for name, c in sorted(self.criterion_report.items())
            },
        }


class DominationReport(pydantic.BaseModel):
    holds: bool
    constant: Optional[float] = None
    row_ratio: Optional[float] = None
    failing_index: Optional[int] = None


class UniformCriterionReport(pydantic.BaseModel):
    cond1: DominationReport
    cond2: DominationReport
    verdict: bool
    t1: float
    confirmation_time: Optional[float] = None
    confirmation_horizon: Optional[float] = None

    @property
    def confirmed(self) -> bool:
        return self.confirmation_time is not None


class PerturbationResult(pydantic.BaseModel):
    scale: float
    verdict: EvPosVerdict


class DestructionSearchReport(pydantic.BaseModel):
    found: bool
    seed: int
    scale: float
    trials_run: int
    trial_index: Optional[int] = None
    x: Optional[list[float]] = None
    y: Optional[list[float]] = None
    verdict: Optional[EvPosVerdict] = None

    @property
    def summary(self) -> str:
        if not self.found:
            return f"none found in {self.trials_run} trials"
        return f"destroyed at trial {self.trial_index}"


class ShiftReport(pydantic.BaseModel):
    shift: float
    max_identity_residual: float
    stays_positive: bool
    samples: list[ScanSample]


# ---------------------------------------------------------------------------
# Entrywise tests
# ---------------------------------------------------------------------------

def is_entrywise_nonneg(M: MatrixLike,
                        tol_rel: float = DEFAULT_TOLERANCES.tol_pos) -> tuple[bool, Optional[tuple[int, int]]]:
    """
    Test M >= 0 up to ``tol_rel * (1 + max |M|)``.

    :return: ``(True, None)`` or ``(False, (j, k))`` with the most negative entry.
    """
    if tol_rel < 0:
        raise ValueError("tol_rel must be nonnegative")
    M = as_matrix(M, square=False, operation="is_entrywise_nonneg")
    threshold = -tol_rel * (1.0 + float(np.max(np.abs(M))))
    j, k = np.unravel_index(np.argmin(M), M.shape)
    if M[j, k] >= threshold:
        return True, None
    return False, (int(j), int(k))


def _off_diagonal(A: np.ndarray) -> np.ndarray:
    return A[~np.eye(A.shape[0], dtype=bool)]


def is_metzler(A: MatrixLike, tol: float = 0.0) -> bool:
    """True iff every off-diagonal entry is >= -tol."""
    A = as_matrix(A, operation="is_metzler")
    if A.shape[0] == 1:
        return True
    return bool(np.all(_off_diagonal(A) >= -tol))


def check_markov_generator(A: MatrixLike, tol: float = 1e-9) -> bool:
    """Metzler with zero row sums, i.e. e^{tA} is row stochastic for every t."""
    A = as_matrix(A, operation="check_markov_generator")
    scale = max(1.0, float(np.max(np.abs(A))))
    return is_metzler(A, tol * scale) and bool(np.all(np.abs(A.sum(axis=1)) <= tol * scale))


def scan_positivity(A: MatrixLike, times, tol_rel: float = DEFAULT_TOLERANCES.tol_pos,
                    shift: float = 0.0) -> list[ScanSample]:
    """
    Brute-force scan of e^{t(A - shift I)} over ``times``.

    The shift only rescales by a positive factor, so signs are those of e^{tA}.
    """
    A = as_matrix(A, operation="scan_positivity")
    centered = A - shift * np.eye(A.shape[0])
    samples = []
    for t in np.asarray(times, dtype=float):
        E = mat_exp(centered, float(t))
        j, k = np.unravel_index(np.argmin(E), E.shape)
        threshold = -tol_rel * (1.0 + float(np.max(np.abs(E))))
        samples.append(ScanSample(t=float(t), min_entry=float(E[j, k]), j=int(j), k=int(k),
                                  nonneg=bool(E[j, k] >= threshold)))
    return samples


def witness_grid(t_max: float, points: int = 200) -> np.ndarray:
    """Geometric grid from 1e-3 merged with a uniform grid, both ending at ``t_max``."""
    geometric = np.geomspace(min(1e-3, t_max), t_max, points)
    uniform = np.linspace(0.0, t_max, points + 1)[1:]
    return np.unique(np.concatenate([geometric, uniform]))


# ---------------------------------------------------------------------------
# Spectral characterization
# ---------------------------------------------------------------------------

def oriented(v: np.ndarray) -> np.ndarray:
    """Scale an eigenvector so its largest-magnitude entry equals 1 and drop the imaginary part."""
    v = np.asarray(v)
    return np.real(v / v[np.argmax(np.abs(v))])


def _vector_condition(v: np.ndarray, tol_vec: float, usable: bool) -> ConditionResult:
    margin = float(np.min(oriented(v)))
    in_band = abs(margin) <= tol_vec
    return ConditionResult(passed=usable and margin > tol_vec, margin=margin, in_band=in_band)


def noutsos_conditions(spectrum: Spectrum, tol_vec: float = DEFAULT_TOLERANCES.tol_vec) -> dict[str, ConditionResult]:
    """Evaluate the four spectral conditions with their margins."""
    lam = spectrum.dominant_eigenvalue
    real = abs(lam.imag) <= spectrum.separation
    i = spectrum.dominant_index
    return {
        "dominant_real": ConditionResult(passed=real, margin=-abs(lam.imag)),
        "dominant_simple": ConditionResult(passed=spectrum.simple_dominant, margin=spectrum.dominance_gap),
        "right_positive": _vector_condition(spectrum.right[:, i], tol_vec, real),
        "left_positive": _vector_condition(spectrum.left[:, i], tol_vec, real),
    }


def _passes(E: np.ndarray, tol: float) -> bool:
    return float(np.min(E)) > tol * float(np.max(np.abs(E)))


def first_positive_time(A: np.ndarray, spectral_bound: float, t_max: float,
                        tolerances: Tolerances = DEFAULT_TOLERANCES, tol: Optional[float] = None) -> float:
    """
    Geometric grid t_start * 2^k up to t_max, then bisection between the last failing
    and the next passing point down to ``tolerances.t0_resolution``.

    :raises HorizonError: if e^{t_max A} is not strictly positive.
    """
    tol = tolerances.tol_pos if tol is None else tol
    centered = A - spectral_bound * np.eye(A.shape[0])

    def passes(t: float) -> bool:
        return _passes(mat_exp(centered, t), tol)

    grid = []
    t = tolerances.t0_start
    while t < t_max:
        grid.append(t)
        t *= 2.0
    grid.append(t_max)
    results = [passes(t) for t in grid]
    if not results[-1]:
        raise HorizonError(f"e^(tA) is not strictly positive at t_max={t_max:.6g}",
                           module=_MODULE, operation="estimate_t0")
    failing = [i for i, ok in enumerate(results) if not ok]
    if not failing:
        return 0.0
    lo, hi = grid[failing[-1]], grid[failing[-1] + 1]
    while hi - lo > tolerances.t0_resolution:
        mid = 0.5 * (lo + hi)
        if passes(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _latest_witness(A: np.ndarray, spectral_bound: float, t_max: float,
                    tolerances: Tolerances) -> Optional[ScanSample]:
    samples = scan_positivity(A, witness_grid(t_max), tolerances.tol_pos, shift=spectral_bound)
    negatives = [s for s in samples if not s.nonneg]
    return negatives[-1] if negatives else None


def check_noutsos(A: MatrixLike, tol: Optional[float] = None, t_max: float = 100.0,
                  tolerances: Tolerances = DEFAULT_TOLERANCES) -> EvPosVerdict:
    """
    Classify the semigroup generated by A.

    Metzler generators are Positive. Otherwise the verdict is EventuallyPositiveStrict
    when all spectral conditions pass; if any fails or sits inside the tolerance band the
    semigroup is scanned up to ``t_max`` for a negative entry, giving NotEventuallyPositive
    with that witness, or Inconclusive when none is found.

    :param tol: Eigenvector positivity threshold relative to max |v|, ``tolerances.tol_vec`` by default.
    """
    A = as_matrix(A, operation="check_noutsos")
    tol_vec = tolerances.tol_vec if tol is None else tol
    spectrum = eig(A, tolerances=tolerances)
    conditions = noutsos_conditions(spectrum, tol_vec)
    spb = spectrum.spectral_bound

    if is_metzler(A, tolerances.tol_pos * float(np.max(np.abs(A)))):
        logger.info("check_noutsos: Metzler generator, positive semigroup")
        return EvPosVerdict(classification=Classification.POSITIVE, spectral_bound=spb, t0_estimate=0.0,
                            criterion_report=conditions)

    if all(c.passed for c in conditions.values()):
        try:
            t0 = first_positive_time(A, spb, t_max, tolerances)
        except HorizonError as e:
            logger.warning("check_noutsos: conditions hold but %s", e)
            t0 = None
        logger.info("check_noutsos: eventually strictly positive, t0=%s", t0)
        return EvPosVerdict(classification=Classification.EVENTUALLY_POSITIVE_STRICT, spectral_bound=spb,
                            t0_estimate=t0, criterion_report=conditions)

    banded = [name for name, c in conditions.items() if c.in_band]
    if banded:
        logger.warning("check_noutsos: margins inside the tolerance band for %s", ", ".join(banded))
    witness = _latest_witness(A, spb, t_max, tolerances)
    if witness is None:
        logger.info("check_noutsos: conditions fail but no negative entry up to t=%.6g", t_max)
        return EvPosVerdict(classification=Classification.INCONCLUSIVE, spectral_bound=spb,
                            criterion_report=conditions)
    logger.info("check_noutsos: not eventually positive, witness t=%.6g entry=(%d,%d)",
                witness.t, witness.j, witness.k)
    return EvPosVerdict(classification=Classification.NOT_EVENTUALLY_POSITIVE, spectral_bound=spb,
                        witness_time=witness.t, witness_entry=(witness.j, witness.k),
                        criterion_report=conditions)


def estimate_t0(A: MatrixLike, t_max: float = 100.0, tol: Optional[float] = None,
                tolerances: Tolerances = DEFAULT_TOLERANCES) -> float:
    """
    Smallest sampled t0 with e^{tA} > tol entrywise on the grid up to ``t_max``.

    Also certifies that e^{t_max A} e^{-t_max s(A)} is within ``10 * tol`` of the
    Perron projection.

    :raises PreconditionError: if the spectral conditions do not hold.
    :raises HorizonError: if no t0 is found or the limit profile is not reached by ``t_max``.
    """
    A = as_matrix(A, operation="estimate_t0")
    tol = tolerances.tol_pos if tol is None else tol
    spectrum = eig(A, tolerances=tolerances)
    failed = [name for name, c in noutsos_conditions(spectrum, tolerances.tol_vec).items() if not c.passed]
    if failed:
        raise PreconditionError(f"semigroup is not eventually strictly positive: {', '.join(failed)} failed",
                                module=_MODULE, operation="estimate_t0")
    t0 = first_positive_time(A, spectrum.spectral_bound, t_max, tolerances, tol)
    limit = mat_exp(A - spectrum.spectral_bound * np.eye(A.shape[0]), t_max)
    projection = perron_projection(spectrum)
    distance = float(np.max(np.abs(limit - projection)))
    if distance > 10.0 * tol * max(1.0, float(np.max(np.abs(projection)))):
        raise HorizonError(f"e^(t_max A) is {distance:.3g} away from the Perron projection; increase t_max",
                           module=_MODULE, operation="estimate_t0")
    logger.info("estimate_t0: t0=%.6g, limit distance %.3g", t0, distance)
    return t0


# ---------------------------------------------------------------------------
# Uniform criterion for symmetric generators
# ---------------------------------------------------------------------------

def _is_symmetric(A: np.ndarray, tol: float) -> bool:
    return float(np.max(np.abs(A - A.T))) <= tol * max(float(np.max(np.abs(A))), np.finfo(float).tiny)


def check_uniform_selfadjoint_criterion(A: MatrixLike, u, t1: float, tol: Optional[float] = None,
                                        confirm_t_max: Optional[float] = None, samples: int = 60,
                                        tolerances: Tolerances = DEFAULT_TOLERANCES) -> UniformCriterionReport:
    """
    Sufficient criterion for uniform eventual positivity of a symmetric generator.

    cond1: the spectral bound is a simple eigenvalue with eigenvector v >= c u, c > 0.
    cond2: every column w of e^{t1 A} e^{-t1 s(A)} satisfies |w_j| <= C u_j (u normalized to
    max 1), with per-row constants uniform: max_j C_j <= ``tolerances.kernel_ratio_cap`` * median_j C_j.

    When both hold, e^{tA} weighted by u, D_u^{-1} e^{tA} D_u^{-1}, is swept on a
    geometric grid up to ``confirm_t_max`` (default 10 * t1) and the time from which
    it stays strictly positive is reported as the confirmation time.

    :param A: Symmetric matrix.
    :param u: Strictly positive weight vector.
    :param t1: The time at which domination is checked.
    :param tol: Symmetry tolerance, ``tolerances.tol_sym`` by default.
    """
    A = as_matrix(A, operation="check_uniform_selfadjoint_criterion")
    n = A.shape[0]
    u = as_vector(u, dim=n, operation="check_uniform_selfadjoint_criterion")
    tol = tolerances.tol_sym if tol is None else tol
    if not _is_symmetric(A, tol):
        raise PreconditionError("generator is not symmetric", module=_MODULE,
                                operation="check_uniform_selfadjoint_criterion")
    if np.any(u <= 0):
        raise PreconditionError("weight u must be strictly positive", module=_MODULE,
                                operation="check_uniform_selfadjoint_criterion")
    if not t1 > 0:
        raise PreconditionError("t1 must be positive", module=_MODULE,
                                operation="check_uniform_selfadjoint_criterion")
    u = u / float(np.max(u))

    w, V = scipy.linalg.eigh(A)
    spb = float(w[-1])
    scale = max(float(np.max(np.abs(w))), float(np.max(np.abs(A))))
    simple = n == 1 or (spb - float(w[-2])) > tolerances.tol_sep * scale
    ratios = oriented(V[:, -1]) / u
    c = float(np.min(ratios))
    cond1 = DominationReport(holds=bool(simple and c > tolerances.tol_vec), constant=c if simple else None,
                             failing_index=None if c > tolerances.tol_vec else int(np.argmin(ratios)))

    E = mat_exp(A - spb * np.eye(n), t1)
    C, spread, top = row_uniformity(np.max(np.abs(E), axis=1) / u)
    holds2 = spread <= tolerances.kernel_ratio_cap
    cond2 = DominationReport(holds=bool(holds2), constant=C, row_ratio=spread,
                             failing_index=None if holds2 else top)

    verdict = cond1.holds and cond2.holds
    report = UniformCriterionReport(cond1=cond1, cond2=cond2, verdict=verdict, t1=t1)
    if verdict:
        horizon = 10.0 * t1 if confirm_t_max is None else confirm_t_max
        report.confirmation_horizon = horizon
        report.confirmation_time = _weighted_onset(A - spb * np.eye(n), u, horizon, samples, tolerances)
        if report.confirmation_time is None:
            logger.warning("uniform criterion holds but weighted positivity was not reached by t=%.6g", horizon)
    logger.info("uniform criterion: cond1=%s (c=%.3g) cond2=%s (C=%.3g) confirmation=%s",
                cond1.holds, c, cond2.holds, C, report.confirmation_time)
    return report


def row_uniformity(ratios: np.ndarray) -> tuple[float, float, int]:
    """(max, max / median, argmax) of per-row domination constants."""
    top = int(np.argmax(ratios))
    median = float(np.median(ratios))
    spread = float(ratios[top]) / median if median > 0 else math.inf
    return float(ratios[top]), spread, top


def _weighted_onset(centered: np.ndarray, u: np.ndarray, horizon: float, samples: int,
                    tolerances: Tolerances) -> Optional[float]:
    times = np.geomspace(horizon * 1e-4, horizon, samples)
    onset = None
    for t in times:
        M = mat_exp(centered, float(t)) / np.outer(u, u)
        if _passes(M, tolerances.tol_pos):
            onset = float(t) if onset is None else onset
        else:
            onset = None
    return onset


# ---------------------------------------------------------------------------
# Perturbations
# ---------------------------------------------------------------------------

def _require_nonneg(B: np.ndarray, operation: str) -> None:
    ok, entry = is_entrywise_nonneg(B, 0.0)
    if not ok:
        raise PreconditionError(f"perturbation must be entrywise nonnegative, entry {entry} is negative",
                                module=_MODULE, operation=operation)


def perturbation_experiment(A: MatrixLike, B: MatrixLike, scales, t_max: float = 100.0,
                            tolerances: Tolerances = DEFAULT_TOLERANCES) -> list[PerturbationResult]:
    """Run :func:`check_noutsos` on A + s B for each scale s."""
    A = as_matrix(A, operation="perturbation_experiment")
    B = as_matrix(B, operation="perturbation_experiment")
    if A.shape != B.shape:
        raise PreconditionError("A and B must have the same shape", module=_MODULE,
                                operation="perturbation_experiment")
    _require_nonneg(B, "perturbation_experiment")
    base = check_noutsos(A, t_max=t_max, tolerances=tolerances)
    if base.classification not in (Classification.POSITIVE, Classification.EVENTUALLY_POSITIVE_STRICT):
        raise PreconditionError(f"A is {base.classification.value}, not eventually positive",
                                module=_MODULE, operation="perturbation_experiment")
    return [PerturbationResult(scale=float(s), verdict=check_noutsos(A + float(s) * B, t_max=t_max,
                                                                      tolerances=tolerances))
            for s in scales]


def search_destructive_perturbation(A: MatrixLike, scale: float = 5.0, trials: int = 1000,
                                    seed: Optional[int] = None, t_max: float = 100.0,
                                    tolerances: Tolerances = DEFAULT_TOLERANCES) -> DestructionSearchReport:
    """
    Randomized search for a nonnegative rank-one B = x y^T (max entry 1) such that
    A + scale * B is not eventually positive.

    Trials are screened with the spectral conditions; only candidates failing one are
    confirmed with :func:`check_noutsos`. Absence of a hit is reported, nothing more.
    """
    A = as_matrix(A, operation="search_destructive_perturbation")
    seed = tolerances.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    n = A.shape[0]
    for trial in range(trials):
        x = rng.random(n) * (rng.random(n) < 0.5)
        y = rng.random(n) * (rng.random(n) < 0.5)
        if not x.any() or not y.any():
            continue
        B = np.outer(x, y)
        B /= float(np.max(B))
        candidate = A + scale * B
        conditions = noutsos_conditions(eig(candidate, tolerances=tolerances), tolerances.tol_vec)
        if all(c.passed for c in conditions.values()):
            continue
        verdict = check_noutsos(candidate, t_max=t_max, tolerances=tolerances)
        if verdict.classification == Classification.NOT_EVENTUALLY_POSITIVE:
            logger.info("destructive perturbation found at trial %d", trial)
            return DestructionSearchReport(found=True, seed=seed, scale=scale, trials_run=trial + 1,
                                           trial_index=trial, x=x.tolist(), y=y.tolist(), verdict=verdict)
    logger.info("no destructive perturbation in %d trials", trials)
    return DestructionSearchReport(found=False, seed=seed, scale=scale, trials_run=trials)


def shifted_semigroup_check(A: MatrixLike, B: MatrixLike, m, times) -> ShiftReport:
    """
    Positive perturbations plus a real diagonal M keep a positive semigroup positive:
    with c = max(0, -min m), e^{t(A+B+M)} = e^{-tc} e^{t(A+B+M+cI)} and the right-hand
    generator stays Metzler. Reports the identity residual and the sign of every sample.
    """
    A = as_matrix(A, operation="shifted_semigroup_check")
    B = as_matrix(B, operation="shifted_semigroup_check")
    _require_nonneg(B, "shifted_semigroup_check")
    if not is_metzler(A):
        raise PreconditionError("A must generate a positive semigroup (Metzler)", module=_MODULE,
                                operation="shifted_semigroup_check")
    m = as_vector(m, dim=A.shape[0], operation="shifted_semigroup_check")
    c = max(0.0, -float(np.min(m)))
    G = A + B + np.diag(m)
    residual = 0.0
    for t in np.asarray(times, dtype=float):
        direct = mat_exp(G, float(t))
        shifted = math.exp(-t * c) * mat_exp(G + c * np.eye(G.shape[0]), float(t))
        residual = max(residual, float(np.max(np.abs(direct - shifted))) / (1.0 + float(np.max(np.abs(direct)))))
    samples = scan_positivity(G, times)
    return ShiftReport(shift=c, max_identity_residual=residual,
                       stays_positive=all(s.nonneg for s in samples), samples=samples)
