"""
Scenario documents and their execution.

A scenario is one JSON document: what to analyze (an inline matrix, a matrix CSV,
an operator spec or a semigroup model), the kind of analysis, and its
parameters. Running it writes ``summary.json`` plus kind-specific CSV files to
the output directory; the summary carries no timestamps, so repeated runs are
byte-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
import pydantic

from .config import DEFAULT_TOLERANCES, Tolerances, get_settings
from .discretize import BoundaryCondition, Grid, OperatorSpec, build_operator, leading_eigenpair
from .errors import PreconditionError, SpecError
from .linalg import (as_matrix, eig, estimate_growth_bound, growth_horizon, mat_exp, perron_projection,
                     read_matrix_csv, resolvent, write_matrix_csv)
from .maxprinciple import antimax_equivalence_test, resolvent_sign_sweep
from .positivity import (Classification, check_markov_generator, check_noutsos, check_uniform_selfadjoint_criterion,
                         is_entrywise_nonneg, is_metzler, perturbation_experiment, scan_positivity,
                         search_destructive_perturbation)
from .reports import SCHEMA, write_csv, write_grid_function_csv, write_json, write_trace_csv
from .semigroups import (AnyGrid, FourierMultiplier, GridFunction, HeatKernel, RightShift, SemigroupModel, TensorGrid,
                         evolve, line_grid, local_positivity_probe, mean_projection_check)
from .util import get_logger

logger = get_logger(name="evpos.scenarios")

_MODULE = "cli"


class Kind(str, Enum):
    ANALYZE_MATRIX = "analyze-matrix"
    SIMULATE = "simulate"
    PROBE_LOCAL = "probe-local"
    SWEEP_RESOLVENT = "sweep-resolvent"
    CHECK_CRITERION = "check-criterion"
    PERTURB = "perturb"


class InitialData(pydantic.BaseModel):
    """
    Initial data sampled on the model grid.

    ``bump`` is cos^2 on a support of diameter ``width``, ``gaussian`` is exp(-(r/width)^2),
    ``indicator`` is 1 on [center, center + width], ``cosine`` is 1 + cos(2 pi (x - center) / width).
    """

    profile: Literal["bump", "gaussian", "indicator", "constant", "cosine", "file"] = "bump"
    center: float = 0.0
    width: float = pydantic.Field(default=0.05, gt=0)
    normalize: Optional[Literal["mass", "mean"]] = None
    values_file: Optional[str] = None

    def _radius(self, grid: AnyGrid) -> np.ndarray:
        if isinstance(grid, TensorGrid):
            X, Y = np.meshgrid(grid.x, grid.y, indexing="ij")
            return np.hypot(X - self.center, Y - self.center)
        return np.abs(grid.points - self.center)

    def sample(self, grid: AnyGrid, base_dir: Path) -> GridFunction:
        r = self._radius(grid)
        if self.profile == "bump":
            values = np.where(r < 0.5 * self.width, np.cos(math.pi * r / self.width) ** 2, 0.0)
        elif self.profile == "gaussian":
            values = np.exp(-(r / self.width) ** 2)
        elif self.profile == "indicator":
            x = grid.points if isinstance(grid, Grid) else None
            if x is None:
                raise SpecError("indicator data is 1D only", module=_MODULE, operation="run_scenario")
            values = ((x >= self.center - 1e-12) & (x <= self.center + self.width + 1e-12)).astype(float)
        elif self.profile == "constant":
            values = np.ones_like(r)
        elif self.profile == "cosine":
            x = grid.points if isinstance(grid, Grid) else None
            if x is None:
                raise SpecError("cosine data is 1D only", module=_MODULE, operation="run_scenario")
            values = 1.0 + np.cos(2.0 * math.pi * (x - self.center) / self.width)
        else:
            values = _load_vector(self.values_file, base_dir).reshape(r.shape)
        u0 = GridFunction(grid, values)
        if self.normalize == "mass":
            u0 = u0.with_values(u0.values / u0.mass())
        elif self.normalize == "mean":
            u0 = u0.with_values(u0.values / float(np.mean(u0.values)))
        return u0


class SemigroupSpec(pydantic.BaseModel):
    """Semigroup model; heat and right shift act on the line grid [a, b] with ``points`` samples."""

    model: Literal["heat", "right-shift", "fourier"]
    dim: int = 1
    m: int = 2
    box_length: float = 1.0
    modes: Optional[int] = None
    origin: Optional[float] = None
    a: float = -5.0
    b: float = 5.0
    points: int = 1001

    def build(self) -> tuple[SemigroupModel, AnyGrid]:
        if self.model == "fourier":
            model = FourierMultiplier(m=self.m, box_length=self.box_length, modes=self.modes, dim=self.dim,
                                      origin=self.origin)
            return model, model.grid()
        if self.points < 2 or not self.b > self.a:
            raise SpecError(f"line grid needs points >= 2 on a non-empty interval, got {self.points} on "
                            f"({self.a}, {self.b})", module=_MODULE, operation="run_scenario")
        grid = line_grid(self.a, self.b, self.points)
        if self.model == "right-shift":
            return RightShift(), grid
        if self.dim == 2:
            pts = grid.points
            return HeatKernel(dim=2), TensorGrid(x=pts, y=pts.copy(), h=grid.h)
        return HeatKernel(dim=self.dim), grid


class Parameters(pydantic.BaseModel):
    """
    Kind-specific parameters. Tolerance defaults match :class:`evpos.config.Tolerances`.
    """

    model_config = pydantic.ConfigDict(extra="forbid")

    t_max: float = pydantic.Field(default=100.0, gt=0)
    t_min: float = pydantic.Field(default=1e-3, gt=0)
    samples: int = pydantic.Field(default=40, ge=2)
    times: Optional[list[float]] = None
    tol: Optional[float] = pydantic.Field(default=None, gt=0)
    tol_pos: float = pydantic.Field(default=DEFAULT_TOLERANCES.tol_pos, gt=0)
    tol_sep: float = pydantic.Field(default=DEFAULT_TOLERANCES.tol_sep, gt=0)
    tol_vec: float = pydantic.Field(default=DEFAULT_TOLERANCES.tol_vec, gt=0)
    window_fraction: float = pydantic.Field(default=DEFAULT_TOLERANCES.window_fraction, gt=0)
    # resolvent sweeps
    window: Optional[float] = pydantic.Field(default=None, gt=0)
    lambda0: Optional[float] = None
    mu1: Optional[float] = None
    resolvent_power: int = pydantic.Field(default=1, ge=1)
    # weights and criteria
    u: Literal["ones", "distance-squared", "leading-eigenvector", "file"] = "ones"
    u_file: Optional[str] = None
    t1: float = pydantic.Field(default=1.0, gt=0)
    confirm_t_max: Optional[float] = pydantic.Field(default=None, gt=0)
    # semigroup probes
    probe_window: Optional[tuple[float, float]] = None
    t_mean: float = pydantic.Field(default=0.01, gt=0)
    # perturbations
    scales: list[float] = pydantic.Field(default_factory=lambda: [0.01, 0.1, 1.0])
    search_scale: float = pydantic.Field(default=5.0, gt=0)
    trials: int = pydantic.Field(default=1000, ge=1)
    seed: Optional[int] = None

    def tolerances(self) -> Tolerances:
        return DEFAULT_TOLERANCES.with_overrides(tol_pos=self.tol_pos, tol_sep=self.tol_sep, tol_vec=self.tol_vec,
                                                 window_fraction=self.window_fraction, seed=self.seed)

    def sample_times(self) -> np.ndarray:
        if self.times is not None:
            return np.asarray(self.times, dtype=float)
        return np.geomspace(self.t_min, self.t_max, self.samples)


class Scenario(pydantic.BaseModel):
    model_config = pydantic.ConfigDict(extra="forbid")

    name: str
    kind: Kind
    matrix: Optional[list[list[float]]] = None
    matrix_file: Optional[str] = None
    operator: Optional[OperatorSpec] = None
    semigroup: Optional[SemigroupSpec] = None
    initial: Optional[InitialData] = None
    parameters: Parameters = pydantic.Field(default_factory=Parameters)
    output_dir: Optional[str] = None

    @pydantic.model_validator(mode="after")
    def _check_sources(self) -> Scenario:
        sources = [x for x in (self.matrix, self.matrix_file, self.operator, self.semigroup) if x is not None]
        if len(sources) != 1:
            raise ValueError("exactly one of matrix, matrix_file, operator, semigroup is required")
        if self.kind in (Kind.SIMULATE, Kind.PROBE_LOCAL) and (self.semigroup is None or self.initial is None):
            raise ValueError(f"{self.kind.value} needs a semigroup and initial data")
        if self.kind == Kind.PROBE_LOCAL and self.parameters.probe_window is None:
            raise ValueError("probe-local needs parameters.probe_window")
        if self.kind == Kind.PERTURB and self.parameters.seed is None:
            raise ValueError("perturb needs parameters.seed")
        if self.kind == Kind.CHECK_CRITERION and self.semigroup is not None and self.semigroup.model != "fourier":
            raise ValueError("check-criterion accepts only the fourier semigroup as a generator")
        return self


@dataclass
class ScenarioResult:
    name: str
    output_dir: Path
    summary: dict
    files: list[Path] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Inputs
# ---------------------------------------------------------------------------

def _resolve(path: Optional[str], base_dir: Path) -> Path:
    if path is None:
        raise SpecError("missing file reference", module=_MODULE, operation="run_scenario")
    p = Path(path)
    if not p.is_absolute():
        p = base_dir / p
    if not p.exists():
        raise SpecError(f"referenced file {p} does not exist", module=_MODULE, operation="run_scenario")
    return p


def _load_vector(path: Optional[str], base_dir: Path) -> np.ndarray:
    return np.loadtxt(_resolve(path, base_dir), delimiter=",", ndmin=1, dtype=np.float64).reshape(-1)


def _generator(s: Scenario, base_dir: Path) -> tuple[np.ndarray, Optional[Grid]]:
    if s.matrix is not None:
        return as_matrix(s.matrix, operation="run_scenario"), None
    if s.matrix_file is not None:
        return read_matrix_csv(_resolve(s.matrix_file, base_dir)), None
    if s.operator is not None:
        return build_operator(s.operator)
    model, grid = s.semigroup.build()
    if not isinstance(model, FourierMultiplier):
        raise SpecError("only the fourier semigroup has a matrix generator", module=_MODULE,
                        operation="run_scenario")
    return model.as_matrix(), grid if isinstance(grid, Grid) else None


def _weight_vector(s: Scenario, A: np.ndarray, grid: Optional[Grid], base_dir: Path) -> np.ndarray:
    choice = s.parameters.u
    if choice == "ones":
        return np.ones(A.shape[0])
    if choice == "distance-squared":
        if grid is None:
            raise SpecError("u = distance-squared needs an operator grid", module=_MODULE, operation="run_scenario")
        return grid.boundary_distance ** 2
    if choice == "leading-eigenvector":
        return leading_eigenpair(A)[1]
    return _load_vector(s.parameters.u_file, base_dir)


# ---------------------------------------------------------------------------
# Runners
# ---------------------------------------------------------------------------

def _analyze_matrix(s: Scenario, out: Path, base_dir: Path, tolerances: Tolerances) -> tuple[dict, list[Path]]:
    p = s.parameters
    A, grid = _generator(s, base_dir)
    files = [write_matrix_csv(out / "matrix.csv", A)]
    spectrum = eig(A, tolerances=tolerances)
    verdict = check_noutsos(A, tol=p.tol, t_max=p.t_max, tolerances=tolerances)
    result: dict = {
        "dimension": A.shape[0],
        "spectrum": spectrum.to_dict(),
        "metzler": is_metzler(A),
        "verdict": verdict.to_report(),
        "dominant_imag": abs(spectrum.dominant_eigenvalue.imag),
    }
    if spectrum.simple_dominant:
        horizon = growth_horizon(spectrum, cap=p.t_max)
        growth = estimate_growth_bound(A, horizon, p.samples)
        result["growth"] = {"horizon": horizon, "estimate": growth,
                            "error": abs(growth - spectrum.spectral_bound)}
        if verdict.classification in (Classification.POSITIVE, Classification.EVENTUALLY_POSITIVE_STRICT):
            projection = perron_projection(spectrum)
            files.append(write_matrix_csv(out / "limit_projection.csv", projection))
            limit = mat_exp(A - spectrum.spectral_bound * np.eye(A.shape[0]), p.t_max)
            result["limit"] = {"projection_min": float(np.min(projection)),
                               "projection_max": float(np.max(projection)),
                               "distance_at_t_max": float(np.max(np.abs(limit - projection)))}
    if check_markov_generator(A):
        row_errors = {}
        for t in (0.1, 1.0, 10.0):
            E = mat_exp(A, t)
            row_errors[f"{t:g}"] = float(np.max(np.abs(E.sum(axis=1) - 1.0)))
        result["markov"] = {"generator": True, "row_sum_error": row_errors,
                            "stochastic": all(is_entrywise_nonneg(mat_exp(A, t))[0] for t in (0.1, 1.0, 10.0))}
    else:
        result["markov"] = {"generator": False}
    if grid is not None:
        lam, v = leading_eigenpair(A, tolerances)
        operator: dict = {"leading_eigenvalue": lam, "eigenvector_min": float(np.min(v)),
                          "eigenvector_positive": bool(np.min(v) > 0)}
        if lam < 0:
            inverse = resolvent(A, 0.0, tolerances=tolerances)
            operator["inverse_nonneg"] = is_entrywise_nonneg(inverse)[0]
        result["operator"] = operator
    scan = scan_positivity(A, np.geomspace(min(p.t_min, p.t_max), p.t_max, p.samples), tolerances.tol_pos,
                           shift=spectrum.spectral_bound)
    files.append(write_csv(out / "scan.csv", ("t", "min_entry", "j", "k"),
                           ((x.t, x.min_entry, x.j, x.k) for x in scan)))
    return result, files


def _simulate(s: Scenario, out: Path, base_dir: Path, tolerances: Tolerances) -> tuple[dict, list[Path]]:
    p = s.parameters
    model, grid = s.semigroup.build()
    u0 = s.initial.sample(grid, base_dir)
    tol = 1e-10 if p.tol is None else p.tol
    rows = []
    u = u0
    for t in p.sample_times():
        u = evolve(model, u0, float(t))
        rows.append((float(t), float(np.min(u.values)), float(np.max(u.values)), u.mass()))
    onset = None
    for t, low, _, _ in reversed(rows):
        if low < -tol:
            break
        onset = t
    result: dict = {
        "model": model.kind,
        "initial_mass": u0.mass(),
        "onset_time": onset,
        "negative_before_onset": any(low < -tol for t, low, _, _ in rows if onset is None or t < onset),
        "horizon": rows[-1][0],
        "final_min": rows[-1][1],
        "max_mass_drift": max(abs(m - u0.mass()) for _, _, _, m in rows),
    }
    if isinstance(model, FourierMultiplier) and model.m == 2 and model.box_length == 1.0:
        distance = mean_projection_check(model, u0, p.t_mean)
        bound = math.exp(-(2.0 * math.pi) ** 4 * p.t_mean) * float(np.max(np.abs(u0.values - 1.0))) + 1e-8
        result["mean_projection"] = {"t": p.t_mean, "distance": distance, "bound": bound,
                                     "within_bound": distance <= bound}
    files = [write_csv(out / "trace.csv", ("t", "min", "max", "mass"), rows),
             write_grid_function_csv(out / "final.csv", u)]
    return result, files


def _probe_local(s: Scenario, out: Path, base_dir: Path, tolerances: Tolerances) -> tuple[dict, list[Path]]:
    p = s.parameters
    model, grid = s.semigroup.build()
    u0 = s.initial.sample(grid, base_dir)
    report = local_positivity_probe(model, u0, p.probe_window, p.sample_times(),
                                    tol=1e-10 if p.tol is None else p.tol, workers=get_settings().workers)
    result = {
        "model": model.kind,
        "window": list(report.window),
        "onset_time": report.onset_time,
        "persistence_checked_until": report.persistence_checked_until,
        "negative_samples": len(report.negative_samples),
        "negative_before_onset": report.negative_before_onset,
        "max_edge_variation": report.max_edge_variation,
    }
    return result, [write_trace_csv(out / "trace.csv", report)]


def _sweep_resolvent(s: Scenario, out: Path, base_dir: Path, tolerances: Tolerances) -> tuple[dict, list[Path]]:
    p = s.parameters
    A, grid = _generator(s, base_dir)
    lambda0 = eig(A, tolerances=tolerances).spectral_bound if p.lambda0 is None else p.lambda0
    sign_tol = 1e-9 if p.tol is None else p.tol
    result: dict = {}
    if p.mu1 is not None:
        u = _weight_vector(s, A, grid, base_dir)
        report = antimax_equivalence_test(A, u, lambda0, p.mu1, tol=sign_tol,
                                          weight=grid.h if grid is not None else 1.0, window=p.window,
                                          samples=p.samples, resolvent_power=p.resolvent_power,
                                          tolerances=tolerances)
        profile = report.sweep
        result["equivalence"] = {"i_holds": report.i_holds, "ii_holds": report.ii_holds,
                                 "consistent": report.consistent, "resolvent_power": report.resolvent_power,
                                 "domination_constant": report.domination_constant}
        result["kernel_bound"] = report.kernel.model_dump(mode="json")
    else:
        profile = resolvent_sign_sweep(A, lambda0, window=p.window, samples=p.samples, tol=sign_tol,
                                       workers=get_settings().workers, tolerances=tolerances)
    result.update({
        "lambda0": profile.lambda0,
        "window": profile.window,
        "left_window_verdict": profile.left_window_verdict.value,
        "right_window_verdict": profile.right_window_verdict.value,
        "individual_antimax": profile.individual_antimax,
        "individual_max": profile.individual_max,
        "near_singular_samples": sum(1 for c in profile.classifications if c.value == "NearSingular"),
    })
    rows = ((x.lam, x.min_entry, x.max_entry, x.classification.value) for x in profile.samples)
    return result, [write_csv(out / "sweep.csv", ("lambda", "min_entry", "max_entry", "classification"), rows)]


def _check_criterion(s: Scenario, out: Path, base_dir: Path, tolerances: Tolerances) -> tuple[dict, list[Path]]:
    p = s.parameters
    A, grid = _generator(s, base_dir)
    u = _weight_vector(s, A, grid, base_dir)
    report = check_uniform_selfadjoint_criterion(A, u, p.t1, confirm_t_max=p.confirm_t_max, tolerances=tolerances)
    result = report.model_dump(mode="json")
    result["confirmed"] = report.confirmed
    files = [write_csv(out / "weight.csv", ("index", "u"), enumerate(map(float, u)))]
    return result, files


def _perturb(s: Scenario, out: Path, base_dir: Path, tolerances: Tolerances) -> tuple[dict, list[Path]]:
    p = s.parameters
    A, _ = _generator(s, base_dir)
    spectrum = eig(A, tolerances=tolerances)
    if not spectrum.simple_dominant:
        raise PreconditionError("perturbation experiments need a simple dominant eigenvalue", module=_MODULE,
                                operation="run_scenario")
    B = perron_projection(spectrum)
    B = np.where(np.abs(B) < tolerances.tol_pos, 0.0, B)
    experiment = perturbation_experiment(A, B, p.scales, t_max=p.t_max, tolerances=tolerances)
    search = search_destructive_perturbation(A, scale=p.search_scale, trials=p.trials, seed=p.seed,
                                             t_max=p.t_max, tolerances=tolerances)
    result = {
        "experiment": [{"scale": r.scale, "classification": r.verdict.classification.value} for r in experiment],
        "search": {
            "found": search.found,
            "summary": search.summary,
            "seed": search.seed,
            "scale": search.scale,
            "trials_run": search.trials_run,
            "trial_index": search.trial_index,
            "x": search.x,
            "y": search.y,
            "verdict": None if search.verdict is None else search.verdict.to_report(),
        },
    }
    rows = ((r.scale, r.verdict.classification.value) for r in experiment)
    return result, [write_csv(out / "perturbation.csv", ("scale", "classification"), rows)]


_RUNNERS = {
    Kind.ANALYZE_MATRIX: _analyze_matrix,
    Kind.SIMULATE: _simulate,
    Kind.PROBE_LOCAL: _probe_local,
    Kind.SWEEP_RESOLVENT: _sweep_resolvent,
    Kind.CHECK_CRITERION: _check_criterion,
    Kind.PERTURB: _perturb,
}


def load_scenario(path: Union[str, Path]) -> Scenario:
    """Parse a scenario JSON document; raises pydantic.ValidationError with the failing location."""
    return Scenario.model_validate_json(Path(path).read_text(encoding="utf-8"))


def output_dir_for(s: Scenario, output_dir: Optional[Union[str, Path]] = None) -> Path:
    if output_dir is not None:
        return Path(output_dir)
    return Path(s.output_dir) if s.output_dir else Path("out") / s.name


def run_scenario(s: Scenario, output_dir: Optional[Union[str, Path]] = None,
                 base_dir: Optional[Path] = None) -> ScenarioResult:
    """
    Execute a scenario and write its artifacts.

    :param s: The scenario.
    :param output_dir: Overrides ``s.output_dir``.
    :param base_dir: Directory relative file references are resolved against.
    :return: The written summary and file list.
    """
    settings = get_settings()
    if settings.seed_override is not None:
        s = s.model_copy(update={"parameters": s.parameters.model_copy(update={"seed": settings.seed_override})})
    out = output_dir_for(s, output_dir)
    out.mkdir(parents=True, exist_ok=True)
    base_dir = Path.cwd() if base_dir is None else base_dir
    tolerances = s.parameters.tolerances()
    logger.info("running scenario %s (%s)", s.name, s.kind.value)

    result, files = _RUNNERS[s.kind](s, out, base_dir, tolerances)
    summary = {
        "schema": SCHEMA,
        "scenario": s.name,
        "kind": s.kind.value,
        "status": "ok",
        "parameters": s.parameters.model_dump(mode="json", exclude_none=True),
        "result": result,
        "files": sorted(f.name for f in files),
    }
    files.append(write_json(out / "summary.json", summary))
    return ScenarioResult(name=s.name, output_dir=out, summary=summary, files=files)


# ---------------------------------------------------------------------------
# Built-in suite
# ---------------------------------------------------------------------------

def rotation_block() -> np.ndarray:
    """Generator with eigenvalue 0 on e_1 and a damped rotation -1 +/- i on span(e_2, e_3)."""
    return np.array([[0.0, 0.0, 0.0], [0.0, -1.0, -1.0], [0.0, 1.0, -1.0]])


def motivating_matrix() -> np.ndarray:
    """
    V R V^{-1} with V = (v1, v2, v3), v1 = (1,1,1)/sqrt(3), v2 = (-1,0,1)/sqrt(2), v3 = (1,-2,1)/sqrt(6):
    eventually positive, not positive, e^{tA} -> 1/3 entrywise.
    """
    V = np.column_stack([
        np.array([1.0, 1.0, 1.0]) / math.sqrt(3.0),
        np.array([-1.0, 0.0, 1.0]) / math.sqrt(2.0),
        np.array([1.0, -2.0, 1.0]) / math.sqrt(6.0),
    ])
    return V @ rotation_block() @ np.linalg.inv(V)


def builtin_suite() -> list[Scenario]:
    """The named scenarios shipped with the package."""
    seed = DEFAULT_TOLERANCES.seed
    motivating = motivating_matrix().tolist()
    return [
        Scenario(name="example-2.1-matrix", kind=Kind.ANALYZE_MATRIX, matrix=motivating,
                 parameters=Parameters(t_max=50.0)),
        Scenario(name="example-2.2-periodic-biharmonic", kind=Kind.SIMULATE,
                 semigroup=SemigroupSpec(model="fourier", m=2, box_length=1.0, modes=4096, origin=0.0),
                 initial=InitialData(profile="bump", center=0.5, width=0.05, normalize="mean"),
                 parameters=Parameters(t_min=1e-6, t_max=0.05, samples=60, t_mean=0.01)),
        Scenario(name="periodic-biharmonic-uniform", kind=Kind.CHECK_CRITERION,
                 semigroup=SemigroupSpec(model="fourier", m=2, box_length=1.0, modes=32, origin=0.0),
                 parameters=Parameters(u="ones", t1=1.0)),
        Scenario(name="markov-example", kind=Kind.ANALYZE_MATRIX,
                 matrix=[[-2.0, 1.0, 1.0], [0.0, -1.0, 1.0], [1.0, 1.0, -2.0]],
                 parameters=Parameters(t_max=20.0)),
        Scenario(name="heat-kernel", kind=Kind.SIMULATE,
                 semigroup=SemigroupSpec(model="heat", a=-10.0, b=10.0, points=801),
                 initial=InitialData(profile="bump", center=0.0, width=1.0, normalize="mass"),
                 parameters=Parameters(times=[0.01, 0.1, 0.5, 1.0, 2.0])),
        Scenario(name="right-shift", kind=Kind.SIMULATE,
                 semigroup=SemigroupSpec(model="right-shift", a=0.0, b=10.0, points=1001),
                 initial=InitialData(profile="indicator", center=0.0, width=1.0),
                 parameters=Parameters(times=[0.5, 1.0, 2.0, 5.0])),
        Scenario(name="clamped-beam", kind=Kind.CHECK_CRITERION,
                 operator=OperatorSpec(order=4, bc=BoundaryCondition.CLAMPED, n=200),
                 parameters=Parameters(u="distance-squared", t1=0.05)),
        Scenario(name="nonlocal-laplacian", kind=Kind.ANALYZE_MATRIX,
                 operator=OperatorSpec(order=2, bc=BoundaryCondition.NONLOCAL_SUM, n=200),
                 parameters=Parameters(t_max=20.0)),
        Scenario(name="biharmonic-line-local", kind=Kind.PROBE_LOCAL,
                 semigroup=SemigroupSpec(model="fourier", m=2, box_length=64.0, modes=4096),
                 initial=InitialData(profile="bump", center=0.0, width=0.2, normalize="mass"),
                 parameters=Parameters(t_min=1e-3, t_max=0.5, samples=30, probe_window=(-1.0, 1.0))),
        Scenario(name="neumann-antimax", kind=Kind.SWEEP_RESOLVENT,
                 operator=OperatorSpec(order=2, bc=BoundaryCondition.NEUMANN, n=200),
                 parameters=Parameters(lambda0=0.0, mu1=1.0, u="ones")),
        Scenario(name="dirichlet-no-antimax", kind=Kind.SWEEP_RESOLVENT,
                 operator=OperatorSpec(order=2, bc=BoundaryCondition.DIRICHLET, n=200),
                 parameters=Parameters(mu1=0.0, u="leading-eigenvector")),
        Scenario(name="perturbation-fragility", kind=Kind.PERTURB, matrix=motivating,
                 parameters=Parameters(t_max=50.0, scales=[0.01, 0.1, 1.0], search_scale=5.0, trials=1000,
                                       seed=seed)),
    ]
