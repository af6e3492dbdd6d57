"""
Time evolution engines and positivity probes for sampled solutions.

Every model evolves exactly: matrix semigroups through the matrix exponential,
the heat semigroup through its Gaussian kernel, the right shift by re-indexing,
and Fourier multipliers e^{-t|xi|^(2m)} through the FFT on a periodic box.
A large periodic box stands in for the whole line or plane.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
import pydantic
import scipy.linalg

from .discretize import Grid, make_grid
from .errors import DimensionError, DomainError, NumericalError, PreconditionError, SpecError, TruncationError
from .linalg import Matrix, as_matrix, mat_exp
from .util import get_logger

logger = get_logger(name="evpos.semigroups")

_MODULE = "semigroups"

# fraction of the box next to each edge watched by the contamination guard
EDGE_BAND = 0.05
CONTAMINATION_LIMIT = 1e-8
# smallest heat time in units of h^2; sampled Gaussians alias like 2 exp(-4 pi^2 t / h^2)
HEAT_RESOLUTION = 1.5
DEFAULT_MODES = {1: 4096, 2: 512}


@dataclass(frozen=True)
class TensorGrid:
    """Product of two uniform 1D point sets with equal spacing."""

    x: np.ndarray
    y: np.ndarray
    h: float

    @property
    def shape(self) -> tuple[int, int]:
        return int(self.x.size), int(self.y.size)


AnyGrid = Union[Grid, TensorGrid]


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: AnyGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        expected = self.grid.shape if isinstance(self.grid, TensorGrid) else (self.grid.size,)
        if values.shape != expected:
            raise DimensionError(f"values of shape {values.shape} do not match grid {expected}",
                                 module=_MODULE, operation="GridFunction")
        if not np.all(np.isfinite(values)):
            raise DomainError("grid function has non-finite values", module=_MODULE, operation="GridFunction")
        object.__setattr__(self, "values", values)

    @property
    def cell(self) -> float:
        """Area element h or h^2."""
        return self.grid.h ** 2 if isinstance(self.grid, TensorGrid) else self.grid.h

    def l1_norm(self) -> float:
        return float(self.cell * np.sum(np.abs(self.values)))

    def mass(self) -> float:
        return float(self.cell * np.sum(self.values))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def with_values(self, values: np.ndarray) -> GridFunction:
        return GridFunction(self.grid, values)

    @classmethod
    def sample(cls, grid: AnyGrid, fn) -> GridFunction:
        """Evaluate ``fn(x)`` or ``fn(x, y)`` on the grid."""
        if isinstance(grid, TensorGrid):
            X, Y = np.meshgrid(grid.x, grid.y, indexing="ij")
            return cls(grid, fn(X, Y))
        return cls(grid, fn(grid.points))


def line_grid(a: float, b: float, n: int) -> Grid:
    """n equispaced points on [a, b] including both ends, trapezoid weights."""
    if n < 2 or not b > a:
        raise DomainError(f"need n >= 2 points on a non-empty interval, got n={n} on ({a}, {b})",
                          module=_MODULE, operation="line_grid")
    return make_grid(np.linspace(a, b, n), (b - a) / (n - 1), a, b, endpoint_weight=0.5)


def _check_time(t: float) -> None:
    if not math.isfinite(t) or t < 0:
        raise DomainError(f"time must be finite and nonnegative, got {t}", module=_MODULE, operation="evolve")


class SemigroupModel(ABC):
    """A strongly continuous semigroup acting on sampled functions."""

    kind: str = "model"

    @abstractmethod
    def evolve(self, u0: GridFunction, t: float) -> GridFunction:
        ...

    def box_edges(self) -> Optional[tuple[float, float]]:
        """Edges of the periodic box standing in for the whole space, if any."""
        return None


@dataclass(frozen=True, eq=False)
class MatrixSemigroup(SemigroupModel):
    A: Matrix
    kind: str = field(default="matrix", init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "A", as_matrix(self.A, operation="MatrixSemigroup"))

    def evolve(self, u0: GridFunction, t: float) -> GridFunction:
        _check_time(t)
        if u0.values.ndim != 1 or u0.values.size != self.A.shape[0]:
            raise DimensionError(f"initial data of size {u0.values.size} does not fit a "
                                 f"{self.A.shape[0]}-dim generator", module=_MODULE, operation="evolve")
        return u0.with_values(mat_exp(self.A, t) @ u0.values)


@dataclass(frozen=True)
class HeatKernel(SemigroupModel):
    """
    Heat semigroup on the line or plane, applied by quadrature of the Gaussian kernel
    (4 pi t)^{-d/2} exp(-|x - y|^2 / 4t) on the grid of the initial data.

    Every kernel column is normalized to unit sum, so h * sum(values) is conserved exactly.
    Times below ``HEAT_RESOLUTION * h^2`` are rejected: there the sampled kernels alias and
    neither mass conservation nor the semigroup law survives.
    """

    dim: int = 1
    kind: str = field(default="heat", init=False)

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise SpecError(f"heat kernel dimension must be 1 or 2, got {self.dim}", module=_MODULE,
                            operation="HeatKernel")

    @staticmethod
    def _kernel(points: np.ndarray, t: float) -> np.ndarray:
        diff = points[:, None] - points[None, :]
        K = np.exp(-diff**2 / (4.0 * t))
        return K / K.sum(axis=0, keepdims=True)

    def evolve(self, u0: GridFunction, t: float) -> GridFunction:
        _check_time(t)
        expected_2d = self.dim == 2
        if isinstance(u0.grid, TensorGrid) != expected_2d:
            raise DimensionError(f"a {self.dim}D heat kernel needs {self.dim}D data", module=_MODULE,
                                 operation="evolve")
        if t == 0:
            return u0.with_values(u0.values.copy())
        h = u0.grid.h
        floor = HEAT_RESOLUTION * h**2
        if t < floor:
            raise DomainError(f"t={t:.3g} is below {HEAT_RESOLUTION:g} h^2={floor:.3g}; the kernel is not resolved",
                              module=_MODULE, operation="evolve")
        if isinstance(u0.grid, TensorGrid):
            Kx = self._kernel(u0.grid.x, t)
            Ky = self._kernel(u0.grid.y, t)
            return u0.with_values(Kx @ u0.values @ Ky.T)
        return u0.with_values(self._kernel(u0.grid.points, t) @ u0.values)


@dataclass(frozen=True)
class RightShift(SemigroupModel):
    """
    (T(t)u)(x) = u(x - t) for x >= t and 0 otherwise, on grids starting at the origin of the half-line.

    Times between grid multiples are rounded half up to the nearest shift k h, so the semigroup
    law is exact for multiples of h and positivity holds for every t.
    """

    kind: str = field(default="right-shift", init=False)

    def evolve(self, u0: GridFunction, t: float) -> GridFunction:
        _check_time(t)
        if isinstance(u0.grid, TensorGrid):
            raise DimensionError("the right shift acts on 1D data", module=_MODULE, operation="evolve")
        h = u0.grid.h
        k = int(math.floor(t / h + 0.5))
        if abs(k * h - t) > 1e-9 * max(h, t):
            logger.debug("right shift: t=%.6g rounded to %d grid steps", t, k)
        shifted = np.zeros_like(u0.values)
        if k < shifted.size:
            shifted[k:] = u0.values[:shifted.size - k]
        return u0.with_values(shifted)


@dataclass(frozen=True)
class FourierMultiplier(SemigroupModel):
    """
    e^{t A} with A = -(-Laplacian)^m on the periodic box [origin, origin + L)^dim,
    applied mode-wise as exp(-t |xi|^(2m)), xi = 2 pi k / L.

    :ivar m: 1 for the heat equation, 2 for the biharmonic heat equation.
    :ivar box_length: L.
    :ivar modes: N per direction, a power of two; 4096 in 1D and 512 in 2D when omitted.
    :ivar origin: Left box edge, -L/2 when omitted.
    """

    m: int = 2
    box_length: float = 1.0
    modes: Optional[int] = None
    dim: int = 1
    origin: Optional[float] = None
    kind: str = field(default="fourier", init=False)

    def __post_init__(self) -> None:
        if self.m not in (1, 2):
            raise SpecError(f"symbol power must be 1 or 2, got {self.m}", module=_MODULE,
                            operation="FourierMultiplier")
        if self.dim not in (1, 2):
            raise SpecError(f"dimension must be 1 or 2, got {self.dim}", module=_MODULE,
                            operation="FourierMultiplier")
        if self.modes is None:
            object.__setattr__(self, "modes", DEFAULT_MODES[self.dim])
        if self.modes < 2 or self.modes & (self.modes - 1):
            raise SpecError(f"modes must be a power of two, got {self.modes}", module=_MODULE,
                            operation="FourierMultiplier")
        if not self.box_length > 0:
            raise SpecError("box length must be positive", module=_MODULE, operation="FourierMultiplier")

    @property
    def left(self) -> float:
        return -0.5 * self.box_length if self.origin is None else self.origin

    @property
    def h(self) -> float:
        return self.box_length / self.modes

    def box_edges(self) -> tuple[float, float]:
        return self.left, self.left + self.box_length

    def points(self) -> np.ndarray:
        return self.left + self.h * np.arange(self.modes)

    def grid(self) -> AnyGrid:
        pts = self.points()
        if self.dim == 2:
            return TensorGrid(x=pts, y=pts.copy(), h=self.h)
        return make_grid(pts, self.h, self.left, self.left + self.box_length)

    def wavenumbers(self) -> np.ndarray:
        return 2.0 * math.pi * np.fft.fftfreq(self.modes, d=self.h)

    def symbol(self) -> np.ndarray:
        """-|xi|^(2m) on the FFT mode layout."""
        xi = self.wavenumbers()
        if self.dim == 2:
            xi2 = xi[:, None]**2 + xi[None, :]**2
        else:
            xi2 = xi**2
        return -xi2**self.m

    def evolve(self, u0: GridFunction, t: float) -> GridFunction:
        _check_time(t)
        expected = (self.modes,) * self.dim
        if u0.values.shape != expected:
            raise DimensionError(f"initial data of shape {u0.values.shape} does not match {expected} modes",
                                 module=_MODULE, operation="evolve")
        if t == 0:
            return u0.with_values(u0.values.copy())
        multiplier = np.exp(t * self.symbol())
        if self.dim == 2:
            raw = np.fft.ifft2(multiplier * np.fft.fft2(u0.values))
        else:
            raw = np.fft.ifft(multiplier * np.fft.fft(u0.values))
        residue = float(np.max(np.abs(raw.imag)))
        if residue > 1e-10 * (1.0 + u0.sup_norm()):
            raise NumericalError(f"imaginary residue {residue:.3g} after the inverse transform",
                                 module=_MODULE, operation="evolve")
        return u0.with_values(raw.real)

    def as_matrix(self) -> Matrix:
        """
        Realified generator on the 1D grid: the symmetric circulant with the same modes.

        mat_exp of this matrix applied to a grid function reproduces :meth:`evolve`.
        """
        if self.dim != 1:
            raise DimensionError("matrix form is only built in 1D", module=_MODULE, operation="as_matrix")
        column = np.fft.ifft(self.symbol()).real
        A = scipy.linalg.circulant(column)
        return 0.5 * (A + A.T)


def evolve(model: SemigroupModel, u0: GridFunction, t: float) -> GridFunction:
    """Apply the semigroup of ``model`` at time ``t`` to ``u0``."""
    return model.evolve(u0, t)


# ---------------------------------------------------------------------------
# Probes
# ---------------------------------------------------------------------------

def mean_projection_check(model: FourierMultiplier, u0: GridFunction, t_large: float) -> float:
    """
    Sup-norm distance between e^{tA} u0 and the constant mean(u0) on the unit periodic box.

    The mean-free part decays at least like e^{-(2 pi)^4 t}.
    """
    if not isinstance(model, FourierMultiplier) or model.m != 2 or model.box_length != 1.0:
        raise PreconditionError("mean projection check needs the biharmonic multiplier on a box of length 1",
                                module=_MODULE, operation="mean_projection_check")
    u = evolve(model, u0, t_large)
    return float(np.max(np.abs(u.values - float(np.mean(u0.values)))))


class LocalPositivityReport(pydantic.BaseModel):
    """
    Minimum of the solution over a window per sampled time.

    ``onset_time`` is the first sampled time after which the minimum stays >= -tol up to
    ``persistence_checked_until``; nothing is claimed beyond that horizon.
    """

    window: tuple[float, float]
    tol: float
    onset_time: Optional[float] = None
    persistence_checked_until: float
    min_value_trace: list[tuple[float, float]]
    max_edge_variation: float = 0.0

    @property
    def negative_samples(self) -> list[tuple[float, float]]:
        return [(t, v) for t, v in self.min_value_trace if v < -self.tol]

    @property
    def negative_before_onset(self) -> bool:
        if self.onset_time is None:
            return bool(self.negative_samples)
        return any(t < self.onset_time for t, _ in self.negative_samples)


def _window_mask(grid: AnyGrid, window: tuple[float, float]) -> np.ndarray:
    lo, hi = window
    if isinstance(grid, TensorGrid):
        inside_x = (grid.x >= lo) & (grid.x <= hi)
        inside_y = (grid.y >= lo) & (grid.y <= hi)
        return inside_x[:, None] & inside_y[None, :]
    return (grid.points >= lo) & (grid.points <= hi)


def _edge_mask(grid: AnyGrid, edges: tuple[float, float]) -> np.ndarray:
    left, right = edges
    band = EDGE_BAND * (right - left)

    def near(p: np.ndarray) -> np.ndarray:
        return (p < left + band) | (p > right - band)

    if isinstance(grid, TensorGrid):
        return near(grid.x)[:, None] | near(grid.y)[None, :]
    return near(grid.points)


def _edge_variation(u: GridFunction, edge: np.ndarray) -> float:
    """Total variation of a periodic grid function over neighbour pairs lying inside the edge band."""
    total = 0.0
    for axis in range(u.values.ndim):
        pairs = edge & np.roll(edge, -1, axis=axis)
        jumps = np.abs(np.roll(u.values, -1, axis=axis) - u.values)
        total += float(np.sum(jumps[pairs]))
    return total * u.grid.h ** (u.values.ndim - 1)


def local_positivity_probe(model: SemigroupModel, u0: GridFunction, window: tuple[float, float],
                           t_grid: Sequence[float], tol: float = 1e-10, workers: int = 1) -> LocalPositivityReport:
    """
    Record min over ``window`` of e^{tA} u0 for every t in ``t_grid``.

    Models on a periodic box are guarded against wraparound: the total variation of the
    solution within 5% of either box edge must stay below 1e-8 * ||u0||_1.

    :param workers: Evaluate time samples on a thread pool of this size; results are kept in time order.
    :raises TruncationError: when the guard trips.
    """
    times = np.asarray(t_grid, dtype=float)
    if times.size == 0 or np.any(np.diff(times) <= 0) or times[0] < 0:
        raise DomainError("t_grid must be a nonempty increasing sequence of nonnegative times", module=_MODULE,
                          operation="local_positivity_probe")
    if np.min(u0.values) < 0:
        raise PreconditionError("initial data must be nonnegative", module=_MODULE,
                                operation="local_positivity_probe")
    mask = _window_mask(u0.grid, window)
    if not window[0] < window[1] or not mask.any():
        raise DomainError(f"window {window} contains no grid points", module=_MODULE,
                          operation="local_positivity_probe")
    edges = model.box_edges()
    edge = _edge_mask(u0.grid, edges) if edges is not None else None
    if edge is not None and np.any(mask & edge):
        raise DomainError(f"window {window} reaches into the edge band of the box {edges}", module=_MODULE,
                          operation="local_positivity_probe")
    budget = CONTAMINATION_LIMIT * u0.l1_norm()

    def sample(t: float) -> tuple[float, float]:
        u = evolve(model, u0, float(t))
        variation = _edge_variation(u, edge) if edge is not None else 0.0
        return float(np.min(u.values[mask])), variation

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(sample, times))
    else:
        results = [sample(t) for t in times]

    trace = [(float(t), m) for t, (m, _) in zip(times, results)]
    max_edge = max(e for _, e in results)
    if max_edge > budget:
        t_bad = next(float(t) for t, (_, e) in zip(times, results) if e > budget)
        raise TruncationError(f"variation {max_edge:.3g} reached the box edge by t={t_bad:.6g}; enlarge the box",
                              module=_MODULE, operation="local_positivity_probe")

    onset = None
    for t, m in reversed(trace):
        if m < -tol:
            break
        onset = t
    logger.info("local probe on %s: onset=%s, %d negative samples, horizon %.6g",
                window, onset, sum(1 for _, m in trace if m < -tol), times[-1])
    return LocalPositivityReport(window=(float(window[0]), float(window[1])), tol=tol, onset_time=onset,
                                 persistence_checked_until=float(times[-1]), min_value_trace=trace,
                                 max_edge_variation=max_edge)
