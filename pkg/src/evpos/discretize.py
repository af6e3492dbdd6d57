"""
Finite-difference generators for one-dimensional second- and fourth-order operators.

Boundary conditions are folded into the boundary rows by eliminating ghost
points. Operators whose elimination produces unequal boundary weights
(Neumann and the nonlocal sum condition) are returned in symmetrized
coordinates W^{1/2} A W^{-1/2}, where W are the trapezoid weights divided by h;
this similarity keeps the spectrum and every entrywise sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
import pydantic
import scipy.linalg

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import NonPerronError, SpecError
from .linalg import Matrix, MatrixLike, Vector, as_matrix, spectral_scale
from .util import get_logger

logger = get_logger(name="evpos.discretize")

_MODULE = "discretize"


class BoundaryCondition(str, Enum):
    DIRICHLET = "Dirichlet"
    NEUMANN = "Neumann"
    PERIODIC = "Periodic"
    NONLOCAL_SUM = "NonlocalSum"
    CLAMPED = "Clamped"
    HINGED = "Hinged"


_ALLOWED = {
    2: {BoundaryCondition.DIRICHLET, BoundaryCondition.NEUMANN, BoundaryCondition.PERIODIC,
        BoundaryCondition.NONLOCAL_SUM},
    4: {BoundaryCondition.CLAMPED, BoundaryCondition.PERIODIC, BoundaryCondition.HINGED},
}


class OperatorSpec(pydantic.BaseModel):
    """
    A 1D differential operator sign * d^order/dx^order with boundary conditions on (a, b).

    ``n`` counts unknowns: interior points for Dirichlet, Clamped and Hinged, points of
    one period for Periodic, and points including both endpoints for Neumann and
    NonlocalSum.
    """

    order: int
    bc: BoundaryCondition
    a: float = 0.0
    b: float = 1.0
    n: int
    sign: Optional[int] = None

    @property
    def principal_sign(self) -> int:
        if self.sign is not None:
            return self.sign
        return 1 if self.order == 2 else -1

    def check(self) -> OperatorSpec:
        """
        Validate the combination of fields.

        :raises SpecError: on an invalid order, boundary condition, interval, size or sign.
        """
        if self.order not in _ALLOWED:
            raise SpecError(f"order must be 2 or 4, got {self.order}", module=_MODULE, operation="build_operator")
        if self.bc not in _ALLOWED[self.order]:
            raise SpecError(f"boundary condition {self.bc.value} is not available for order {self.order}",
                            module=_MODULE, operation="build_operator")
        if not self.b > self.a:
            raise SpecError(f"interval ({self.a}, {self.b}) is empty", module=_MODULE, operation="build_operator")
        if self.n < 4:
            raise SpecError(f"need n >= 4 grid points, got {self.n}", module=_MODULE, operation="build_operator")
        if self.sign not in (None, 1, -1):
            raise SpecError(f"sign must be +1 or -1, got {self.sign}", module=_MODULE, operation="build_operator")
        return self

    def label(self) -> str:
        return f"order{self.order}-{self.bc.value}-n{self.n}"


@dataclass(frozen=True)
class Grid:
    """
    Uniform grid.

    :ivar points: Sample locations.
    :ivar h: Spacing.
    :ivar boundary_distance: Distance of every point to the nearer endpoint.
    :ivar weights: Trapezoid quadrature weights for nodal values.
    :ivar similarity: Diagonal of W^{1/2}; symmetrized coordinates are ``similarity * nodal``.
    """

    points: np.ndarray
    h: float
    boundary_distance: np.ndarray
    weights: np.ndarray
    similarity: np.ndarray

    @property
    def size(self) -> int:
        return int(self.points.size)

    def inner(self, f: np.ndarray, g: np.ndarray) -> float:
        """Discrete L2 pairing with weight h."""
        return float(self.h * np.dot(f, g))

    def to_nodal(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values) / self.similarity


def make_grid(points: np.ndarray, h: float, a: float, b: float, endpoint_weight: float = 1.0) -> Grid:
    """Grid on (a, b) with unit interior weights and ``endpoint_weight`` at the first and last point."""
    points = np.asarray(points, dtype=np.float64)
    w = np.ones_like(points)
    w[0] = w[-1] = endpoint_weight
    distance = np.maximum(np.minimum(points - a, b - points), 0.0)
    return Grid(points=points, h=h, boundary_distance=distance, weights=h * w, similarity=np.sqrt(w))


def _shift(n: int, k: int) -> np.ndarray:
    """Cyclic shift matrix with ones at (j, j + k mod n)."""
    return np.roll(np.eye(n), k, axis=1)


def second_difference(n: int) -> np.ndarray:
    """Tridiagonal (1, -2, 1) without boundary rows."""
    return np.diag(-2.0 * np.ones(n)) + np.diag(np.ones(n - 1), 1) + np.diag(np.ones(n - 1), -1)


def _clamped_fourth_difference(n: int) -> np.ndarray:
    D = (6.0 * np.eye(n)
         - 4.0 * (np.eye(n, k=1) + np.eye(n, k=-1))
         + (np.eye(n, k=2) + np.eye(n, k=-2)))
    # ghost v_{-1} = v_1 from v'(0) = 0 with v_0 = 0
    D[0, 0] = D[-1, -1] = 7.0
    return D


def build_operator(spec: OperatorSpec) -> tuple[Matrix, Grid]:
    """
    Build the finite-difference generator and its grid.

    :param spec: The operator description.
    :return: ``(A, grid)``.
    """
    spec.check()
    a, b, n = spec.a, spec.b, spec.n
    length = b - a
    sign = float(spec.principal_sign)
    bc = spec.bc

    if bc in (BoundaryCondition.DIRICHLET, BoundaryCondition.CLAMPED, BoundaryCondition.HINGED):
        h = length / (n + 1)
        grid = make_grid(a + h * np.arange(1, n + 1), h, a, b)
        if bc == BoundaryCondition.DIRICHLET:
            A = sign * second_difference(n) / h**2
        elif bc == BoundaryCondition.CLAMPED:
            A = sign * _clamped_fourth_difference(n) / h**4
        else:
            laplacian = second_difference(n) / h**2
            A = sign * (laplacian @ laplacian)
    elif bc == BoundaryCondition.PERIODIC:
        h = length / n
        grid = make_grid(a + h * np.arange(n), h, a, b)
        if spec.order == 2:
            stencil = -2.0 * np.eye(n) + _shift(n, 1) + _shift(n, -1)
            A = sign * stencil / h**2
        else:
            stencil = 6.0 * np.eye(n) - 4.0 * (_shift(n, 1) + _shift(n, -1)) + _shift(n, 2) + _shift(n, -2)
            A = sign * stencil / h**4
    else:
        h = length / (n - 1)
        grid = make_grid(a + h * np.arange(n), h, a, b, endpoint_weight=0.5)
        D = second_difference(n)
        # central ghost elimination: v_{-1} = v_1 - 2h g_0, v_n = v_{n-2} - 2h g_{n-1}
        D[0, 1] = D[-1, -2] = 2.0
        if bc == BoundaryCondition.NONLOCAL_SUM:
            # v'(0) = -v'(1) = v(0) + v(1)
            for row in (0, n - 1):
                D[row, 0] -= 2.0 * h
                D[row, n - 1] -= 2.0 * h
        nodal = D / h**2
        s = grid.similarity
        A = sign * (s[:, None] * nodal / s[None, :])
        A = 0.5 * (A + A.T)

    logger.debug("build_operator: %s h=%.4g", spec.label(), grid.h)
    return A, grid


def leading_eigenpair(A: MatrixLike, tolerances: Tolerances = DEFAULT_TOLERANCES) -> tuple[float, Vector]:
    """
    Eigenvalue of maximal real part and a real unit eigenvector whose largest-magnitude entry is positive.

    :raises NonPerronError: when the leading eigenvalue is not real.
    """
    A = as_matrix(A, operation="leading_eigenpair")
    if np.array_equal(A, A.T):
        w, V = scipy.linalg.eigh(A)
        lam, v = float(w[-1]), V[:, -1]
    else:
        w, V = scipy.linalg.eig(A)
        i = int(np.argmax(w.real))
        if abs(w[i].imag) > tolerances.tol_sep * max(spectral_scale(A, w), 1.0):
            raise NonPerronError(f"leading eigenvalue {complex(w[i]):.6g} is not real",
                                 module=_MODULE, operation="leading_eigenpair")
        lam = float(w[i].real)
        v = np.real(V[:, i] / V[np.argmax(np.abs(V[:, i])), i])
    v = v / np.linalg.norm(v)
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return lam, v
