"""Gauss-Lobatto grids and Lagrange cardinal functions on [-1, 1].

A grid of order N carries the N Lobatto nodes (both endpoints included),
the quadrature weights, and the spectral differentiation matrix of the
cardinal (Lagrange interpolating) polynomials through those nodes.  The
quadrature rule integrates polynomials up to degree 2N - 3 exactly, which
is what makes the potential matrix diagonal in this basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NumericalError

__all__ = [
    "LobattoGrid",
    "AffineMap",
    "build_grid",
    "lagrange_eval",
    "lagrange_deriv_eval",
    "quadrature",
]

_NEWTON_MAXITER = 100

# Grid data is computed in extended precision and rounded once to float64.
# The propagation solve amplifies node/weight/diff errors by the condition
# number of the local systems (~1e6 at N=24), so a grid built directly in
# float64 costs two digits in the final phase shift.  On platforms where
# long double is plain double this degrades gracefully.
_BUILD_DTYPE = np.longdouble


@dataclass(frozen=True)
class LobattoGrid:
    """Nodes, weights and differentiation matrix of one Lobatto rule.

    Attributes
    ----------
    order : int
        Number of nodes N (>= 2).
    nodes : ndarray, shape (N,)
        Ascending nodes in [-1, 1]; nodes[0] == -1 and nodes[-1] == 1.
    weights : ndarray, shape (N,)
        Positive quadrature weights summing to 2.
    diff : ndarray, shape (N, N)
        diff[j, i] is the derivative of cardinal function i at node j.
    """

    order: int
    nodes: np.ndarray
    weights: np.ndarray
    diff: np.ndarray


@dataclass(frozen=True)
class AffineMap:
    """Affine bijection between the reference interval [-1, 1] and [a, b]."""

    a: float
    b: float

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError(f"degenerate interval [{self.a}, {self.b}]")

    @property
    def scale(self) -> float:
        """Jacobian dr/dx of the map."""
        return 0.5 * (self.b - self.a)

    def to_physical(self, x):
        # Written so the endpoints map exactly: x = -1 gives a, x = +1 gives b.
        return 0.5 * ((1.0 - x) * self.a + (1.0 + x) * self.b)

    def from_physical(self, r):
        return (2.0 * r - self.a - self.b) / (self.b - self.a)


def _legendre(m: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """P_m and P_{m-1} at x via the three-term recurrence (dtype-preserving)."""
    x = np.asarray(x)
    p_prev = np.ones_like(x)
    if m == 0:
        return p_prev, np.zeros_like(x)
    p = x.copy()
    for j in range(1, m):
        p, p_prev = ((2 * j + 1) * x * p - j * p_prev) / x.dtype.type(j + 1), p
    return p, p_prev


def _interior_nodes(m: int, dtype=float) -> np.ndarray:
    """Roots of P_m' by Newton iteration from Chebyshev-extrema guesses."""
    if m < 2:
        return np.empty(0, dtype=dtype)
    one = np.dtype(dtype).type(1)
    tol = 8.0 * np.finfo(dtype).eps
    x = np.cos(np.pi * np.arange(1, m, dtype=dtype) / m)
    for _ in range(_NEWTON_MAXITER):
        p, p_prev = _legendre(m, x)
        dp = m * (x * p - p_prev) / (x * x - one)
        d2p = (2.0 * x * dp - m * (m + 1) * p) / (one - x * x)
        step = dp / d2p
        x -= step
        if np.max(np.abs(step)) < tol:
            break
    else:
        raise NumericalError(f"Lobatto node search did not converge for order {m + 1}")
    return np.sort(x)


def _diff_matrix(nodes: np.ndarray, p: np.ndarray, n: int) -> np.ndarray:
    """Analytic Legendre closed form for the Lobatto differentiation matrix."""
    delta = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(delta, 1.0)
    d = (p[:, None] / p[None, :]) / delta
    np.fill_diagonal(d, 0.0)
    d[0, 0] = -0.25 * n * (n - 1)
    d[-1, -1] = 0.25 * n * (n - 1)
    return d


@lru_cache(maxsize=None)
def _build_grid_hi(order: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Extended-precision (nodes, weights, diff) triple for one order.

    The solver assembles its local systems from these arrays so that the
    float64 rounding of the grid does not leak into the propagated wave
    function through the ill-conditioned partition solves.
    """
    if order < 2:
        raise ValueError(f"grid order must be at least 2, got {order}")
    m = order - 1
    dt = _BUILD_DTYPE
    ends = np.array([1.0], dtype=dt)
    x = np.concatenate((-ends, _interior_nodes(m, dtype=dt), ends))
    x = 0.5 * (x - x[::-1])
    p, _ = _legendre(m, x)
    w = 2.0 / (order * m * p * p)
    w = 0.5 * (w + w[::-1])
    d = _diff_matrix(x, p, order)
    for arr in (x, w, d):
        arr.setflags(write=False)
    return x, w, d


@lru_cache(maxsize=None)
def build_grid(order: int) -> LobattoGrid:
    """Construct (and cache) the Lobatto grid with `order` nodes.

    Nodes are the endpoints plus the roots of P'_{N-1}, found by Newton
    iteration and symmetrized about the origin.  Weights come from the
    closed form 2 / (N (N-1) P_{N-1}(x)^2).
    """
    x, w, d = (a.astype(float) for a in _build_grid_hi(order))
    for arr in (x, w, d):
        arr.setflags(write=False)
    return LobattoGrid(order, x, w, d)


def _check_index(grid: LobattoGrid, i: int) -> None:
    if not 0 <= i < grid.order:
        raise IndexError(f"cardinal index {i} outside [0, {grid.order})")


def lagrange_eval(grid: LobattoGrid, i: int, x: float) -> float:
    """Cardinal function i of the grid evaluated at x (product formula)."""
    _check_index(grid, i)
    nodes = grid.nodes
    others = np.delete(nodes, i)
    return float(np.prod((x - others) / (nodes[i] - others)))


def lagrange_deriv_eval(grid: LobattoGrid, i: int, x: float) -> float:
    """Derivative of cardinal function i at an arbitrary point x.

    At the grid nodes this agrees with the cached differentiation matrix;
    elsewhere it sums the product-rule terms directly.
    """
    _check_index(grid, i)
    nodes = grid.nodes
    j = int(np.argmin(np.abs(nodes - x)))
    if abs(nodes[j] - x) < 1e-14:
        return float(grid.diff[j, i])
    others = np.delete(nodes, i)
    denom = np.prod(nodes[i] - others)
    total = 0.0
    for skip in range(len(others)):
        total += np.prod(np.delete(x - others, skip))
    return float(total / denom)


def quadrature(grid: LobattoGrid, samples: np.ndarray) -> float:
    """Apply the Lobatto rule to samples taken at the grid nodes."""
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (grid.order,):
        raise ValueError(
            f"expected {grid.order} samples at the grid nodes, got shape {samples.shape}"
        )
    return float(samples @ grid.weights)
