"""Partitioned Lobatto-Galerkin solver for psi'' + k^2 psi = V psi.

The domain [0, R_max] is split into partitions, each carrying a Lobatto
grid.  On one partition the Galerkin matrix in the cardinal basis is

    M[i, j] = <l_i | -d^2/dr^2 + V - k^2 | l_j>,

with the second derivative integrated by parts so only first derivatives
and two boundary terms appear.  The quadrature rule is exact for the
kinetic integrand and makes the local potential term diagonal.

Instead of solving one global system, the sweep walks the partitions left
to right.  The first two Galerkin rows of each partition are replaced by
the continuity conditions: the leading coefficient equals the previous
partition's endpoint value, and the local derivative at the left edge
equals the previous partition's endpoint derivative.  Eliminating the two
head coefficients leaves an (N-2) dense solve per partition.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Iterator

import numpy as np
from scipy.linalg import LinAlgError, get_lapack_funcs, lu_factor, lu_solve

from .errors import NumericalError, SingularPartitionError
from .lobatto import (
    AffineMap,
    LobattoGrid,
    _build_grid_hi,
    build_grid,
    lagrange_deriv_eval,
    lagrange_eval,
)
from .potentials import Kernel, Potential

__all__ = [
    "Mesh",
    "LocalSystem",
    "WaveSolution",
    "assemble_local",
    "assemble_nonlocal",
    "propagate_partition",
    "solve_mesh",
    "solve_nonlocal",
]

_RCOND_MIN = 1e-14

# The reduced partition solves have condition numbers around N^4 / s^2, so a
# plain float64 solve loses six or seven digits and the loss compounds along
# the sweep.  Each solve is therefore polished by iterative refinement with
# residuals accumulated in extended precision against an extended-precision
# assembly of the same system.  Where long double is just double the
# refinement buys nothing and is skipped.
_HAVE_EXTENDED = np.finfo(np.longdouble).eps < np.finfo(np.float64).eps
_REFINE_STEPS = 3

# Extended-precision matrix products have no BLAS path, so the O(N^3)
# kinetic reference would dominate the run time for very large single
# partitions.  Above this order the assembly stays in float64 and the
# refinement is skipped; the rcond guard still polices the conditioning.
_HI_ORDER_MAX = 800


@dataclass(frozen=True)
class Mesh:
    """Partitioning of [0, R_max] with a grid order per partition."""

    edges: np.ndarray
    orders: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        orders = np.asarray(self.orders, dtype=int)
        if edges.ndim != 1 or len(edges) < 2:
            raise ValueError("mesh needs at least one partition")
        if edges[0] != 0.0:
            raise ValueError("mesh must start at r = 0")
        if np.any(np.diff(edges) <= 0):
            raise ValueError("mesh edges must be strictly increasing")
        if orders.shape != (len(edges) - 1,):
            raise ValueError("need one grid order per partition")
        if np.any(orders < 4):
            raise ValueError("every partition order must be at least 4")
        edges.setflags(write=False)
        orders.setflags(write=False)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "orders", orders)

    @classmethod
    def uniform(cls, r_max: float, length: float, order: int) -> "Mesh":
        """Equal partitions of `length` covering [0, r_max], same order each."""
        if r_max <= 0 or length <= 0:
            raise ValueError("r_max and partition length must be positive")
        n = r_max / length
        n_parts = int(round(n))
        if n_parts < 1 or abs(n - n_parts) > 1e-9:
            raise ValueError(f"partition length {length} does not divide r_max {r_max}")
        edges = np.linspace(0.0, r_max, n_parts + 1)
        return cls(edges, np.full(n_parts, order))

    @classmethod
    def single(cls, r_max: float, order: int) -> "Mesh":
        return cls(np.array([0.0, float(r_max)]), np.array([order]))

    @property
    def n_partitions(self) -> int:
        return len(self.orders)

    @property
    def r_max(self) -> float:
        return float(self.edges[-1])

    @property
    def total_points(self) -> int:
        return int(np.sum(self.orders))

    @property
    def unique_points(self) -> int:
        """Node count with shared interface nodes counted once."""
        return self.total_points - (self.n_partitions - 1)

    def partitions(self) -> Iterator[tuple[float, float, int]]:
        for j in range(self.n_partitions):
            yield float(self.edges[j]), float(self.edges[j + 1]), int(self.orders[j])


@dataclass(frozen=True)
class LocalSystem:
    """Assembled Galerkin matrix of one partition plus its edge data.

    `slope_in[i]` and `slope_out[i]` are the physical derivatives of
    cardinal function i at the left and right partition edge; they supply
    the continuity rows and the outgoing derivative functional.  The
    `_hi` companions hold the extended-precision assembly used for the
    refinement residuals; where long double is plain double, or above
    the large-order cutoff, they hold the float64 assembly instead.
    """

    matrix: np.ndarray
    slope_in: np.ndarray
    slope_out: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    matrix_hi: np.ndarray
    slope_in_hi: np.ndarray
    slope_out_hi: np.ndarray


@dataclass(frozen=True)
class WaveSolution:
    """Wave function on a mesh: node values per partition plus edge slopes.

    In the cardinal basis the coefficients are the node values.  Adjacent
    partitions share their interface node, and both carry it (with their
    own quadrature weights), so flattened sums over all partitions realize
    the composite quadrature over [0, R_max].
    """

    mesh: Mesh
    k: float
    coefficients: tuple[np.ndarray, ...]
    edge_slopes: np.ndarray
    nodes: tuple[np.ndarray, ...]
    weights: tuple[np.ndarray, ...]
    normalized: bool = False

    @property
    def r_max(self) -> float:
        return self.mesh.r_max

    @property
    def end_value(self) -> float:
        """psi at the right end of the mesh."""
        return float(self.coefficients[-1][-1])

    @property
    def end_slope(self) -> float:
        """psi' at the right end of the mesh."""
        return float(self.edge_slopes[-1])

    def scaled(self, factor: float, normalized: bool | None = None) -> "WaveSolution":
        return replace(
            self,
            coefficients=tuple(c * factor for c in self.coefficients),
            edge_slopes=self.edge_slopes * factor,
            normalized=self.normalized if normalized is None else normalized,
        )

    def _locate(self, r: float) -> int:
        edges = self.mesh.edges
        if not edges[0] <= r <= edges[-1]:
            raise ValueError(f"r = {r} outside mesh [0, {edges[-1]}]")
        return min(int(np.searchsorted(edges, r, side="right")) - 1, self.mesh.n_partitions - 1)

    def evaluate(self, r: float) -> float:
        """Interpolate psi(r) inside the containing partition."""
        j = self._locate(r)
        a, b, order = float(self.mesh.edges[j]), float(self.mesh.edges[j + 1]), int(self.mesh.orders[j])
        grid = build_grid(order)
        x = AffineMap(a, b).from_physical(r)
        c = self.coefficients[j]
        return float(sum(c[i] * lagrange_eval(grid, i, x) for i in range(order)))

    def derivative(self, r: float) -> float:
        """Interpolate psi'(r) inside the containing partition."""
        j = self._locate(r)
        a, b, order = float(self.mesh.edges[j]), float(self.mesh.edges[j + 1]), int(self.mesh.orders[j])
        grid = build_grid(order)
        amap = AffineMap(a, b)
        x = amap.from_physical(r)
        c = self.coefficients[j]
        dx = sum(c[i] * lagrange_deriv_eval(grid, i, x) for i in range(order))
        return float(dx / amap.scale)

    def nodes_flat(self) -> np.ndarray:
        return np.concatenate(self.nodes)

    def values_flat(self) -> np.ndarray:
        return np.concatenate(self.coefficients)

    def weights_flat(self) -> np.ndarray:
        return np.concatenate(self.weights)


@lru_cache(maxsize=None)
def _kinetic_reference(order: int, hi: bool) -> np.ndarray:
    """Reference-interval kinetic matrix: integral of l_i' l_j' under the rule.

    The integrand has degree 2N - 4, below the rule's 2N - 3 exactness
    bound, so this is the exact integral.  Cached once per order and
    rescaled per partition.
    """
    if hi:
        _, w, d = _build_grid_hi(order)
    else:
        grid = build_grid(order)
        w, d = grid.weights, grid.diff
    k = d.T @ (w[:, None] * d)
    k.setflags(write=False)
    return k


def _check_finite(values: np.ndarray, nodes: np.ndarray, what: str) -> None:
    bad = ~np.isfinite(values)
    if np.any(bad):
        idx = int(np.argmax(bad))
        raise NumericalError(f"{what} is not finite at node r = {nodes.flat[idx]}")


def _system_from_parts(m_hi: np.ndarray, d_hi: np.ndarray, s, r: np.ndarray, w_phys: np.ndarray) -> LocalSystem:
    slope_in_hi = d_hi[0, :] / s
    slope_out_hi = d_hi[-1, :] / s
    return LocalSystem(
        matrix=m_hi.astype(float),
        slope_in=slope_in_hi.astype(float),
        slope_out=slope_out_hi.astype(float),
        nodes=r,
        weights=w_phys,
        matrix_hi=m_hi,
        slope_in_hi=slope_in_hi,
        slope_out_hi=slope_out_hi,
    )


def assemble_local(grid: LobattoGrid, amap: AffineMap, potential: Potential, k: float) -> LocalSystem:
    """Galerkin matrix of one partition for a local potential.

    Kinetic part: (1/s) [ K_ref[i,j] - d_{i,N} l'_j(b) s + d_{i,1} l'_j(a) s ]
    with s the map scale; the boundary terms come from integrating the
    second derivative by parts.  The (V - k^2) part is diagonal with the
    physical weights.
    """
    r = amap.to_physical(grid.nodes)
    v = potential(r)
    _check_finite(np.asarray(v, dtype=float), r, "potential")
    hi = _HAVE_EXTENDED and grid.order <= _HI_ORDER_MAX
    if hi:
        s = np.longdouble(amap.scale)
        _, w_q, d_q = _build_grid_hi(grid.order)
        k2 = np.longdouble(k) ** 2
    else:
        s = amap.scale
        w_q, d_q = grid.weights, grid.diff
        k2 = float(k) ** 2
    m = _kinetic_reference(grid.order, hi) / s
    m[0, :] += d_q[0, :] / s
    m[-1, :] -= d_q[-1, :] / s
    diag = (np.asarray(v) - k2) * w_q * s
    m[np.arange(grid.order), np.arange(grid.order)] += diag
    return _system_from_parts(m, d_q, s, r, grid.weights * amap.scale)


def assemble_nonlocal(grid: LobattoGrid, amap: AffineMap, kernel: Kernel, k: float) -> LocalSystem:
    """Galerkin matrix with the potential replaced by a nonlocal kernel.

    The kernel term couples every pair of nodes: w_i w_j K(r_i, r_j),
    the two-dimensional quadrature of l_i(r) K(r, r') psi(r').
    """
    r = amap.to_physical(grid.nodes)
    km = kernel(r[:, None], r[None, :])
    km = np.asarray(km, dtype=float)
    if km.shape != (grid.order, grid.order):
        raise ValueError(f"kernel evaluation returned shape {km.shape}")
    bad = ~np.isfinite(km)
    if np.any(bad):
        i, j = np.unravel_index(int(np.argmax(bad)), km.shape)
        raise NumericalError(f"kernel is not finite at (r, r') = ({r[i]}, {r[j]})")
    hi = _HAVE_EXTENDED and grid.order <= _HI_ORDER_MAX
    if hi:
        s = np.longdouble(amap.scale)
        _, w_q, d_q = _build_grid_hi(grid.order)
        k2 = np.longdouble(k) ** 2
    else:
        s = amap.scale
        w_q, d_q = grid.weights, grid.diff
        k2 = float(k) ** 2
    m = _kinetic_reference(grid.order, hi) / s
    m[0, :] += d_q[0, :] / s
    m[-1, :] -= d_q[-1, :] / s
    w_phys = w_q * s
    m += (w_phys[:, None] * w_phys[None, :]) * km
    m[np.arange(grid.order), np.arange(grid.order)] -= k2 * w_phys
    return _system_from_parts(m, d_q, s, r, grid.weights * amap.scale)


def propagate_partition(system: LocalSystem, entry_value: float, entry_slope: float) -> tuple[np.ndarray, float]:
    """Solve one partition given the incoming value and derivative.

    Returns the node values c and the outgoing derivative at the right
    edge.  The head coefficient equals `entry_value` exactly; the second
    is fixed by the derivative-continuity row; the remaining N - 2 come
    from the reduced dense solve, polished by extended-precision residual
    refinement.  The returned slope keeps extended precision so sweeps
    can chain it without rounding at every interface.
    """
    m = system.matrix
    lp = system.slope_in
    m21 = m[2:, :2]
    tail = lp[2:] / lp[1]
    reduced = m[2:, 2:] - np.outer(m21[:, 1], tail)
    try:
        lu, piv = lu_factor(reduced)
    except LinAlgError as exc:
        raise SingularPartitionError(
            "reduced partition matrix is singular; try a different partition length or order"
        ) from exc
    gecon = get_lapack_funcs(("gecon",), (reduced,))[0]
    rcond, _ = gecon(lu, np.linalg.norm(reduced, 1))
    if rcond < _RCOND_MIN:
        raise SingularPartitionError(
            f"reduced partition matrix condition estimate {1.0 / max(rcond, 1e-300):.2e} "
            "exceeds 1e14; try a different partition length or order"
        )

    def reduce_solve(b0: float, b1: float, b_tail: np.ndarray) -> np.ndarray:
        # Row reduction of the bordered system for a general right side:
        # row 0 pins c[0] = b0, row 1 is the slope row lp . c = b1, and the
        # remaining rows are the Galerkin rows with right side b_tail.
        g2 = (b1 - lp[0] * b0) / lp[1]
        beta = lu_solve((lu, piv), b_tail - m21[:, 0] * b0 - m21[:, 1] * g2)
        return np.concatenate(([b0, g2 - tail @ beta], beta))

    n_red = reduced.shape[0]
    c = reduce_solve(float(entry_value), float(entry_slope), np.zeros(n_red))
    if system.matrix_hi.itemsize > 8:
        m_hi = system.matrix_hi
        lp_hi = system.slope_in_hi
        value_hi = np.longdouble(entry_value)
        slope_hi = np.longdouble(entry_slope)
        c = c.astype(np.longdouble)
        for _ in range(_REFINE_STEPS):
            r0 = value_hi - c[0]
            r1 = slope_hi - lp_hi @ c
            r_tail = -(m_hi[2:, :] @ c)
            dc = reduce_solve(float(r0), float(r1), r_tail.astype(float))
            c = c + dc
            if np.max(np.abs(dc)) <= 1e-15 * np.max(np.abs(c)):
                break
    slope_out = system.slope_out_hi @ c
    return np.asarray(c, dtype=float), slope_out


def _solution_from_sweep(mesh, k, coeffs, slopes, nodes, weights) -> WaveSolution:
    slopes = np.asarray(slopes, dtype=float)
    slopes.setflags(write=False)
    return WaveSolution(
        mesh=mesh,
        k=k,
        coefficients=tuple(coeffs),
        edge_slopes=slopes,
        nodes=tuple(nodes),
        weights=tuple(weights),
    )


def solve_mesh(mesh: Mesh, potential: Potential, k: float, entry_slope: float = 1.0) -> WaveSolution:
    """Sweep the mesh left to right from psi(0) = 0, psi'(0) = entry_slope."""
    if k <= 0:
        raise ValueError(f"wavenumber k must be positive, got {k}")
    if entry_slope == 0.0:
        raise ValueError("entry slope must be nonzero (the solution would vanish)")
    value, slope = 0.0, float(entry_slope)
    coeffs, slopes, nodes, weights = [], [], [], []
    for j, (a, b, order) in enumerate(mesh.partitions()):
        grid = build_grid(order)
        system = assemble_local(grid, AffineMap(a, b), potential, k)
        try:
            c, slope = propagate_partition(system, value, slope)
        except NumericalError as exc:
            raise type(exc)(f"partition {j} on [{a}, {b}]: {exc}") from exc
        value = float(c[-1])
        coeffs.append(c)
        slopes.append(slope)
        nodes.append(system.nodes)
        weights.append(system.weights)
    return _solution_from_sweep(mesh, k, coeffs, slopes, nodes, weights)


def solve_nonlocal(kernel: Kernel, k: float, r_max: float, order: int, entry_slope: float = 1.0) -> WaveSolution:
    """Solve with a nonlocal kernel on a single global partition."""
    if k <= 0:
        raise ValueError(f"wavenumber k must be positive, got {k}")
    if entry_slope == 0.0:
        raise ValueError("entry slope must be nonzero (the solution would vanish)")
    mesh = Mesh.single(r_max, order)
    grid = build_grid(order)
    system = assemble_nonlocal(grid, AffineMap(0.0, float(r_max)), kernel, k)
    c, slope = propagate_partition(system, 0.0, float(entry_slope))
    return _solution_from_sweep(mesh, k, [c], [slope], [system.nodes], [system.weights])
