"""Assembly identities, the continuity sweep, and the nonlocal solve."""

import numpy as np
import pytest

from fedvr.errors import NumericalError
from fedvr.lobatto import AffineMap, build_grid
from fedvr.potentials import Potential, free, gaussian_kernel, morse, woods_saxon
from fedvr.solver import (
    Mesh,
    assemble_local,
    assemble_nonlocal,
    propagate_partition,
    solve_mesh,
    solve_nonlocal,
)

K = 0.5


def test_mesh_validation():
    with pytest.raises(ValueError):
        Mesh(np.array([0.0]), np.array([], dtype=int))
    with pytest.raises(ValueError):
        Mesh(np.array([1.0, 2.0]), np.array([8]))  # must start at 0
    with pytest.raises(ValueError):
        Mesh(np.array([0.0, 2.0, 1.0]), np.array([8, 8]))
    with pytest.raises(ValueError):
        Mesh(np.array([0.0, 1.0]), np.array([3]))  # order below 4
    with pytest.raises(ValueError):
        Mesh.uniform(100.0, 3.0, 8)  # 3 does not divide 100
    with pytest.raises(ValueError):
        Mesh.uniform(10.0, -1.0, 8)


def test_mesh_point_counts():
    mesh = Mesh.uniform(100.0, 1.0, 20)
    assert mesh.n_partitions == 100
    assert mesh.r_max == 100.0
    assert mesh.total_points == 2000
    assert mesh.unique_points == 100 * 19 + 1
    single = Mesh.single(15.0, 130)
    assert single.n_partitions == 1
    assert single.unique_points == 130


def test_kinetic_rows_annihilate_linear_functions():
    # With V = 0 and k = 0 the operator is the weak form of -d2/dr2 with the
    # by-parts boundary terms reinstated on the edge rows, so every row must
    # annihilate psi(r) = 1 and psi(r) = r.
    grid = build_grid(9)
    amap = AffineMap(2.0, 4.5)
    system = assemble_local(grid, amap, free(), 0.0)
    np.testing.assert_allclose(system.matrix @ np.ones(9), 0.0, atol=1e-13)
    np.testing.assert_allclose(system.matrix @ system.nodes, 0.0, atol=1e-13)


def test_boundary_rows_carry_edge_derivatives():
    # The edge-row derivative terms make the operator act as the strong
    # -d2/dr2 sampled with weight s*w on every row: the products stay within
    # the quadrature's exact degree, so M @ r^2 = -2 s w with no truncation.
    grid = build_grid(9)
    amap = AffineMap(2.0, 4.5)
    system = assemble_local(grid, amap, free(), 0.0)
    acting = system.matrix @ system.nodes**2
    np.testing.assert_allclose(acting, -2.0 * amap.scale * grid.weights, atol=1e-12)


def test_assembly_scales_with_interval_length():
    # Pure kinetic blocks scale like 1/s under interval stretching.
    grid = build_grid(8)
    m1 = assemble_local(grid, AffineMap(0.0, 1.0), free(), 0.0).matrix
    m2 = assemble_local(grid, AffineMap(0.0, 2.0), free(), 0.0).matrix
    np.testing.assert_allclose(m1, 2.0 * m2, rtol=1e-13)


def test_potential_term_is_diagonal():
    grid = build_grid(10)
    amap = AffineMap(1.0, 3.0)
    kinetic = assemble_local(grid, amap, free(), 0.0).matrix
    full = assemble_local(grid, amap, morse(), 0.0).matrix
    difference = full - kinetic
    diag = np.diag(morse()(amap.to_physical(grid.nodes)) * grid.weights * amap.scale)
    np.testing.assert_allclose(difference, diag, atol=1e-13)


def test_slope_functionals_match_diff_matrix():
    grid = build_grid(7)
    amap = AffineMap(0.0, 4.0)
    system = assemble_local(grid, amap, free(), K)
    np.testing.assert_allclose(system.slope_in, grid.diff[0, :] / amap.scale, rtol=1e-14)
    np.testing.assert_allclose(system.slope_out, grid.diff[-1, :] / amap.scale, rtol=1e-14)


def test_propagate_pins_entry_value_exactly():
    grid = build_grid(12)
    system = assemble_local(grid, AffineMap(0.0, 1.0), morse(), K)
    c, _ = propagate_partition(system, 0.3721, 1.5)
    assert c[0] == 0.3721


def test_propagate_satisfies_entry_slope():
    grid = build_grid(12)
    amap = AffineMap(1.0, 2.0)
    system = assemble_local(grid, amap, morse(), K)
    c, _ = propagate_partition(system, 0.25, -0.8)
    assert abs(system.slope_in @ c - (-0.8)) < 1e-12


def test_galerkin_rows_satisfied():
    grid = build_grid(14)
    system = assemble_local(grid, AffineMap(3.0, 4.0), morse(), K)
    c, _ = propagate_partition(system, 0.1, 1.0)
    residual = system.matrix @ c
    scale = np.linalg.norm(system.matrix, np.inf) * np.max(np.abs(c))
    assert np.max(np.abs(residual[2:])) < 1e-12 * scale


def test_free_particle_matches_sine():
    mesh = Mesh.uniform(10.0, 1.0, 12)
    solution = solve_mesh(mesh, free(), K, entry_slope=K)
    r = solution.nodes_flat()
    np.testing.assert_allclose(solution.values_flat(), np.sin(K * r), atol=1e-10)
    assert abs(solution.end_slope - K * np.cos(K * 10.0)) < 1e-10


def test_evaluate_and_derivative_interpolate():
    mesh = Mesh.uniform(10.0, 2.0, 14)
    solution = solve_mesh(mesh, free(), K, entry_slope=K)
    for r in (0.37, 3.99, 7.2, 10.0):
        assert abs(solution.evaluate(r) - np.sin(K * r)) < 1e-10
        assert abs(solution.derivative(r) - K * np.cos(K * r)) < 1e-9
    with pytest.raises(ValueError):
        solution.evaluate(10.5)


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_continuity_on_random_meshes(seed):
    rng = np.random.default_rng(seed)
    interior = np.sort(rng.uniform(1.0, 19.0, size=rng.integers(3, 7)))
    edges = np.concatenate(([0.0], interior, [20.0]))
    orders = rng.integers(6, 15, size=len(edges) - 1)
    mesh = Mesh(edges, orders)
    solution = solve_mesh(mesh, morse(), K)

    slope_scale = np.max(np.abs(solution.edge_slopes))
    for j in range(mesh.n_partitions - 1):
        left = solution.coefficients[j]
        right = solution.coefficients[j + 1]
        # Value continuity is pinned exactly by construction.
        assert right[0] == left[-1]
        # Derivative continuity: the next partition's entry slope must
        # reproduce the stored outgoing slope.
        grid = build_grid(int(orders[j + 1]))
        amap = AffineMap(float(edges[j + 1]), float(edges[j + 2]))
        entry = (grid.diff[0, :] / amap.scale) @ right
        assert abs(entry - solution.edge_slopes[j]) < 1e-10 * max(1.0, slope_scale)


def test_solve_rejects_bad_arguments():
    mesh = Mesh.uniform(10.0, 1.0, 8)
    with pytest.raises(ValueError):
        solve_mesh(mesh, free(), -0.5)
    with pytest.raises(ValueError):
        solve_mesh(mesh, free(), K, entry_slope=0.0)
    with pytest.raises(ValueError):
        solve_nonlocal(gaussian_kernel(1.0, 0.9, woods_saxon()), 0.0, 15.0, 130)


def test_non_finite_potential_reported_with_location():
    singular = Potential("custom", lambda r: 1.0 / r)
    mesh = Mesh.uniform(10.0, 1.0, 8)
    with np.errstate(divide="ignore"):
        with pytest.raises(NumericalError, match="not finite"):
            solve_mesh(mesh, singular, K)


def test_zero_kernel_reproduces_free_solution():
    kernel = gaussian_kernel(0.0, 0.9, woods_saxon())
    nonlocal_sol = solve_nonlocal(kernel, K, 15.0, 60, entry_slope=K)
    r = nonlocal_sol.nodes_flat()
    np.testing.assert_allclose(nonlocal_sol.values_flat(), np.sin(K * r), atol=1e-10)


def test_nonlocal_kernel_term_is_symmetric():
    grid = build_grid(20)
    amap = AffineMap(0.0, 15.0)
    kernel = gaussian_kernel(1.0, 0.9, woods_saxon())
    with_kernel = assemble_nonlocal(grid, amap, kernel, 0.0)
    without = assemble_local(grid, amap, free(), 0.0)
    coupling = with_kernel.matrix - without.matrix
    np.testing.assert_allclose(coupling, coupling.T, atol=1e-12)


def test_nonlocal_rejects_wrong_kernel_shape():
    from fedvr.potentials import Kernel

    bad = Kernel(fn=lambda r, rp: np.zeros((2, 2)), symmetric=True)
    grid = build_grid(8)
    with pytest.raises(ValueError, match="shape"):
        assemble_nonlocal(grid, AffineMap(0.0, 1.0), bad, K)
