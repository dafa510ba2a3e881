"""Round-off bound and flop-count arithmetic."""

import pytest

from fedvr.errormodel import (
    EPS_DOUBLE,
    ErrorEstimate,
    flop_estimate,
    lagrange_roundoff_bound,
    roundoff_bound_local,
    roundoff_bound_nonlocal,
)


def test_local_bound_values():
    # 4 * 100 * 18^3 * 1e-16
    assert roundoff_bound_local(20, 100) == pytest.approx(2.3328e-10, rel=1e-12)
    assert roundoff_bound_local(2, 100) == 0.0
    assert roundoff_bound_local(20, 200) == 2.0 * roundoff_bound_local(20, 100)
    assert roundoff_bound_local(20, 100, eps=0.0) == 0.0


def test_single_partition_bounds():
    # Coherent accumulation: 2 N (N-1) (eps/L) 4 (N-2)^3; one-row: drop N.
    linear = roundoff_bound_nonlocal(130, 15.0, linear=True)
    single = roundoff_bound_nonlocal(130, 15.0)
    assert linear == pytest.approx(1.8757e-6, rel=1e-4)
    assert single == pytest.approx(1.4428e-8, rel=1e-4)
    assert linear / single == pytest.approx(130.0, rel=1e-12)
    assert roundoff_bound_nonlocal(130, 15.0, eps=0.0) == 0.0


def test_flop_estimate():
    assert flop_estimate(20, 100) == 2_332_800
    assert flop_estimate(20) == 4 * 18**3
    counts = [flop_estimate(n, 10) for n in range(4, 40)]
    assert all(b > a for a, b in zip(counts, counts[1:]))


def test_lagrange_bound_below_sweep_bound():
    # Evaluating one cardinal function is never the accuracy bottleneck of
    # a 100-partition unit-length sweep.
    for n in range(4, 31):
        spacing = 1.0 / (n - 1)
        assert lagrange_roundoff_bound(n, spacing) < roundoff_bound_local(n, 100)


def test_lagrange_bound_formula():
    assert lagrange_roundoff_bound(10, 0.1) == pytest.approx(2e-14, rel=1e-12)


def test_error_estimate_constructors():
    est = ErrorEstimate.local(20, 100)
    assert est.eps == EPS_DOUBLE
    assert est.flops == flop_estimate(20, 100)
    assert est.epsilon_t == roundoff_bound_local(20, 100)
    assert est.flops >= 4 * est.n_partitions * (est.n - 2) ** 3
    assert est.spacing == pytest.approx(1.0 / 19.0)

    single = ErrorEstimate.single_partition(130, 15.0, linear=True)
    assert single.n_partitions == 1
    assert single.epsilon_t == roundoff_bound_nonlocal(130, 15.0, linear=True)
