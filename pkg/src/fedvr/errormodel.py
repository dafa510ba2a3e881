"""Round-off accumulation and cost models for the partitioned solver.

The dominant floating-point work per partition is the dense LU solve,
about 4 (N-2)^3 flops.  Its round-off, accumulated linearly across
partitions, bounds the accuracy plateau reached once the basis error is
converged away.  For a single large partition the propagation of matrix
round-off through the solve gives a per-length bound instead.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "EPS_DOUBLE",
    "roundoff_bound_local",
    "roundoff_bound_nonlocal",
    "lagrange_roundoff_bound",
    "flop_estimate",
    "ErrorEstimate",
]

EPS_DOUBLE = 1e-16


def flop_estimate(n: int, n_partitions: int = 1) -> float:
    """Estimated flops for the sweep: 4 (N-2)^3 per partition."""
    return 4.0 * n_partitions * (n - 2) ** 3


def roundoff_bound_local(n: int, n_partitions: int, eps: float = EPS_DOUBLE) -> float:
    """Accumulated LU round-off across a local-potential sweep:
    eps_T = 4 N_p (N-2)^3 eps."""
    return 4.0 * n_partitions * (n - 2) ** 3 * eps

def roundoff_bound_nonlocal(n: int, length: float, eps: float = EPS_DOUBLE, linear: bool = False) -> float:
    """Round-off bound for one large partition of the given length.

    With `linear=True` every matrix element error is assumed to add
    coherently (factor 2 N (N-1)); the default assumes one row's worth
    (factor 2 (N-1)), the observed behavior.
    """
    factor = 2.0 * n * (n - 1) if linear else 2.0 * (n - 1)
    return factor * (eps / length) * 4.0 * (n - 2) ** 3


def lagrange_roundoff_bound(n: int, spacing: float, eps: float = EPS_DOUBLE) -> float:
    """Round-off of evaluating one cardinal function: about 2 N eps / Delta."""
    return 2.0 * n * eps / spacing


@dataclass(frozen=True)
class ErrorEstimate:
    """Round-off budget of one solver configuration."""

    eps: float
    n: int
    n_partitions: int
    length: float
    spacing: float
    epsilon_t: float
    flops: float

    @classmethod
    def local(cls, n: int, n_partitions: int, length: float = 1.0, eps: float = EPS_DOUBLE) -> "ErrorEstimate":
        return cls(
            eps=eps,
            n=n,
            n_partitions=n_partitions,
            length=length,
            spacing=length / max(n - 1, 1),
            epsilon_t=roundoff_bound_local(n, n_partitions, eps),
            flops=flop_estimate(n, n_partitions),
        )

    @classmethod
    def single_partition(cls, n: int, length: float, eps: float = EPS_DOUBLE, linear: bool = False) -> "ErrorEstimate":
        return cls(
            eps=eps,
            n=n,
            n_partitions=1,
            length=length,
            spacing=length / max(n - 1, 1),
            epsilon_t=roundoff_bound_nonlocal(n, length, eps, linear),
            flops=flop_estimate(n, 1),
        )
