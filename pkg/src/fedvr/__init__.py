"""Finite-element DVR solver and accuracy benchmarks for 1D quantum scattering.

Library layout:

* :mod:`fedvr.lobatto` -- Gauss-Lobatto grids, cardinal functions, quadrature
* :mod:`fedvr.potentials` -- local potentials and nonlocal kernels
* :mod:`fedvr.solver` -- per-partition assembly and the continuity sweep
* :mod:`fedvr.scattering` -- asymptotic matching and phase-shift integrals
* :mod:`fedvr.numerov` -- equispaced finite-difference comparator
* :mod:`fedvr.errormodel` -- round-off and cost models
* :mod:`fedvr.bench` -- benchmark CLI (``fedvr-bench``)
"""

from .errors import ConfigError, DegenerateMatchError, NumericalError, SingularPartitionError
from .lobatto import AffineMap, LobattoGrid, build_grid, lagrange_deriv_eval, lagrange_eval, quadrature
from .potentials import (
    Kernel,
    Potential,
    eval_morse,
    eval_woods_saxon,
    free,
    gaussian_kernel,
    morse,
    tabulated,
    woods_saxon,
)
from .solver import (
    LocalSystem,
    Mesh,
    WaveSolution,
    assemble_local,
    assemble_nonlocal,
    propagate_partition,
    solve_mesh,
    solve_nonlocal,
)
from .scattering import (
    PhaseShiftResult,
    normalize_asymptotic,
    phase_shift_integral,
    phase_shift_integral_nonlocal,
    phase_shift_local,
    phase_shift_nonlocal,
    simpson_integrate,
)
from .numerov import NumerovRun, numerov_phase_shift, numerov_sweep, series_start
from .errormodel import (
    EPS_DOUBLE,
    ErrorEstimate,
    flop_estimate,
    lagrange_roundoff_bound,
    roundoff_bound_local,
    roundoff_bound_nonlocal,
)

__version__ = "0.1.0"

__all__ = [
    "AffineMap",
    "ConfigError",
    "DegenerateMatchError",
    "EPS_DOUBLE",
    "ErrorEstimate",
    "Kernel",
    "LobattoGrid",
    "LocalSystem",
    "Mesh",
    "NumericalError",
    "NumerovRun",
    "PhaseShiftResult",
    "Potential",
    "SingularPartitionError",
    "WaveSolution",
    "assemble_local",
    "assemble_nonlocal",
    "build_grid",
    "eval_morse",
    "eval_woods_saxon",
    "flop_estimate",
    "free",
    "gaussian_kernel",
    "lagrange_deriv_eval",
    "lagrange_eval",
    "lagrange_roundoff_bound",
    "morse",
    "normalize_asymptotic",
    "numerov_phase_shift",
    "numerov_sweep",
    "phase_shift_integral",
    "phase_shift_integral_nonlocal",
    "phase_shift_local",
    "phase_shift_nonlocal",
    "propagate_partition",
    "quadrature",
    "roundoff_bound_local",
    "roundoff_bound_nonlocal",
    "series_start",
    "simpson_integrate",
    "solve_mesh",
    "solve_nonlocal",
    "tabulated",
    "woods_saxon",
]
