"""Phase-shift extraction from solved wave functions.

Two independent routes to tan(delta):

* matching: normalize psi so that psi -> sin(kr) + tan(delta) cos(kr)
  asymptotically, by matching value and derivative at the mesh end;
* integral: tan(delta) = -(1/k) int sin(kr) V(r) psi(r) dr evaluated with
  the solver's own quadrature (or Simpson's rule for equispaced data).

Their disagreement is a useful internal consistency diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMatchError
from .potentials import Kernel, Potential
from .solver import Mesh, WaveSolution, solve_mesh, solve_nonlocal

__all__ = [
    "PhaseShiftResult",
    "normalize_asymptotic",
    "phase_shift_integral",
    "phase_shift_integral_nonlocal",
    "simpson_integrate",
    "phase_shift_local",
    "phase_shift_nonlocal",
]

_NEGLIGIBLE_V = 1e-10


@dataclass(frozen=True)
class PhaseShiftResult:
    """Both tan(delta) estimates for one solve, plus diagnostics.

    `amplitude` is the asymptotic normalization constant of the raw
    (unit-entry-slope) solution; `consistency` is the absolute difference
    between the two estimates.
    """

    tan_delta_match: float
    tan_delta_integral: float
    amplitude: float
    consistency: float
    k: float
    r_max: float
    warnings: tuple[str, ...] = ()


def normalize_asymptotic(
    solution: WaveSolution,
    potential: Potential | None = None,
    r_match: float | None = None,
) -> tuple[WaveSolution, float, float, tuple[str, ...]]:
    """Match psi to sin(kr) + t cos(kr) at r_match (default: the mesh end).

    Returns (normalized solution, amplitude A, tan_delta, warnings).  With
    u = psi(R) and v = psi'(R)/k the matching closed form is

        A = u sin(kR) + v cos(kR),    A t = u cos(kR) - v sin(kR),

    and the whole solution is rescaled by 1/A.
    """
    k = solution.k
    if r_match is None:
        r_match = solution.r_max
        u = solution.end_value
        v = solution.end_slope / k
    else:
        if not solution.mesh.edges[-2] <= r_match <= solution.mesh.edges[-1]:
            raise ValueError(f"match point {r_match} must lie in the last partition")
        u = solution.evaluate(r_match)
        v = solution.derivative(r_match) / k
    warnings = []
    if potential is not None:
        v_match = float(np.abs(potential.evaluate(r_match)))
        if v_match > _NEGLIGIBLE_V:
            warnings.append(
                f"potential magnitude {v_match:.2e} at match point r = {r_match} "
                "is not negligible; tan(delta) is biased"
            )
    s, c = np.sin(k * r_match), np.cos(k * r_match)
    amplitude = u * s + v * c
    if abs(amplitude) < 1e-13 * max(1.0, abs(u), abs(v)):
        raise DegenerateMatchError(
            f"wave function and derivative both vanish at r = {r_match}; cannot normalize"
        )
    tan_delta = (u * c - v * s) / amplitude
    normalized = solution.scaled(1.0 / amplitude, normalized=True)
    return normalized, float(amplitude), float(tan_delta), tuple(warnings)


def phase_shift_integral(solution: WaveSolution, potential: Potential) -> float:
    """tan(delta) from the radial integral, using the mesh's own quadrature.

    Interface nodes appear once per adjacent partition, each with its own
    partition weight, so the flattened sum is the composite rule.
    """
    if not solution.normalized:
        raise ValueError("solution must be normalized (normalize_asymptotic) first")
    r = solution.nodes_flat()
    w = solution.weights_flat()
    c = solution.values_flat()
    k = solution.k
    v = np.asarray(potential.evaluate(r), dtype=float)
    return float(-(w * np.sin(k * r) * v) @ c / k)


def phase_shift_integral_nonlocal(solution: WaveSolution, kernel: Kernel) -> float:
    """tan(delta) for a nonlocal kernel: the double quadrature of
    sin(kr) K(r, r') psi(r')."""
    if not solution.normalized:
        raise ValueError("solution must be normalized (normalize_asymptotic) first")
    r = solution.nodes_flat()
    w = solution.weights_flat()
    c = solution.values_flat()
    k = solution.k
    km = np.asarray(kernel(r[:, None], r[None, :]), dtype=float)
    return float(-(w * np.sin(k * r)) @ km @ (w * c) / k)


def simpson_integrate(samples: np.ndarray, h: float) -> float:
    """Extended Simpson rule for equispaced samples (odd count required)."""
    samples = np.asarray(samples, dtype=float)
    n = len(samples)
    if n < 3 or n % 2 == 0:
        raise ValueError(f"Simpson's rule needs an odd number of samples >= 3, got {n}")
    if h <= 0:
        raise ValueError(f"step must be positive, got {h}")
    total = samples[0] + samples[-1] + 4.0 * np.sum(samples[1:-1:2]) + 2.0 * np.sum(samples[2:-1:2])
    return float(total * h / 3.0)


def _result(solution, tan_match, amplitude, tan_integral, warnings) -> PhaseShiftResult:
    return PhaseShiftResult(
        tan_delta_match=tan_match,
        tan_delta_integral=tan_integral,
        amplitude=amplitude,
        consistency=abs(tan_match - tan_integral),
        k=solution.k,
        r_max=solution.r_max,
        warnings=warnings,
    )


def phase_shift_local(mesh: Mesh, potential: Potential, k: float, entry_slope: float = 1.0) -> PhaseShiftResult:
    """Solve a local-potential mesh and extract tan(delta) both ways."""
    raw = solve_mesh(mesh, potential, k, entry_slope)
    normalized, amplitude, tan_match, warnings = normalize_asymptotic(raw, potential)
    tan_integral = phase_shift_integral(normalized, potential)
    return _result(normalized, tan_match, amplitude, tan_integral, warnings)


def phase_shift_nonlocal(kernel: Kernel, k: float, r_max: float, order: int, entry_slope: float = 1.0) -> PhaseShiftResult:
    """Solve with a nonlocal kernel and extract tan(delta) both ways."""
    raw = solve_nonlocal(kernel, k, r_max, order, entry_slope)
    normalized, amplitude, tan_match, warnings = normalize_asymptotic(raw)
    tail = float(np.abs(kernel(r_max, r_max)))
    if tail > _NEGLIGIBLE_V:
        warnings = warnings + (
            f"kernel magnitude {tail:.2e} at the mesh end is not negligible; tan(delta) is biased",
        )
    tan_integral = phase_shift_integral_nonlocal(normalized, kernel)
    return _result(normalized, tan_match, amplitude, tan_integral, warnings)
