"""Finite-difference comparator: Numerov propagation on an equispaced grid.

Solves psi'' = (V - k^2) psi outward from the origin with the three-term
Numerov (Milne corrector) recurrence, local error O(h^6).  The first two
off-origin values come from a power-series start, so the scheme is
self-starting.  Phase shifts are extracted exactly as for the partitioned
solver: asymptotic matching at the grid end (derivative from a one-sided
O(h^4) stencil), then the radial integral via extended Simpson.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev

from .errors import DegenerateMatchError, NumericalError
from .potentials import Potential
from .scattering import PhaseShiftResult, simpson_integrate

__all__ = ["NumerovRun", "series_start", "numerov_sweep", "numerov_phase_shift"]

_H_MAX = 0.2
_SERIES_RADIUS = 0.5
_SERIES_TERMS = 48
_TAYLOR_TERMS = 24
_CHEB_DEGREE = 30


@dataclass(frozen=True)
class NumerovRun:
    """One outward sweep: psi values at r = 0, h, ..., n_steps * h."""

    h: float
    n_steps: int
    values: np.ndarray
    k: float
    potential: Potential


def _taylor_coefficients(potential: Potential, n_terms: int) -> np.ndarray:
    """Taylor coefficients of V about r = 0 from a Chebyshev fit.

    The fit samples the raw formula on [-R, R] (analytic continuation for
    the few points below zero), so any callback-defined potential works.
    """
    t = chebyshev.chebpts1(_CHEB_DEGREE + 1)
    samples = potential(t * _SERIES_RADIUS)
    coeffs = chebyshev.chebfit(t, samples, _CHEB_DEGREE)
    power = chebyshev.cheb2poly(coeffs)
    power = np.pad(power, (0, max(0, n_terms - len(power))))[:n_terms]
    return power / _SERIES_RADIUS ** np.arange(n_terms)


def _series_sum(a: np.ndarray, r: float) -> float:
    terms = a * r ** np.arange(len(a))
    total = float(np.sum(terms))
    tail = np.abs(terms[-6:])
    if np.max(tail) > 1e-15 * max(abs(total), 1e-300):
        raise ValueError(f"power-series start did not converge at r = {r}; reduce the step")
    return total


def series_start(potential: Potential, k: float, h: float) -> tuple[float, float]:
    """psi(h) and psi(2h) for the regular solution with unit slope at 0.

    psi = r + sum_{m>=3} a_m r^m, with the a_m generated from the ODE and
    the Taylor expansion of V about the origin.  Terms are kept until
    their relative contribution falls below 1e-15.
    """
    if h <= 0:
        raise ValueError(f"step must be positive, got {h}")
    if h > _H_MAX:
        raise ValueError(f"step {h} too large for the series start (max {_H_MAX} fm)")
    v = _taylor_coefficients(potential, _TAYLOR_TERMS)
    w = v.copy()
    w[0] -= k * k
    a = np.zeros(_SERIES_TERMS)
    a[1] = 1.0
    for m in range(3, _SERIES_TERMS):
        acc = 0.0
        for n in range(1, m - 1):
            p = m - 2 - n
            if p < _TAYLOR_TERMS:
                acc += w[p] * a[n]
        a[m] = acc / (m * (m - 1))
    return _series_sum(a, h), _series_sum(a, 2.0 * h)


def numerov_sweep(potential: Potential, k: float, h: float, r_max: float) -> NumerovRun:
    """Propagate from the origin to r_max = n h with the Numerov recurrence.

    For psi'' = f psi, f = V - k^2:

        (1 - h^2 f_{n+1}/12) y_{n+1}
            = 2 (1 + 5 h^2 f_n / 12) y_n - (1 - h^2 f_{n-1}/12) y_{n-1}.
    """
    if k <= 0:
        raise ValueError(f"wavenumber k must be positive, got {k}")
    steps = r_max / h
    n = int(round(steps))
    if n < 4 or abs(steps - n) > 1e-9:
        raise ValueError(f"step {h} must divide r_max {r_max} into at least 4 steps")
    r = np.arange(n + 1) * h
    f = np.asarray(potential.evaluate(r), dtype=float) - k * k
    if not np.all(np.isfinite(f)):
        bad = int(np.argmax(~np.isfinite(f)))
        raise NumericalError(f"potential is not finite at r = {r[bad]}")
    y = np.empty(n + 1)
    y[0] = 0.0
    y[1], y[2] = series_start(potential, k, h)
    h2 = h * h
    a = 1.0 - h2 * f / 12.0
    b = 2.0 + (5.0 * h2 / 6.0) * f
    for i in range(2, n):
        denom = a[i + 1]
        if abs(denom) < 1e-12:
            raise NumericalError(f"Numerov step unstable at r = {r[i + 1]} (reduce h)")
        y[i + 1] = (b[i] * y[i] - a[i - 1] * y[i - 1]) / denom
    y.setflags(write=False)
    return NumerovRun(h=h, n_steps=n, values=y, k=k, potential=potential)


def numerov_phase_shift(run: NumerovRun, potential: Potential) -> PhaseShiftResult:
    """tan(delta) from a Numerov run: matching plus the Simpson integral.

    The endpoint derivative uses the five-point one-sided O(h^4) stencil
    (25, -48, 36, -16, 3) / 12h.
    """
    y = run.values
    h, k = run.h, run.k
    r_end = run.n_steps * h
    dy = (25.0 * y[-1] - 48.0 * y[-2] + 36.0 * y[-3] - 16.0 * y[-4] + 3.0 * y[-5]) / (12.0 * h)
    u, v = float(y[-1]), float(dy / k)
    s, c = np.sin(k * r_end), np.cos(k * r_end)
    amplitude = u * s + v * c
    if abs(amplitude) < 1e-13 * max(1.0, abs(u), abs(v)):
        raise DegenerateMatchError(
            f"wave function and derivative both vanish at r = {r_end}; cannot normalize"
        )
    tan_match = (u * c - v * s) / amplitude
    r = np.arange(run.n_steps + 1) * h
    integrand = np.sin(k * r) * np.asarray(potential.evaluate(r), dtype=float) * (y / amplitude)
    tan_integral = -simpson_integrate(integrand, h) / k
    return PhaseShiftResult(
        tan_delta_match=float(tan_match),
        tan_delta_integral=float(tan_integral),
        amplitude=float(amplitude),
        consistency=abs(float(tan_match) - float(tan_integral)),
        k=k,
        r_max=float(r_end),
        warnings=(),
    )
