"""Local potentials and nonlocal kernels for the radial scattering problem.

Units: lengths in fm, energies in fm^-2 (2m/hbar^2 folded in), so the
radial equation reads psi'' + k^2 psi = V psi with k in fm^-1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

__all__ = [
    "Potential",
    "Kernel",
    "morse",
    "woods_saxon",
    "free",
    "tabulated",
    "gaussian_kernel",
    "eval_morse",
    "eval_woods_saxon",
]


@dataclass(frozen=True)
class Potential:
    """A local potential V(r).

    `fn` is the raw vectorized formula, defined wherever the expression
    makes sense (the series start evaluates it slightly below r = 0).
    `evaluate` is the guarded physical entry point for r >= 0.
    """

    kind: str
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, r):
        return self.fn(np.asarray(r, dtype=float))

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise ValueError("potential is defined for r >= 0")
        return self.fn(r)


@dataclass(frozen=True)
class Kernel:
    """A nonlocal kernel K(r, r'); `fn` must broadcast over both arguments."""

    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    symmetric: bool
    effective_range: float | None = None

    def __call__(self, r, rp):
        return self.fn(np.asarray(r, dtype=float), np.asarray(rp, dtype=float))


def _morse_fn(r):
    u = np.exp(-0.3 * r + 1.2)
    return 6.0 * u * (u - 2.0)


def _woods_saxon_fn(r):
    return -3.36 / (1.0 + np.exp((r - 3.5) / 0.6))


def morse() -> Potential:
    """Morse well with a repulsive core: 6 e^z (e^z - 2), z = -0.3 r + 1.2.

    Minimum -6 fm^-2 at r = 4 fm; repulsive at the origin (about 26.3).
    """
    return Potential("morse", _morse_fn)


def woods_saxon() -> Potential:
    """Attractive Woods-Saxon well, depth 3.36 fm^-2, radius 3.5 fm, diffuseness 0.6 fm."""
    return Potential("woods_saxon", _woods_saxon_fn)


def free() -> Potential:
    """V = 0 everywhere."""
    return Potential("free", lambda r: np.zeros_like(np.asarray(r, dtype=float)))


def tabulated(path) -> Potential:
    """Potential from a two-column text file (r, V), cubic interpolation.

    Lines starting with '#' are comments; r must be strictly ascending.
    """
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"expected two columns (r, V) in {path}, got {data.shape[1]}")
    r, v = data[:, 0], data[:, 1]
    if len(r) < 4:
        raise ValueError("tabulated potential needs at least 4 points")
    if np.any(np.diff(r) <= 0):
        raise ValueError("tabulated r values must be strictly ascending")
    spline = CubicSpline(r, v)
    return Potential("custom", lambda x: spline(x))


def eval_morse(r: float) -> float:
    """Scalar Morse evaluation; negative r is a domain error."""
    if r < 0:
        raise ValueError("potential is defined for r >= 0")
    return float(_morse_fn(r))


def eval_woods_saxon(r: float) -> float:
    """Scalar Woods-Saxon evaluation; negative r is a domain error."""
    if r < 0:
        raise ValueError("potential is defined for r >= 0")
    return float(_woods_saxon_fn(r))


def gaussian_kernel(v0: float, beta: float, shape: Potential, effective_range: float | None = None) -> Kernel:
    """Separable Gaussian test kernel.

    K(r, r') = v0 * H((r + r') / 2) * exp(-((r - r') / beta)^2) / (beta sqrt(pi))

    with H the shape potential.  As beta -> 0 the kernel row integrates to
    v0 * H(r), recovering a local potential.
    """
    if beta <= 0:
        raise ValueError(f"kernel width beta must be positive, got {beta}")
    norm = 1.0 / (beta * np.sqrt(np.pi))

    def fn(r, rp):
        return v0 * shape.fn(0.5 * (r + rp)) * np.exp(-(((r - rp) / beta) ** 2)) * norm

    return Kernel(fn, symmetric=True, effective_range=effective_range)
