"""Band-limited wavefunctions in the quasiposition representation.

States live on the whole line but only contain momenta ``|p| <= b``, so the
identity on them is the sinc kernel ``sin(b x / hbar) / (pi x)`` rather than
a Dirac delta.  Sampled wavefunctions are handled with plain trapezoid sums;
for a band-limited integrand on a grid finer than the Nyquist spacing the
sum is exact up to truncation of the grid.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .deformation import DeformationSpec
from .exceptions import DomainError, TruncationWarning

BOUNDARY_RATIO = 1e-6


@dataclass(frozen=True)
class KernelContext:
    d: DeformationSpec
    hbar: float = 1.0

    def __post_init__(self):
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")

    @property
    def b(self) -> float:
        return self.d.b

    @property
    def l0(self) -> float:
        return math.pi * self.hbar / (2.0 * self.d.b)

    @property
    def max_spacing(self) -> float:
        """Largest grid step accepted for sampled states (quarter Nyquist)."""
        return math.pi * self.hbar / (4.0 * self.d.b)


@dataclass(frozen=True, eq=False)
class SampledWavefunction:
    """Complex samples of a wavefunction on a uniform, increasing grid."""

    xs: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if xs.ndim != 1 or xs.size < 2 or xs.shape != values.shape:
            raise ValueError("need at least two positions, one value per position")
        steps = np.diff(xs)
        if np.any(steps <= 0):
            raise ValueError("positions must be strictly increasing")
        if np.max(np.abs(steps - steps[0])) > 1e-9 * max(1.0, abs(steps[0])):
            raise ValueError("positions must be uniformly spaced")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "values", values)

    @property
    def dx(self) -> float:
        return float(self.xs[1] - self.xs[0])

    @classmethod
    def from_function(cls, fn: Callable, x_min: float, x_max: float, dx: float):
        n = int(round((x_max - x_min) / dx)) + 1
        xs = x_min + dx * np.arange(n)
        return cls(xs, np.asarray(fn(xs), dtype=complex))


def _require_finite(ctx: KernelContext):
    if not ctx.d.finite:
        raise DomainError("the kernel degenerates to a Dirac delta for b = infinity")


def _check_grid(ctx: KernelContext, psi: SampledWavefunction):
    if psi.dx > ctx.max_spacing * (1.0 + 1e-12):
        raise ValueError(
            f"grid step {psi.dx:.6g} exceeds the quarter-Nyquist limit {ctx.max_spacing:.6g}")


def _warn_truncation(psi: SampledWavefunction, ratio: float = BOUNDARY_RATIO):
    mags = np.abs(psi.values)
    peak = float(np.max(mags))
    edge = max(mags[0], mags[-1])
    if peak > 0 and edge > ratio * peak:
        warnings.warn(f"wavefunction is {edge / peak:.2e} of its peak at the grid edge",
                      TruncationWarning, stacklevel=3)


def _trapezoid_weights(psi: SampledWavefunction) -> np.ndarray:
    w = np.full(psi.xs.size, psi.dx)
    w[0] = w[-1] = 0.5 * psi.dx
    return w


def tilde_delta(ctx: KernelContext, x):
    """``sin(b x / hbar) / (pi x)``, continued by ``b / (pi hbar)`` at the origin."""
    _require_finite(ctx)
    x = np.asarray(x, dtype=float)
    peak = ctx.b / (math.pi * ctx.hbar)
    out = peak * np.sinc(ctx.b * x / (math.pi * ctx.hbar))
    return float(out) if out.ndim == 0 else out


def position_eigenfunction(ctx: KernelContext, lam: float, x):
    """Eigenfunction of the position operator with eigenvalue ``lam``."""
    _require_finite(ctx)
    return math.sqrt(2.0 * ctx.l0) * tilde_delta(ctx, np.asarray(x, dtype=float) - lam)


def momentum_amplitude(ctx: KernelContext, psi: SampledWavefunction, p):
    """``C(p) = int psi(x) exp(-i p x / hbar) dx / sqrt(2 pi hbar)`` on the grid."""
    _require_finite(ctx)
    _check_grid(ctx, psi)
    _warn_truncation(psi)
    p_arr = np.atleast_1d(np.asarray(p, dtype=float))
    if np.any(np.abs(p_arr) > ctx.b * (1.0 + 1e-12)):
        raise DomainError(f"momentum outside [-{ctx.b}, {ctx.b}]")
    weighted = _trapezoid_weights(psi) * psi.values
    phase = np.exp(-1j * np.outer(p_arr, psi.xs) / ctx.hbar)
    out = phase @ weighted / math.sqrt(2.0 * math.pi * ctx.hbar)
    return complex(out[0]) if np.ndim(p) == 0 else out


def project_bandlimited(ctx: KernelContext, psi: SampledWavefunction, x):
    """``int psi(x') tilde_delta(x - x') dx'`` on the grid.

    Band-limited states come back unchanged; evaluating at ``x = 0`` gives the
    projection onto the origin used by the point interaction.
    """
    _require_finite(ctx)
    _check_grid(ctx, psi)
    _warn_truncation(psi)
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    weighted = _trapezoid_weights(psi) * psi.values
    kernel = tilde_delta(ctx, x_arr[:, None] - psi.xs[None, :])
    out = np.atleast_2d(kernel) @ weighted
    return complex(out[0]) if np.ndim(x) == 0 else out


@dataclass
class PhysicalStateReport:
    c_plus: float
    c_minus: float
    c_max: float
    ratio: float = BOUNDARY_RATIO

    @property
    def passed(self) -> bool:
        return max(self.c_plus, self.c_minus) <= self.ratio * self.c_max


def physical_state_check(ctx: KernelContext, psi: SampledWavefunction,
                         n_momenta: int = 513) -> PhysicalStateReport:
    """Check that the momentum amplitude vanishes at the domain edges ``p = +-b``.

    States failing this have an infinite mean kinetic energy for deformations
    whose ``g`` diverges at the edge; position eigenfunctions are the
    standard example.
    """
    ps = np.linspace(-ctx.b, ctx.b, n_momenta)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        amps = np.abs(momentum_amplitude(ctx, psi, ps))
    _warn_truncation(psi)
    return PhysicalStateReport(float(amps[-1]), float(amps[0]), float(np.max(amps)))
