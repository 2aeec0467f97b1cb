"""Bound state of the attractive point interaction.

The potential is the projector form ``V = -V0 tilde_delta(x) P0`` with
``P0 psi = psi(0)``; in momentum space its kernel is the constant
``vtilde = m V0 / (pi hbar)`` on ``[-b, b]``.  A bare ``-V0 delta(x)`` is not
accepted anywhere: with a band-limited kinetic term the naive equation only
admits the trivial solution, because the delta function carries momenta
outside ``[-b, b]`` that nothing else in the equation can balance.

With ``q = sqrt(-2 m E)`` the eigenfunction is ``psi(x) = N int e^{ipx/hbar}
/ (g(p)^2 + q^2) dp`` and ``q`` is fixed by ``vtilde int dp / (g^2 + q^2) = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .deformation import DeformationSpec, Kind
from .exceptions import NoSignChangeError
from .numerics import cosine_transform_grid, find_root_bracketed, fourier_integral, integrate_adaptive
from .quasiposition import SampledWavefunction

BOUND_TOL = 1e-12
MAX_BRACKET_EXPANSIONS = 60


@dataclass(frozen=True)
class PotentialSpec:
    """Point-interaction strength ``V0`` together with the unit constants."""

    V0: float
    hbar: float = 1.0
    m: float = 1.0

    def __post_init__(self):
        for name in ("V0", "hbar", "m"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value}")

    @property
    def vtilde(self) -> float:
        return self.m * self.V0 / (math.pi * self.hbar)

    @classmethod
    def from_vtilde(cls, vtilde: float, hbar: float = 1.0, m: float = 1.0):
        return cls(V0=vtilde * math.pi * hbar / m, hbar=hbar, m=m)


@dataclass(frozen=True)
class BoundState:
    q: float
    E: float
    i2: float
    norm_const: float


def _denominator(d: DeformationSpec, q: float):
    return lambda p: 1.0 / (np.square(d.g(p)) + q * q)


def _half_line_integral(d: DeformationSpec, fn, tol: float) -> float:
    # integrands here are even in p
    return 2.0 * integrate_adaptive(fn, 0.0, d.b, tol=tol).value


def spectral_function(d: DeformationSpec, pot: PotentialSpec, q: float, tol: float = BOUND_TOL) -> float:
    """``vtilde int_{-b}^{b} dp / (g^2 + q^2) - 1``; the bound state sits at its zero."""
    if not q > 0:
        raise ValueError(f"q must be positive, got {q}")
    return pot.vtilde * _half_line_integral(d, _denominator(d, q), tol) - 1.0


def solve_bound_state(d: DeformationSpec, pot: PotentialSpec, tol: float = BOUND_TOL) -> BoundState:
    """Find the single bound level.

    The bracket starts at ``[q0/10, 10 q0]`` around the undeformed value
    ``q0 = m V0 / hbar`` and is widened by doubling both ends.
    """
    q0 = pot.m * pot.V0 / pot.hbar
    lo, hi = q0 / 10.0, q0 * 10.0
    F = lambda q: spectral_function(d, pot, q, tol)
    f_lo, f_hi = F(lo), F(hi)
    expansions = 0
    while f_lo * f_hi > 0:
        if expansions >= MAX_BRACKET_EXPANSIONS:
            raise NoSignChangeError(f"no bound state bracketed in [{lo:.3g}, {hi:.3g}]")
        if f_lo < 0:
            lo /= 2.0
            f_lo = F(lo)
        else:
            hi *= 2.0
            f_hi = F(hi)
        expansions += 1
    q = find_root_bracketed(F, lo, hi, tol=1e-14 * max(1.0, q0))
    h = _denominator(d, q)
    i2 = _half_line_integral(d, lambda p: h(p) ** 2, tol)
    norm = 1.0 / math.sqrt(2.0 * math.pi * pot.hbar * i2)
    return BoundState(q=q, E=-q * q / (2.0 * pot.m), i2=i2, norm_const=norm)


def kempf_bound_energy(beta: float, pot: PotentialSpec) -> float:
    """Closed-form bound energy for ``f(P) = 1 + beta P^2``.

    Evaluated as ``-q^2 / 2m`` with ``q = 2 pi vtilde / (1 + sqrt(1 + 4 s))``,
    ``s = pi vtilde sqrt(beta)``, which is the same number as
    ``-(1 + 2s - sqrt(1 + 4s)) / (4 m beta)`` without its cancellation at small beta.
    """
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    s = math.pi * pot.vtilde * math.sqrt(beta)
    q = 2.0 * math.pi * pot.vtilde / (1.0 + math.sqrt(1.0 + 4.0 * s))
    return -q * q / (2.0 * pot.m)


def bound_energy_series(beta: float, pot: PotentialSpec) -> float:
    """Small-beta expansion of the Kempf bound energy through order ``beta``."""
    if beta < 0:
        raise ValueError("beta must be non-negative")
    m, V0, hbar = pot.m, pot.V0, pot.hbar
    return (-m * V0 ** 2 / (2 * hbar ** 2)
            + m ** 2 * V0 ** 3 * math.sqrt(beta) / hbar ** 3
            - 5 * m ** 3 * V0 ** 4 * beta / (2 * hbar ** 4))


def printed_prefactor(d: DeformationSpec, state: BoundState) -> float:
    """Printed Kempf prefactor ``sqrt(2/pi) (1 + sqrt(b) q) q^{3/2} / sqrt(1 + 2 sqrt(b) q)``.

    Only for comparison: it is ``sqrt(2 pi)`` times the constant that makes
    ``int |psi|^2 dx = 1`` (with ``hbar = 1``).
    """
    if d.kind is not Kind.KEMPF:
        raise ValueError("the printed prefactor exists only for the Kempf deformation")
    sbq = math.sqrt(d.beta) * state.q
    return math.sqrt(2 / math.pi) * (1 + sbq) * state.q ** 1.5 / math.sqrt(1 + 2 * sbq)


def bound_wavefunction(d: DeformationSpec, state: BoundState, pot: PotentialSpec, x: float,
                       normalization: str = "numeric", tol: float = 1e-11) -> float:
    """Normalised bound eigenfunction at one position (real and even)."""
    if normalization == "numeric":
        norm = state.norm_const
    elif normalization == "printed":
        norm = printed_prefactor(d, state)
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    h = _denominator(d, state.q)
    value = fourier_integral(h, 0.0, d.b, abs(x) / pot.hbar, tol=tol)
    return 2.0 * norm * value.real


def bound_wavefunction_grid(d: DeformationSpec, state: BoundState, pot: PotentialSpec,
                            xs) -> np.ndarray:
    """Vectorised :func:`bound_wavefunction` for finite ``b``."""
    xs = np.asarray(xs, dtype=float)
    if not d.finite:
        return np.array([bound_wavefunction(d, state, pot, x) for x in xs])
    return state.norm_const * cosine_transform_grid(_denominator(d, state.q), d.b, xs, pot.hbar)


def sample_bound_state(d: DeformationSpec, state: BoundState, pot: PotentialSpec,
                       x_max: float, dx: float = None) -> SampledWavefunction:
    """Bound state on the symmetric grid ``[-x_max, x_max]``; default step is quarter Nyquist."""
    if dx is None:
        dx = math.pi * pot.hbar / (4.0 * d.b)
    n = int(math.ceil(x_max / dx))
    xs = dx * np.arange(-n, n + 1)
    return SampledWavefunction(xs, bound_wavefunction_grid(d, state, pot, xs))


def _edge_tail(d: DeformationSpec, state: BoundState, pot: PotentialSpec, x0: float) -> float:
    """``int_{x0}^inf psi^2`` from the leading large-x term ``2 N h(b) hbar sin(b x/hbar) / x``.

    The edge value ``h(b)`` is zero when ``g`` diverges at the edge, in which
    case the tail is far below this order and ignored.
    """
    g_edge = float(d.g(np.nextafter(d.b, 0.0)))
    h_edge = 1.0 / (g_edge ** 2 + state.q ** 2)
    if h_edge < 1e-14:
        return 0.0
    a = 2.0 * d.b / pot.hbar
    si, _ = special.sici(a * x0)
    # int_{x0}^inf sin^2(bx/hbar)/x^2 = 1/(2 x0) - (1/2) int_{x0}^inf cos(a x)/x^2
    cos_part = math.cos(a * x0) / x0 - a * (math.pi / 2 - si)
    sin2 = 0.5 / x0 - 0.5 * cos_part
    amp = 2.0 * state.norm_const * h_edge * pot.hbar
    return amp * amp * sin2


def norm_integral(d: DeformationSpec, state: BoundState, pot: PotentialSpec,
                  x_max: float = None) -> float:
    """``int |psi|^2 dx`` computed in position space.

    For finite ``b`` the trapezoid sum on the quarter-Nyquist grid over
    ``|x| <= x_max`` is used (exact for the band-limited ``psi^2`` apart from
    truncation), plus the analytic ``1/x^2`` edge tail beyond ``x_max``.
    For ``b = inf`` the decay is exponential and ``psi^2`` is integrated
    adaptively up to ``x_max``.  Default ``x_max = 40 hbar / q``.
    """
    if x_max is None:
        x_max = 40.0 * pot.hbar / state.q
    if not d.finite:
        psi2 = lambda x: bound_wavefunction(d, state, pot, x) ** 2
        return 2.0 * integrate_adaptive(psi2, 0.0, x_max, tol=1e-12).value
    dx = math.pi * pot.hbar / (4.0 * d.b)
    n = int(math.ceil(x_max / dx))
    xs = dx * np.arange(n + 1)
    psi = bound_wavefunction_grid(d, state, pot, xs)
    total = dx * (psi[0] ** 2 + 2.0 * np.sum(psi[1:] ** 2))
    return float(total + 2.0 * _edge_tail(d, state, pot, xs[-1] + 0.5 * dx))
