"""Scattering off the point interaction.

For incident deformed momentum ``k`` (``k = sqrt(2 m E)``, a value of ``g``)
the momentum-space solution is ``delta(p - p0) + A / (g(p)^2 - k^2)`` with
``g(p0) = k`` and

    A = -vtilde / (1 + vtilde I(k)),    I(k) = G(k) + i pi / (k f(k)),

where ``G`` is the principal value of ``int dp / (g^2 - k^2)`` over the domain.
Transmission vanishes whenever ``1 + vtilde G(k) = 0``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .bound import PotentialSpec
from .deformation import DeformationSpec
from .exceptions import BudgetExceededError, DomainError, NoSignChangeError, PoleError
from .numerics import (DEFAULT_EPS_SCHEDULE, PoleSubtraction, find_root_bracketed,
                       oscillatory_integral_damped, principal_value_integral)

G_TOL = 1e-12
EDGE_GUARD = 1e-8
SWEEP_POINTS = 512
# deepest edge variable u = -ln(1 - k/a) whose k is still a double below a
U_MAX = -math.log(8.0 * np.finfo(float).eps)
UNITARITY_TOL = 1e-12


@dataclass(frozen=True)
class ScatteringPoint:
    k: float
    p0: float
    G: float
    I: complex
    A: complex
    T: float
    R: float


@dataclass(frozen=True)
class ResonancePoint:
    vtilde: float
    k_star: float
    # b - p0 at the resonance, kept because b - k_star loses digits near the edge
    gap: float


@dataclass
class ResonanceCurve:
    deformation: DeformationSpec
    points: List[ResonancePoint] = field(default_factory=list)
    # sweep momenta where G could not be evaluated to quadrature tolerance
    unresolved: List[float] = field(default_factory=list)

    def pairs(self):
        return [(pt.vtilde, pt.k_star) for pt in self.points]


def _check_k(d: DeformationSpec, k: float):
    if not 0.0 < k < d.a:
        raise DomainError(f"k = {k} must lie in (0, {d.a})")


def _principal(d: DeformationSpec, k: float, gap: Optional[float], tol: float) -> float:
    # near the edge p0 = b - gap is more accurate than g_inv(k)
    p0 = d.b - gap if gap is not None and gap < 0.5 * d.b else float(d.g_inv(k))
    c = 1.0 / (2.0 * float(d.g(p0)) * float(d.g_prime(p0)))
    fn = lambda p: 1.0 / d.g_squared_minus(p, p0)
    if not d.finite:
        poles = [PoleSubtraction(p0, c), PoleSubtraction(-p0, -c)]
        return principal_value_integral(fn, -math.inf, math.inf, poles, tol=tol)
    far = d.b + p0
    poles = [PoleSubtraction(p0, c, lo_gap=far, hi_gap=gap),
             PoleSubtraction(-p0, -c, lo_gap=gap, hi_gap=far)]
    return principal_value_integral(fn, -d.b, d.b, poles, tol=tol)


def g_principal(d: DeformationSpec, k: float, tol: float = G_TOL) -> float:
    """Principal value ``P int_{-b}^{b} dp / (g(p)^2 - k^2)``.

    The poles at ``+-p0`` are removed analytically with residues
    ``+-1 / (2 k f(k))``.  Raises :class:`PoleError` when ``p0`` is within
    ``1e-8 b`` of the domain edge.
    """
    _check_k(d, k)
    gap = None
    if d.finite:
        gap = d.gap_to_edge(k)
        if gap < EDGE_GUARD * d.b:
            raise PoleError(f"pole p0 is {gap:.3g} from the domain edge b = {d.b}")
    return _principal(d, k, gap, tol)


def _edge_variable(d: DeformationSpec, k: float) -> float:
    return -math.log1p(-k / d.a)


def _from_edge_variable(d: DeformationSpec, u: float):
    w = math.exp(-u)
    k = d.a * -math.expm1(-u)
    return k, d.gap_to_edge(k, w)


def _g_edge(d: DeformationSpec, u: float, tol: float = G_TOL) -> float:
    """``G`` as a function of ``u = -ln(1 - k/a)``; resolves poles within ulps of ``b``."""
    k, gap = _from_edge_variable(d, u)
    return _principal(d, k, gap, tol)


def scattering_amplitude(d: DeformationSpec, pot: PotentialSpec, k: float,
                         tol: float = G_TOL) -> complex:
    G = g_principal(d, k, tol)
    I = complex(G, math.pi / (k * float(d.f(k))))
    return -pot.vtilde / (1.0 + pot.vtilde * I)


def _coefficients(d, pot, k, G):
    kf = k * float(d.f(k))
    vt = pot.vtilde
    shift = kf * (1.0 + vt * G)
    denom = shift * shift + (math.pi * vt) ** 2
    return shift * shift / denom, (math.pi * vt) ** 2 / denom


def scattering_point(d: DeformationSpec, pot: PotentialSpec, k: float,
                     tol: float = G_TOL) -> ScatteringPoint:
    """All scattering quantities at one ``k``.

    The closed-form coefficients are returned after checking them against the
    amplitude route ``T = |1 + i pi A/(k f)|^2``, ``R = |i pi A/(k f)|^2``.
    """
    G = g_principal(d, k, tol)
    kf = k * float(d.f(k))
    I = complex(G, math.pi / kf)
    A = -pot.vtilde / (1.0 + pot.vtilde * I)
    T, R = _coefficients(d, pot, k, G)
    scattered = 1j * math.pi * A / kf
    if abs(abs(1.0 + scattered) ** 2 - T) > UNITARITY_TOL or abs(abs(scattered) ** 2 - R) > UNITARITY_TOL:
        raise ArithmeticError(f"closed-form and amplitude coefficients disagree at k = {k}")
    return ScatteringPoint(k=k, p0=float(d.g_inv(k)), G=G, I=I, A=A, T=T, R=R)


def transmission_reflection(d: DeformationSpec, pot: PotentialSpec, k: float, tol: float = G_TOL):
    point = scattering_point(d, pot, k, tol)
    return point.T, point.R


def resonance_function(d: DeformationSpec, pot: PotentialSpec, k: float) -> float:
    """``1 + vtilde G(k)``; perfect reflection where it vanishes."""
    return 1.0 + pot.vtilde * g_principal(d, k)


def resonance_residual(d: DeformationSpec, point: ResonancePoint, tol: float = G_TOL) -> float:
    """``1 + vtilde G`` at a reported resonance, using its stored edge gap."""
    gap = point.gap if d.finite else None
    return 1.0 + point.vtilde * _principal(d, point.k_star, gap, tol)


def find_resonance(d: DeformationSpec, pot: PotentialSpec, k_lo: float, k_hi: float,
                   tol: float = 1e-13) -> float:
    """Perfect-reflection momentum in ``[k_lo, k_hi]``.

    For a finite momentum bound ``a`` the search runs in ``u = -ln(1 - k/a)``
    so that resonances squeezed against the edge are still resolved; ``k_hi``
    may then equal ``a``.  Raises :class:`NoSignChangeError` if
    ``1 + vtilde G`` keeps one sign on the bracket.
    """
    return _find_resonance(d, pot.vtilde, k_lo, k_hi, tol).k_star


def _solve_edge(d, vtilde, u_lo, u_hi, tol) -> ResonancePoint:
    h = lambda u: 1.0 + vtilde * _g_edge(d, u)
    u = find_root_bracketed(h, u_lo, u_hi, tol=tol)
    k, gap = _from_edge_variable(d, u)
    return ResonancePoint(vtilde, k, gap)


def _solve_k(d, vtilde, k_lo, k_hi, tol) -> ResonancePoint:
    h = lambda k: 1.0 + vtilde * _principal(d, k, None, G_TOL)
    k = find_root_bracketed(h, k_lo, k_hi, tol=tol)
    gap = d.b - float(d.g_inv(k)) if d.finite else math.inf
    return ResonancePoint(vtilde, k, gap)


def _find_resonance(d, vtilde, k_lo, k_hi, tol) -> ResonancePoint:
    if not 0.0 < k_lo < k_hi:
        raise ValueError(f"need 0 < k_lo < k_hi, got [{k_lo}, {k_hi}]")
    if math.isfinite(d.a):
        u_lo = _edge_variable(d, k_lo)
        u_hi = U_MAX if k_hi >= d.a else min(U_MAX, _edge_variable(d, k_hi))
        return _solve_edge(d, vtilde, u_lo, u_hi, tol)
    return _solve_k(d, vtilde, k_lo, k_hi, tol)


def resonance_curve(d: DeformationSpec, vtildes: Sequence[float], k_max: float,
                    sweep_points: int = SWEEP_POINTS, pool=None) -> ResonanceCurve:
    """Perfect-reflection momenta for each coupling ``vtilde``.

    ``G`` is tabulated once on a uniform sweep (in ``u`` for finite ``a``,
    in ``k`` otherwise) covering ``(0, k_max]``; every sign change of
    ``1 + vtilde G`` is then polished by a bracketed root search.  Couplings
    without a resonance contribute nothing.  ``pool`` may be any executor
    with an order-preserving ``map``.
    """
    vtildes = [float(v) for v in vtildes]
    if any(v <= 0 for v in vtildes) or vtildes != sorted(vtildes):
        raise ValueError("couplings must be positive and sorted")
    mapper = pool.map if pool is not None else map
    if math.isfinite(d.a):
        u_hi = U_MAX if k_max >= d.a else _edge_variable(d, k_max)
        grid = np.linspace(u_hi / sweep_points, u_hi, sweep_points)
        G = np.array(list(mapper(_guarded(lambda u: _g_edge(d, u)), grid)))
        to_k = lambda u: _from_edge_variable(d, u)[0]
        solve = _solve_edge
    else:
        grid = np.linspace(k_max / sweep_points, k_max, sweep_points)
        G = np.array(list(mapper(_guarded(lambda k: _principal(d, k, None, G_TOL)), grid)))
        to_k = float
        solve = _solve_k

    curve = ResonanceCurve(d, unresolved=[to_k(t) for t in grid[np.isnan(G)]])
    for vt in vtildes:
        h = 1.0 + vt * G
        # NaN comparisons are False, so unresolved nodes never bracket a root
        for i in np.nonzero(h[:-1] * h[1:] < 0)[0]:
            curve.points.append(solve(d, vt, grid[i], grid[i + 1], 1e-13))
    return curve


def _guarded(fn):
    def wrapped(t):
        try:
            return fn(t)
        except BudgetExceededError:
            return math.nan
    return wrapped


def scattering_wavefunction_far(d: DeformationSpec, pot: PotentialSpec, k: float, x: float) -> complex:
    """Far-field wave ``exp(i p0 x/hbar) + (i pi A / (k f)) exp(i p0 |x|/hbar)``."""
    _check_k(d, k)
    p0 = float(d.g_inv(k))
    A = scattering_amplitude(d, pot, k)
    scattered = 1j * math.pi * A / (k * float(d.f(k)))
    return cmath.exp(1j * p0 * x / pot.hbar) + scattered * cmath.exp(1j * p0 * abs(x) / pot.hbar)


def far_field_kernel(d: DeformationSpec, k: float, x: float, hbar: float = 1.0) -> complex:
    """Large-``|x|`` limit ``(i pi / (k f(k))) exp(i p0 |x| / hbar)`` of the damped kernel."""
    p0 = float(d.g_inv(k))
    return 1j * math.pi / (k * float(d.f(k))) * cmath.exp(1j * p0 * abs(x) / hbar)


def damped_kernel(d: DeformationSpec, k: float, x: float, hbar: float = 1.0,
                  eps_schedule: Sequence[float] = DEFAULT_EPS_SCHEDULE) -> complex:
    """``int_{-b}^{b} exp(i p x/hbar) / (g^2 - k^2 - i eps) dp`` in the limit ``eps -> +0``.

    ``eps_schedule`` is in units of ``k^2``.
    """
    _check_k(d, k)
    p0 = float(d.g_inv(k))
    k2 = k * k
    fn = lambda p, eps: 1.0 / (float(d.g(p)) ** 2 - k2 - 1j * eps * k2)
    return oscillatory_integral_damped(fn, -d.b, d.b, x / hbar, eps_schedule=eps_schedule,
                                       points=(-p0, p0))


@dataclass
class AsymptoticReport:
    k: float
    xs: List[float]
    values: List[complex]
    limits: List[complex]
    deviations: List[float]

    @property
    def decreasing(self) -> bool:
        """Deviation at the largest ``|x|`` is below the one at the smallest."""
        order = np.argsort(np.abs(self.xs))
        devs = np.asarray(self.deviations)[order]
        return bool(devs[-1] < devs[0])

    @property
    def max_deviation(self) -> float:
        return float(max(self.deviations))


def asymptotic_wave_check(d: DeformationSpec, k: float, xs: Sequence[float],
                          hbar: float = 1.0) -> AsymptoticReport:
    """Compare the damped kernel with its far-field form at each ``x``.

    The expansion parameter of the ``eps -> 0`` extrapolation is roughly
    ``eps |x| / (2 k f hbar)``, so beyond ``x_ref = 10 hbar / k`` the default
    schedule is shrunk by ``(x_ref / |x|)^2``; the limit ``eps -> 0`` is thus
    taken ahead of ``|x| -> infinity`` as the far-field form requires.
    """
    _check_k(d, k)
    x_ref = 10.0 * hbar / k
    values, limits, devs = [], [], []
    for x in xs:
        if abs(x) < x_ref * (1 - 1e-12):
            raise ValueError(f"|x| = {abs(x)} is below 10 hbar / k = {x_ref}")
        shrink = min(1.0, (x_ref / abs(x)) ** 2)
        schedule = [e * shrink for e in DEFAULT_EPS_SCHEDULE]
        value = damped_kernel(d, k, x, hbar, schedule)
        limit = far_field_kernel(d, k, x, hbar)
        values.append(value)
        limits.append(limit)
        devs.append(abs(value - limit) / abs(limit))
    return AsymptoticReport(k, [float(x) for x in xs], values, limits, devs)
