"""Quadrature, principal values, bracketed roots and damped oscillatory integrals.

All routines are pure functions of their arguments.  Adaptive quadrature is
delegated to QUADPACK (``scipy.integrate.quad``); infinite limits are mapped
to a finite interval with ``p = c + tan(theta)`` before integrating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy import integrate, optimize

from .exceptions import BudgetExceededError, ExtrapolationError, NoSignChangeError, PoleError

QUAD_TOL = 1e-10
ROOT_TOL = 1e-12
POLE_SEPARATION = 1e-8
DEFAULT_EPS_SCHEDULE = (1e-2, 5e-3, 2.5e-3, 1.25e-3)
QUAD_LIMIT = 400

# QUADPACK ier codes that mean the answer cannot be trusted.  ier=2/4 (roundoff
# limits) are accepted: the returned value is then as good as doubles allow.
_FATAL_IER = {1: "evaluation budget exhausted", 3: "integrand too badly behaved",
              5: "integral probably divergent"}
_FATAL_PHRASES = {1: "maximum number of", 3: "xtremely bad integrand", 5: "probably divergent"}


@dataclass
class QuadratureResult:
    value: complex
    err_estimate: float
    evaluations: int


@dataclass(frozen=True)
class PoleSubtraction:
    """A simple pole ``residue / (p - pole)`` to be removed from an integrand.

    ``lo_gap``/``hi_gap`` optionally give ``pole - lo`` and ``hi - pole`` when
    the caller knows them more precisely than the floating-point difference.
    """

    pole: float
    residue: float
    lo_gap: Optional[float] = None
    hi_gap: Optional[float] = None


def _run_quad(fn, lo, hi, label, **kwargs):
    """Call ``scipy.integrate.quad`` and turn fatal diagnostics into exceptions."""
    out = integrate.quad(fn, lo, hi, full_output=1, **kwargs)
    value, err, info = out[0], out[1], out[2]
    if len(out) >= 4:
        message = out[3]
        for code, phrase in _FATAL_PHRASES.items():
            if phrase in message:
                raise BudgetExceededError(f"{label}: {_FATAL_IER[code]}", best_estimate=value)
    return value, err, info


def _tangent_map(fn, lo, hi, points):
    """Rewrite an integral with infinite limits over a finite theta interval."""
    if math.isinf(lo) and math.isinf(hi):
        shift, t_lo, t_hi = 0.0, -math.pi / 2, math.pi / 2
    elif math.isinf(hi):
        shift, t_lo, t_hi = lo, 0.0, math.pi / 2
    else:
        shift, t_lo, t_hi = hi, -math.pi / 2, 0.0

    def mapped(theta):
        c = math.cos(theta)
        return fn(shift + math.tan(theta)) / (c * c)

    t_points = [math.atan(p - shift) for p in points]
    return mapped, t_lo, t_hi, t_points


def _quad_real(fn, lo, hi, tol, points, limit):
    kwargs = dict(epsabs=tol, epsrel=tol, limit=limit)
    pts = sorted(p for p in points if lo < p < hi)
    if pts:
        kwargs["points"] = pts
    value, err, info = _run_quad(fn, lo, hi, "integrate_adaptive", **kwargs)
    return value, err, int(info["neval"])


def integrate_adaptive(fn: Callable[[float], complex], lo: float, hi: float,
                       tol: float = QUAD_TOL, points: Iterable[float] = (),
                       limit: int = QUAD_LIMIT) -> QuadratureResult:
    """Adaptive Gauss-Kronrod integral of a real or complex integrand.

    Raises :class:`BudgetExceededError` (carrying the best estimate) if the
    subdivision budget ``limit`` runs out.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    points = list(points)
    if math.isinf(lo) or math.isinf(hi):
        fn, lo, hi, points = _tangent_map(fn, lo, hi, points)

    probe = fn(lo + (hi - lo) * 0.3819660112501051)
    if np.iscomplexobj(probe):
        re = _quad_real(lambda t: fn(t).real, lo, hi, tol, points, limit)
        im = _quad_real(lambda t: fn(t).imag, lo, hi, tol, points, limit)
        return QuadratureResult(complex(re[0], im[0]), math.hypot(re[1], im[1]), re[2] + im[2])
    value, err, neval = _quad_real(fn, lo, hi, tol, points, limit)
    return QuadratureResult(float(value), float(err), neval)


def _graded_points(poles, lo, hi):
    """Breakpoints at ``pole -+ gap * 4^j`` away from the nearer boundary.

    A pole close to an edge usually means the integrand varies on the scale
    of that gap on the far side too; geometric breakpoints let the adaptive
    rule reach the long segment's fine structure without exhausting its budget.
    """
    out = []
    for pl in poles:
        lo_gap = pl.lo_gap if pl.lo_gap is not None else pl.pole - lo
        hi_gap = pl.hi_gap if pl.hi_gap is not None else hi - pl.pole
        step, sign = (hi_gap, -1.0) if hi_gap < lo_gap else (lo_gap, 1.0)
        step *= 2.0
        while step < 0.25 * (hi - lo):
            p = pl.pole + sign * step
            if lo < p < hi:
                out.append(p)
            step *= 4.0
    return out


def principal_value_integral(fn: Callable[[float], float], lo: float, hi: float,
                             poles: Sequence[PoleSubtraction], tol: float = QUAD_TOL,
                             separation: float = POLE_SEPARATION) -> float:
    """Cauchy principal value by analytic subtraction of simple poles.

    Computes ``int [fn - sum c_i/(p - p_i)] dp + sum c_i ln((hi - p_i)/(p_i - lo))``.
    The bracketed integrand has removable singularities and is integrated
    adaptively with breakpoints at the poles.  For ``lo = -inf, hi = +inf``
    the logarithms vanish (symmetric limit) and the residues must sum to zero
    so that the subtracted integrand stays integrable.
    """
    poles = list(poles)
    locs = sorted(pl.pole for pl in poles)
    for pl in poles:
        lo_gap = pl.lo_gap if pl.lo_gap is not None else pl.pole - lo
        hi_gap = pl.hi_gap if pl.hi_gap is not None else hi - pl.pole
        if not (lo_gap > 0 and hi_gap > 0):
            raise PoleError(f"pole {pl.pole} is not strictly inside [{lo}, {hi}]")
        if pl.lo_gap is None and pl.hi_gap is None and min(lo_gap, hi_gap) <= separation:
            raise PoleError(f"pole {pl.pole} lies within {separation} of the boundary")
        if not (math.isfinite(pl.residue) and pl.residue != 0.0):
            raise PoleError(f"residue at {pl.pole} must be finite and nonzero")
    for left, right in zip(locs, locs[1:]):
        if right - left <= separation:
            raise PoleError(f"poles {left} and {right} are closer than {separation}")

    both_infinite = math.isinf(lo) and math.isinf(hi)
    if (math.isinf(lo) or math.isinf(hi)) and not both_infinite:
        raise ValueError("a principal value over a half-infinite range is not defined here")
    if both_infinite:
        total = sum(pl.residue for pl in poles)
        if abs(total) > 1e-12 * sum(abs(pl.residue) for pl in poles):
            raise ValueError("residues must cancel for an integral over the whole line")

    def subtracted(p):
        if p in locs:
            # removable point; happens when a segment is only a few ulps wide
            p = math.nextafter(p, math.inf)
        value = fn(p)
        for pl in poles:
            value -= pl.residue / (p - pl.pole)
        return value

    breaks = list(locs)
    if not both_infinite:
        breaks += _graded_points(poles, lo, hi)
    result = integrate_adaptive(subtracted, lo, hi, tol=tol, points=breaks).value
    if not both_infinite:
        for pl in poles:
            lo_gap = pl.lo_gap if pl.lo_gap is not None else pl.pole - lo
            hi_gap = pl.hi_gap if pl.hi_gap is not None else hi - pl.pole
            result += pl.residue * math.log(hi_gap / lo_gap)
    return float(result)


def find_root_bracketed(fn: Callable[[float], float], lo: float, hi: float,
                        tol: float = ROOT_TOL, maxiter: int = 200) -> float:
    """Root of ``fn`` in ``[lo, hi]`` by Brent's method (bisection plus secant/IQI steps)."""
    f_lo, f_hi = fn(lo), fn(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoSignChangeError(
            f"no sign change on [{lo}, {hi}]: f(lo)={f_lo:.6g}, f(hi)={f_hi:.6g}")
    root, info = optimize.brentq(fn, lo, hi, xtol=tol, maxiter=maxiter,
                                 full_output=True, disp=False)
    if not info.converged:
        raise BudgetExceededError(f"root search did not converge in {maxiter} iterations",
                                  best_estimate=root)
    return float(min(max(root, lo), hi))


def _fourier_segment(fn, lo, hi, omega, tol, limit):
    """``int_lo^hi fn(p) exp(i omega p) dp`` on one smooth segment."""
    w = abs(omega)
    sgn = 1.0 if omega >= 0 else -1.0
    if math.isinf(lo):
        # reflect onto [-hi, inf)
        return _fourier_segment(lambda u: fn(-u), -hi, math.inf, -omega, tol, limit)

    def part(g, weight):
        kwargs = dict(weight=weight, wvar=w, epsabs=tol, limit=limit)
        if math.isinf(hi):
            kwargs.update(limlst=100)
        else:
            kwargs.update(epsrel=tol, maxp1=100)
        return _run_quad(g, lo, hi, "oscillatory integral", **kwargs)[0]

    re = lambda p: fn(p).real
    im = lambda p: fn(p).imag
    c_re, c_im = part(re, "cos"), part(im, "cos")
    s_re, s_im = sgn * part(re, "sin"), sgn * part(im, "sin")
    return complex(c_re - s_im, s_re + c_im)


def fourier_integral(fn: Callable[[float], complex], lo: float, hi: float, omega: float,
                     points: Iterable[float] = (), tol: float = QUAD_TOL,
                     limit: int = QUAD_LIMIT) -> complex:
    """``int fn(p) exp(i omega p) dp`` with the oscillation handled by QUADPACK's
    Chebyshev-moment rules (QAWO on finite pieces, QAWF on infinite tails).

    ``points`` split the range into pieces; integrand peaks belong there.
    """
    if omega == 0.0:
        return complex(integrate_adaptive(fn, lo, hi, tol=tol, points=points,
                                          limit=limit).value)
    cuts = [lo] + sorted(p for p in points if lo < p < hi) + [hi]
    return sum(_fourier_segment(fn, s0, s1, omega, tol, limit)
               for s0, s1 in zip(cuts, cuts[1:]))


def _neville_at_zero(xs: Sequence[float], ys: Sequence[complex]) -> complex:
    table = list(ys)
    n = len(xs)
    for m in range(1, n):
        for i in range(n - m):
            table[i] = (xs[i] * table[i + 1] - xs[i + m] * table[i]) / (xs[i] - xs[i + m])
    return table[0]


def extrapolate_to_zero(eps: Sequence[float], values: Sequence[complex], order: int = 2,
                        atol: float = 1e-9) -> complex:
    """Polynomial extrapolation of ``values(eps)`` to ``eps = 0``.

    Uses the ``order + 1`` smallest ``eps``.  When more points are available,
    the estimate from the preceding window must sit closer to the final one
    than the last two raw values sit to each other, otherwise
    :class:`ExtrapolationError` is raised.
    """
    if len(eps) < order + 1:
        raise ValueError(f"need at least {order + 1} damping values for order {order}")
    width = order + 1
    estimates = [_neville_at_zero(eps[i:i + width], values[i:i + width])
                 for i in range(len(eps) - width + 1)]
    final = estimates[-1]
    if len(estimates) > 1:
        spread = abs(estimates[-1] - estimates[-2])
        raw = abs(values[-1] - values[-2])
        if spread > max(raw, atol * (1.0 + abs(final))):
            raise ExtrapolationError(
                f"damped estimates do not contract: extrapolant spread {spread:.3g} "
                f"exceeds raw step {raw:.3g}")
    return final


def oscillatory_integral_damped(fn: Callable[[float, float], complex], lo: float, hi: float,
                                phase_rate: float,
                                eps_schedule: Sequence[float] = DEFAULT_EPS_SCHEDULE,
                                points: Iterable[float] = (), order: int = 2,
                                tol: float = QUAD_TOL) -> complex:
    """Limit ``eps -> +0`` of ``int fn(p, eps) exp(i phase_rate p) dp``.

    ``fn(p, eps)`` is the non-oscillatory factor with its singular denominator
    already shifted by ``-i eps``.  The integral is evaluated for each value of
    the strictly decreasing ``eps_schedule`` and extrapolated to zero.
    """
    eps_schedule = [float(e) for e in eps_schedule]
    if any(e <= 0 for e in eps_schedule) or any(
            b >= a for a, b in zip(eps_schedule, eps_schedule[1:])):
        raise ValueError("eps_schedule must be strictly decreasing positive values")
    points = list(points)
    values = [fourier_integral(lambda p, e=e: fn(p, e), lo, hi, phase_rate, points, tol)
              for e in eps_schedule]
    return complex(extrapolate_to_zero(eps_schedule, values, order=order))


def cosine_transform_grid(h: Callable[[np.ndarray], np.ndarray], b: float,
                          xs: np.ndarray, hbar: float = 1.0, nodes: int = 16) -> np.ndarray:
    """``2 int_0^b cos(p x / hbar) h(p) dp`` for every ``x`` in ``xs``.

    Vectorised composite Gauss-Legendre; panels are at most half an
    oscillation period of the largest ``|x|`` wide.  ``h`` must be smooth on
    ``[0, b]`` and ``b`` finite.
    """
    xs = np.asarray(xs, dtype=float)
    xmax = float(np.max(np.abs(xs))) if xs.size else 0.0
    n_panels = max(8, int(math.ceil(b * xmax / (math.pi * hbar))) + 1)
    t, wt = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(0.0, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    p = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    w = (half[:, None] * wt[None, :]).ravel() * np.asarray(h(p), dtype=float)
    out = np.empty_like(xs)
    chunk = max(1, 4_000_000 // p.size)
    for start in range(0, xs.size, chunk):
        sl = slice(start, start + chunk)
        out[sl] = 2.0 * np.cos(np.outer(xs[sl], p) / hbar) @ w
    return out
