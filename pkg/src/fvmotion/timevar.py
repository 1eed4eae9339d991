"""Telegraph motion with time-dependent speed c sigma(t).

The position is the Stieltjes integral X(t) = int_0^t sigma(u) dT(u) against a
standard telegraph process, i.e. the sum over free-flight segments of
+-c int sigma. Its covariance is

    E[X(s) X(t)] = c^2 int_0^t int_0^s exp(-2 lambda |x - y|) sigma(x) sigma(y) dy dx,

and with lambda = c^2 -> infinity X approaches int sigma dB, a centered
Gaussian process with covariance int_0^{s^t} sigma^2.
"""

from dataclasses import dataclass, field
import math
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator

from . import telegraph as tg
from .distributions import DomainError
from .quadrature import adaptive_simpson

QUAD_TOL = 1e-10
_CUTOFF = 40.0


@dataclass(frozen=True)
class SigmaProfile:
    """Speed profile sigma(t) >= 0, continuous on [0, inf).

    ``antiderivative`` (int_0^t sigma) and ``antiderivative_sq``
    (int_0^t sigma^2) are optional closed forms; without them the module
    falls back to adaptive quadrature.
    """

    sigma: Callable = field(repr=False)
    antiderivative: Optional[Callable] = field(default=None, repr=False)
    antiderivative_sq: Optional[Callable] = field(default=None, repr=False)
    name: str = "custom"

    def __call__(self, t):
        return self.sigma(t)

    def integral(self, a, b):
        """int_a^b sigma."""
        if self.antiderivative is not None:
            return float(self.antiderivative(b) - self.antiderivative(a))
        return adaptive_simpson(lambda u: float(self.sigma(u)), a, b, tol=QUAD_TOL)

    def integral_sq(self, t):
        """int_0^t sigma^2."""
        if self.antiderivative_sq is not None:
            return float(self.antiderivative_sq(t))
        return adaptive_simpson(lambda u: float(self.sigma(u)) ** 2, 0.0, t, tol=QUAD_TOL)

    def scaled(self, k):
        """Profile k * sigma."""
        a = None if self.antiderivative is None else (lambda t: k * self.antiderivative(t))
        a2 = None if self.antiderivative_sq is None else (lambda t: k * k * self.antiderivative_sq(t))
        return SigmaProfile(lambda t: k * self.sigma(t), a, a2, f"{k:g}*{self.name}")


def constant(k=1.0):
    return SigmaProfile(lambda t: k + 0.0 * np.asarray(t, dtype=float),
                        lambda t: k * np.asarray(t, dtype=float),
                        lambda t: k * k * np.asarray(t, dtype=float), "const")


def linear(a=1.0, b=0.0):
    """sigma(t) = a t + b with a, b >= 0."""
    if a < 0 or b < 0 or a == b == 0:
        raise DomainError("linear profile needs a, b >= 0, not both zero")

    def s2(t):
        t = np.asarray(t, dtype=float)
        return a * a * t ** 3 / 3 + a * b * t ** 2 + b * b * t

    return SigmaProfile(lambda t: a * np.asarray(t, dtype=float) + b,
                        lambda t: 0.5 * a * np.asarray(t, dtype=float) ** 2 + b * np.asarray(t, dtype=float),
                        s2, "linear")


def tabulated(knots, values):
    """Monotone-cubic interpolation of (t, sigma) knots; flat beyond the last knot."""
    knots = np.asarray(knots, dtype=float)
    values = np.asarray(values, dtype=float)
    if knots.ndim != 1 or knots.size < 2 or knots.size != values.size:
        raise DomainError("tabulated profile needs at least two (t, sigma) knots")
    if knots[0] != 0.0 or np.any(np.diff(knots) <= 0):
        raise DomainError("knots must start at 0 and increase strictly")
    if np.any(values < 0):
        raise DomainError("sigma must be non-negative")
    spline = PchipInterpolator(knots, values, extrapolate=False)
    prim = spline.antiderivative()
    t_end, s_end = knots[-1], values[-1]
    total = float(prim(t_end))

    def sigma(t):
        t = np.asarray(t, dtype=float)
        return np.where(t <= t_end, spline(np.minimum(t, t_end)), s_end)

    def anti(t):
        t = np.asarray(t, dtype=float)
        return np.where(t <= t_end, prim(np.minimum(t, t_end)), total + s_end * (t - t_end))

    return SigmaProfile(sigma, anti, None, "table")


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TimeVarPath:
    """X on [0, horizon] built from one telegraph path."""

    path: tg.PathSample
    profile: SigmaProfile

    def position(self, t):
        t = float(t)
        if t < 0 or t > self.path.horizon * (1 + 1e-12):
            raise DomainError("path evaluated outside [0, horizon]")
        knots = np.minimum(self.path.knots, t)
        pieces = [self.profile.integral(a, b) for a, b in zip(knots[:-1], knots[1:]) if b > a]
        signs = self.path.initial_direction * (-1.0) ** np.arange(len(pieces))
        return self.path.params.c * math.fsum(signs * np.array(pieces))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            return self.position(float(t))
        return np.array([self.position(float(v)) for v in t.ravel()]).reshape(t.shape)

    @property
    def endpoint(self):
        return self.position(self.path.horizon)


def sample_path(profile: SigmaProfile, params: tg.TelegraphParams, horizon, rng) -> TimeVarPath:
    return TimeVarPath(tg.sample_path(params, horizon, rng), profile)


def _primitive_table(profile, horizon, cells=4096):
    """Callable int_0^t sigma on [0, horizon].

    The closed form is used when present; otherwise a Hermite spline through
    adaptive-Simpson values of the primitive, with sigma as its slope.
    """
    if profile.antiderivative is not None:
        return lambda t: profile.antiderivative(t) - profile.antiderivative(0.0)
    grid = np.linspace(0.0, horizon, cells + 1)
    pieces = [adaptive_simpson(lambda u: float(profile.sigma(u)), a, b, tol=QUAD_TOL / cells)
              for a, b in zip(grid[:-1], grid[1:])]
    vals = np.concatenate([[0.0], np.cumsum(pieces)])
    return CubicHermiteSpline(grid, vals, np.asarray(profile.sigma(grid), dtype=float))


def sample_endpoints(profile: SigmaProfile, params: tg.TelegraphParams, times, size, rng):
    """X at each of ``times`` for ``size`` paths; shape (size,) for scalar
    ``times`` and (size, len(times)) otherwise."""
    scalar = np.ndim(times) == 0
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times <= 0):
        raise DomainError("times must be positive")
    horizon = float(times.max())
    prim = _primitive_table(profile, horizon)
    size = int(size)
    out = np.empty((size, times.size))
    mean = params.lam * horizon
    step = tg.chunk_rows(size, int(mean + 8 * math.sqrt(mean) + 10))
    for start in range(0, size, step):
        m = min(step, size - start)
        v0 = np.where(rng.random(m) < 0.5, 1.0, -1.0)
        ev = tg.switching_times(rng, params.lam, horizon, m)
        sign = (-1.0) ** np.arange(ev.shape[1])
        for i, t in enumerate(times):
            s = prim(np.minimum(ev, t))
            seg = np.diff(s, axis=1, prepend=0.0)
            out[start:start + m, i] = params.c * v0 * (seg @ sign)
    return out[:, 0] if scalar else out


# ---------------------------------------------------------------------------
# covariance
# ---------------------------------------------------------------------------

def _inner(profile, lam, x, d_lo, d_hi, tol):
    """int_{d_lo}^{d_hi} exp(-2 lam d) sigma(x - d) dd, with d = |x - y|.

    The weight decays on the scale 1/lam, so the range is cut at
    d_lo + 40/lam (relative weight e^-80) and split at a few multiples of
    1/lam; the integrand is then smooth on every piece for any lambda.
    """
    d_end = min(d_hi, d_lo + _CUTOFF / lam)
    if d_end <= d_lo:
        return 0.0
    f = lambda d: math.exp(-2 * lam * (d - d_lo)) * float(profile.sigma(x - d))
    cuts = tuple(d_lo + k / lam for k in (0.25, 1, 3, 8, 20) if d_lo + k / lam < d_end)
    return math.exp(-2 * lam * d_lo) * adaptive_simpson(
        f, d_lo, d_end, tol=tol * min(1.0, 1.0 / (2 * lam)), breakpoints=cuts)


def covariance(profile: SigmaProfile, params: tg.TelegraphParams, s, t, tol=1e-11):
    """E[X(s) X(t)] by nested adaptive quadrature.

    The domain [0, t] x [0, s] (s <= t) is split along x = y into the
    square part, counted twice by symmetry, and the strip x in (s, t).
    """
    if s < 0 or t < 0:
        raise DomainError("s and t must be non-negative")
    s, t = min(s, t), max(s, t)
    if s == 0:
        return 0.0
    lam, c = params.lam, params.c
    sig = lambda x: float(profile.sigma(x))
    # boundary layer of width ~1/lambda next to x = s in the strip
    layer = tuple(s + k / lam for k in (1, 4, 16, 64) if s + k / lam < t)
    square = adaptive_simpson(lambda x: sig(x) * _inner(profile, lam, x, 0.0, x, tol), 0.0, s,
                              tol=tol, breakpoints=tuple(k / lam for k in (1, 4, 16) if k / lam < s))
    strip = 0.0
    if t > s:
        strip = adaptive_simpson(lambda x: sig(x) * _inner(profile, lam, x, x - s, x, tol), s, t,
                                 tol=tol, breakpoints=layer)
    return c * c * (2.0 * square + strip)


def covariance_const(params: tg.TelegraphParams, s, t):
    """Closed form of the covariance for sigma = 1."""
    s, t = min(s, t), max(s, t)
    lam, c = params.lam, params.c
    lam2 = lam * lam
    return c * c * (s / lam + math.expm1(-2 * lam * s) / (2 * lam2)
                    + (1 - math.exp(-2 * lam * s) - math.exp(-2 * lam * (t - s))
                       + math.exp(-2 * lam * t)) / (4 * lam2))


def limit_covariance(profile: SigmaProfile, s, t):
    """int_0^{min(s, t)} sigma^2, the covariance of int sigma dB."""
    if s < 0 or t < 0:
        raise DomainError("s and t must be non-negative")
    return profile.integral_sq(min(s, t))


def limit_density(profile: SigmaProfile, x, t):
    """Centered Gaussian density with variance int_0^t sigma^2."""
    if not t > 0:
        raise DomainError("t must be positive")
    var = profile.integral_sq(t)
    if not var > 0:
        raise DomainError("the profile has zero mass on [0, t]")
    x = np.asarray(x, dtype=float)
    out = np.exp(-0.5 * x * x / var) / math.sqrt(2 * math.pi * var)
    return float(out) if out.ndim == 0 else out
