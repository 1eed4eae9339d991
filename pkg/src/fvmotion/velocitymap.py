"""Motions with space-varying speed v(x) as monotone transforms of a telegraph process.

With W(x) = c * int_{x0}^x dw / v(w), the position is X(t) = Winv(T(t)) where
T is a telegraph process of speed c. Zeros of v where it vanishes linearly
are never reached; sublinear zeros (the power family) are reached at the
finite time t* and need a reflect or absorb rule beyond it.
"""

from dataclasses import dataclass, field
import math
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from . import telegraph as tg
from .distributions import AnalyticDensity, DomainError
from .eulergen import euler_value
from .quadrature import adaptive_simpson
from .specfun import bessel_ie

FAMILIES = ("constant", "linear", "power", "logistic", "symlogistic", "numeric")


class ModelError(DomainError):
    """The requested quantity is not available for this velocity model."""


@dataclass(frozen=True)
class Barrier:
    location: float
    reachable: bool
    t_star: Optional[float] = None


@dataclass(frozen=True)
class VelocityModel:
    """Speed profile with its integral map W and inverse.

    ``lower`` and ``upper`` bound the open state space; ``barriers`` maps
    "lower"/"upper" to a :class:`Barrier` for finite bounds where v vanishes.
    """

    family: str
    c: float
    x0: float
    v: Callable = field(repr=False)
    W: Callable = field(repr=False)
    Winv: Callable = field(repr=False)
    lower: float = -math.inf
    upper: float = math.inf
    barriers: dict = field(default_factory=dict)
    alpha: Optional[float] = None
    variant: Optional[str] = None

    @property
    def t_star(self):
        """Hitting time of the nearest reachable barrier (inf if none)."""
        ts = [b.t_star for b in self.barriers.values() if b.reachable]
        return min(ts) if ts else math.inf


def _pos(name, val):
    if not (math.isfinite(val) and val > 0):
        raise DomainError(f"{name} must be positive and finite, got {val}")


def constant(c, x0=0.0):
    _pos("c", c)
    return VelocityModel("constant", c, x0, v=lambda x: c + 0.0 * np.asarray(x),
                         W=lambda x: np.asarray(x, dtype=float) - x0,
                         Winv=lambda z: x0 + np.asarray(z, dtype=float))


def linear(c, x0=1.0):
    """v(x) = c x; X(t) = x0 exp(T(t)) is the geometric telegraph process."""
    _pos("c", c)
    _pos("x0", x0)
    return VelocityModel("linear", c, x0, v=lambda x: c * np.asarray(x, dtype=float),
                         W=lambda x: np.log(np.asarray(x, dtype=float) / x0),
                         Winv=lambda z: x0 * np.exp(z), lower=0.0,
                         barriers={"lower": Barrier(0.0, False)})


def power(c, alpha, x0=1.0, variant=None):
    """v(x) = c x**alpha with 0 < alpha < 1; zero is reached at t*.

    ``variant`` is "reflect" or "absorb" and fixes the behaviour after t*.
    """
    _pos("c", c)
    _pos("x0", x0)
    if not 0 < alpha < 1:
        raise DomainError("power family needs 0 < alpha < 1")
    if variant not in (None, "reflect", "absorb"):
        raise DomainError(f"unknown power variant {variant!r}")
    k = 1.0 - alpha
    base = x0 ** k

    def W(x):
        return (np.asarray(x, dtype=float) ** k - base) / k

    def Winv(z):
        return (base + k * np.asarray(z, dtype=float)) ** (1.0 / k)

    t_star = base / (c * k)
    return VelocityModel("power", c, x0, v=lambda x: c * np.asarray(x, dtype=float) ** alpha,
                         W=W, Winv=Winv, lower=0.0,
                         barriers={"lower": Barrier(0.0, True, t_star)},
                         alpha=float(alpha), variant=variant)


def logistic(c, x0=0.5):
    """v(x) = c x (1 - x) on (0, 1); both ends are unreachable."""
    _pos("c", c)
    if not 0 < x0 < 1:
        raise DomainError("logistic family needs 0 < x0 < 1")
    lo = math.log(x0 / (1 - x0))

    def W(x):
        x = np.asarray(x, dtype=float)
        return np.log(x / (1 - x)) - lo

    def Winv(z):
        ez = np.exp(np.asarray(z, dtype=float))
        return x0 * ez / (1 - x0 * (1 - ez))

    return VelocityModel("logistic", c, x0,
                         v=lambda x: c * np.asarray(x, dtype=float) * (1 - np.asarray(x, dtype=float)),
                         W=W, Winv=Winv, lower=0.0, upper=1.0,
                         barriers={"lower": Barrier(0.0, False), "upper": Barrier(1.0, False)})


def symlogistic(c, x0=0.0):
    """v(x) = c (1 - x^2) on (-1, 1); X(t) = tanh(T(t) + atanh x0)."""
    _pos("c", c)
    if not -1 < x0 < 1:
        raise DomainError("symlogistic family needs -1 < x0 < 1")
    a0 = math.atanh(x0)
    return VelocityModel("symlogistic", c, x0,
                         v=lambda x: c * (1 - np.asarray(x, dtype=float) ** 2),
                         W=lambda x: np.arctanh(np.asarray(x, dtype=float)) - a0,
                         Winv=lambda z: np.tanh(np.asarray(z, dtype=float) + a0),
                         lower=-1.0, upper=1.0,
                         barriers={"lower": Barrier(-1.0, False), "upper": Barrier(1.0, False)})


def numeric(v, c, x0, lower=-math.inf, upper=math.inf, tol=1e-10):
    """Generic model: W by adaptive quadrature and Winv by root finding.

    ``v`` is a scalar function, positive on (lower, upper). Barriers are not
    classified; the model is meant for cross-checks of the closed forms.
    """
    _pos("c", c)
    if not lower < x0 < upper:
        raise DomainError("x0 must lie inside (lower, upper)")

    def W1(x):
        if not lower < x < upper:
            raise DomainError(f"x={x} outside ({lower}, {upper})")
        return c * adaptive_simpson(lambda w: 1.0 / v(w), x0, x, tol=tol)

    def W(x):
        x = np.asarray(x, dtype=float)
        out = np.array([W1(float(xi)) for xi in x.ravel()]).reshape(x.shape)
        return float(out) if out.ndim == 0 else out

    def bracket(z):
        # walk away from x0, halving the gap to a finite bound each time
        gap = 1.0
        for _ in range(200):
            if z >= 0:
                x = upper - (upper - x0) * gap if math.isfinite(upper) else x0 + 1.0 / gap
                if W1(x) >= z:
                    return x0, x
            else:
                x = lower + (x0 - lower) * gap if math.isfinite(lower) else x0 - 1.0 / gap
                if W1(x) <= z:
                    return x, x0
            gap *= 0.5
        raise DomainError(f"W does not reach {z}")

    def Winv1(z):
        if z == 0:
            return x0
        a, b = bracket(z)
        return brentq(lambda x: W1(x) - z, a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps)

    def Winv(z):
        z = np.asarray(z, dtype=float)
        out = np.array([Winv1(float(zi)) for zi in z.ravel()]).reshape(z.shape)
        return float(out) if out.ndim == 0 else out

    return VelocityModel("numeric", c, x0, v=v, W=W, Winv=Winv, lower=lower, upper=upper)


# ---------------------------------------------------------------------------
# paths and samples
# ---------------------------------------------------------------------------

def _needs_variant(model):
    if model.family == "power" and model.variant is None:
        raise ModelError("power family reaches 0 in finite time; choose variant "
                         "'reflect' or 'absorb'")


def _power_map(model, z):
    k = 1.0 - model.alpha
    return np.abs(model.x0 ** k + k * np.asarray(z, dtype=float)) ** (1.0 / k)


def transform_path(model: VelocityModel, path: tg.PathSample):
    """X(t) = Winv(T(t)) for one telegraph path, as a function of t."""
    _needs_variant(model)
    if path.params.c != model.c:
        raise DomainError("telegraph path speed must equal the model's c")
    if model.family == "power":
        if model.variant == "reflect":
            return lambda t: _power_map(model, path.position(t))
        level = -model.x0 ** (1 - model.alpha) / (1 - model.alpha)
        tau0 = path.first_passage_below(level)
        return lambda t: _power_map(model, path.position(np.minimum(t, tau0)))
    return lambda t: model.Winv(path.position(t))


def sample_x(model: VelocityModel, lam, t, size, rng):
    """X(t) for ``size`` independent paths."""
    _needs_variant(model)
    params = tg.TelegraphParams(lam, model.c)
    if model.family == "power" and model.variant == "absorb":
        z, low = tg.sample_endpoints(params, t, size, rng, return_min=True)
        level = -model.x0 ** (1 - model.alpha) / (1 - model.alpha)
        # absorbed paths freeze at the barrier, which maps to exactly 0
        return np.where(low <= level, 0.0, _power_map(model, z))
    z = tg.sample_endpoints(params, t, size, rng)
    if model.family == "power":
        return _power_map(model, z)
    return model.Winv(z)


# ---------------------------------------------------------------------------
# analytic law
# ---------------------------------------------------------------------------

def _check_time(model, t):
    if not t > 0:
        raise DomainError("t must be positive")
    if t >= model.t_star:
        raise ModelError(f"analytic law only available for t < t* = {model.t_star:.17g}")


def support(model: VelocityModel, t):
    """Endpoints (Winv(-ct), Winv(ct)); each carries an atom exp(-lambda t)/2."""
    _check_time(model, t)
    ct = model.c * t
    return float(model.Winv(-ct)), float(model.Winv(ct))


def density_x(model: VelocityModel, lam, x, t):
    """Continuous density of X(t): c p(W(x), t) / v(x) inside the support."""
    _check_time(model, t)
    lo, hi = support(model, t)
    x = np.asarray(x, dtype=float)
    if np.any(x <= lo) or np.any(x >= hi):
        raise DomainError(f"x outside the open support ({lo:.17g}, {hi:.17g})")
    return _density_raw(model, lam, x, t)


def _density_raw(model, lam, x, t):
    x = np.asarray(x, dtype=float)
    val = model.c * tg.kernel(lam, model.c, model.W(x), t, lam) / model.v(x)
    return val


def law(model: VelocityModel, lam, t) -> AnalyticDensity:
    lo, hi = support(model, t)
    m = 0.5 * math.exp(-lam * t)
    mid = float(model.Winv(0.0))

    ct = model.c * t

    def cont(x):
        x = np.asarray(x, dtype=float)
        inside = (x >= lo) & (x <= hi)
        xs = np.where(inside, x, mid)
        # W(Winv(+-ct)) can overshoot ct by rounding; the density has a
        # finite limit there, so evaluate on the closed interval
        z = np.clip(model.W(xs), -ct, ct)
        val = model.c * tg.kernel(lam, model.c, z, t, lam) / model.v(xs)
        return np.where(inside, val, 0.0)

    return AnalyticDensity(continuous=cont, support=(lo, hi), atoms=[(lo, m), (hi, m)],
                           breakpoints=(mid,))


# ---------------------------------------------------------------------------
# moments of the logistic process
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeriesResult:
    """Truncated series with the magnitude of the last term used."""

    value: float
    last_term: float
    terms: int
    warning: bool
    note: str = ""

    def __float__(self):
        return self.value


def convergence_radius(x0):
    """Distance from 0 to the nearest complex pole of the moment generating map."""
    theta = x0 / (1 - x0)
    return math.hypot(math.log(theta), math.pi)


def _check_logistic_args(a, x0, N):
    if not a > 0:
        raise DomainError("a must be positive")
    if not 0 < x0 < 1:
        raise DomainError("x0 must lie in (0, 1)")
    if not 0 <= N <= 30:
        raise DomainError("truncation N must satisfy 0 <= N <= 30")


def logistic_moment(a, params: tg.TelegraphParams, x0, t, N=30) -> SeriesResult:
    """E[X(t)^a] for the logistic process by its generalized-Euler series.

    Term n is E_{2n}(a) / (2n)! times the 2n-th moment of T(t). The series
    converges for ct below the radius sqrt(log^2 theta + pi^2),
    theta = x0/(1-x0); otherwise, or if the last term is not below 1e-8 of
    the sum, the result carries ``warning=True``.
    """
    N = int(N)
    _check_logistic_args(a, x0, N)
    if t == 0:
        return SeriesResult(x0 ** a, 0.0, 1, False)
    if not t > 0:
        raise DomainError("t must be non-negative")
    theta = x0 / (1 - x0)
    lt = params.lam * t
    terms = []
    for n in range(N + 1):
        e = euler_value(2 * n, a, theta, a)
        if e == 0.0:
            terms.append(0.0)
            continue
        log_mag = (n * math.log(2 * params.c ** 2 * t / params.lam) + 0.5 * math.log(lt / 2)
                   + math.lgamma(n + 0.5) - math.lgamma(2 * n + 1))
        bes = bessel_ie(n + 0.5, lt) + bessel_ie(n - 0.5, lt)
        terms.append(e * math.exp(log_mag) * bes)
    value = x0 ** a * math.fsum(terms)
    last = abs(x0 ** a * terms[-1])
    notes = []
    if params.c * t >= convergence_radius(x0):
        notes.append("ct beyond the convergence radius")
    if last > 1e-8 * abs(value):
        notes.append("last term above 1e-8 of the sum")
    return SeriesResult(value, last, N + 1, bool(notes), "; ".join(notes))


def logistic_moment_hydro(a, x0, t, N=30) -> SeriesResult:
    """Hydrodynamic-limit moment E[X^a] with X a logistic map of B(t) ~ N(0, t).

    The series sum Gamma(n+1/2) E_{2n}(a) (2t)^n / ((2n)! sqrt(pi)) is
    asymptotic (its terms eventually grow factorially), so the partial sum
    stops at the smallest term when that comes before N.
    """
    N = int(N)
    _check_logistic_args(a, x0, N)
    if t == 0:
        return SeriesResult(x0 ** a, 0.0, 1, False)
    if not t > 0:
        raise DomainError("t must be non-negative")
    theta = x0 / (1 - x0)
    terms = []
    best = math.inf
    stopped = False
    for n in range(N + 1):
        e = euler_value(2 * n, a, theta, a)
        log_mag = (n * math.log(2 * t) + math.lgamma(n + 0.5) - math.lgamma(2 * n + 1)
                   - 0.5 * math.log(math.pi))
        term = e * math.exp(log_mag)
        if n > 0 and term != 0.0 and abs(term) > best:
            stopped = True
            break
        terms.append(term)
        if term != 0.0:
            best = abs(term)
    value = x0 ** a * math.fsum(terms)
    last = abs(x0 ** a * terms[-1])
    warn = last > 1e-8 * abs(value)
    note = "stopped at the smallest term" if stopped else ""
    if warn:
        note = (note + "; " if note else "") + "last term above 1e-8 of the sum"
    return SeriesResult(value, last, len(terms), warn, note)
