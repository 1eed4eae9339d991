"""Motion on (0, 1) whose speed depends on the direction of travel.

Moving right (direction d0) the speed is c (1 - x), moving left (d1) it is
c x. Between switches the position relaxes exponentially towards 1 or 0:

    X(T_k) = X(T_{k-1}) e^{-c dT} + (1 - e^{-c dT}) 1{D = d0}.

Conditional on N(t) = n the switch times are uniform order statistics, and
E[exp(c T_j) | N(t) = n] = 1F1(j; n+1; ct), which gives the conditional
means as alternating sums of Kummer functions.
"""

from dataclasses import dataclass
import math
from typing import Optional

import numpy as np

from .distributions import DomainError
from .mcharness import aux_stream
from .specfun import hyp1f1_scaled
from .telegraph import poisson_event_times

D0, D1 = 0, 1


@dataclass(frozen=True)
class DirDepParams:
    lam: float
    c: float
    x0: float
    d0_start: Optional[int] = None

    def __post_init__(self):
        for name in ("lam", "c"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive and finite, got {v}")
        if not 0.0 < self.x0 < 1.0:
            raise DomainError("x0 must lie strictly inside (0, 1)")
        if self.d0_start not in (None, D0, D1):
            raise DomainError("d0_start must be None, 0 (d0) or 1 (d1)")


def _relax(x, y, going_right, dt, c):
    """One segment of length ``dt`` for the pair (x, 1 - x).

    Both coordinates are updated multiplicatively on the side they shrink,
    so neither rounds to 0 or 1 on its own.
    """
    e = np.exp(-c * dt)
    g = -np.expm1(-c * dt)
    x_new = np.where(going_right, x + y * g, x * e)
    y_new = np.where(going_right, y * e, y + x * g)
    return x_new, y_new


@dataclass(frozen=True)
class DirDepPath:
    horizon: float
    initial_direction: int
    event_times: np.ndarray
    params: DirDepParams

    def _knots(self):
        knots = np.concatenate([[0.0], self.event_times])
        xs, ys = [self.params.x0], [1.0 - self.params.x0]
        for k in range(1, knots.size):
            right = (self.initial_direction + k - 1) % 2 == D0
            x, y = _relax(xs[-1], ys[-1], right, knots[k] - knots[k - 1], self.params.c)
            xs.append(float(x))
            ys.append(float(y))
        return knots, np.array(xs), np.array(ys)

    def position(self, t, complement=False):
        """X(t) (or 1 - X(t) with ``complement``), vectorized over t."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.horizon * (1 + 1e-12)):
            raise DomainError("path evaluated outside [0, horizon]")
        knots, xs, ys = self._knots()
        k = np.searchsorted(knots, t, side="right") - 1
        k = np.clip(k, 0, knots.size - 1)
        right = (self.initial_direction + k) % 2 == D0
        x, y = _relax(xs[k], ys[k], right, t - knots[k], self.params.c)
        out = y if complement else x
        return float(out) if np.ndim(out) == 0 else out

    def __call__(self, t):
        return self.position(t)

    @property
    def knot_values(self):
        """X at 0 and at every switch time."""
        return self._knots()[1]


def sample_path(params: DirDepParams, horizon, rng) -> DirDepPath:
    if not horizon > 0:
        raise DomainError("horizon must be positive")
    if params.d0_start is None:
        d = D0 if rng.random() < 0.5 else D1
    else:
        d = params.d0_start
    events = poisson_event_times(rng, params.lam, horizon)
    return DirDepPath(float(horizon), d, events, params)


def sample_endpoints(params: DirDepParams, t, size, rng, complement=False):
    """X(t) for ``size`` paths; events are generated column by column so the
    memory use does not grow with lambda t."""
    if not t > 0:
        raise DomainError("t must be positive")
    size = int(size)
    if params.d0_start is None:
        d = np.where(rng.random(size) < 0.5, D0, D1)
    else:
        d = np.full(size, params.d0_start)
    x = np.full(size, params.x0)
    y = np.full(size, 1.0 - params.x0)
    clock = np.zeros(size)
    active = np.ones(size, dtype=bool)
    while np.any(active):
        idx = np.nonzero(active)[0]
        gap = rng.standard_exponential(idx.size) / params.lam
        stop = clock[idx] + gap >= t
        dt = np.where(stop, t - clock[idx], gap)
        x[idx], y[idx] = _relax(x[idx], y[idx], d[idx] == D0, dt, params.c)
        clock[idx] += dt
        d[idx] = np.where(stop, d[idx], 1 - d[idx])
        active[idx[stop]] = False
    return y if complement else x


def sample_conditional(params: DirDepParams, d_start, n, t, size, rng):
    """X(t) given D(0) = ``d_start`` and N(t) = n (stratified: the switch
    times are sorted uniforms on (0, t))."""
    if d_start not in (D0, D1):
        raise DomainError("d_start must be 0 (d0) or 1 (d1)")
    n = int(n)
    if n < 0:
        raise DomainError("n must be non-negative")
    size = int(size)
    times = np.sort(rng.random((size, n)) * t, axis=1)
    knots = np.concatenate([np.zeros((size, 1)), times, np.full((size, 1), t)], axis=1)
    x = np.full(size, params.x0)
    y = np.full(size, 1.0 - params.x0)
    for k in range(n + 1):
        right = (d_start + k) % 2 == D0
        x, y = _relax(x, y, right, knots[:, k + 1] - knots[:, k], params.c)
    return x


# ---------------------------------------------------------------------------
# analytic means
# ---------------------------------------------------------------------------

def _alt_kummer_sum(n, z):
    return math.fsum((-1) ** j * hyp1f1_scaled(j, n + 1, z) for j in range(n + 1))


def cond_mean(params: DirDepParams, d_start, n, t):
    """E[X(t) | D(0) = d_start, N(t) = n]."""
    if d_start not in (D0, D1):
        raise DomainError("d_start must be 0 (d0) or 1 (d1)")
    n = int(n)
    if n < 0:
        raise DomainError("n must be non-negative")
    if t < 0:
        raise DomainError("t must be non-negative")
    z = params.c * t
    e = math.exp(-z)
    s = _alt_kummer_sum(n, z)
    x0 = params.x0
    even = n % 2 == 0
    if d_start == D0:
        return (1.0 if even else 0.0) + x0 * e - s
    return (0.0 if even else 1.0) - (1.0 - x0) * e + s


def uncond_mean(params: DirDepParams, t):
    """E[X(t)] with an equiprobable initial direction.

    With a fixed ``d0_start`` the conditional means are mixed over the
    Poisson law of N(t) instead.
    """
    if t < 0:
        raise DomainError("t must be non-negative")
    e = math.exp(-params.c * t)
    if params.d0_start is None:
        return params.x0 * e + 0.5 * (1.0 - e)
    lt = params.lam * t
    top = int(lt + 12 * math.sqrt(lt) + 30)
    terms = []
    for n in range(top + 1):
        w = math.exp(-lt + n * math.log(lt) - math.lgamma(n + 1)) if lt > 0 else float(n == 0)
        terms.append(w * cond_mean(params, params.d0_start, n, t))
    return math.fsum(terms)


@dataclass(frozen=True)
class CollapseResult:
    frac_near_0: float
    frac_near_1: float
    replicas: int
    c: float
    lam: float
    band: float
    seed: int

    def as_tuple(self):
        return self.frac_near_0, self.frac_near_1


def collapse_experiment(c, t=1.0, replicas=10_000, band=0.01, x0=0.5, seed=0):
    """Fractions of X(t) within ``band`` of 0 and of 1 with lambda = c^2."""
    if not band > 0:
        raise DomainError("band must be positive")
    params = DirDepParams(lam=c * c, c=c, x0=x0)
    rng = aux_stream(seed, 5, int(replicas))
    x = sample_endpoints(params, t, replicas, rng)
    return CollapseResult(float(np.mean(x < band)), float(np.mean(x > 1.0 - band)),
                          int(replicas), float(c), float(c * c), float(band), int(seed))
