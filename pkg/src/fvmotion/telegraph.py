"""Standard symmetric telegraph process T(t) with speed c and switching rate lambda.

Paths start at 0 in a uniformly chosen direction and reverse at the events
of a homogeneous Poisson process. The law of T(t) has atoms of mass
exp(-lambda t)/2 at +-ct and, inside, the density

    p(z, t) = exp(-lambda t)/(2c) [lambda I0(w) + d/dt I0(w)],
    w = (lambda/c) sqrt(c^2 t^2 - z^2),

where d/dt I0(w) = lambda^2 t I1(w)/w is expanded analytically.
"""

from dataclasses import dataclass
import math

import numpy as np

from .distributions import AnalyticDensity, DomainError
from .quadrature import adaptive_simpson
from .specfun import bessel_ie, i1_over_x_scaled

# target number of float64 cells per chunk in the vectorized samplers
_CHUNK_CELLS = 4_000_000


@dataclass(frozen=True)
class TelegraphParams:
    lam: float
    c: float

    def __post_init__(self):
        for name in ("lam", "c"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive and finite, got {v}")

    @property
    def diffusivity(self):
        """c^2 / lambda, the variance growth rate in the hydrodynamic limit."""
        return self.c ** 2 / self.lam


# ---------------------------------------------------------------------------
# paths
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PathSample:
    """One telegraph path on [0, horizon]."""

    horizon: float
    initial_direction: int
    event_times: np.ndarray
    params: TelegraphParams

    @property
    def knots(self):
        """Times 0, T_1, ..., T_N, horizon."""
        return np.concatenate([[0.0], self.event_times, [self.horizon]])

    def _knot_positions(self):
        knots = self.knots
        d = np.diff(knots)
        signs = self.initial_direction * (-1.0) ** np.arange(d.size)
        return knots, np.concatenate([[0.0], np.cumsum(self.params.c * signs * d)])

    def direction(self, t):
        """Velocity sign at time t (right-continuous)."""
        k = np.searchsorted(self.event_times, np.asarray(t, dtype=float), side="right")
        return self.initial_direction * (-1) ** k

    def position(self, t):
        """T(t), vectorized over t in [0, horizon]."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.horizon * (1 + 1e-12)):
            raise DomainError("path evaluated outside [0, horizon]")
        knots, pos = self._knot_positions()
        return np.interp(t, knots, pos)

    def __call__(self, t):
        return self.position(t)

    @property
    def endpoint(self):
        return float(self._knot_positions()[1][-1])

    def first_passage_below(self, level):
        """First time the path reaches ``level`` from above (inf if never)."""
        knots, pos = self._knot_positions()
        if pos[0] <= level:
            return 0.0
        hit = np.nonzero(pos <= level)[0]
        if hit.size == 0:
            return math.inf
        i = hit[0]
        # linear segment between knots i-1 and i crosses the level
        frac = (pos[i - 1] - level) / (pos[i - 1] - pos[i])
        return float(knots[i - 1] + frac * (knots[i] - knots[i - 1]))


def poisson_event_times(rng, rate, horizon):
    """Event times of a rate-``rate`` Poisson process on (0, horizon]."""
    times = []
    s = 0.0
    while True:
        s += rng.standard_exponential() / rate
        if s > horizon:
            return np.array(times, dtype=float)
        times.append(s)


def sample_path(params: TelegraphParams, horizon, rng) -> PathSample:
    if not horizon > 0:
        raise DomainError("horizon must be positive")
    direction = 1 if rng.random() < 0.5 else -1
    events = poisson_event_times(rng, params.lam, horizon)
    return PathSample(float(horizon), direction, events, params)


def switching_times(rng, rate, horizon, rows):
    """Cumulative Poisson event times, one row per path.

    Returns an array of shape (rows, K) whose last column exceeds
    ``horizon`` in every row, so all events in (0, horizon] are present.
    """
    mean = rate * horizon
    k = int(mean + 8.0 * math.sqrt(mean) + 10)
    times = np.cumsum(rng.standard_exponential((rows, k)), axis=1) / rate
    while np.any(times[:, -1] <= horizon):
        extra = np.cumsum(rng.standard_exponential((rows, k)), axis=1) / rate
        times = np.concatenate([times, times[:, -1:] + extra], axis=1)
    return times


def chunk_rows(size, cols):
    return max(1, min(size, _CHUNK_CELLS // max(cols, 1)))


def endpoint_draws(rng, rate, c, t, size):
    """Telegraph endpoints and switch counts without walking the events.

    Given N switches in (0, t], the spacings of the switch times are
    normalized exponentials, so the time spent in the initial direction is
    t Beta(ceil((N+1)/2), floor((N+1)/2)). ``rate`` may be 0.
    """
    v0 = np.where(rng.random(size) < 0.5, 1.0, -1.0)
    n = rng.poisson(rate * t, size) if rate > 0 else np.zeros(size, dtype=np.int64)
    moved = n > 0
    frac = np.ones(size)
    frac[moved] = rng.beta((n[moved] + 2) // 2, (n[moved] + 1) // 2)
    return c * t * v0 * (2.0 * frac - 1.0), n


def sample_endpoints(params: TelegraphParams, t, size, rng, return_counts=False,
                     return_min=False, method="beta"):
    """T(t) for ``size`` independent paths (vectorized exact simulation).

    Optionally also returns the number of switches in (0, t] and the
    running minimum min_{s <= t} T(s). ``method="beta"`` draws each
    endpoint in O(1) from its switch count; ``"walk"`` sums the segments
    between simulated switch times, and is used whenever the running
    minimum is requested.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    if method not in ("beta", "walk"):
        raise ValueError(f"unknown method {method!r}")
    size = int(size)
    if method == "beta" and not return_min:
        out, counts = endpoint_draws(rng, params.lam, params.c, t, size)
        return (out, counts) if return_counts else out
    out = np.empty(size)
    counts = np.empty(size, dtype=np.int64)
    lows = np.empty(size) if return_min else None
    est_cols = int(params.lam * t + 8 * math.sqrt(params.lam * t) + 10)
    step = chunk_rows(size, est_cols)
    for start in range(0, size, step):
        m = min(step, size - start)
        v0 = np.where(rng.random(m) < 0.5, 1.0, -1.0)
        times = switching_times(rng, params.lam, t, m)
        # the last column exceeds t, so clipping closes the final segment at t
        tau = np.minimum(times, t)
        seg = np.diff(tau, axis=1, prepend=0.0)
        sign = (-1.0) ** np.arange(seg.shape[1])
        counts[start:start + m] = np.sum(times <= t, axis=1)
        if return_min:
            pos = np.cumsum(seg * sign, axis=1) * (params.c * v0)[:, None]
            out[start:start + m] = pos[:, -1]
            lows[start:start + m] = np.minimum(pos.min(axis=1), 0.0)
        else:
            out[start:start + m] = params.c * v0 * (seg @ sign)
    res = (out,)
    if return_counts:
        res += (counts,)
    if return_min:
        res += (lows,)
    return res[0] if len(res) == 1 else res


# ---------------------------------------------------------------------------
# analytic law
# ---------------------------------------------------------------------------

def kernel(rate, c, z, t, damping):
    """exp(-damping t)/(2c) [rate I0(w) + d/dt I0(w)], w = (rate/c) sqrt(c^2t^2 - z^2).

    This is the interior density of a rate-``rate`` telegraph process when
    ``damping == rate``; other dampings give the planar factors. Points with
    |z| >= ct give 0.
    """
    z = np.asarray(z, dtype=float)
    q = (c * t) ** 2 - z ** 2
    # the density has a finite nonzero limit at |z| = ct; keep the closed
    # interval (up to rounding) so quadrature sees no artificial jump
    inside = np.abs(z) <= c * t * (1 + 1e-13)
    w = (rate / c) * np.sqrt(np.where(inside, np.maximum(q, 0.0), 0.0))
    scale = np.exp(w - damping * t)
    val = rate * bessel_ie(0, w) + rate ** 2 * t * i1_over_x_scaled(w)
    out = np.where(inside, scale * val / (2.0 * c), 0.0)
    return float(out) if out.ndim == 0 else out


def _check_t(t):
    if not t > 0:
        raise DomainError("t must be positive")


def density(params: TelegraphParams, z, t):
    """Continuous part of the law of T(t) for |z| < ct."""
    _check_t(t)
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(z) >= params.c * t):
        raise DomainError("density is defined only for |z| < ct")
    return kernel(params.lam, params.c, z, t, params.lam)


def atom_mass(params: TelegraphParams, t):
    """Mass at each endpoint +-ct."""
    _check_t(t)
    return 0.5 * math.exp(-params.lam * t)


def law(params: TelegraphParams, t) -> AnalyticDensity:
    _check_t(t)
    ct = params.c * t
    m = atom_mass(params, t)
    return AnalyticDensity(
        continuous=lambda z: kernel(params.lam, params.c, z, t, params.lam),
        support=(-ct, ct), atoms=[(-ct, m), (ct, m)], breakpoints=(0.0,))


def moment_even(params: TelegraphParams, n, t):
    """E[T(t)^{2n}] in closed form (n <= 30)."""
    n = int(n)
    if n < 0 or n > 30:
        raise DomainError("moment_even supports 0 <= n <= 30")
    _check_t(t)
    x = params.lam * t
    if n == 0:
        return 1.0
    log_pref = (2 * n * math.log(params.c * t) + (n - 0.5) * math.log(2.0 / x)
                + math.lgamma(n + 0.5))
    return math.exp(log_pref) * (bessel_ie(n + 0.5, x) + bessel_ie(n - 0.5, x))


def variance(params: TelegraphParams, t):
    """E[T(t)^2] = (c^2/lambda) t - (c^2/(2 lambda^2)) (1 - exp(-2 lambda t))."""
    lam, c = params.lam, params.c
    return c * c / lam * t + c * c / (2 * lam * lam) * math.expm1(-2 * lam * t)


def cdf(params: TelegraphParams, z, t):
    """Right-continuous CDF of T(t), including the endpoint atoms."""
    _check_t(t)
    ct = params.c * t
    m = atom_mass(params, t)

    def one(zv):
        if zv < -ct:
            return 0.0
        if zv >= ct:
            return 1.0
        if zv == -ct:
            return m
        f = lambda u: kernel(params.lam, params.c, u, t, params.lam)
        inner = adaptive_simpson(f, 0.0, abs(zv), tol=1e-12)
        return 0.5 + math.copysign(inner, zv)

    z = np.asarray(z, dtype=float)
    if z.ndim == 0:
        return one(float(z))
    return np.array([one(float(v)) for v in z.ravel()]).reshape(z.shape)
