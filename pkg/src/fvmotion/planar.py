"""Planar motion along the four axis directions with a generator-driven direction chain.

Directions are d_j = (cos(j pi/2), sin(j pi/2)), j = 0..3. At each event of a
rate-lambda Poisson process the direction turns to a neighbour: the pairs
d0<->d1 and d2<->d3 are taken with probability p, the pairs d1<->d2 and
d3<->d0 with probability 1 - p. In the rotated coordinates A = U + V and
B = U - V the motion splits into two independent telegraph processes of
speed c with rates lambda(1-p) and lambda p, which gives the product form of
the interior density and the boundary laws.
"""

from dataclasses import dataclass
import math
from typing import Callable, List, Optional

import numpy as np

from . import telegraph as tg
from . import velocitymap as vm
from .distributions import DomainError

DX = np.array([1.0, 0.0, -1.0, 0.0])
DY = np.array([0.0, 1.0, 0.0, -1.0])


@dataclass(frozen=True)
class PlanarParams:
    lam: float
    c: float
    p: float = 0.5

    def __post_init__(self):
        for name in ("lam", "c"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive and finite, got {v}")
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"p must lie in [0, 1], got {self.p}")

    @property
    def rate_a(self):
        """Switching rate of A = U + V."""
        return self.lam * (1.0 - self.p)

    @property
    def rate_b(self):
        """Switching rate of B = U - V."""
        return self.lam * self.p


def step_direction(j, turn_red):
    """Next direction from ``j``; ``turn_red`` selects the probability-p pair."""
    j = np.asarray(j)
    even = (j % 2) == 0
    up = np.where(even, turn_red, ~np.asarray(turn_red, dtype=bool))
    return (j + np.where(up, 1, -1)) % 4


@dataclass(frozen=True)
class PlanarPath:
    """Path of (U, V) on [0, horizon]: direction ``directions[k]`` is used
    between event k and event k + 1."""

    horizon: float
    event_times: np.ndarray
    directions: np.ndarray
    params: PlanarParams

    def _knots(self):
        knots = np.concatenate([[0.0], self.event_times, [self.horizon]])
        d = np.diff(knots) * self.params.c
        u = np.concatenate([[0.0], np.cumsum(d * DX[self.directions])])
        v = np.concatenate([[0.0], np.cumsum(d * DY[self.directions])])
        return knots, u, v

    def position(self, t):
        """(U(t), V(t)); returns an array of shape t.shape + (2,)."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.horizon * (1 + 1e-12)):
            raise DomainError("path evaluated outside [0, horizon]")
        knots, u, v = self._knots()
        return np.stack([np.interp(t, knots, u), np.interp(t, knots, v)], axis=-1)

    def __call__(self, t):
        return self.position(t)

    @property
    def endpoint(self):
        _, u, v = self._knots()
        return float(u[-1]), float(v[-1])

    @property
    def used_directions(self):
        return frozenset(int(d) for d in self.directions)


def sample_planar(params: PlanarParams, horizon, rng) -> PlanarPath:
    if not horizon > 0:
        raise DomainError("horizon must be positive")
    j = int(rng.integers(4))
    events = tg.poisson_event_times(rng, params.lam, horizon)
    dirs = [j]
    for _ in range(events.size):
        j = int(step_direction(j, rng.random() < params.p))
        dirs.append(j)
    return PlanarPath(float(horizon), events, np.array(dirs, dtype=np.int64), params)


@dataclass(frozen=True)
class PlanarSample:
    """Vectorized endpoints.

    ``uv`` has shape (n, 2); ``events`` counts switches, of which
    ``flips_a`` reversed A = U + V and ``flips_b`` reversed B = U - V.
    ``mask`` is a bitmask of the directions used for a positive time, or
    None when directions were not tracked.
    """

    uv: np.ndarray
    events: np.ndarray
    flips_a: np.ndarray
    flips_b: np.ndarray
    mask: Optional[np.ndarray] = None

    @property
    def corner(self):
        return self.events == 0

    @property
    def on_side1(self):
        """Paths on the open side u + v = ct, u, v > 0 (only d0 and d1 used)."""
        return (self.flips_a == 0) & (self.flips_b > 0) & (self.uv[:, 0] + self.uv[:, 1] > 0)

    @property
    def on_boundary(self):
        """Paths on the edge of the square: A or B never reversed."""
        return (self.flips_a == 0) | (self.flips_b == 0)


# direction index <-> (sign of dA/dt, sign of dB/dt)
_SIGN_A = np.array([1, 1, -1, -1])
_SIGN_B = np.array([1, -1, -1, 1])


def sample_endpoints(params: PlanarParams, t, size, rng, track=True):
    """(U(t), V(t)) for ``size`` paths.

    With ``track=True`` the direction chain is walked event by event. A
    direction is stored as its pair of signs (dA/dt, dB/dt) / c, a
    bijection of the four states: a red turn (probability p) flips the
    B-sign and a green turn flips the A-sign, and the bitmask of used
    directions is recorded. With ``track=False`` A and B are drawn directly
    as independent telegraph endpoints, in time independent of lambda.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    size = int(size)
    if not track:
        a, na = tg.endpoint_draws(rng, params.rate_a, params.c, t, size)
        b, nb = tg.endpoint_draws(rng, params.rate_b, params.c, t, size)
        uv = np.column_stack([0.5 * (a + b), 0.5 * (a - b)])
        return PlanarSample(uv, na + nb, na, nb)
    uv = np.empty((size, 2))
    mask = np.zeros(size, dtype=np.int64)
    flips = np.empty((size, 2), dtype=np.int64)
    mean = params.lam * t
    est = int(mean + 8 * math.sqrt(mean) + 10)
    step = tg.chunk_rows(size, 2 * est)
    for start in range(0, size, step):
        m = min(step, size - start)
        j0 = rng.integers(4, size=m)
        times = tg.switching_times(rng, params.lam, t, m)
        k = times.shape[1]
        red = rng.random((m, k - 1)) < params.p
        n_red = np.zeros((m, k), dtype=np.int32)
        np.cumsum(red, axis=1, out=n_red[:, 1:])
        n_green = np.arange(k, dtype=np.int32)[None, :] - n_red
        sa = _SIGN_A[j0][:, None] * (1 - 2 * (n_green & 1))
        sb = _SIGN_B[j0][:, None] * (1 - 2 * (n_red & 1))
        seg = np.diff(np.minimum(times, t), axis=1, prepend=0.0)
        a = np.einsum("ij,ij->i", seg, sa)
        b = np.einsum("ij,ij->i", seg, sb)
        uv[start:start + m, 0] = 0.5 * params.c * (a + b)
        uv[start:start + m, 1] = 0.5 * params.c * (a - b)
        # column i of n_red counts red turns among the first i events
        last = np.sum(times <= t, axis=1)
        rows = np.arange(m)
        flips[start:start + m, 1] = n_red[rows, last]
        flips[start:start + m, 0] = last - n_red[rows, last]
        # sign pair back to direction index: (+,+)=0 (+,-)=1 (-,-)=2 (-,+)=3
        j = np.where(sa > 0, np.where(sb > 0, 0, 1), np.where(sb < 0, 2, 3))
        used = seg > 0
        for d in range(4):
            mask[start:start + m] |= np.any(used & (j == d), axis=1).astype(np.int64) << d
    return PlanarSample(uv, flips.sum(axis=1), flips[:, 0], flips[:, 1], mask)


# ---------------------------------------------------------------------------
# analytic laws
# ---------------------------------------------------------------------------

def _check_t(t):
    if not t > 0:
        raise DomainError("t must be positive")


def interior_density_uv(params: PlanarParams, u, v, t):
    """Density of (U(t), V(t)) inside the open square |u+v| < ct, |u-v| < ct."""
    _check_t(t)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    ct = params.c * t
    if np.any(np.abs(u + v) >= ct) or np.any(np.abs(u - v) >= ct):
        raise DomainError("(u, v) must lie in the open square |u +- v| < ct")
    return _interior_raw(params, u + v, u - v, t)


def _interior_raw(params, a, b, t):
    """2 f_A(a) f_B(b): the factor 2 is the Jacobian of (u, v) -> (a, b)."""
    fa = tg.kernel(params.rate_a, params.c, a, t, params.rate_a)
    fb = tg.kernel(params.rate_b, params.c, b, t, params.rate_b)
    return 2.0 * fa * fb


def interior_density_ab(params: PlanarParams, a, b, t):
    """Density of (A, B) = (U + V, U - V) inside the square |a|, |b| < ct."""
    _check_t(t)
    return 0.5 * _interior_raw(params, np.asarray(a, float), np.asarray(b, float), t)


def boundary_probability(params: PlanarParams, t):
    """P((U, V) on the boundary of the square), sides and corners together."""
    _check_t(t)
    return (math.exp(-params.rate_a * t) + math.exp(-params.rate_b * t)
            - math.exp(-params.lam * t))


def corner_mass(params: PlanarParams, t):
    """Mass of each corner (no switch before t)."""
    _check_t(t)
    return 0.25 * math.exp(-params.lam * t)


def side_probability(params: PlanarParams, t):
    """Mass of the open side u + v = ct (and of its mirror u + v = -ct)."""
    _check_t(t)
    return 0.5 * (math.exp(-params.rate_a * t) - math.exp(-params.lam * t))


def side_density_q(params: PlanarParams, u, t):
    """Density of U(t) on the side u + v = ct, 0 < u < ct.

    On that side A stays at ct and B = 2u - ct moves as a telegraph
    process of rate lambda p, so q is symmetric under u -> ct - u.
    """
    _check_t(t)
    u = np.asarray(u, dtype=float)
    ct = params.c * t
    if np.any(u <= 0) or np.any(u >= ct):
        raise DomainError("side density needs 0 < u < ct")
    return tg.kernel(params.rate_b, params.c, 2.0 * u - ct, t, params.lam)


def side_density_H(params: PlanarParams, eta, t):
    """Density of U(t) - V(t) on the side u + v = ct, |eta| < ct."""
    _check_t(t)
    eta = np.asarray(eta, dtype=float)
    if np.any(np.abs(eta) >= params.c * t):
        raise DomainError("side density needs |eta| < ct")
    return 0.5 * tg.kernel(params.rate_b, params.c, eta, t, params.lam)


# ---------------------------------------------------------------------------
# space-varying speed along each axis
# ---------------------------------------------------------------------------

def _models(model, model_y):
    return model, (model if model_y is None else model_y)


def wrapped_density_xy(model: vm.VelocityModel, params: PlanarParams, x, y, t, model_y=None):
    """Interior density of (X, Y) = (Winv(U), Winv(V)).

    ``model_y`` gives the map for the second axis when its starting point
    differs; by default both axes share ``model``.
    """
    _check_t(t)
    mx, my = _models(model, model_y)
    if params.c != mx.c or params.c != my.c:
        raise DomainError("planar speed must equal the model's c")
    for mdl in (mx, my):
        if t >= mdl.t_star:
            raise vm.ModelError("analytic law only available before the barrier time")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    for arr, mdl in ((x, mx), (y, my)):
        if np.any(arr <= mdl.lower) or np.any(arr >= mdl.upper):
            raise DomainError("point outside the state space of the model")
    u, v = mx.W(x), my.W(y)
    g = interior_density_uv(params, u, v, t)
    return g * params.c ** 2 / (mx.v(x) * my.v(y))


def wrapped_boundary_abscissa(model: vm.VelocityModel, params: PlanarParams, x, t):
    """Density of X(t) on the image of the side u + v = ct: c q(W(x)) / v(x)."""
    _check_t(t)
    x = np.asarray(x, dtype=float)
    if np.any(x <= model.lower) or np.any(x >= model.upper):
        raise DomainError("point outside the state space of the model")
    u = model.W(x)
    if np.any(u <= 0) or np.any(u >= params.c * t):
        raise DomainError("wrapped side density needs 0 < W(x) < ct")
    return side_density_q(params, u, t) * params.c / model.v(x)


@dataclass(frozen=True)
class Side:
    """One side of the support, parametrized by s in [0, 1]."""

    name: str
    curve: Callable

    def __call__(self, s):
        return self.curve(s)


_SQUARE = ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))


def support_boundary(model: vm.VelocityModel, t, model_y=None) -> List[Side]:
    """The four sides of the support as parametric curves.

    Side k joins the images of the square corners ct d_k and ct d_{k+1};
    side 1 is the image of u + v = ct with u, v > 0.
    """
    _check_t(t)
    mx, my = _models(model, model_y)
    if mx.family in ("power", "numeric") or my.family in ("power", "numeric"):
        raise vm.ModelError(f"support boundary not available for family {mx.family!r}")
    ct = model.c * t
    sides = []
    for k in range(4):
        (u0, v0), (u1, v1) = _SQUARE[k], _SQUARE[(k + 1) % 4]

        def curve(s, u0=u0, v0=v0, u1=u1, v1=v1):
            s = np.asarray(s, dtype=float)
            u = ct * (u0 + s * (u1 - u0))
            v = ct * (v0 + s * (v1 - v0))
            return np.stack([mx.Winv(u), my.Winv(v)], axis=-1)

        sides.append(Side(f"side{k + 1}", curve))
    return sides
