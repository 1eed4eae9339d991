"""Correlated bivariate geometric telegraph process.

(X, Y) = (x0 e^U, y0 e^V), where (U, V) is the planar motion with direction
split p. With A = U + V and B = U - V switching at rates lambda(1-p) and
lambda p, the hydrodynamic limit lambda = c^2 -> infinity gives
Var U = Var V = t / (4p(1-p)) and corr(U, V) = 2p - 1, a correlated
geometric Brownian motion.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import planar as pl
from . import telegraph as tg
from .distributions import AnalyticDensity, DomainError
from .quadrature import gauss_legendre


@dataclass(frozen=True)
class Geo2dParams:
    lam: float
    c: float
    p: float
    x0: float = 1.0
    y0: float = 1.0

    def __post_init__(self):
        for name in ("lam", "c", "x0", "y0"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive and finite, got {v}")
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"p must lie in [0, 1], got {self.p}")

    @property
    def planar(self) -> pl.PlanarParams:
        return pl.PlanarParams(self.lam, self.c, self.p)


@dataclass(frozen=True)
class Geo2dPath:
    path: pl.PlanarPath
    x0: float
    y0: float

    def position(self, t):
        uv = self.path.position(t)
        return np.stack([self.x0 * np.exp(uv[..., 0]), self.y0 * np.exp(uv[..., 1])], axis=-1)

    def __call__(self, t):
        return self.position(t)

    @property
    def endpoint(self):
        u, v = self.path.endpoint
        return self.x0 * math.exp(u), self.y0 * math.exp(v)


def sample(params: Geo2dParams, horizon, rng) -> Geo2dPath:
    return Geo2dPath(pl.sample_planar(params.planar, horizon, rng), params.x0, params.y0)


def sample_endpoints(params: Geo2dParams, t, size, rng, log=False):
    """(X(t), Y(t)) as an array of shape (size, 2); with ``log`` the
    log-returns (U, V) instead."""
    uv = pl.sample_endpoints(params.planar, t, size, rng, track=False).uv
    if log:
        return uv
    return np.column_stack([params.x0 * np.exp(uv[:, 0]), params.y0 * np.exp(uv[:, 1])])


def joint_density(params: Geo2dParams, x, y, t):
    """Interior density of (X(t), Y(t))."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("x and y must be positive")
    u, v = np.log(x / params.x0), np.log(y / params.y0)
    return pl.interior_density_uv(params.planar, u, v, t) / (x * y)


def boundary_probability(params: Geo2dParams, t):
    return pl.boundary_probability(params.planar, t)


def param_map(p):
    """(mu, kappa, sigma^2, eta^2, rho) of the limiting geometric diffusion."""
    if not 0.0 < p < 1.0:
        raise DomainError("param_map needs 0 < p < 1")
    q = p * (1.0 - p)
    return 1.0 / (8.0 * q), 1.0 / (8.0 * q), 1.0 / (4.0 * q), 1.0 / (4.0 * q), 2.0 * p - 1.0


def limit_density(p, x0, y0, x, y, t):
    """Density of the limiting correlated geometric Brownian motion.

    In log-returns a = log(xy/(x0 y0)) and b = log(x y0/(x0 y)) the
    exponent is -[(1-p) a^2 + p b^2] / (2t), matching corr = 2p - 1.
    """
    if not 0.0 < p < 1.0:
        raise DomainError("limit_density needs 0 < p < 1")
    if not t > 0:
        raise DomainError("t must be positive")
    if not (x0 > 0 and y0 > 0):
        raise DomainError("x0 and y0 must be positive")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("x and y must be positive")
    a = np.log(x * y / (x0 * y0))
    b = np.log(x * y0 / (x0 * y))
    out = (math.sqrt(p * (1 - p)) / (math.pi * t * x * y)
           * np.exp(-((1 - p) * a * a + p * b * b) / (2 * t)))
    return float(out) if out.ndim == 0 else out


def log_limit_density(p, u, v, t):
    """Limit density of the log-returns (U, V)."""
    return limit_density(p, 1.0, 1.0, np.exp(u), np.exp(v), t) * np.exp(np.asarray(u) + np.asarray(v))


# ---------------------------------------------------------------------------
# law of one log-return
# ---------------------------------------------------------------------------

_GL_X, _GL_W = gauss_legendre(64)


def log_marginal_law(params: Geo2dParams, t) -> AnalyticDensity:
    """Exact law of U(t) = log(X(t)/x0), with all its singular parts.

    U = (A + B)/2 with A, B independent telegraph laws. Atoms sit at 0
    (mass e^{-lambda t}/2) and at +-ct (mass e^{-lambda t}/4 each). The
    continuous part collects the interior convolution of the two telegraph
    densities and the four sides of the square, where A or B is pinned at
    +-ct.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    pp = params.planar
    c, ct = params.c, params.c * t
    ra, rb = pp.rate_a, pp.rate_b
    fa = lambda a: tg.kernel(ra, c, a, t, ra) if ra > 0 else np.zeros_like(np.asarray(a, float))
    fb = lambda b: tg.kernel(rb, c, b, t, rb) if rb > 0 else np.zeros_like(np.asarray(b, float))
    half_a = 0.5 * math.exp(-ra * t)
    half_b = 0.5 * math.exp(-rb * t)

    def cont(u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.zeros_like(u)
        inside = np.abs(u) < ct
        ui = u[inside]
        # interior: density of (A + B)/2 is 2 int f_A(a) f_B(2u - a) da
        lo = np.maximum(-ct, 2 * ui - ct)
        hi = np.minimum(ct, 2 * ui + ct)
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        a = mid[:, None] + half[:, None] * _GL_X[None, :]
        conv = half * ((fa(a.ravel()) * fb((2 * ui[:, None] - a).ravel())).reshape(a.shape) @ _GL_W)
        val = 2.0 * conv
        # sides: one rotated coordinate pinned at +-ct, the other free
        for s in (1.0, -1.0):
            b = 2 * ui - s * ct
            val += 2.0 * half_a * np.where(np.abs(b) < ct, fb(np.clip(b, -ct, ct)), 0.0)
            a2 = 2 * ui - s * ct
            val += 2.0 * half_b * np.where(np.abs(a2) < ct, fa(np.clip(a2, -ct, ct)), 0.0)
        out[inside] = val
        return out

    m = math.exp(-params.lam * t)
    return AnalyticDensity(continuous=cont, support=(-ct, ct),
                           atoms=[(-ct, 0.25 * m), (0.0, 0.5 * m), (ct, 0.25 * m)],
                           breakpoints=(0.0,))
