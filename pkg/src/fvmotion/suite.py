"""Seeded Monte Carlo check suites run by ``fvmotion accept``.

Every check compares a sample mean with its analytic target and returns an
:class:`McReport`. Each check draws from its own named stream so that the
suite output depends only on the seed and the replica count.
"""

import math

import numpy as np

from . import dirdep as dd
from . import geo2d as g2
from . import planar as pl
from . import telegraph as tg
from . import timevar as tv
from . import velocitymap as vm
from .mcharness import mean_report, run_replicas

SUITE_K = 4.0
SUITES = ("primary",)


def _check(name, seed, n, sampler, target):
    values = run_replicas(sampler, n, seed)
    return mean_report(values, target=target, seed=seed, k=SUITE_K, name=name)


def primary(seed, n=100_000):
    """One or two checks per module at moderate parameters (lambda = c = 1)."""
    P = tg.TelegraphParams(1.0, 1.0)
    t = 1.0
    reports = []
    # distinct seeds per check, derived deterministically from the suite seed
    sub = np.random.SeedSequence(int(seed)).generate_state(16, dtype=np.uint64)
    s = [int(v) for v in sub]

    reports.append(_check("telegraph.second_moment", s[0], n,
                          lambda r, m: tg.sample_endpoints(P, t, m, r) ** 2,
                          tg.moment_even(P, 1, t)))
    reports.append(_check("telegraph.fourth_moment", s[1], n,
                          lambda r, m: tg.sample_endpoints(P, t, m, r) ** 4,
                          tg.moment_even(P, 2, t)))

    def no_switch(r, m):
        _, counts = tg.sample_endpoints(P, t, m, r, return_counts=True)
        return (counts == 0).astype(float)
    reports.append(_check("telegraph.no_switch_probability", s[2], n, no_switch,
                          2 * tg.atom_mass(P, t)))

    model = vm.logistic(1.0, 0.3)
    reports.append(_check("velocitymap.logistic_mean", s[3], n,
                          lambda r, m: vm.sample_x(model, 1.0, t, m, r),
                          vm.logistic_moment(1.0, P, 0.3, t).value))

    def gauss_logistic(r, m):
        b = r.normal(0.0, math.sqrt(0.25), m)
        return 0.3 * np.exp(b) / (1 - 0.3 * (1 - np.exp(b)))
    reports.append(_check("velocitymap.hydro_mean", s[4], n, gauss_logistic,
                          vm.logistic_moment_hydro(1.0, 0.3, 0.25).value))

    Q = pl.PlanarParams(1.0, 1.0, 0.5)
    reports.append(_check("planar.boundary_probability", s[5], n,
                          lambda r, m: pl.sample_endpoints(Q, t, m, r).on_boundary.astype(float),
                          pl.boundary_probability(Q, t)))
    reports.append(_check("planar.side_probability", s[6], n,
                          lambda r, m: pl.sample_endpoints(Q, t, m, r).on_side1.astype(float),
                          pl.side_probability(Q, t)))

    D = dd.DirDepParams(1.0, 1.0, 0.2)
    reports.append(_check("dirdep.uncond_mean", s[7], n,
                          lambda r, m: dd.sample_endpoints(D, t, m, r),
                          dd.uncond_mean(D, t)))
    reports.append(_check("dirdep.cond_mean_d0_n2", s[8], n,
                          lambda r, m: dd.sample_conditional(D, dd.D0, 2, t, m, r),
                          dd.cond_mean(D, dd.D0, 2, t)))

    lin = tv.linear()
    reports.append(_check("timevar.variance_linear_sigma", s[9], n,
                          lambda r, m: tv.sample_endpoints(lin, P, t, m, r) ** 2,
                          tv.covariance(lin, P, t, t)))

    G = g2.Geo2dParams(1.0, 1.0, 0.3)
    # E[U V] = (Var A - Var B)/4 with the two rotated telegraph variances
    va = tg.variance(tg.TelegraphParams(G.planar.rate_a, 1.0), t)
    vb = tg.variance(tg.TelegraphParams(G.planar.rate_b, 1.0), t)
    reports.append(_check("geo2d.log_return_cross_moment", s[10], n,
                          lambda r, m: np.prod(g2.sample_endpoints(G, t, m, r, log=True), axis=1),
                          0.25 * (va - vb)))
    return reports


def run_suite(name, seed, n=100_000):
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; available: {', '.join(SUITES)}")
    return primary(seed, n)
