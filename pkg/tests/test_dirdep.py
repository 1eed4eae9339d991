import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from fvmotion import dirdep as dd
from fvmotion.distributions import DomainError
from fvmotion.mcharness import aux_stream, mean_report, run_replicas
from fvmotion.specfun import hyp1f1


def explicit_knots(x0, c, first_right, times):
    """X at every switch time from the unrolled sum, no recursion."""
    out = [x0]
    for k in range(1, times.size):
        tk = times[k]
        val = x0 * math.exp(-c * tk)
        for i in range(1, k + 1):
            right = (i - 1) % 2 == (0 if first_right else 1)
            if right:
                val += math.exp(-c * (tk - times[i])) - math.exp(-c * (tk - times[i - 1]))
        out.append(val)
    return np.array(out)


def endpoint_given_times(x0, c, d_start, times, t):
    """X(t) for given switch times, directly from the segment solutions."""
    knots = np.concatenate([[0.0], np.sort(times), [t]])
    x = x0
    for k in range(knots.size - 1):
        e = math.exp(-c * (knots[k + 1] - knots[k]))
        x = 1 - (1 - x) * e if (d_start + k) % 2 == dd.D0 else x * e
    return x


# --- paths ------------------------------------------------------------------

def test_no_event_paths():
    for d, expected in [(dd.D0, lambda x0, ct: 1 - (1 - x0) * math.exp(-ct)),
                        (dd.D1, lambda x0, ct: x0 * math.exp(-ct))]:
        P = dd.DirDepParams(1e-12, 1.3, 0.4, d0_start=d)
        path = dd.sample_path(P, 2.0, aux_stream(50, d))
        assert path.event_times.size == 0
        for t in (0.5, 2.0):
            assert path(t) == pytest.approx(expected(0.4, 1.3 * t), rel=1e-14)


@pytest.mark.parametrize("d", [dd.D0, dd.D1])
def test_closed_form_path_sums(d):
    P = dd.DirDepParams(2.0, 1.5, 0.35, d0_start=d)
    rng = aux_stream(51, d)
    checked = 0
    while checked < 200:
        path = dd.sample_path(P, 5.0, rng)
        if path.event_times.size > 10:
            continue
        times = np.concatenate([[0.0], path.event_times])
        ref = explicit_knots(0.35, 1.5, d == dd.D0, times)
        assert np.max(np.abs(path.knot_values - ref)) < 1e-12
        checked += 1


def test_pathwise_confinement():
    P = dd.DirDepParams(5.0, 40.0, 0.5)
    rng = aux_stream(52, 0)
    ts = np.linspace(0, 2, 201)
    for _ in range(100):
        path = dd.sample_path(P, 2.0, rng)
        # near the barriers X itself may round to 1.0, so confinement is
        # checked on the tracked pair (X, 1 - X)
        x = path(ts)
        y = path.position(ts, complement=True)
        assert np.all((x > 0) & (y > 0) & (x <= 1) & (y <= 1))
        assert np.allclose(x + y, 1.0, atol=1e-15)
    P = dd.DirDepParams(400.0, 20.0, 0.5)
    x = dd.sample_endpoints(P, 1.0, 20_000, aux_stream(52, 1))
    y = dd.sample_endpoints(P, 1.0, 20_000, aux_stream(52, 1), complement=True)
    assert np.all((x > 0) & (y > 0))
    assert np.all((x > 0) & (x < 1))


def test_vectorized_matches_path_sampler_in_mean():
    P = dd.DirDepParams(1.0, 1.0, 0.2)
    rng = aux_stream(53, 0)
    slow = np.array([dd.sample_path(P, 1.0, rng)(1.0) for _ in range(40_000)])
    assert mean_report(slow, target=dd.uncond_mean(P, 1.0)).verdict == "pass"


# --- order statistics and conditional means ---------------------------------

@pytest.mark.parametrize("n, j", [(1, 1), (3, 1), (3, 3), (5, 2), (6, 4)])
def test_kummer_order_statistics(n, j):
    c, t = 1.0, 1.0
    u = np.sort(aux_stream(54, n, j).random((200_000, n)) * t, axis=1)[:, j - 1]
    rep = mean_report(np.exp(c * u), target=hyp1f1(j, n + 1, c * t), k=4)
    assert rep.verdict == "pass", rep


def test_cond_mean_no_events():
    P = dd.DirDepParams(1.0, 1.0, 0.3)
    for t in (0.0, 0.5, 2.0):
        assert dd.cond_mean(P, dd.D0, 0, t) == pytest.approx(1 - 0.7 * math.exp(-t), rel=1e-15)
        assert dd.cond_mean(P, dd.D1, 0, t) == pytest.approx(0.3 * math.exp(-t), rel=1e-15)


@pytest.mark.parametrize("d", [dd.D0, dd.D1])
@pytest.mark.parametrize("x0, c, t", [(0.2, 1.0, 1.0), (0.6, 2.5, 0.7)])
def test_cond_mean_quadrature_oracle(d, x0, c, t):
    P = dd.DirDepParams(1.0, c, x0)
    one = integrate.quad(lambda s: endpoint_given_times(x0, c, d, np.array([s]), t), 0, t,
                         epsabs=1e-13)[0] / t
    assert dd.cond_mean(P, d, 1, t) == pytest.approx(one, abs=1e-12)
    two = integrate.dblquad(lambda s2, s1: endpoint_given_times(x0, c, d, np.array([s1, s2]), t),
                            0, t, lambda s1: s1, lambda s1: t, epsabs=1e-13)[0] * 2 / t ** 2
    assert dd.cond_mean(P, d, 2, t) == pytest.approx(two, abs=1e-11)


@given(st.floats(0.01, 0.99), st.floats(0.05, 30.0), st.integers(0, 40))
@settings(max_examples=100)
def test_direction_average_independent_of_n(x0, z, n):
    P = dd.DirDepParams(1.0, 1.0, x0)
    avg = 0.5 * (dd.cond_mean(P, dd.D0, n, z) + dd.cond_mean(P, dd.D1, n, z))
    e = math.exp(-z)
    assert avg == pytest.approx(x0 * e + 0.5 * (1 - e), abs=1e-10)


def test_direction_average_example():
    P = dd.DirDepParams(1.0, 1.0, 0.2)
    target = 0.2 * math.exp(-1) + (1 - math.exp(-1)) / 2
    for n in range(7):
        avg = 0.5 * (dd.cond_mean(P, dd.D0, n, 1.0) + dd.cond_mean(P, dd.D1, n, 1.0))
        assert abs(avg - target) < 1e-10


def test_cond_mean_mc_d0_two():
    P = dd.DirDepParams(1.0, 1.0, 0.2)
    x = run_replicas(lambda r, m: dd.sample_conditional(P, dd.D0, 2, 1.0, m, r), 10**6, seed=55)
    rep = mean_report(x, target=dd.cond_mean(P, dd.D0, 2, 1.0))
    assert rep.verdict == "pass", rep


def test_conditional_sampler_matches_rejection():
    # stratified draws must agree with plain simulation conditioned by rejection
    P = dd.DirDepParams(1.0, 1.0, 0.2, d0_start=dd.D1)
    rng = aux_stream(56, 0)
    keep = []
    while len(keep) < 4000:
        path = dd.sample_path(P, 1.0, rng)
        if path.event_times.size == 1:
            keep.append(path(1.0))
    assert mean_report(keep, target=dd.cond_mean(P, dd.D1, 1, 1.0)).verdict == "pass"


# --- unconditional mean -----------------------------------------------------

def test_uncond_mean_limits():
    P = dd.DirDepParams(1.0, 1.0, 0.2)
    assert dd.uncond_mean(P, 0.0) == 0.2
    assert dd.uncond_mean(P, 60.0) == pytest.approx(0.5, abs=1e-15)
    assert dd.uncond_mean(P, 1.0) == pytest.approx(0.2 * math.exp(-1) + (1 - math.exp(-1)) / 2, rel=1e-15)


def test_uncond_mean_mc(dirdep_unit):
    for x0, x in dirdep_unit.items():
        rep = mean_report(x, target=dd.uncond_mean(dd.DirDepParams(1.0, 1.0, x0), 1.0))
        assert rep.verdict == "pass", rep


@pytest.mark.parametrize("d", [dd.D0, dd.D1])
def test_uncond_mean_fixed_start(d):
    P = dd.DirDepParams(2.0, 1.0, 0.3, d0_start=d)
    x = run_replicas(lambda r, m: dd.sample_endpoints(P, 1.0, m, r), 200_000, seed=57 + d)
    assert mean_report(x, target=dd.uncond_mean(P, 1.0)).verdict == "pass"
    both = [dd.uncond_mean(dd.DirDepParams(2.0, 1.0, 0.3, d0_start=k), 1.0) for k in (0, 1)]
    assert 0.5 * sum(both) == pytest.approx(dd.uncond_mean(dd.DirDepParams(2.0, 1.0, 0.3), 1.0), abs=1e-13)


def test_errors():
    with pytest.raises(DomainError):
        dd.DirDepParams(1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        dd.cond_mean(dd.DirDepParams(1.0, 1.0, 0.5), 2, 1, 1.0)


# --- collapse experiment ----------------------------------------------------

def test_collapse_low_speed_has_no_collapse():
    r = dd.collapse_experiment(1.0, t=1.0, replicas=10_000, band=0.01, x0=0.5, seed=3)
    assert r.frac_near_0 < 0.01 and r.frac_near_1 < 0.01
    assert r.lam == 1.0


def test_collapse_fractions_bounded(collapse_c100):
    r = collapse_c100
    assert 0 <= r.frac_near_0 + r.frac_near_1 <= 1
    assert r.lam == 1e4 and r.replicas == 10_000


def test_collapse_deterministic():
    a = dd.collapse_experiment(3.0, replicas=2000, seed=9)
    b = dd.collapse_experiment(3.0, replicas=2000, seed=9)
    assert a == b


def test_hydrodynamic_concentration(collapse_c100):
    # what the sampler actually shows at c = 100: X(1) concentrates near 1/2
    # with variance close to 1/(8c), so almost no mass lies within 0.01 of 0 or 1
    x = dd.sample_endpoints(dd.DirDepParams(1e4, 100.0, 0.5), 1.0, 4000, aux_stream(58, 0))
    assert abs(np.mean(x) - 0.5) < 0.01
    assert np.var(x) == pytest.approx(1 / 800, rel=0.15)
    assert collapse_c100.frac_near_0 < 0.05 and collapse_c100.frac_near_1 < 0.05
