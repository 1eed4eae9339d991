"""Shared fixtures: expensive simulations are drawn once per session.

Every sample here is a pure function of its seed, so tests that reuse a
fixture see exactly the draws they would have produced themselves.
"""

import numpy as np
import pytest

from fvmotion import dirdep as dd
from fvmotion import geo2d as g2
from fvmotion import planar as pl
from fvmotion import telegraph as tg
from fvmotion import timevar as tv
from fvmotion import velocitymap as vm
from fvmotion.mcharness import run_replicas

BIG = 10**6
MID = 10**5

# criterion number -> {part: (passed, detail)}; filled by test_acceptance
ACCEPTANCE_PARTS = {}
CRITERION_TITLES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_PARTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_PARTS):
        terminalreporter.write_line(acceptance_line(key))


def acceptance_line(key):
    parts = ACCEPTANCE_PARTS[key]
    ok = all(passed for passed, _ in parts.values())
    failed = [f"{name}: {detail}" for name, (passed, detail) in parts.items() if not passed]
    head = f"criterion {key} {'PASS' if ok else 'FAIL'}  {CRITERION_TITLES.get(key, '')}"
    return head + ("" if ok else "  [" + "; ".join(failed) + "]")


class Criterion:
    """Records the parts of one acceptance criterion as they are checked."""

    def __init__(self, key, title):
        self.key = key
        CRITERION_TITLES[key] = title
        ACCEPTANCE_PARTS.setdefault(key, {})

    def check(self, part, passed, detail=""):
        ACCEPTANCE_PARTS[self.key][part] = (bool(passed), detail)
        assert passed, f"criterion {self.key}, {part}: {detail}"


@pytest.fixture
def criterion():
    return Criterion


@pytest.fixture(scope="session")
def tel_unit():
    """T(1) at lambda = c = 1, with switch counts, 10^6 paths."""
    P = tg.TelegraphParams(1.0, 1.0)
    out = run_replicas(lambda r, m: np.column_stack(tg.sample_endpoints(P, 1.0, m, r, return_counts=True)),
                       BIG, seed=101)
    return out[:, 0], out[:, 1].astype(int)


@pytest.fixture(scope="session")
def tel_hydro():
    """T(1) at lambda = c^2 = 10^4, 10^5 paths."""
    P = tg.TelegraphParams(1e4, 100.0)
    return run_replicas(lambda r, m: tg.sample_endpoints(P, 1.0, m, r), MID, seed=102)


@pytest.fixture(scope="session")
def logistic_unit():
    """X(1) of the logistic model started at 0.3, lambda = c = 1, 10^6 paths."""
    model = vm.logistic(1.0, 0.3)
    return run_replicas(lambda r, m: vm.sample_x(model, 1.0, 1.0, m, r), BIG, seed=103)


@pytest.fixture(scope="session")
def planar_unit():
    """Planar endpoints at lambda = c = 1, p = 1/2, t = 1, 10^6 paths."""
    Q = pl.PlanarParams(1.0, 1.0, 0.5)

    def draw(r, m):
        S = pl.sample_endpoints(Q, 1.0, m, r)
        return np.column_stack([S.uv, S.flips_a, S.flips_b, S.mask])
    out = run_replicas(draw, BIG, seed=104)
    fa, fb, mask = (out[:, k].astype(np.int64) for k in (2, 3, 4))
    return pl.PlanarSample(out[:, :2], fa + fb, fa, fb, mask)


@pytest.fixture(scope="session")
def geo2d_hydro():
    """Log-returns (U, V) at lambda = c^2 = 10^4, t = 1, 10^5 paths per p."""
    out = {}
    for i, p in enumerate((0.2, 0.5, 0.8)):
        G = g2.Geo2dParams(1e4, 100.0, p)
        out[p] = run_replicas(lambda r, m: g2.sample_endpoints(G, 1.0, m, r, log=True),
                              MID, seed=110 + i)
    return out


@pytest.fixture(scope="session")
def timevar_unit():
    """X(1) for sigma(u) = u at lambda = c = 1, 10^6 paths."""
    P = tg.TelegraphParams(1.0, 1.0)
    prof = tv.linear()
    return run_replicas(lambda r, m: tv.sample_endpoints(prof, P, 1.0, m, r), BIG, seed=105)


@pytest.fixture(scope="session")
def timevar_hydro():
    """X(1) for sigma(u) = u at lambda = c^2 = 10^4, 10^5 paths."""
    P = tg.TelegraphParams(1e4, 100.0)
    prof = tv.linear()
    return run_replicas(lambda r, m: tv.sample_endpoints(prof, P, 1.0, m, r), MID, seed=106)


@pytest.fixture(scope="session")
def dirdep_unit():
    """X(1) at lambda = c = 1 for x0 in {0.2, 0.5}, 10^6 paths each."""
    out = {}
    for i, x0 in enumerate((0.2, 0.5)):
        D = dd.DirDepParams(1.0, 1.0, x0)
        out[x0] = run_replicas(lambda r, m: dd.sample_endpoints(D, 1.0, m, r), BIG, seed=107 + i)
    return out


@pytest.fixture(scope="session")
def collapse_c100():
    return dd.collapse_experiment(100.0, t=1.0, replicas=10_000, band=0.01, x0=0.5, seed=7)
