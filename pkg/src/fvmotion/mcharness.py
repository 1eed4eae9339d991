"""Seeded Monte Carlo infrastructure.

Random streams are Philox (counter-based) generators keyed by a
``SeedSequence`` spawn key, so a replica's draws depend only on the seed and
its index, never on how work is scheduled.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math
from typing import Callable, Optional, Sequence

import numpy as np

BLOCK_SIZE = 4096
DEFAULT_K = 3.0

_REPLICA_NS = 0
_BLOCK_NS = 1
_AUX_NS = 2


def replica_stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for replica ``index`` under ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(_REPLICA_NS, int(index)))
    return np.random.Generator(np.random.Philox(ss))


def block_stream(seed: int, block: int) -> np.random.Generator:
    """Generator shared by the replicas of one fixed-size block."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(_BLOCK_NS, int(block)))
    return np.random.Generator(np.random.Philox(ss))


def aux_stream(seed: int, *keys: int) -> np.random.Generator:
    """Named stream for auxiliary draws (e.g. one stream per experiment)."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(_AUX_NS, *map(int, keys)))
    return np.random.Generator(np.random.Philox(ss))


def run_replicas(sampler: Callable, n: int, seed: int, *, vectorized: bool = True,
                 block_size: int = BLOCK_SIZE, workers: int = 1) -> np.ndarray:
    """Draw ``n`` replicas of ``sampler`` deterministically from ``seed``.

    With ``vectorized=True`` the sampler is called as ``sampler(rng, m)`` and
    must return ``m`` rows; replicas are grouped into blocks of
    ``block_size``, block ``b`` drawing from ``block_stream(seed, b)``.
    Otherwise ``sampler(rng)`` is called once per replica with its own
    ``replica_stream``. Output is identical for any ``workers`` count.
    """
    n = int(n)
    if n < 1:
        raise ValueError("run_replicas needs n >= 1")
    if vectorized:
        sizes = [min(block_size, n - start) for start in range(0, n, block_size)]

        def job(b):
            return np.asarray(sampler(block_stream(seed, b), sizes[b]))
        indices = range(len(sizes))
    else:
        def job(i):
            return np.asarray(sampler(replica_stream(seed, i)))
        indices = range(n)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, indices))
    else:
        parts = [job(i) for i in indices]
    if vectorized:
        return np.concatenate(parts, axis=0)
    return np.stack(parts, axis=0)


@dataclass(frozen=True)
class McReport:
    """Monte Carlo estimate with its standard error and a k-sigma verdict."""

    estimate: float
    std_error: float
    replicas: int
    seed: Optional[int] = None
    target: Optional[float] = None
    k: float = DEFAULT_K
    name: str = ""

    @property
    def verdict(self) -> str:
        if self.target is None:
            return "n/a"
        if abs(self.estimate - self.target) <= self.k * self.std_error:
            return "pass"
        return "fail"

    @property
    def z_score(self) -> Optional[float]:
        if self.target is None or self.std_error == 0:
            return None
        return (self.estimate - self.target) / self.std_error

    def to_dict(self) -> dict:
        out = {"estimate": self.estimate, "se": self.std_error, "n": self.replicas,
               "seed": self.seed, "target": self.target, "k": self.k,
               "verdict": self.verdict}
        if self.name:
            out = {"name": self.name, **out}
        return out


def mean_report(values, *, target=None, seed=None, k=DEFAULT_K, name="") -> McReport:
    """Sample mean of ``values`` with plug-in standard error."""
    values = np.asarray(values, dtype=float)
    n = values.size
    est = float(np.mean(values))
    se = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return McReport(est, se, n, seed, None if target is None else float(target), k, name)


def moment_estimate(samples, k: int, *, target=None, seed=None, nsigma=DEFAULT_K,
                    name="") -> McReport:
    """k-th raw sample moment with plug-in standard error."""
    samples = np.asarray(samples, dtype=float)
    return mean_report(samples ** int(k), target=target, seed=seed, k=nsigma, name=name)


def ks_with_atoms(samples, cdf: Callable, atoms: Sequence = ()) -> float:
    """Kolmogorov-Smirnov distance to a law with point masses.

    ``cdf`` is the right-continuous distribution function, vectorized over
    a sorted array; ``atoms`` lists ``(location, mass)`` pairs. The sup is
    taken over both one-sided limits at every sample value and atom.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise ValueError("ks_with_atoms needs at least one sample")
    atoms = [(float(a), float(m)) for a, m in atoms]
    locs = np.array([a for a, _ in atoms], dtype=float)
    pts = np.unique(np.concatenate([x, locs]))
    n = x.size
    ecdf_right = np.searchsorted(x, pts, side="right") / n
    ecdf_left = np.searchsorted(x, pts, side="left") / n
    f_right = np.asarray(cdf(pts), dtype=float)
    jump = np.zeros_like(pts)
    for loc, mass in atoms:
        jump[pts == loc] += mass
    f_left = f_right - jump
    return float(max(np.max(np.abs(ecdf_right - f_right)),
                     np.max(np.abs(ecdf_left - f_left))))


def ks_critical(n: int, coeff: float = 1.63) -> float:
    """Asymptotic KS critical value ``coeff / sqrt(n)``."""
    return coeff / math.sqrt(n)


def cross_correlation(a, b) -> float:
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    return float(np.corrcoef(a, b)[0, 1])


def report_dicts(reports) -> list:
    return [r.to_dict() for r in reports]


__all__ = [
    "McReport", "run_replicas", "replica_stream", "block_stream", "aux_stream",
    "mean_report", "moment_estimate", "ks_with_atoms", "ks_critical",
    "cross_correlation", "report_dicts",
]
