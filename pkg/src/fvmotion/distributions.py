"""Mixed laws: a continuous density on an interval plus point masses."""

from dataclasses import dataclass, field
from typing import Callable, List, Tuple

import numpy as np

from .quadrature import adaptive_gauss, adaptive_simpson, panel_integrals


class DomainError(ValueError):
    """A point or time outside the domain where a formula holds."""


@dataclass(frozen=True)
class AnalyticDensity:
    """Law of a 1-D random variable at a fixed time.

    ``continuous`` is vectorized and returns 0 outside ``support``;
    ``atoms`` holds ``(location, mass)`` pairs.
    """

    continuous: Callable[[np.ndarray], np.ndarray]
    support: Tuple[float, float]
    atoms: List[Tuple[float, float]] = field(default_factory=list)
    # interior points where the continuous part is not smooth
    breakpoints: Tuple[float, ...] = ()

    @property
    def atom_mass(self) -> float:
        return float(sum(m for _, m in self.atoms))

    def continuous_mass(self, tol=1e-11, method="gauss") -> float:
        """Integral of the continuous part over the support.

        ``method="gauss"`` (default) uses adaptive Gauss-Legendre, whose
        nodes avoid the panel ends where mixed laws often jump;
        ``"simpson"`` uses adaptive Simpson on the same breakpoints.
        """
        lo, hi = self.support
        if method == "simpson":
            return adaptive_simpson(lambda z: float(self.continuous(np.array([z]))[0]),
                                    lo, hi, tol=tol, breakpoints=self.breakpoints)
        return adaptive_gauss(self.continuous, lo, hi, tol=tol, breakpoints=self.breakpoints)

    def total_mass(self, tol=1e-11, method="gauss") -> float:
        return self.continuous_mass(tol, method) + self.atom_mass

    def cdf(self, x) -> np.ndarray:
        """Right-continuous CDF, vectorized.

        The continuous part is integrated panel by panel between the sorted
        evaluation points, with a background grid so no panel is wide.
        """
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        lo, hi = self.support
        grid = np.linspace(lo, hi, 257)
        inside = flat[(flat > lo) & (flat < hi)]
        nodes = np.unique(np.concatenate([grid, inside, [p for p in self.breakpoints]]))
        pieces = panel_integrals(self.continuous, nodes, order=8)
        cum = np.concatenate([[0.0], np.cumsum(pieces)])
        cont = np.interp(np.clip(flat, lo, hi), nodes, cum)
        # exact at nodes; off-node values only occur outside the support
        out = cont
        for loc, mass in self.atoms:
            out = out + mass * (flat >= loc)
        return np.clip(out, 0.0, 1.0).reshape(x.shape)
