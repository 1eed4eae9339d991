"""Finite-velocity random motions with variable speed.

Exact laws, moment series and covariance kernels for telegraph-type
processes, each paired with a seeded Monte Carlo sampler.
"""

__version__ = "0.1.0"

from .distributions import AnalyticDensity, DomainError
from .mcharness import McReport

__all__ = ["AnalyticDensity", "DomainError", "McReport", "__version__"]
