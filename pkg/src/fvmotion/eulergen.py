"""Two-parameter generalized Euler polynomials E_n^{(a, theta)}(x).

They are the Taylor coefficients of

    ((theta + 1) / (theta e^t + 1))^a e^{x t} = sum_n E_n(x) t^n / n!

and are given explicitly by

    E_n(x) = sum_k C(n, k) x^{n-k} sum_j binom(-a, j) j! {k, j} (theta/(theta+1))^j.

The inner sums alternate in sign and cancel heavily for large k, so they
are assembled in exact rational arithmetic from the binary values of ``a``
and ``theta`` and rounded once.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import math
from typing import Tuple

import numpy as np

from .specfun import STIRLING_MAX, SpecialFunctionError, stirling2


@dataclass(frozen=True)
class PolySeries:
    """Coefficients of one polynomial; ``coeffs[m]`` multiplies x**m."""

    n: int
    a: float
    theta: float
    coeffs: Tuple[float, ...]

    def __call__(self, x):
        return eval_poly(self, x)

    @property
    def degree(self):
        return self.n


def _check(n, a, theta):
    n = int(n)
    if n < 0:
        raise SpecialFunctionError("degree must be non-negative")
    if n > STIRLING_MAX:
        raise SpecialFunctionError(
            f"degree {n} exceeds the supported window n <= {STIRLING_MAX}")
    if not (a > 0 and theta > 0) or not (math.isfinite(a) and math.isfinite(theta)):
        raise SpecialFunctionError("a and theta must be positive and finite")
    return n


@lru_cache(maxsize=4096)
def _inner_exact(k, a, theta):
    """sum_j binom(-a, j) j! {k, j} r^j with r = theta/(theta+1), exactly."""
    fa, ft = Fraction(a), Fraction(theta)
    r = ft / (ft + 1)
    total = Fraction(0)
    rising = Fraction(1)   # binom(-a, j) j! = (-1)^j a (a+1) ... (a+j-1)
    rpow = Fraction(1)
    for j in range(k + 1):
        if j > 0:
            rising *= -(fa + j - 1)
            rpow *= r
        s = stirling2(k, j)
        if s:
            total += rising * s * rpow
    return total


def _coeffs_exact(n, a, theta):
    return [math.comb(n, n - m) * _inner_exact(n - m, a, theta) for m in range(n + 1)]


def euler_poly(n, a, theta):
    """Coefficient array of E_n^{(a, theta)}.

    >>> euler_poly(2, 1.0, 1.0).coeffs
    (0.0, -1.0, 1.0)
    """
    n = _check(n, a, theta)
    a, theta = float(a), float(theta)
    coeffs = tuple(float(c) for c in _coeffs_exact(n, a, theta))
    return PolySeries(n, a, theta, coeffs)


def eval_poly(p: PolySeries, x):
    """Horner evaluation; ``x`` may be an array."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for c in reversed(p.coeffs):
        out = out * x + c
    return float(out) if out.ndim == 0 else out


def euler_value(n, a, theta, x):
    """E_n^{(a, theta)}(x) for a scalar x, exact up to one final rounding."""
    n = _check(n, a, theta)
    fx = Fraction(float(x))
    total = Fraction(0)
    for c in reversed(_coeffs_exact(n, float(a), float(theta))):
        total = total * fx + c
    return float(total)


def gf_lhs(a, theta, x, t):
    """Closed-form generating function ((theta+1)/(theta e^t+1))^a e^{xt}."""
    return ((theta + 1.0) / (theta * math.exp(t) + 1.0)) ** a * math.exp(x * t)


def gf_partial_sum(a, theta, x, t, N):
    """sum_{n <= N} E_n(x) t^n / n!."""
    N = _check(N, a, theta)
    terms = [euler_value(n, a, theta, x) * t ** n / math.factorial(n) for n in range(N + 1)]
    return math.fsum(terms)


def classical_euler_poly(n):
    """Classical Euler polynomial E_n(x) = E_n^{(1,1)}(x)."""
    return euler_poly(n, 1.0, 1.0)
