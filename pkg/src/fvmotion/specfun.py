"""Scalar special-function kernels.

Modified Bessel functions of the first kind for integer and half-integer
orders, Kummer's confluent hypergeometric function for the integer
parameters produced by Poisson order statistics, Stirling numbers of the
second kind and generalized binomial coefficients.

Bessel and Kummer evaluators accept scalars or numpy arrays.
"""

import math
from functools import lru_cache

import numpy as np

STIRLING_MAX = 64
SERIES_RTOL = 1e-16
SERIES_MAX_TERMS = 500
# above this argument the scaled Bessel functions switch to the Hankel expansion
ASYMPTOTIC_X = 40.0


class SpecialFunctionError(ValueError):
    """Raised for arguments outside the supported domain of a kernel."""


# ---------------------------------------------------------------------------
# combinatorics
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _stirling_row(k):
    if k == 0:
        return (1,)
    prev = _stirling_row(k - 1)
    row = [0] * (k + 1)
    for j in range(1, k + 1):
        left = j * prev[j] if j < k else 0
        row[j] = left + prev[j - 1]
    return tuple(row)


def stirling2(k, j):
    """Stirling number of the second kind {k, j} as an exact integer.

    Built from ``{k, j} = j {k-1, j} + {k-1, j-1}`` with ``{0, 0} = 1``.
    Only ``k <= 64`` is supported.
    """
    k, j = int(k), int(j)
    if k < 0 or j < 0:
        raise SpecialFunctionError("stirling2 needs non-negative arguments")
    if k > STIRLING_MAX:
        raise SpecialFunctionError(
            f"stirling2: k={k} exceeds the exactness window k <= {STIRLING_MAX}")
    if j > k:
        return 0
    return _stirling_row(k)[j]


def gen_binomial(a, j):
    """Generalized binomial coefficient binom(-a, j) = prod_{i<j} (-a - i) / j!."""
    j = int(j)
    if j < 0:
        raise SpecialFunctionError("gen_binomial needs j >= 0")
    out = 1.0
    for i in range(j):
        out *= (-a - i) / (i + 1)
    return out


# ---------------------------------------------------------------------------
# modified Bessel functions of the first kind
# ---------------------------------------------------------------------------

def _check_order(nu):
    twice = 2.0 * float(nu)
    if abs(twice - round(twice)) > 1e-12 or round(twice) < -1:
        raise SpecialFunctionError(
            f"Bessel order {nu} is not in {{-1/2, 0, 1/2, 1, ...}}")
    return int(round(twice))


def _series_scaled(nu, x):
    """exp(-x) I_nu(x) by the ascending series; x is a positive 1-D array."""
    half = 0.5 * x
    term = np.exp(nu * np.log(half) - math.lgamma(nu + 1.0) - x)
    total = term.copy()
    q = half * half
    max_terms = SERIES_MAX_TERMS + int(2.0 * float(np.max(x, initial=0.0)))
    for k in range(1, max_terms):
        term = term * q / (k * (k + nu))
        total += term
        if np.all(term <= SERIES_RTOL * total):
            break
    return total


def _hankel_scaled(nu, x):
    """exp(-x) I_nu(x) from the large-argument expansion (x >> nu^2)."""
    mu = 4.0 * nu * nu
    term = np.ones_like(x)
    total = np.ones_like(x)
    prev = np.full_like(x, np.inf)
    for k in range(1, 60):
        term = -term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        mag = np.abs(term)
        # stop once every entry is converged or the expansion starts to diverge
        use = mag < prev
        total = np.where(use, total + term, total)
        if np.all((mag <= SERIES_RTOL * np.abs(total)) | ~use):
            break
        prev = np.where(use, mag, 0.0)
    return total / np.sqrt(2.0 * np.pi * x)


def _half_scaled(twice_nu, x):
    """exp(-x) I_{+-1/2}(x) from the hyperbolic closed forms."""
    pref = np.sqrt(2.0 / (np.pi * x))
    em = -np.expm1(-2.0 * x)   # 1 - exp(-2x)
    if twice_nu == 1:
        return pref * 0.5 * em
    return pref * 0.5 * (2.0 - em)


def _scaled_positive(twice_nu, x):
    nu = 0.5 * twice_nu
    out = np.empty_like(x)
    if twice_nu in (-1, 1):
        return _half_scaled(twice_nu, x)
    big = x > max(ASYMPTOTIC_X, 2.0 * nu * nu)
    if np.any(big):
        out[big] = _hankel_scaled(nu, x[big])
    small = ~big
    if np.any(small):
        xs = x[small]
        if twice_nu % 2 == 1:
            out[small] = _half_recurrence_scaled(twice_nu, xs)
        else:
            out[small] = _series_scaled(nu, xs)
    return out


def _half_recurrence_scaled(twice_nu, x):
    """Half-integer orders: closed forms plus upward recurrence where it is
    stable (order below the argument), ascending series elsewhere."""
    nu = 0.5 * twice_nu
    out = np.empty_like(x)
    rec = x >= max(nu, 0.5 * nu * nu)
    if np.any(rec):
        xr = x[rec]
        lo = _half_scaled(-1, xr)
        hi = _half_scaled(1, xr)
        order = 0.5
        while order < nu:
            lo, hi = hi, lo - (2.0 * order / xr) * hi
            order += 1.0
        out[rec] = hi
    if np.any(~rec):
        out[~rec] = _series_scaled(nu, x[~rec])
    return out


def _prepare(x):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise SpecialFunctionError("Bessel argument must be non-negative")
    return arr


def bessel_ie(nu, x):
    """Exponentially scaled modified Bessel function exp(-x) I_nu(x).

    ``nu`` must be an integer or a half-integer >= -1/2; ``x >= 0``
    (``x > 0`` for ``nu = -1/2``).
    """
    twice = _check_order(nu)
    arr = _prepare(x)
    flat = np.atleast_1d(arr).astype(float).ravel()
    out = np.zeros_like(flat)
    zero = flat == 0.0
    if np.any(zero):
        if twice == -1:
            raise SpecialFunctionError("I_{-1/2}(x) is singular at x = 0")
        out[zero] = 1.0 if twice == 0 else 0.0
    pos = ~zero
    if np.any(pos):
        out[pos] = _scaled_positive(twice, flat[pos])
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def bessel_i(nu, x):
    """Modified Bessel function of the first kind I_nu(x) for x >= 0.

    Examples
    --------
    >>> bessel_i(0, 0.0)
    1.0
    >>> round(bessel_i(0.5, 1.0), 12)
    0.937674888245
    """
    arr = _prepare(x)
    with np.errstate(over="ignore"):
        return bessel_ie(nu, arr) * np.exp(arr)


def i1_over_x_scaled(x):
    """exp(-x) I_1(x) / x, continuous at x = 0 where it equals 1/2."""
    arr = _prepare(x)
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)
    tiny = flat < 1e-3
    if np.any(tiny):
        q = 0.25 * flat[tiny] ** 2
        # I_1(x)/x = (1/2) sum_k q^k / (k! (k+1)!)
        out[tiny] = 0.5 * (1.0 + q / 2.0 + q * q / 12.0) * np.exp(-flat[tiny])
    rest = ~tiny
    if np.any(rest):
        out[rest] = bessel_ie(1, flat[rest]) / flat[rest]
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


# ---------------------------------------------------------------------------
# confluent hypergeometric 1F1(j; b; z) for integer 0 <= j < b
# ---------------------------------------------------------------------------

def _check_kummer(j, b):
    j, b = int(j), int(b)
    if b < 1 or j < 0:
        raise SpecialFunctionError("hyp1f1 needs j >= 0 and b >= 1")
    if j >= b:
        raise SpecialFunctionError(f"hyp1f1 requires j < b, got j={j}, b={b}")
    return j, b


def hyp1f1_scaled(j, b, z):
    """exp(-z) 1F1(j; b; z) for integers 0 <= j < b and real z >= 0.

    The series has positive terms only; they are accumulated with
    ``math.fsum``.
    """
    j, b = _check_kummer(j, b)
    z = float(z)
    if z < 0:
        raise SpecialFunctionError("hyp1f1 is only provided for z >= 0")
    if j == 0:
        return math.exp(-z)
    if z == 0:
        return 1.0
    # terms are kept in log form so that exp(-z) never underflows on its own
    log_z = math.log(z)
    lt = -z
    logs = [lt]
    peak = lt
    cut = math.log(SERIES_RTOL)
    cap = SERIES_MAX_TERMS + int(3 * z)
    for k in range(cap):
        lt += math.log(j + k) + log_z - math.log((b + k) * (k + 1))
        logs.append(lt)
        peak = max(peak, lt)
        # past the peak the terms only shrink; stop once they stop mattering
        if k > z and lt < peak + cut:
            break
    return math.fsum(math.exp(v) for v in logs)


def hyp1f1(j, b, z):
    """Kummer function 1F1(j; b; z) for integers 0 <= j < b, z >= 0.

    >>> hyp1f1(0, 5, 3.0)
    1.0
    >>> abs(hyp1f1(1, 2, 1.0) - (math.e - 1.0)) < 1e-15
    True
    """
    j, b = _check_kummer(j, b)
    if j == 0:
        return 1.0
    return hyp1f1_scaled(j, b, z) * math.exp(float(z))
