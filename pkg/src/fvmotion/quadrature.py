"""Adaptive Simpson, adaptive Gauss-Legendre and fixed Gauss-Legendre quadrature."""

import math

import numpy as np

DEFAULT_TOL = 1e-10
MAX_DEPTH = 50
_EPS = np.finfo(float).eps


class QuadratureError(RuntimeError):
    pass


def adaptive_simpson(f, a, b, tol=DEFAULT_TOL, breakpoints=(), max_depth=MAX_DEPTH):
    """Integrate a scalar function on [a, b] with adaptive Simpson.

    ``breakpoints`` split the interval before refinement starts (kinks,
    endpoints of smooth pieces). The absolute tolerance is shared between
    the pieces in proportion to their length.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    cuts = sorted({a, b, *[p for p in breakpoints if a < p < b]})
    total = []
    width = b - a
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        total.append(_simpson_piece(f, lo, hi, tol * (hi - lo) / width, max_depth))
    return sign * math.fsum(total)


def _simpson_piece(f, a, b, tol, max_depth):
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
    parts = []
    # explicit stack: (a, b, fa, fm, fb, whole, tol, depth)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        a, b, fa, fm, fb, whole, tol, depth = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
        right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
        delta = left + right - whole
        # below a few ulps of the piece the difference is pure roundoff
        floor = max(15.0 * tol, 64.0 * _EPS * (abs(left) + abs(right)))
        if depth >= 4 and (abs(delta) <= floor or depth >= max_depth):
            if depth >= max_depth and abs(delta) > floor:
                raise QuadratureError(
                    f"adaptive Simpson did not converge on [{a}, {b}]")
            parts.append(left + right + delta / 15.0)
            continue
        stack.append((m, b, fm, frm, fb, right, 0.5 * tol, depth + 1))
        stack.append((a, m, fa, flm, fm, left, 0.5 * tol, depth + 1))
    return math.fsum(parts)


def gauss_legendre(n):
    return np.polynomial.legendre.leggauss(n)


def panel_integrals(f, edges, order=8):
    """Integrals of a vectorized ``f`` over consecutive panels ``edges``.

    Each panel uses ``order``-point Gauss-Legendre; returns an array of
    length ``len(edges) - 1``.
    """
    edges = np.asarray(edges, dtype=float)
    x, w = gauss_legendre(order)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid[:, None] + half[:, None] * x[None, :]
    vals = f(nodes.ravel()).reshape(nodes.shape)
    return half * (vals @ w)


def fixed_quad(f, a, b, order=8, panels=1):
    edges = np.linspace(a, b, panels + 1)
    return float(np.sum(panel_integrals(f, edges, order)))


def adaptive_gauss(f, a, b, tol=DEFAULT_TOL, breakpoints=(), order=10, max_panels=100_000):
    """Integrate a vectorized ``f`` on [a, b] by panel bisection.

    Each panel compares ``order``-point and ``2*order``-point Gauss-Legendre
    values and is split until they agree to its share of ``tol``. Nodes are
    interior, so jumps at panel edges (support ends, breakpoints) are
    handled exactly.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    cuts = sorted({a, b, *[p for p in breakpoints if a < p < b]})
    lo = np.array(cuts[:-1], dtype=float)
    hi = np.array(cuts[1:], dtype=float)
    width = b - a
    done = []
    while lo.size:
        edges_lo, edges_hi = lo, hi
        coarse = _gl_panels(f, edges_lo, edges_hi, order)
        fine = _gl_panels(f, edges_lo, edges_hi, 2 * order)
        share = tol * (edges_hi - edges_lo) / width
        err = np.abs(fine - coarse)
        ok = (err <= np.maximum(share, 64.0 * _EPS * np.abs(fine))) | ((edges_hi - edges_lo) < 1e-13 * width)
        done.extend(fine[ok].tolist())
        mid = 0.5 * (edges_lo[~ok] + edges_hi[~ok])
        lo = np.concatenate([edges_lo[~ok], mid])
        hi = np.concatenate([mid, edges_hi[~ok]])
        if len(done) + lo.size > max_panels:
            raise QuadratureError("adaptive Gauss-Legendre exceeded its panel budget")
    return sign * math.fsum(done)


def _gl_panels(f, lo, hi, order):
    x, w = gauss_legendre(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(f(nodes.ravel()), dtype=float).reshape(nodes.shape)
    return half * (vals @ w)
