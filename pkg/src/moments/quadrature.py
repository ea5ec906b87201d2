"""Adaptive Simpson quadrature that pre-splits the interval at known kinks."""

from typing import Callable, Iterable, Optional

from config import config
from model.errors import QuadratureError


def _simpson_mem(f: Callable[[float], float], a: float, fa: float, b: float, fb: float):
    """Simpson's rule on [a, b], also returning the midpoint and f(midpoint) for reuse."""
    m = 0.5 * (a + b)
    fm = f(m)
    return m, fm, abs(b - a) / 6.0 * (fa + 4.0 * fm + fb)


def _adaptive(f, a, fa, b, fb, eps, whole, m, fm, depth):
    lm, flm, left = _simpson_mem(f, a, fa, m, fm)
    rm, frm, right = _simpson_mem(f, m, fm, b, fb)
    delta = left + right - whole
    if abs(delta) <= 15.0 * eps:
        return left + right + delta / 15.0
    if depth <= 0:
        raise QuadratureError(
            f"adaptive Simpson did not converge on [{a}, {b}] (error estimate {abs(delta) / 15:.3e})"
        )
    return _adaptive(f, a, fa, m, fm, eps / 2, left, lm, flm, depth - 1) + _adaptive(
        f, m, fm, b, fb, eps / 2, right, rm, frm, depth - 1
    )


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: Optional[float] = None,
    knots: Iterable[float] = (),
    max_depth: Optional[int] = None,
    rel_tol: float = 1e-13,
) -> float:
    """
    Integrate f over [a, b] with adaptive Simpson's rule.

    The interval is first split at every knot strictly inside (a, b); each
    piece gets a share of the tolerance proportional to its length. The
    effective tolerance of a piece is max(tol, rel_tol * |estimate|).

    Raises:
        QuadratureError: recursion depth exhausted before reaching tolerance.
    """
    tol = config.quad_tol if tol is None else tol
    max_depth = config.quad_max_depth if max_depth is None else max_depth
    if b == a:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, tol, knots, max_depth, rel_tol)

    bounds = [a] + sorted(x for x in knots if a < x < b) + [b]
    total = 0.0
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if hi <= lo:
            continue
        flo, fhi = f(lo), f(hi)
        m, fm, whole = _simpson_mem(f, lo, flo, hi, fhi)
        eps = max(tol * (hi - lo) / (b - a), rel_tol * abs(whole))
        total += _adaptive(f, lo, flo, hi, fhi, eps, whole, m, fm, max_depth)
    return total
