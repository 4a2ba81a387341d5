"""Adaptive Simpson quadrature with an absolute error budget."""

from __future__ import annotations

from collections.abc import Callable

from .errors import QuadratureFailure


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float,
    *,
    max_depth: int = 50,
    max_evals: int = 1_000_000,
) -> tuple[float, float]:
    """Integrate ``f`` over ``[a, b]`` to absolute accuracy ``tol``.

    Intervals are bisected until the Richardson error estimate
    ``|S(left) + S(right) - S(whole)| / 15`` fits the share of the budget
    assigned to that interval.  Returns ``(value, error_estimate)``.

    Raises:
        QuadratureFailure: if an interval reaches ``max_depth`` or the
            evaluation budget runs out before the tolerance is met.
    """
    if tol < 0.0:
        raise ValueError("tol must be non-negative")
    if a == b:
        return 0.0, 0.0
    if a > b:
        value, err = adaptive_simpson(f, b, a, tol, max_depth=max_depth, max_evals=max_evals)
        return -value, err

    evals = 0

    def call(x: float) -> float:
        nonlocal evals
        evals += 1
        if evals > max_evals:
            raise QuadratureFailure(f"evaluation budget of {max_evals} exhausted")
        return f(x)

    fa, fm, fb = call(a), call(0.5 * (a + b)), call(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    total = 0.0
    total_err = 0.0
    # explicit stack: (a, b, fa, fm, fb, whole, tol, depth)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, s, budget, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        flm = call(0.5 * (lo + mid))
        frm = call(0.5 * (mid + hi))
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        err = (left + right - s) / 15.0
        if abs(err) <= budget:
            total += left + right + err
            total_err += abs(err)
            continue
        if depth + 1 >= max_depth:
            raise QuadratureFailure(
                f"tolerance {tol:.3e} not reached on [{lo!r}, {hi!r}] at depth {max_depth}"
            )
        stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * budget, depth + 1))
        stack.append((lo, mid, flo, flm, fmid, left, 0.5 * budget, depth + 1))
    return total, total_err
