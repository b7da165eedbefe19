"""Small shared numerical helpers (bracketed bisection)."""

from __future__ import annotations

import math

from .errors import NoSolutionError


def bisect_root(f, lo: float, hi: float, *, xtol: float = 1e-14, max_iter: int = 200) -> float:
    """Root of ``f`` on [lo, hi] by plain bisection.

    Requires a sign change on the bracket (an endpoint value of exactly zero
    counts). Bisection is deliberately preferred over Newton-type iterations:
    the stress law has a very flat tail where derivative-based methods leave
    the bracket.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise NoSolutionError(
            f"no sign change on bracket [{lo!r}, {hi!r}]: f(lo)={flo!r}, f(hi)={fhi!r}"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= xtol * max(1.0, abs(mid)) or mid == lo or mid == hi:
            return mid
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if math.copysign(1.0, fmid) == math.copysign(1.0, flo):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)
