"""Small scalar numerical kernels: bracketed root finding and golden-section search.

These are deliberately dependency-free and tuned for the tight inner loops of
the polar/reflection solvers (a scipy.optimize call per evaluation would
dominate the sweep runtime).
"""

import math

from .errors import NumericalError, RootNotFoundError

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def bisect_newton(f, fprime, a, b, xtol=1e-13, maxiter=200):
    """Root of f on [a, b] by bisection safeguarded Newton.

    Requires f(a) and f(b) of opposite (or zero) sign.  Newton steps are taken
    whenever they stay inside the current bracket, otherwise the midpoint is
    used.  xtol is relative to the bracket magnitude.
    """
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise RootNotFoundError(
            f"no sign change on [{a!r}, {b!r}]: f(a)={fa!r}, f(b)={fb!r}")
    x = 0.5 * (a + b)
    scale = max(abs(a), abs(b), 1e-300)
    for _ in range(maxiter):
        fx = f(x)
        if fx == 0.0:
            return x
        if fx * fa < 0.0:
            b = x
        else:
            a, fa = x, fx
        if b - a <= xtol * scale:
            return 0.5 * (a + b)
        dfx = fprime(x)
        if dfx != 0.0:
            xn = x - fx / dfx
            if a < xn < b:
                x = xn
                continue
        x = 0.5 * (a + b)
    raise NumericalError(f"bisect_newton failed to converge on [{a}, {b}]")


def brent(f, a, b, xtol=1e-12, maxiter=200):
    """Derivative-free bracketed root (Brent-style: bisection + secant)."""
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise RootNotFoundError(
            f"no sign change on [{a!r}, {b!r}]: f(a)={fa!r}, f(b)={fb!r}")
    for _ in range(maxiter):
        if abs(fa) < abs(fb):
            x = b - fb * (b - a) / (fb - fa)  # secant from the better end
        else:
            x = a - fa * (b - a) / (fb - fa)
        mid = 0.5 * (a + b)
        if not (a < x < b):
            x = mid
        fx = f(x)
        if fx == 0.0:
            return x
        if fa * fx < 0.0:
            b, fb = x, fx
        else:
            a, fa = x, fx
        # fall back on bisection whenever the secant end stagnates
        if b - a > 0.5 * abs(mid - x) and abs(b - a) > xtol:
            x2 = 0.5 * (a + b)
            f2 = f(x2)
            if f2 == 0.0:
                return x2
            if fa * f2 < 0.0:
                b, fb = x2, f2
            else:
                a, fa = x2, f2
        if b - a <= xtol:
            return 0.5 * (a + b)
    raise NumericalError(f"brent failed to converge on [{a}, {b}]")


def golden_section_min(f, a, b, xtol=1e-10):
    """Abscissa of the minimum of a unimodal f on [a, b] to within xtol."""
    h = b - a
    if h <= xtol:
        return 0.5 * (a + b)
    n = int(math.ceil(math.log(xtol / h) / math.log(_INV_PHI)))
    c = a + _INV_PHI2 * h
    d = a + _INV_PHI * h
    yc, yd = f(c), f(d)
    for _ in range(n):
        if yc < yd:
            b, d, yd = d, c, yc
            h *= _INV_PHI
            c = a + _INV_PHI2 * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h *= _INV_PHI
            d = a + _INV_PHI * h
            yd = f(d)
    return 0.5 * (a + b)


def golden_section_max(f, a, b, xtol=1e-10):
    return golden_section_min(lambda x: -f(x), a, b, xtol=xtol)
