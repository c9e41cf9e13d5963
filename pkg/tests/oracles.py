"""Independent reference implementations used only by the test suite.

Nothing in here touches the package under test. Special functions come from
mpmath at 50 significant digits, linear solves from a textbook Gaussian
elimination written out longhand. Agreement between these and the package is
what the unit and acceptance tests assert.
"""

import mpmath
import numpy as np

mpmath.mp.dps = 50


def bessel_j_mp(n, x):
    """J_n(x) by extended-precision power series (mpmath besselj)."""
    return float(mpmath.besselj(n, mpmath.mpf(x)))


def bessel_y_mp(n, x):
    return float(mpmath.bessely(n, mpmath.mpf(x)))


def hankel2_mp(n, x):
    val = mpmath.hankel2(n, mpmath.mpf(x))
    return complex(val)


def bessel_j_prime_mp(n, x):
    """Derivative of J_n via the extended-precision recurrence."""
    if n == 0:
        return -bessel_j_mp(1, x)
    return 0.5 * (bessel_j_mp(n - 1, x) - bessel_j_mp(n + 1, x))


def hankel2_prime_mp(n, x):
    if n == 0:
        return -hankel2_mp(1, x)
    return 0.5 * (hankel2_mp(n - 1, x) - hankel2_mp(n + 1, x))


def bessel_j_prime_fd(n, x, h=1e-5):
    """Central finite difference of the extended-precision J_n, Richardson step.

    Used once to pin the frozen J' values; everywhere else the recurrence
    oracle above is preferred.
    """
    with mpmath.workdps(60):
        xm = mpmath.mpf(x)
        hh = mpmath.mpf(h)
        d1 = (mpmath.besselj(n, xm + hh) - mpmath.besselj(n, xm - hh)) / (2 * hh)
        d2 = (mpmath.besselj(n, xm + hh / 2) - mpmath.besselj(n, xm - hh / 2)) / hh
        # Richardson extrapolation of the O(h^2) rule
        return float((4 * d2 - d1) / 3)


def gauss_solve(a, b):
    """Plain Gaussian elimination with partial pivoting, complex arithmetic.

    Deliberately naive (row loops, no BLAS) so it is an independent check on
    the package's LU-backed solver.
    """
    a = np.array(a, dtype=complex)
    b = np.array(b, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n) or b.shape != (n,):
        raise ValueError("square system expected")
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(a[r, col]))
        if abs(a[pivot, col]) == 0.0:
            raise ZeroDivisionError("singular matrix")
        if pivot != col:
            a[[col, pivot]] = a[[pivot, col]]
            b[[col, pivot]] = b[[pivot, col]]
        for row in range(col + 1, n):
            factor = a[row, col] / a[col, col]
            a[row, col:] -= factor * a[col, col:]
            b[row] -= factor * b[col]
    x = np.zeros(n, dtype=complex)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - np.dot(a[row, row + 1:], x[row + 1:])) / a[row, row]
    return x
