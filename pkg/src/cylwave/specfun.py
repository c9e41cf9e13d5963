"""Integer-order cylinder functions and the identities the solvers lean on.

Everything downstream (series oracle, mode systems, kernel matrices) reduces
to J_n, Y_n and the outgoing Hankel function H^(2)_n = J_n - i Y_n of real
positive argument, together with three classical facts:

* the Wronskian  J_n(x) H2'_n(x) - J'_n(x) H2_n(x) = 2/(i pi x),
* Graf's addition theorem for H^(2)_0 of a distance between two points given
  in polar form, plus its two first-derivative variants,
* the large-order (Debye) leading forms, used only for diagnostics.

Evaluation is delegated to scipy.special; this module adds the argument
checking, parity folding for negative orders, and overflow tagging that the
rest of the package relies on. All functions accept scalars or numpy arrays
for the argument and are safe to call concurrently.

Only real arguments are supported (every wavenumber in the package is real).
"""

import numpy as np
from scipy import special


class BesselOverflowError(ArithmeticError):
    """Raised when H^(2)_n(x) (through Y_n) exceeds the floating range.

    Callers that scan over orders treat the tagged order as unusable instead
    of letting infinities leak into matrix assembly.
    """


def _check_argument(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("argument must be finite")
    if np.any(x <= 0.0):
        raise ValueError("argument must be positive")
    return x


def _parity(n):
    """(-1)^n sign folding for negative orders."""
    return -1.0 if (n % 2) else 1.0


def bessel_j(n, x):
    """Bessel function J_n(x) for integer n (any sign) and real x > 0.

    Parameters
    ----------
    n : int
        Order. Negative orders are folded with J_{-n} = (-1)^n J_n.
    x : float or ndarray
        Argument, strictly positive.

    Returns
    -------
    float or ndarray
    """
    n = int(n)
    x = _check_argument(x)
    sign = 1.0
    if n < 0:
        sign = _parity(n)
        n = -n
    out = sign * special.jv(n, x)
    return out if out.ndim else float(out)


def bessel_j_prime(n, x):
    """Derivative J'_n(x) via the recurrence (J_{n-1} - J_{n+1}) / 2."""
    n = int(n)
    return 0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x))


def _bessel_y(n, x):
    """Y_n(x), internal only (the public complex surface is hankel2)."""
    n = int(n)
    x = _check_argument(x)
    sign = 1.0
    if n < 0:
        sign = _parity(n)
        n = -n
    out = sign * special.yv(n, x)
    if not np.all(np.isfinite(out)):
        xmin = float(np.min(x))
        raise BesselOverflowError(
            "Y_%d overflows near x=%g; order too large for this argument" % (n, xmin)
        )
    return out if out.ndim else float(out)


def hankel2(n, x):
    """Outgoing Hankel function H^(2)_n(x) = J_n(x) - i Y_n(x).

    Raises BesselOverflowError instead of returning infinities when the
    Y_n part leaves the floating range (n much larger than x).
    """
    n = int(n)
    x = _check_argument(x)
    sign = 1.0
    if n < 0:
        sign = _parity(n)
        n = -n
    out = sign * special.hankel2(n, x)
    if not (np.all(np.isfinite(out.real)) and np.all(np.isfinite(out.imag))):
        xmin = float(np.min(x))
        raise BesselOverflowError(
            "H2_%d overflows near x=%g; order too large for this argument" % (n, xmin)
        )
    return out if out.ndim else complex(out)


def hankel2_prime(n, x):
    """Derivative H2'_n(x) via the recurrence (H2_{n-1} - H2_{n+1}) / 2."""
    n = int(n)
    return 0.5 * (hankel2(n - 1, x) - hankel2(n + 1, x))


def wronskian_residual(n, x):
    """J_n H2'_n - J'_n H2_n minus its exact value 2/(i pi x).

    Should be ~1e-15 relative to 2/(pi x) for any order/argument combination
    this package touches; used as a self-check and in the validation command.
    """
    x = np.asarray(x, dtype=float)
    exact = 2.0 / (1j * np.pi * x)
    val = bessel_j(n, x) * hankel2_prime(n, x) - bessel_j_prime(n, x) * hankel2(n, x)
    return val - exact


def asymptotic_large_order(kind, n, x):
    """Leading large-order form of J, H2 or their derivatives.

    kind is one of 'J', 'H2', 'Jp', 'H2p'. Validation and convergence-rate
    analysis only; the solvers never call this.
    """
    n = int(n)
    if n < 1:
        raise ValueError("large-order form needs n >= 1")
    x = _check_argument(x)
    base = np.e * x / (2.0 * n)
    if kind == "J":
        return base ** n / np.sqrt(2.0 * np.pi * n)
    if kind == "H2":
        return 1j * np.sqrt(2.0 / (np.pi * n)) * base ** (-n)
    if kind == "Jp":
        return np.sqrt(n / (2.0 * np.pi)) * base ** n / x
    if kind == "H2p":
        return -1j * np.sqrt(2.0 * n / np.pi) * base ** (-n) / x
    raise ValueError("kind must be 'J', 'H2', 'Jp' or 'H2p'")


def _addition_sum(x1, x2, theta, n_max, term):
    """Common loop for the three addition-theorem partial sums.

    term(n) must return the product of radial factors for order n >= 0; the
    angular factor and the +/-n symmetry (all three kernels are even in n)
    are handled here. Stops early once three consecutive terms fall below
    roundoff relative to the running sum, or when higher orders overflow.
    """
    total = term(0)
    last = abs(total)
    small_streak = 0
    for n in range(1, n_max + 1):
        try:
            t = term(n)
        except BesselOverflowError:
            break
        total = total + 2.0 * t * np.cos(n * theta)
        last = abs(t)
        if 2.0 * last < 1e-14 * max(abs(total), 1e-300):
            small_streak += 1
            if small_streak >= 3:
                break
        else:
            small_streak = 0
    return total, last


def addition_series_h0(x1, x2, theta, n_max=60):
    """Partial sum of Graf's theorem for H^(2)_0 of the two-point distance.

    Sums J_n(min) H2_n(max) e^{i n theta} over |n| <= n_max, which converges
    to H^(2)_0(sqrt(x1^2 + x2^2 - 2 x1 x2 cos theta)) whenever x1 != x2.
    """
    if x1 <= 0 or x2 <= 0:
        raise ValueError("radii must be positive")
    if x1 == x2:
        raise ValueError("radii must differ (distance may vanish)")
    lo, hi = min(x1, x2), max(x1, x2)
    total, last = _addition_sum(
        x1, x2, theta, n_max, lambda n: bessel_j(n, lo) * hankel2(n, hi)
    )
    _warn_if_unconverged(last, total, lo / hi)
    return total


def addition_series_h0_d1(x1, x2, theta, n_max=60):
    """Partial sum of -sum_n J'_n(x1) H2_n(x2) e^{i n theta}, for x2 > x1.

    Equals the cosine-weighted H^(2)_1 kernel
    ((x1 - x2 cos theta)/d) H^(2)_1(d), d the two-point distance.
    """
    if not x2 > x1 > 0:
        raise ValueError("need x2 > x1 > 0")
    total, last = _addition_sum(
        x1, x2, theta, n_max, lambda n: -bessel_j_prime(n, x1) * hankel2(n, x2)
    )
    _warn_if_unconverged(last, total, x1 / x2)
    return total


def addition_series_h0_d2(x1, x2, theta, n_max=60):
    """Partial sum of -sum_n J_n(x1) H2'_n(x2) e^{i n theta}, for x2 > x1.

    Equals ((x2 - x1 cos theta)/d) H^(2)_1(d).
    """
    if not x2 > x1 > 0:
        raise ValueError("need x2 > x1 > 0")
    total, last = _addition_sum(
        x1, x2, theta, n_max, lambda n: -bessel_j(n, x1) * hankel2_prime(n, x2)
    )
    _warn_if_unconverged(last, total, x1 / x2)
    return total


def _warn_if_unconverged(last_term, total, ratio):
    import warnings

    # geometric tail bound from the radius ratio of the two points
    bound = 2.0 * abs(last_term) * ratio / max(1e-300, 1.0 - ratio)
    if bound > 1e-10 * max(abs(total), 1e-300):
        warnings.warn(
            "addition series tail estimate %.3g not below tolerance; "
            "increase n_max" % bound,
            stacklevel=3,
        )
