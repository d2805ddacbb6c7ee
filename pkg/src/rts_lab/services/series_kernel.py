"""Special functions and series primitives shared by every bound calculator."""

import math

import numpy as np
from scipy import special

from rts_lab.schemas.series import SeriesCoefficients, TailMode

# Above this n, ln(n!) comes from the log-gamma function instead of an exact product.
_EXACT_FACTORIAL_LIMIT = 500


class SeriesDomainError(ValueError):
    """Raised when a series primitive is called outside its validity domain."""


def log_factorial(n: int) -> float:
    """
    Natural logarithm of n!.

    Args:
        n: Non-negative integer

    Returns:
        ln(n!)

    Raises:
        SeriesDomainError: If n is negative

    Examples:
        >>> log_factorial(0)
        0.0
        >>> round(log_factorial(20), 4)
        42.3356
    """
    if n < 0:
        raise SeriesDomainError(f"factorial of negative integer {n}")
    if n <= 1:
        return 0.0
    if n <= _EXACT_FACTORIAL_LIMIT:
        return math.log(math.factorial(n))
    return float(special.gammaln(n + 1))


def log_gamma_factorial(x: float) -> float:
    """ln(x!) for real x > -1 (half-integer factorials in the erf bounds)."""
    if x <= -1.0:
        raise SeriesDomainError(f"factorial undefined at {x}")
    return float(special.gammaln(x + 1.0))


def bessel_j_sequence(t: float, k_max: int) -> np.ndarray:
    """
    Bessel functions of the first kind J_0(t)..J_{k_max}(t).

    Args:
        t: Argument, |t| <= 100
        k_max: Highest order, 0 <= k_max <= 300

    Returns:
        Real array of length k_max + 1

    Raises:
        SeriesDomainError: If the argument or order range is violated
    """
    if not math.isfinite(t) or abs(t) > 100.0:
        raise SeriesDomainError(f"|t| must not exceed 100, got {t}")
    if not 0 <= k_max <= 300:
        raise SeriesDomainError(f"k_max must lie in [0, 300], got {k_max}")
    return special.jv(np.arange(k_max + 1), t)


def bessel_i_scaled_sequence(z: float, k_max: int) -> np.ndarray:
    """e^{-z} I_0(z)..e^{-z} I_{k_max}(z) for z >= 0."""
    if not math.isfinite(z) or z < 0.0:
        raise SeriesDomainError(f"z must be finite and non-negative, got {z}")
    if k_max < 0:
        raise SeriesDomainError(f"k_max must be non-negative, got {k_max}")
    return special.ive(np.arange(k_max + 1), z)


def chebyshev_t(k: int, x: float) -> float:
    """
    Chebyshev polynomial of the first kind T_k(x).

    Args:
        k: Non-negative degree
        x: Point in [-1, 1]

    Returns:
        T_k(x) = cos(k arccos x)

    Raises:
        SeriesDomainError: If |x| > 1 or k < 0
    """
    if k < 0:
        raise SeriesDomainError(f"degree must be non-negative, got {k}")
    if not abs(x) <= 1.0:
        raise SeriesDomainError(f"|x| must not exceed 1, got {x}")
    return float(special.eval_chebyt(k, x))


def taylor_term(c: float, k: int) -> float:
    """c^k / k! evaluated in log-domain."""
    if k == 0:
        return 1.0
    return math.exp(k * math.log(c) - log_factorial(k))


def taylor_tail(c: float, k: int, mode: TailMode = TailMode.CLOSED_BOUND) -> float:
    """
    Tail Σ_{j>K} c^j / j! of the exponential series.

    Args:
        c: Positive real
        k: Truncation order K >= 0
        mode: EXACT for the tail itself, CLOSED_BOUND for 2 c^{K+1}/(K+1)!

    Returns:
        The tail value or its closed-form bound

    Raises:
        SeriesDomainError: If c <= 0, K < 0, or the closed bound's ratio
            margin c/(K+2) <= 1/2 fails

    Examples:
        >>> taylor_tail(math.log(2), 0, TailMode.EXACT)
        1.0
    """
    if not c > 0.0 or not math.isfinite(c):
        raise SeriesDomainError(f"c must be positive, got {c}")
    if k < 0:
        raise SeriesDomainError(f"truncation order must be non-negative, got {k}")
    if mode == TailMode.EXACT:
        # e^c P(K+1, c), with P the regularized lower incomplete gamma function
        return float(math.exp(c) * special.gammainc(k + 1, c))
    if c / (k + 2) > 0.5:
        raise SeriesDomainError(
            f"closed tail bound needs c/(K+2) <= 1/2, got c={c}, K={k}"
        )
    return 2.0 * taylor_term(c, k + 1)


def erf_reference(x: float) -> float:
    """Error function erf(x)."""
    if not math.isfinite(x):
        raise SeriesDomainError(f"erf argument must be finite, got {x}")
    return float(special.erf(x))


def taylor_exp_coefficients(scale: complex, order: int) -> SeriesCoefficients:
    """
    Coefficients α_k = scale^k / k! of exp(scale·x) truncated at ``order``.

    Args:
        scale: Complex multiplier (e.g. -iτ for e^{-iHτ})
        order: Truncation order K

    Returns:
        SeriesCoefficients of length K + 1
    """
    if order < 0:
        raise SeriesDomainError(f"order must be non-negative, got {order}")
    values = np.empty(order + 1, dtype=complex)
    values[0] = 1.0
    for k in range(1, order + 1):
        values[k] = values[k - 1] * scale / k
    return SeriesCoefficients(values=values, truncation_order=order)
