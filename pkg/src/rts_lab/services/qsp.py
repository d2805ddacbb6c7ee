"""Polynomial-level QSP applications: Jacobi–Anger simulation and erf-based amplification."""

import logging
import math
from collections.abc import Callable

import numpy as np
from numpy.polynomial import chebyshev
from scipy import optimize

from rts_lab.config import simulation_config
from rts_lab.schemas.mixing import SeriesMixSpec
from rts_lab.schemas.qsp import (
    JacobiAngerSpec,
    JaVariant,
    QspBoundSet,
    UsaCertificate,
    UsaSpec,
    UsaTarget,
)
from rts_lab.schemas.report import Application, BoundReport, Verdict
from rts_lab.schemas.series import SeriesCoefficients
from rts_lab.services.mixing_core import amplify_tail, modified_coefficients
from rts_lab.services.series_kernel import (
    bessel_i_scaled_sequence,
    bessel_j_sequence,
    erf_reference,
    log_factorial,
    log_gamma_factorial,
)

logger = logging.getLogger(__name__)

ScalarFunction = Callable[[float | np.ndarray], complex | float | np.ndarray]

MIN_GRID_POINTS = 101
MIXING_IDENTITY_SLACK = 1e-12
OUT_OF_REGIME = "bound formula out of regime"


class QspError(ValueError):
    """Raised for invalid QSP polynomial parameters or evaluation points."""


def _check_unit_interval(x: float | np.ndarray, name: str = "lambda") -> np.ndarray:
    values = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(values)) or np.any(np.abs(values) > 1.0):
        raise QspError(f"|{name}| must not exceed 1")
    return values


def _as_output(values: np.ndarray, x: float | np.ndarray):
    if np.ndim(x) == 0:
        return values.item()
    return values


# ---------------------------------------------------------------------------
# Jacobi–Anger expansion of e^{-iλt}
# ---------------------------------------------------------------------------


def jacobi_anger_coefficients(t: float, k: int) -> np.ndarray:
    """
    Chebyshev coefficients c_k = (2 - δ_k0)(-i)^k J_k(t) of e^{-iλt}, k = 0..K.

    Even orders form the cosine part and odd orders the sine part.
    """
    bessel = bessel_j_sequence(t, k)
    orders = np.arange(k + 1)
    weights = np.where(orders == 0, 1.0, 2.0)
    return weights * (-1j) ** orders * bessel


def _ja_mix_spec(spec: JacobiAngerSpec) -> SeriesMixSpec:
    base = SeriesCoefficients(
        values=jacobi_anger_coefficients(spec.t, spec.k2), truncation_order=spec.k2
    )
    return SeriesMixSpec(base=base, k1=spec.k1, k2=spec.k2, p=spec.p)


def eval_jacobi_anger(lam: float | np.ndarray, spec: JacobiAngerSpec, variant: JaVariant):
    """
    Evaluate a truncated Jacobi–Anger polynomial.

    Args:
        lam: Eigenvalue point(s) in [-1, 1]
        spec: Evolution time and (K1, K2, p)
        variant: V1 (K1 truncation), V2 (orders in (K1, K2] scaled by 1/(1-p)),
            or VM (p V1 + (1-p) V2, equal to the plain K2 truncation)

    Returns:
        Complex value, or an array for array input

    Raises:
        QspError: If |lam| > 1
    """
    points = _check_unit_interval(lam)
    first, second = modified_coefficients(_ja_mix_spec(spec))
    if variant == JaVariant.V1:
        values = chebyshev.chebval(points, first.values)
    elif variant == JaVariant.V2:
        values = chebyshev.chebval(points, second.values)
    else:
        mixed = spec.p * first.padded(spec.k2) + (1.0 - spec.p) * second.values
        values = chebyshev.chebval(points, mixed)
    return _as_output(np.asarray(values, dtype=complex), lam)


def eval_plain_jacobi_anger(lam: float | np.ndarray, t: float, k: int):
    """Plain K-truncated Jacobi–Anger polynomial at lam."""
    points = _check_unit_interval(lam)
    values = chebyshev.chebval(points, jacobi_anger_coefficients(t, k))
    return _as_output(np.asarray(values, dtype=complex), lam)


def jacobi_anger_tail_bound(t: float, k: int) -> float:
    """4 t^K / (2^K K!) in log-domain."""
    if t == 0.0:
        return 0.0
    return math.exp(math.log(4.0) + k * (math.log(abs(t)) - math.log(2.0)) - log_factorial(k))


def ja_margin_holds(t: float, k: int) -> bool:
    """Ratio-test margin t / (2K) <= 1/2 of the tail bound."""
    return abs(t) / (2.0 * k) <= 0.5


def _qsp_bound_set(spec: JacobiAngerSpec) -> QspBoundSet:
    delta1 = jacobi_anger_tail_bound(spec.t, spec.k1)
    delta_m = jacobi_anger_tail_bound(spec.t, spec.k2)
    ratio = spec.p / (1.0 - spec.p)
    return QspBoundSet(
        eps1_v1=delta1,
        eps2_v1=0.0,
        eps1_v2=ratio * delta1,
        eps2_v2=5.0 * ratio * delta1,
        eps1_vm=delta_m,
        eps2_vm=0.0,
        delta1=delta1,
        delta_m=delta_m,
        epsilon=max(28.0 * delta1, 8.0 * math.sqrt(delta_m)),
        xi=4.0 * spec.p * math.sqrt(delta1),
        v2_certificate=ratio * delta1 + delta_m,
        query_cost=spec.p * spec.k1 + (1.0 - spec.p) * spec.k2,
    )


def qsp_hs_bounds(spec: JacobiAngerSpec) -> QspBoundSet:
    """
    Truncation, rescaling and total bounds for QSP Hamiltonian simulation.

    Args:
        spec: Evolution time t > 0 and (K1, K2, p)

    Returns:
        QspBoundSet with δ = 4 t^K / (2^K K!) and ε = max{28 δ1, 8 √δm}

    Raises:
        QspError: If t <= 0 or the margin t / (2 K1) <= 1/2 fails

    Examples:
        >>> bounds = qsp_hs_bounds(JacobiAngerSpec(t=1.0, k1=6, k2=10, p=0.5))
        >>> f"{bounds.delta1:.3e}"
        '8.681e-05'
    """
    if not spec.t > 0.0:
        raise QspError(f"evolution time must be positive, got {spec.t}")
    if not ja_margin_holds(spec.t, spec.k1):
        raise QspError(
            f"tail bound margin t/(2 K1) <= 1/2 fails for t={spec.t}, K1={spec.k1}"
        )
    return _qsp_bound_set(spec)


def qsp_bounds_report(bounds: QspBoundSet) -> BoundReport:
    """Express a QSP-HS bound set as a generic bound report."""
    extras = bounds.model_dump(exclude={"delta1", "delta_m", "epsilon", "xi"})
    return BoundReport(
        application=Application.QSP_HS,
        delta1=bounds.delta1,
        delta_m=bounds.delta_m,
        a1=bounds.eps1_v1,
        a2=bounds.eps1_v2,
        b=bounds.eps1_vm,
        epsilon=bounds.epsilon,
        xi=bounds.xi,
        extras=extras,
        provenance={"xi_form": "4 p sqrt(delta1)"},
    )


# ---------------------------------------------------------------------------
# Grid scans
# ---------------------------------------------------------------------------


def _evaluate_on_grid(fn: ScalarFunction, grid: np.ndarray) -> np.ndarray:
    try:
        values = np.broadcast_to(np.asarray(fn(grid), dtype=complex), grid.shape)
    except (TypeError, ValueError):
        values = np.array([complex(fn(float(x))) for x in grid])
    return values


def scan_max_deviation(
    approx: ScalarFunction,
    target: ScalarFunction,
    grid_points: int | None = None,
    interval: tuple[float, float] = (-1.0, 1.0),
) -> float:
    """
    Sup-norm of approx - target estimated on a uniform grid plus one local refinement.

    Args:
        approx: Function of λ (vectorized or scalar)
        target: Function of λ (vectorized or scalar)
        grid_points: Number of uniform grid points, at least 101
        interval: Scan interval, [-1, 1] by default

    Returns:
        The largest |approx(λ) - target(λ)| found

    Raises:
        QspError: On too few grid points or non-finite function values
    """
    grid_points = simulation_config.grid_points if grid_points is None else grid_points
    if grid_points < MIN_GRID_POINTS:
        raise QspError(f"grid_points must be at least {MIN_GRID_POINTS}, got {grid_points}")
    lo, hi = interval
    if not lo < hi:
        raise QspError(f"scan interval must be increasing, got {interval}")
    grid = np.linspace(lo, hi, grid_points)
    deviation = np.abs(_evaluate_on_grid(approx, grid) - _evaluate_on_grid(target, grid))
    if not np.all(np.isfinite(deviation)):
        raise QspError("non-finite function value in scan")
    index = int(np.argmax(deviation))
    best = float(deviation[index])
    if best == 0.0:
        return 0.0

    def negative_gap(x: float) -> float:
        return -abs(complex(approx(x)) - complex(target(x)))

    left = grid[max(index - 1, 0)]
    right = grid[min(index + 1, grid_points - 1)]
    refined = optimize.minimize_scalar(
        negative_gap, bounds=(left, right), method="bounded", options={"xatol": 1e-12}
    )
    if refined.success and math.isfinite(refined.fun):
        best = max(best, -float(refined.fun))
    return best


def qsp_hs_check(
    spec: JacobiAngerSpec, grid_points: int | None = None
) -> tuple[BoundReport, list[Verdict]]:
    """
    Scan the three Jacobi–Anger polynomials against e^{-iλt} and their bounds.

    Outside the margin regime the bounds are still evaluated and the report
    is marked out of regime.
    """
    if not spec.t > 0.0:
        raise QspError(f"evolution time must be positive, got {spec.t}")
    in_regime = ja_margin_holds(spec.t, spec.k1)
    bounds = _qsp_bound_set(spec)
    report = qsp_bounds_report(bounds)
    if not in_regime:
        logger.warning("t/(2 K1) > 1/2 for t=%s, K1=%d: %s", spec.t, spec.k1, OUT_OF_REGIME)
        report.provenance["regime"] = OUT_OF_REGIME

    def exact(lam):
        return np.exp(-1j * np.asarray(lam) * spec.t)

    def variant(which: JaVariant) -> ScalarFunction:
        return lambda lam: eval_jacobi_anger(lam, spec, which)

    verdicts = [
        Verdict.check(
            "v1_sup_norm",
            scan_max_deviation(variant(JaVariant.V1), exact, grid_points),
            bounds.eps1_v1,
        ),
        Verdict.check(
            "v2_sup_norm",
            scan_max_deviation(variant(JaVariant.V2), exact, grid_points),
            bounds.v2_certificate,
        ),
        Verdict.check(
            "vm_sup_norm",
            scan_max_deviation(variant(JaVariant.VM), exact, grid_points),
            bounds.eps1_vm,
        ),
        Verdict.check(
            "mixing_identity",
            scan_max_deviation(
                variant(JaVariant.VM),
                lambda lam: eval_plain_jacobi_anger(lam, spec.t, spec.k2),
                grid_points,
            ),
            0.0,
            slack=MIXING_IDENTITY_SLACK,
        ),
    ]
    return report, verdicts


# ---------------------------------------------------------------------------
# Error-function polynomial
# ---------------------------------------------------------------------------


def _check_odd(k: int, name: str = "k") -> None:
    if k < 1 or k % 2 == 0:
        raise QspError(f"{name} must be a positive odd integer, got {k}")


def erf_chebyshev_coefficients(
    gamma: float, k: int, modified: tuple[int, float] | None = None
) -> np.ndarray:
    """
    Chebyshev coefficients of the odd degree-K polynomial approximating erf(γx).

    The j-th Bessel term e^{-γ²/2} I_j(γ²/2) contributes (-1)^j (T_{2j+1}/(2j+1)
    - T_{2j-1}/(2j-1)); the j = 0 term contributes T_1.

    Args:
        gamma: Scale γ > 0
        k: Odd degree K
        modified: (K1, p) to scale the terms (K1+1)/2 <= j <= (K-1)/2 by 1/(1-p)

    Returns:
        Real coefficient array of length K + 1
    """
    _check_odd(k)
    if not gamma > 0.0:
        raise QspError(f"gamma must be positive, got {gamma}")
    j_max = (k - 1) // 2
    bessel = bessel_i_scaled_sequence(gamma**2 / 2.0, j_max)
    terms = 2.0 * gamma / math.sqrt(math.pi) * bessel
    if modified is not None:
        k1, p = modified
        _check_odd(k1, "k1")
        if k1 >= k:
            raise QspError("modified erf polynomial needs k1 < k")
        terms = amplify_tail(terms, (k1 - 1) // 2, p).real
    coefficients = np.zeros(k + 1)
    coefficients[1] = terms[0]
    for j in range(1, j_max + 1):
        sign = -1.0 if j % 2 else 1.0
        coefficients[2 * j + 1] += sign * terms[j] / (2 * j + 1)
        coefficients[2 * j - 1] -= sign * terms[j] / (2 * j - 1)
    return coefficients


def eval_erf_poly(
    x: float | np.ndarray,
    gamma: float,
    k: int,
    modified: tuple[int, float] | None = None,
):
    """
    Evaluate the erf polynomial P_{erf,γ,K}(x).

    Args:
        x: Point(s) in [-1, 1]
        gamma: Scale γ
        k: Odd degree K
        modified: Optional (K1, p) for the amplified variant

    Returns:
        Real value, or an array for array input

    Raises:
        QspError: On |x| > 1 or an even degree
    """
    points = _check_unit_interval(x, "x")
    values = chebyshev.chebval(points, erf_chebyshev_coefficients(gamma, k, modified))
    return _as_output(np.asarray(values, dtype=float), x)


def erf_tail_bound(gamma: float, j_start: int) -> float:
    """
    Rigorous sup-norm bound on [-1, 1] of the erf-series terms with index j >= j_start.

    (2γ/√π) Σ_{j>=j_start} e^{-z} I_j(z) (1/(2j-1) + 1/(2j+1)), z = γ²/2.
    """
    if j_start < 1:
        raise QspError(f"tail must start at j >= 1, got {j_start}")
    z = gamma**2 / 2.0
    j_end = max(j_start, math.ceil(z)) + 200 + math.ceil(10.0 * math.sqrt(z))
    bessel = bessel_i_scaled_sequence(z, j_end)[j_start:]
    j = np.arange(j_start, j_end + 1)
    weights = 1.0 / (2 * j - 1) + 1.0 / (2 * j + 1)
    return float(2.0 * gamma / math.sqrt(math.pi) * math.fsum(bessel * weights))


# ---------------------------------------------------------------------------
# Uniform spectral amplification
# ---------------------------------------------------------------------------


def _usa_arguments(lam: np.ndarray, spec: UsaSpec) -> tuple[np.ndarray, np.ndarray]:
    denominator = spec.erf_denominator
    return (lam + 2.0 * spec.gamma_cap) / denominator, (2.0 * spec.gamma_cap - lam) / denominator


def usa_composite(
    lam: float | np.ndarray,
    spec: UsaSpec,
    k: int | None = None,
    modified: bool = False,
):
    """
    Truncated linear function f(λ) = (λ/4Γ)(E((λ+2Γ)/√2Γδ') + E((2Γ-λ)/√2Γδ')).

    E is erf when k is None, otherwise the degree-K erf polynomial at scale
    γ = (1+2Γ)/(√2Γδ') evaluated at y/γ; ``modified`` uses the (K1, p) variant.
    """
    points = _check_unit_interval(lam)
    plus, minus = _usa_arguments(points, spec)
    if k is None:
        erf_sum = np.vectorize(erf_reference)(plus) + np.vectorize(erf_reference)(minus)
    else:
        gamma = spec.erf_scale
        variant = (spec.k1, spec.p) if modified else None
        erf_sum = eval_erf_poly(
            np.clip(plus / gamma, -1.0, 1.0), gamma, k, variant
        ) + eval_erf_poly(np.clip(minus / gamma, -1.0, 1.0), gamma, k, variant)
    values = points / (4.0 * spec.gamma_cap) * erf_sum
    return _as_output(np.asarray(values, dtype=float), lam)


def eval_usa_target(lam: float | np.ndarray, spec: UsaSpec, which: UsaTarget):
    """
    Evaluate the ideal truncated linear function or one of its polynomial composites.

    Args:
        lam: Point(s) in [-1, 1]
        spec: USA parameters
        which: IDEAL, POLY_K1, POLY_K2 (modified K2), or POLY_MIX

    Returns:
        Real value, or an array for array input
    """
    if which == UsaTarget.IDEAL:
        return usa_composite(lam, spec)
    if which == UsaTarget.POLY_K1:
        return usa_composite(lam, spec, spec.k1)
    if which == UsaTarget.POLY_K2:
        return usa_composite(lam, spec, spec.k2, modified=True)
    first = np.asarray(usa_composite(lam, spec, spec.k1))
    second = np.asarray(usa_composite(lam, spec, spec.k2, modified=True))
    return _as_output(spec.p * first + (1.0 - spec.p) * second, lam)


def erf_truncation_bound(gamma: float, k: int) -> float:
    """Closed-form erf truncation bound (γ e^{-γ²/2}/√π) 4 (γ²/2)^{(K+1)/2} / (2^{(K+1)/2} ((K+1)/2)!)."""
    half = (k + 1) / 2.0
    log_value = (
        math.log(gamma)
        - gamma**2 / 2.0
        - 0.5 * math.log(math.pi)
        + math.log(4.0)
        + half * (math.log(gamma**2 / 2.0) - math.log(2.0))
        - log_gamma_factorial(half)
    )
    return math.exp(log_value)


def usa_delta(gamma_cap: float, k: int) -> float:
    """δ_K = (8Γ e^{-8Γ²}/√π) 4 (8Γ²)^{K/2} / (2^{K/2} (K/2)!)."""
    half = k / 2.0
    log_value = (
        math.log(8.0 * gamma_cap)
        - 8.0 * gamma_cap**2
        - 0.5 * math.log(math.pi)
        + math.log(4.0)
        + half * (math.log(8.0 * gamma_cap**2) - math.log(2.0))
        - log_gamma_factorial(half)
    )
    return math.exp(log_value)


def usa_bounds(spec: UsaSpec) -> BoundReport:
    """
    Linear-function and erf-level bounds for uniform spectral amplification.

    Args:
        spec: USA parameters

    Returns:
        BoundReport with δ1, δm, ε = max{8 δm, 4 δ1²/(1-p)}, the linear a1, a2, b,
        and the erf-level a1', a2', b' (γ = 4Γ) in extras

    Raises:
        QspError: If Γ <= 0
    """
    if not spec.gamma_cap > 0.0:
        raise QspError(f"gamma_cap must be positive, got {spec.gamma_cap}")
    ratio = spec.p / (1.0 - spec.p)
    delta1 = usa_delta(spec.gamma_cap, spec.k1)
    delta_m = usa_delta(spec.gamma_cap, spec.k2)
    lemma_gamma = 4.0 * spec.gamma_cap
    a1_erf = erf_truncation_bound(lemma_gamma, spec.k1 - 1)
    return BoundReport(
        application=Application.USA,
        delta1=delta1,
        delta2=ratio * delta1,
        delta_m=delta_m,
        a1=delta1,
        a2=ratio * delta1,
        b=delta_m,
        epsilon=max(8.0 * delta_m, 4.0 / (1.0 - spec.p) * delta1**2),
        extras={
            "a1_erf": a1_erf,
            "a2_erf": ratio * a1_erf,
            "b_erf": erf_truncation_bound(lemma_gamma, spec.k2 - 1),
            "delta_prime": spec.delta_prime,
            "gamma_usa": spec.erf_scale,
            "query_cost": spec.p * spec.k1 + (1.0 - spec.p) * spec.k2,
        },
        provenance={"erf_lift": "linear bound = 2 x erf bound", "lemma_gamma": "4 Gamma"},
    )


def _rescaled_erf_deviation(spec: UsaSpec, k: int, modified: bool) -> ScalarFunction:
    gamma = spec.erf_scale
    variant = (spec.k1, spec.p) if modified else None

    def deviation(lam):
        points = np.asarray(lam, dtype=float)
        total = np.zeros_like(points)
        for y in _usa_arguments(points, spec):
            poly = np.asarray(eval_erf_poly(np.clip(y / gamma, -1.0, 1.0), gamma, k, variant))
            total = total + poly - np.vectorize(erf_reference)(y)
        return 0.5 * total

    return deviation


def usa_certificates(spec: UsaSpec, certificate: UsaCertificate) -> dict[str, float]:
    """
    Per-composite erf-level certificates; the rescaled scan bound is twice these.

    TAIL sums the Bessel tail of the erf polynomial at the composite's scale
    γ = (1+2Γ)/(√2Γδ'). LEMMA evaluates the closed-form erf lemma at γ = 4Γ and
    order K - 1, independent of δ.
    """
    ratio = spec.p / (1.0 - spec.p)
    if certificate == UsaCertificate.LEMMA:
        lemma_gamma = 4.0 * spec.gamma_cap
        a1 = erf_truncation_bound(lemma_gamma, spec.k1 - 1)
        return {
            "poly_k1": a1,
            "poly_k2": ratio * a1,
            "poly_mix": erf_truncation_bound(lemma_gamma, spec.k2 - 1),
        }
    gamma = spec.erf_scale
    tail_k1 = erf_tail_bound(gamma, (spec.k1 + 1) // 2)
    tail_k2 = erf_tail_bound(gamma, (spec.k2 + 1) // 2)
    return {
        "poly_k1": tail_k1,
        "poly_k2": ratio * max(tail_k1 - tail_k2, 0.0) + tail_k2,
        "poly_mix": tail_k2,
    }


def usa_check(
    spec: UsaSpec,
    grid_points: int | None = None,
    certificate: UsaCertificate = UsaCertificate.TAIL,
) -> tuple[BoundReport, list[Verdict]]:
    """
    Scan the USA composites over the linear region |λ| <= Γ against a certificate.

    The deviation of a composite from the ideal, rescaled by 2Γ/|λ|, is compared
    with twice the chosen certificate of its erf polynomial. Both certificate
    sets and the outcome against the one not chosen are recorded in the report.

    Args:
        spec: USA parameters
        grid_points: Scan resolution (defaults to the simulation config)
        certificate: TAIL (rigorous at the composite's scale) or LEMMA (closed form)

    Returns:
        Bound report and one verdict per composite plus the mixing identity
    """
    report = usa_bounds(spec)
    region = (-spec.gamma_cap, spec.gamma_cap)

    def zero(lam):
        return np.zeros_like(np.asarray(lam, dtype=float))

    first = _rescaled_erf_deviation(spec, spec.k1, modified=False)
    second = _rescaled_erf_deviation(spec, spec.k2, modified=True)

    def mixed(lam):
        return spec.p * first(lam) + (1.0 - spec.p) * second(lam)

    measured = {
        name: scan_max_deviation(fn, zero, grid_points, region)
        for name, fn in (("poly_k1", first), ("poly_k2", second), ("poly_mix", mixed))
    }
    holds = {}
    for kind in UsaCertificate:
        values = usa_certificates(spec, kind)
        report.extras.update({f"{kind.value}_{name}": value for name, value in values.items()})
        holds[kind.value] = all(measured[name] <= 2.0 * values[name] for name in values)
        if not holds[kind.value]:
            logger.warning(
                "USA scan exceeds the %s certificate (gamma=%g, k1=%d, k2=%d)",
                kind.value, spec.gamma_cap, spec.k1, spec.k2,
            )
    report.extras.update({f"measured_{name}": value for name, value in measured.items()})
    report.provenance.update({"certificate": certificate.value, "certificate_holds": holds})

    chosen = usa_certificates(spec, certificate)
    verdicts = [
        Verdict.check(f"{name}_rescaled", measured[name], 2.0 * chosen[name])
        for name in ("poly_k1", "poly_k2", "poly_mix")
    ]
    verdicts.append(
        Verdict.check(
            "mixing_identity",
            scan_max_deviation(
                lambda lam: eval_usa_target(lam, spec, UsaTarget.POLY_MIX),
                lambda lam: usa_composite(lam, spec, spec.k2),
                grid_points,
            ),
            0.0,
            slack=MIXING_IDENTITY_SLACK,
        )
    )
    return report, verdicts
