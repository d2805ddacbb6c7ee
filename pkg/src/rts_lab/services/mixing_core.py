"""Modified coefficients, matrix polynomials, the mixing channel and its verifier."""

import logging

import numpy as np

from rts_lab.config import simulation_config
from rts_lab.schemas.mixing import (
    P_MAX,
    DenseOperator,
    MixingVerdict,
    SeriesMixSpec,
    check_probability,
)
from rts_lab.schemas.series import SeriesCoefficients

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-10
PURITY_TOL = 1e-8
ZERO_TRACE = 1e-14


class MixingError(ValueError):
    """Raised when mixing-channel inputs violate their preconditions."""


def amplify_tail(values: np.ndarray, k1: int, p: float) -> np.ndarray:
    """Copy of ``values`` with every index above k1 divided by (1 - p)."""
    check_probability(p)
    out = np.array(values, dtype=complex)
    out[k1 + 1 :] /= 1.0 - p
    return out


def modified_coefficients(spec: SeriesMixSpec) -> tuple[SeriesCoefficients, SeriesCoefficients]:
    """
    F1 and F2 coefficients of a randomized truncated series.

    Args:
        spec: Base coefficients with (K1, K2, p)

    Returns:
        (α_0..α_K1, α_0..α_K1 followed by α_k/(1-p) for K1 < k <= K2)

    Examples:
        Taylor coefficients of e^{-iz} with K1=1, K2=2, p=0.5 give the
        second series [1, -i, -1].
    """
    base = spec.base.values[: spec.k2 + 1]
    first = SeriesCoefficients(values=base[: spec.k1 + 1], truncation_order=spec.k1)
    second = SeriesCoefficients(
        values=amplify_tail(base, spec.k1, spec.p), truncation_order=spec.k2
    )
    return first, second


def horner(values: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    """Σ values[k] matrix^k by Horner's scheme."""
    dim = matrix.shape[0]
    identity = np.eye(dim, dtype=complex)
    result = values[-1] * identity
    for coefficient in values[-2::-1]:
        result = result @ matrix + coefficient * identity
    return result


def matrix_polynomial(coeffs: SeriesCoefficients, h: DenseOperator) -> DenseOperator:
    """
    Evaluate Σ_k α_k h^k.

    Args:
        coeffs: Polynomial coefficients α_0..α_K
        h: Square operator

    Returns:
        The polynomial evaluated at h
    """
    return DenseOperator(entries=horner(coeffs.values, h.entries))


def mixing_error_bound(a1: float, a2: float, b: float, p: float) -> float:
    """
    Mixed-channel bound ε = 4b + 2p a1² + 2(1-p) a2².

    Args:
        a1: Operator-norm error of V1
        a2: Operator-norm error of V2
        b: Operator-norm error of the average p V1 + (1-p) V2
        p: Mixing probability in [0, 1)

    Returns:
        The trace-distance bound ε
    """
    if min(a1, a2, b) < 0.0:
        raise MixingError("operator errors must be non-negative")
    if not 0.0 <= p < 1.0:
        raise MixingError(f"p must lie in [0, 1), got {p}")
    return 4.0 * b + 2.0 * p * a1**2 + 2.0 * (1.0 - p) * a2**2


def spectral_norm(matrix: np.ndarray) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(matrix, 2))


def _check_same_dim(*operators: DenseOperator) -> int:
    dims = {operator.dim for operator in operators}
    if len(dims) != 1:
        raise MixingError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def _check_hermitian(matrix: np.ndarray, name: str) -> None:
    if np.max(np.abs(matrix - matrix.conj().T)) > HERMITIAN_TOL:
        raise MixingError(f"{name} must be Hermitian")


def _check_density(rho: DenseOperator) -> None:
    _check_hermitian(rho.entries, "rho")
    if abs(np.trace(rho.entries).real - 1.0) > HERMITIAN_TOL:
        raise MixingError("rho must have unit trace")
    if np.min(np.linalg.eigvalsh(rho.entries)) < -HERMITIAN_TOL:
        raise MixingError("rho must be positive semidefinite")


def branch_sum(v1: np.ndarray, v2: np.ndarray, p: float, rho: np.ndarray) -> np.ndarray:
    """Unnormalized p V1 ρ V1† + (1-p) V2 ρ V2†, symmetrized."""
    out = p * (v1 @ rho @ v1.conj().T) + (1.0 - p) * (v2 @ rho @ v2.conj().T)
    return 0.5 * (out + out.conj().T)


def normalize_trace(matrix: np.ndarray) -> np.ndarray:
    """Divide by the trace, rejecting vanishing traces."""
    trace = float(np.trace(matrix).real)
    if trace < ZERO_TRACE:
        raise MixingError(f"zero-trace output ({trace:.3e}) cannot be normalized")
    return matrix / trace


def apply_mixing_channel(
    v1: DenseOperator,
    v2: DenseOperator,
    p: float,
    rho: DenseOperator,
    normalize: bool = True,
) -> DenseOperator:
    """
    Apply the two-branch channel ρ -> p V1 ρ V1† + (1-p) V2 ρ V2†.

    Args:
        v1: First branch operator
        v2: Second branch operator
        p: Probability of the first branch
        rho: Input density matrix (Hermitian, PSD, unit trace)
        normalize: Divide the output by its trace once at the end

    Returns:
        The (optionally normalized) output density matrix

    Raises:
        MixingError: On dimension mismatch, invalid ρ, or a zero-trace output
    """
    _check_same_dim(v1, v2, rho)
    if not 0.0 <= p <= 1.0:
        raise MixingError(f"p must lie in [0, 1], got {p}")
    _check_density(rho)
    out = branch_sum(v1.entries, v2.entries, p, rho.entries)
    if normalize:
        out = normalize_trace(out)
    return DenseOperator(entries=out)


def trace_distance(rho1: DenseOperator, rho2: DenseOperator) -> float:
    """
    Schatten 1-norm of rho1 - rho2.

    Args:
        rho1: Hermitian operator
        rho2: Hermitian operator of the same dimension

    Returns:
        Sum of the singular values of the difference
    """
    _check_same_dim(rho1, rho2)
    _check_hermitian(rho1.entries, "rho1")
    _check_hermitian(rho2.entries, "rho2")
    diff = rho1.entries - rho2.entries
    return float(np.sum(np.linalg.svd(diff, compute_uv=False)))


def verify_mixing_lemma(
    v1: DenseOperator,
    v2: DenseOperator,
    u: DenseOperator,
    p: float,
    rho: DenseOperator,
    slack: float | None = None,
) -> MixingVerdict:
    """
    Measure the normalized mixed-channel distance to U ρ U† against its bound.

    Args:
        v1: First branch operator
        v2: Second branch operator
        u: Target unitary
        p: Mixing probability in [0, 1 - 1e-6]
        rho: Pure input state
        slack: Domination slack (defaults to the simulation config)

    Returns:
        MixingVerdict with measured a1, a2, b, the bound and the distance

    Raises:
        MixingError: If u is not unitary, rho is not pure, or p is out of range
    """
    dim = _check_same_dim(v1, v2, u, rho)
    if not 0.0 <= p <= P_MAX:
        raise MixingError(f"p must lie in [0, {P_MAX!r}], got {p}")
    u_mat = u.entries
    if np.max(np.abs(u_mat.conj().T @ u_mat - np.eye(dim))) > UNITARY_TOL:
        raise MixingError("u must be unitary")
    _check_density(rho)
    purity = float(np.trace(rho.entries @ rho.entries).real)
    if abs(purity - 1.0) > PURITY_TOL:
        raise MixingError(f"rho must be a pure state (purity {purity:.10f})")

    a1 = spectral_norm(v1.entries - u_mat)
    a2 = spectral_norm(v2.entries - u_mat)
    b = spectral_norm(p * v1.entries + (1.0 - p) * v2.entries - u_mat)
    rhs = mixing_error_bound(a1, a2, b, p)
    mixed = apply_mixing_channel(v1, v2, p, rho, normalize=True)
    target = DenseOperator(entries=u_mat @ rho.entries @ u_mat.conj().T)
    lhs = trace_distance(mixed, target)
    epsilon_prime = rhs / 2.0
    if epsilon_prime > 1.0:
        logger.warning("epsilon' = %.3e exceeds 1; the mixing bound is outside its regime", epsilon_prime)
    if slack is None:
        slack = simulation_config.mixing_slack
    return MixingVerdict.evaluate(lhs, rhs, a1, a2, b, epsilon_prime=epsilon_prime, slack=slack)
