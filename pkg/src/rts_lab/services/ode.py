"""Linear ODE solver built from Taylor propagators and a history-state linear system."""

import logging
import math

import numpy as np
from scipy import linalg, sparse
from scipy.sparse import linalg as sparse_linalg

from rts_lab.config import simulation_config
from rts_lab.schemas.mixing import check_k_pair, check_probability
from rts_lab.schemas.ode import (
    OdeBounds,
    OdeConstants,
    OdeEncoding,
    OdeProblem,
    OdeVerification,
)
from rts_lab.schemas.report import Application, BoundReport, Verdict
from rts_lab.services.mixing_core import amplify_tail, horner, spectral_norm
from rts_lab.services.series_kernel import log_factorial

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-11
DEFECTIVE_CONDITION = 1e12
SMALL_PHASE = 1e-8
# Largest encoding dimension handed to a dense eigendecomposition.
DENSE_EIG_LIMIT = 2048


class OdeError(ValueError):
    """Raised for invalid ODE problems, oversized encodings or solver breakdown."""


def propagator_coefficients(
    k: int, modified: tuple[int, float] | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """
    Power-series coefficients of T_K(z) = Σ_{q<=K} z^q/q! and S_K(z) = Σ_{1<=q<=K} z^{q-1}/q!.

    With ``modified`` = (K1, p) every order q > K1 is scaled by 1/(1-p) in both.
    """
    if k < 0:
        raise OdeError(f"order must be non-negative, got {k}")
    t_coeffs = np.array([math.exp(-log_factorial(q)) for q in range(k + 1)], dtype=complex)
    s_coeffs = t_coeffs[1:].copy()
    if modified is not None:
        k1, p = modified
        check_probability(p)
        t_coeffs = amplify_tail(t_coeffs, k1, p)
        # S index q-1 holds order q
        s_coeffs = amplify_tail(s_coeffs, k1 - 1, p)
    return t_coeffs, s_coeffs


def eval_propagators(
    z: np.ndarray, k: int, modified: tuple[int, float] | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """
    Taylor propagator pair (T_K(z), S_K(z)) with z S_K(z) = T_K(z) - I.

    Args:
        z: Square matrix with ||z|| <= 1
        k: Truncation order K
        modified: Optional (K1, p) amplifying the orders above K1

    Returns:
        (T, S) as dense matrices

    Raises:
        OdeError: If ||z|| > 1
    """
    z = np.asarray(z, dtype=complex)
    if z.ndim != 2 or z.shape[0] != z.shape[1]:
        raise OdeError("z must be a square matrix")
    if spectral_norm(z) > 1.0 + 1e-12:
        raise OdeError("propagators need ||z|| <= 1")
    t_coeffs, s_coeffs = propagator_coefficients(k, modified)
    t_matrix = horner(t_coeffs, z)
    if s_coeffs.size == 0:
        return t_matrix, np.zeros_like(z)
    return t_matrix, horner(s_coeffs, z)


def build_encoding(
    prob: OdeProblem, k: int, modified: tuple[int, int, float] | None = None
) -> OdeEncoding:
    """
    History-state system C x = rhs for m Taylor steps of order K.

    Block i(K+1) holds the state after i steps and block i(K+1)+j the j-th
    Taylor term of step i; the trailing pad blocks copy the final state.

    Args:
        prob: ODE problem
        k: Truncation order K (K2 for the modified encoding)
        modified: Optional (K1, K2, p); the K1 -> K1+1 coupling carries the
            one-time 1/(1-p) amplification

    Returns:
        OdeEncoding with d = m(K+1) + pad

    Raises:
        OdeError: If (d+1) n exceeds the dense-equivalent limit or modified
            parameters are inconsistent
    """
    if k < 1:
        raise OdeError(f"truncation order must be at least 1, got {k}")
    k1 = p = None
    if modified is not None:
        k1, k2, p = modified
        check_k_pair(k1, k2)
        check_probability(p)
        if k2 != k:
            raise OdeError(f"modified encoding needs k == k2, got k={k}, k2={k2}")
        if k1 < 1:
            raise OdeError("k1 must be at least 1")

    n, m = prob.n, prob.m
    d = m * (k + 1) + prob.pad
    size = (d + 1) * n
    if size > simulation_config.max_dense_entries:
        raise OdeError(
            f"encoding dimension {size} exceeds {simulation_config.max_dense_entries}"
        )

    ah = prob.a * prob.h
    identity = np.eye(n, dtype=complex)
    matrix = sparse.lil_matrix((size, size), dtype=complex)
    rhs = np.zeros(size, dtype=complex)
    block_index: dict[tuple[int, int], int] = {}

    def rows(block: int) -> slice:
        return slice(block * n, (block + 1) * n)

    for block in range(d + 1):
        matrix[rows(block), rows(block)] = identity
    rhs[rows(0)] = prob.x0

    for i in range(m):
        base = i * (k + 1)
        for j in range(k + 1):
            block_index[(i, j)] = base + j
        for j in range(1, k + 1):
            coupling = ah / j
            if modified is not None and j == k1 + 1:
                coupling = coupling / (1.0 - p)
            matrix[rows(base + j), rows(base + j - 1)] = -coupling
            if j == 1:
                rhs[rows(base + 1)] = prob.h * prob.b
        for j in range(k + 1):
            matrix[rows(base + k + 1), rows(base + j)] = -identity
    block_index[(m, 0)] = m * (k + 1)
    for block in range(m * (k + 1) + 1, d + 1):
        matrix[rows(block), rows(block - 1)] = -identity

    logger.debug("built %s encoding: %d blocks of size %d", "modified" if modified else "plain", d + 1, n)
    return OdeEncoding(
        matrix=matrix.tocsr(),
        rhs=rhs,
        block_index=block_index,
        d=d,
        n=n,
        k=k,
        m=m,
        modified=modified is not None,
    )


def solve_encoding(enc: OdeEncoding) -> np.ndarray:
    """
    Solve the unit lower-triangular system by forward substitution.

    Args:
        enc: History-state encoding

    Returns:
        The history-state vector

    Raises:
        OdeError: If the residual exceeds 1e-11 relative to the right-hand side
    """
    solution = sparse_linalg.spsolve_triangular(enc.matrix, enc.rhs, lower=True)
    solution = np.asarray(solution, dtype=complex)
    residual = float(np.linalg.norm(enc.matrix @ solution - enc.rhs))
    scale = float(np.linalg.norm(enc.rhs))
    if residual > RESIDUAL_TOL * scale:
        raise OdeError(f"forward substitution residual {residual:.3e} exceeds tolerance")
    return solution


def extract_state(enc: OdeEncoding, solution: np.ndarray, step: int) -> np.ndarray:
    """State after ``step`` time steps."""
    try:
        block = enc.step_block(step)
    except ValueError as exc:
        raise OdeError(str(exc)) from exc
    return solution[block * enc.n : (block + 1) * enc.n]


def _phi(mu: np.ndarray, t: float) -> np.ndarray:
    """(e^{μt} - 1)/μ with a series near μ = 0."""
    small = np.abs(mu) * t < SMALL_PHASE
    safe = np.where(small, 1.0, mu)
    direct = np.expm1(safe * t) / safe
    series = t + mu * t**2 / 2.0 + mu**2 * t**3 / 6.0
    return np.where(small, series, direct)


def reference_solution(prob: OdeProblem, t: float) -> np.ndarray:
    """
    Exact x(t) = e^{At} x0 + (e^{At} - I) A^{-1} b.

    Args:
        prob: ODE problem with anti-Hermitian A
        t: Time, t >= 0

    Returns:
        x(t) computed from the eigendecomposition of the Hermitian iA
    """
    if t < 0.0:
        raise OdeError(f"time must be non-negative, got {t}")
    hermitian = 1j * prob.a
    eigenvalues, vectors = np.linalg.eigh(0.5 * (hermitian + hermitian.conj().T))
    mu = -1j * eigenvalues
    x0_coords = vectors.conj().T @ prob.x0
    b_coords = vectors.conj().T @ prob.b
    return vectors @ (np.exp(mu * t) * x0_coords + _phi(mu, t) * b_coords)


def eigenvector_condition(matrix: np.ndarray) -> tuple[float, bool]:
    """
    2-norm condition number of the eigenvector matrix and a defectiveness flag.

    Unit lower-triangular matrices other than the identity are defective. This
    covers every history-state encoding with more than one block, including the
    smallest one (m = 1, A = 0, K = 1), whose eigenvector condition one might
    expect to be 1. Callers then fall back to cond(C), see ode_constants.
    """
    dim = matrix.shape[0]
    if np.allclose(matrix, np.eye(dim), atol=0.0, rtol=0.0):
        return 1.0, False
    unit_triangular = np.allclose(np.diag(matrix), 1.0) and not np.any(np.triu(matrix, 1))
    if unit_triangular:
        return math.inf, True
    _, vectors = linalg.eig(matrix)
    condition = float(np.linalg.cond(vectors))
    if not math.isfinite(condition) or condition > DEFECTIVE_CONDITION:
        return condition, True
    return condition, False


def ode_constants(enc: OdeEncoding, prob: OdeProblem, j: int) -> OdeConstants:
    """
    κ_V and C_j = 2.8 κ_V j (||x0|| + m h ||b||) for an encoding.

    A defective encoding matrix falls back to the condition number of the
    matrix itself.

    Args:
        enc: History-state encoding
        prob: ODE problem the encoding was built from
        j: Step index, j >= 1

    Returns:
        OdeConstants with the source of κ recorded

    Raises:
        OdeError: If the encoding is too large for a dense decomposition
    """
    if j < 1:
        raise OdeError(f"j must be positive, got {j}")
    dim = enc.matrix.shape[0]
    if dim > DENSE_EIG_LIMIT:
        raise OdeError(f"encoding dimension {dim} is too large for dense decomposition")
    dense = enc.matrix.toarray()
    kappa, defective = eigenvector_condition(dense)
    source = "eigenvectors"
    if defective:
        logger.info("encoding matrix is defective; using its own condition number")
        kappa = float(np.linalg.cond(dense))
        source = "matrix_condition"
    scale = float(np.linalg.norm(prob.x0)) + prob.m * prob.h * float(np.linalg.norm(prob.b))
    return OdeConstants(
        kappa_v=kappa,
        c_j=2.8 * kappa * j * scale,
        j=j,
        defective=defective,
        kappa_source=source,
    )


def ode_bounds(constants: OdeConstants, k1: int, k2: int, p: float) -> OdeBounds:
    """δ1 = C_j/(K1+1)!, δm = C_j/(K2+1)! and ε = max{8 δm, 4 δ1²/(1-p)}."""
    check_k_pair(k1, k2)
    check_probability(p)

    def delta(k: int) -> float:
        if constants.c_j == 0.0:
            return 0.0
        return math.exp(math.log(constants.c_j) - log_factorial(k + 1))

    delta1 = delta(k1)
    delta_m = delta(k2)
    return OdeBounds(
        **constants.model_dump(),
        p=p,
        delta1=delta1,
        delta_m=delta_m,
        epsilon=max(8.0 * delta_m, 4.0 / (1.0 - p) * delta1**2),
    )


def verify_mixed_solution(prob: OdeProblem, k1: int, k2: int, p: float, j: int) -> OdeVerification:
    """
    Mixed-truncation ODE solution after j steps against the exact solution.

    Args:
        prob: ODE problem
        k1: Truncation order of the plain encoding
        k2: Truncation order of the modified encoding
        p: Mixing probability
        j: Step index, 1 <= j <= m

    Returns:
        OdeVerification with the measured error, its bound and the residual of
        the mixed solution against the plain K2 solution
    """
    check_k_pair(k1, k2)
    check_probability(p)
    if not 1 <= j <= prob.m:
        raise OdeError(f"j must lie in [1, {prob.m}], got {j}")

    plain_k1 = build_encoding(prob, k1)
    modified_k2 = build_encoding(prob, k2, modified=(k1, k2, p))
    plain_k2 = build_encoding(prob, k2)
    x1 = extract_state(plain_k1, solve_encoding(plain_k1), j)
    x2 = extract_state(modified_k2, solve_encoding(modified_k2), j)
    x_plain = extract_state(plain_k2, solve_encoding(plain_k2), j)
    x_mix = p * x1 + (1.0 - p) * x2
    exact = reference_solution(prob, j * prob.h)

    measured = float(np.linalg.norm(x_mix - exact))
    residual = float(np.linalg.norm(x_mix - x_plain))
    if j > 1:
        logger.debug("mixed solution differs from plain K2 by %.3e at step %d", residual, j)

    bounds = ode_bounds(ode_constants(plain_k1, prob, j), k1, k2, p)
    report = BoundReport(
        application=Application.ODE,
        delta1=bounds.delta1,
        delta_m=bounds.delta_m,
        epsilon=bounds.epsilon,
        extras={
            "kappa_v": bounds.kappa_v,
            "c_j": bounds.c_j,
            "measured_error": measured,
            "cancellation_residual": residual,
        },
        provenance={"kappa_source": bounds.kappa_source, "defective": bounds.defective},
    )
    return OdeVerification(
        bounds=bounds,
        report=report,
        verdict=Verdict.check("mixed_solution_error", measured, bounds.epsilon),
        measured_error=measured,
        plain_k2_error=float(np.linalg.norm(x_plain - exact)),
        cancellation_residual=residual,
    )


def random_ode_problem(
    dim: int, h: float, m: int, seed: int, norm: float = 0.5, pad: int = 1
) -> OdeProblem:
    """
    Random anti-Hermitian problem with ||A h|| = norm and unit-norm x0 and b.

    Args:
        dim: State dimension
        h: Time step
        m: Number of steps
        seed: Generator seed
        norm: Target ||A h||, at most 1
        pad: Padding block count

    Returns:
        OdeProblem
    """
    if not 0.0 <= norm <= 1.0:
        raise OdeError(f"norm must lie in [0, 1], got {norm}")
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    hermitian = 0.5 * (raw + raw.conj().T)
    hermitian *= norm / (h * spectral_norm(hermitian))
    x0 = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    b = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return OdeProblem(
        a=-1j * hermitian,
        b=b / np.linalg.norm(b),
        x0=x0 / np.linalg.norm(x0),
        h=h,
        m=m,
        pad=pad,
    )
