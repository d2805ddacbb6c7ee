"""Truncated-Taylor (BCCKS) Hamiltonian simulation under randomized truncation."""

import logging
import math
from functools import reduce

import numpy as np

from rts_lab.config import simulation_config
from rts_lab.schemas.bccks import (
    LN2,
    BccksBounds,
    CostMode,
    CostPoint,
    ErrorMode,
    OaaVariant,
    PauliSumHamiltonian,
    PauliTerm,
    SegmentPlan,
    SimulationMode,
    SimulationResult,
)
from rts_lab.schemas.mixing import (
    P_MAX,
    DenseOperator,
    MixingVerdict,
    SeriesMixSpec,
    check_k_pair,
)
from rts_lab.schemas.report import Application, BoundReport
from rts_lab.schemas.series import TailMode
from rts_lab.services.mixing_core import (
    HERMITIAN_TOL,
    PURITY_TOL,
    branch_sum,
    matrix_polynomial,
    mixing_error_bound,
    modified_coefficients,
    normalize_trace,
    spectral_norm,
    trace_distance,
)
from rts_lab.services.series_kernel import log_factorial, taylor_exp_coefficients, taylor_tail

logger = logging.getLogger(__name__)

# Select(H) oracle calls per segment for one (V1) and two (V2) amplification rounds.
V1_SELECTS = 3.0
V2_SELECTS = 4.0
V2_SELECT_WEIGHT = V2_SELECTS / V1_SELECTS

S2 = 1.0 / math.sin(math.pi / 10.0)

PAULI_MATRICES: dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class BccksError(ValueError):
    """Raised when a BCCKS bound, cost or simulation request is invalid."""


def ising_hamiltonian(n: int, coupling: float = 1.0, field: float = 1.0) -> PauliSumHamiltonian:
    """
    Transverse-coupled Ising chain Σ J X_i X_{i+1} + Σ h Z_i.

    The chain is periodic for n >= 3 (L = 2n terms) and open below that.

    Args:
        n: Number of qubits
        coupling: Nearest-neighbour XX strength J
        field: Z field strength h

    Returns:
        PauliSumHamiltonian with non-negative coefficients and signs kept apart
    """
    if n < 1:
        raise BccksError("ising chain needs at least one qubit")
    if n >= 3:
        bonds = [(i, (i + 1) % n) for i in range(n)]
    else:
        bonds = [(i, i + 1) for i in range(n - 1)]
    terms: list[PauliTerm] = []
    if coupling != 0.0:
        for i, j in bonds:
            word = ["I"] * n
            word[i] = word[j] = "X"
            terms.append(_signed_term(coupling, "".join(word)))
    if field != 0.0:
        for i in range(n):
            word = ["I"] * n
            word[i] = "Z"
            terms.append(_signed_term(field, "".join(word)))
    return PauliSumHamiltonian(terms=terms, n_qubits=n)


def _signed_term(value: float, word: str) -> PauliTerm:
    return PauliTerm(coefficient=abs(value), pauli=word, sign=-1 if value < 0 else 1)


def pauli_sum_to_dense(h: PauliSumHamiltonian) -> DenseOperator:
    """Dense matrix of a Pauli sum; qubit 0 is the leftmost tensor factor."""
    if h.n_qubits > simulation_config.max_qubits:
        raise BccksError(
            f"{h.n_qubits} qubits exceed the dense limit of {simulation_config.max_qubits}"
        )
    dim = 2**h.n_qubits
    matrix = np.zeros((dim, dim), dtype=complex)
    for term in h.terms:
        factors = [PAULI_MATRICES[letter] for letter in term.pauli]
        matrix += term.sign * term.coefficient * reduce(np.kron, factors)
    return DenseOperator(entries=matrix)


def plan_for_alpha_sum(alpha_sum: float, t: float, n_terms: int = 1) -> SegmentPlan:
    """Segment plan for a Hamiltonian with Σα = alpha_sum."""
    if not t > 0.0:
        raise BccksError(f"evolution time must be positive, got {t}")
    if not alpha_sum > 0.0:
        raise BccksError(f"alpha_sum must be positive, got {alpha_sum}")
    r = max(1, math.ceil(alpha_sum * t / LN2 - 1e-12))
    return SegmentPlan(r=r, tau=t / r, alpha_sum=alpha_sum, t=t, n_terms=n_terms)


def plan_segments(h: PauliSumHamiltonian, t: float) -> SegmentPlan:
    """
    Split e^{-iHt} into r = ⌈Σα t / ln 2⌉ segments.

    Args:
        h: Pauli-sum Hamiltonian
        t: Total evolution time, t > 0

    Returns:
        SegmentPlan with tau = t / r

    Raises:
        BccksError: If t <= 0 or Σα = 0

    Examples:
        >>> plan_segments(ising_hamiltonian(100), 100.0).r
        28854
    """
    return plan_for_alpha_sum(h.alpha_sum, t, h.n_terms)


def oaa_probability_cap(delta1: float) -> float:
    """Largest p for which the two-round amplification analysis holds."""
    return 1.0 / (1.0 + 2.0 * delta1)


def segment_error(delta1: float, delta_m: float, p: float, mode: ErrorMode) -> float:
    """Per-segment error in max or sum packaging."""
    quadratic = delta1**2 / (1.0 - p)
    if mode == ErrorMode.MAX_FORM:
        return max(40.0 * quadratic, 8.0 * delta_m)
    return 20.0 * quadratic + 4.0 * delta_m


def bccks_bounds(
    k1: int, k2: int, p: float, r: int, mode: ErrorMode = ErrorMode.SUM_FORM
) -> BccksBounds:
    """
    δ/a/b/ε/ξ bound set for one BCCKS configuration.

    Args:
        k1: Truncation order of V1, k1 >= 1
        k2: Truncation order of V2, k2 > k1
        p: Probability of V1, at most 1 - 1e-6 and 1/(1 + 2δ1)
        r: Number of segments
        mode: Max or sum packaging of the segment error

    Returns:
        BccksBounds with the totals multiplied by r

    Raises:
        BccksError: On invalid orders, probability or segment count
    """
    if k1 < 1:
        raise BccksError("k1 must be at least 1")
    if k2 <= k1:
        raise BccksError("k2 must exceed k1")
    if not 0.0 <= p <= P_MAX:
        raise BccksError(f"p must lie in [0, {P_MAX!r}], got {p}")
    if r < 1:
        raise BccksError("r must be positive")
    delta1 = taylor_tail(LN2, k1, TailMode.CLOSED_BOUND)
    delta_m = taylor_tail(LN2, k2, TailMode.CLOSED_BOUND)
    cap = oaa_probability_cap(delta1)
    if p > cap:
        raise BccksError(f"p = {p} exceeds the amplification cap 1/(1+2 delta1) = {cap}")
    delta2 = p / (1.0 - p) * delta1 / 2.0
    epsilon_segment = segment_error(delta1, delta_m, p, mode)
    xi = 8.0 / (1.0 - p) * delta1**2 + 4.0 * delta1
    if xi > 1.0:
        logger.info("failure-probability bound %.3e is vacuous; reporting 1", xi)
    return BccksBounds(
        k1=k1,
        k2=k2,
        p=p,
        r=r,
        mode=mode,
        delta1=delta1,
        delta2=delta2,
        delta_m=delta_m,
        a1=delta1 * (delta1**2 + 3.0 * delta1 + 4.0) / 2.0,
        a2=4.0 * delta2,
        b=delta_m + 3.0 / (1.0 - p) * delta1**2,
        epsilon_segment=epsilon_segment,
        epsilon_total=r * epsilon_segment,
        xi_segment=min(xi, 1.0),
        p_cap=cap,
        a2_statement=(1.0 + 40.0 / S2**3 + 64.0 / S2**5) * delta2,
        a2_proof=(1.0 + 80.0 / S2**3 + 128.0 / S2**5) * delta2,
    )


def bounds_report(bounds: BccksBounds) -> BoundReport:
    """Express a BCCKS bound set as a generic bound report."""
    return BoundReport(
        application=Application.BCCKS,
        delta1=bounds.delta1,
        delta2=bounds.delta2,
        delta_m=bounds.delta_m,
        a1=bounds.a1,
        a2=bounds.a2,
        b=bounds.b,
        epsilon=bounds.epsilon_total,
        xi=bounds.xi_segment,
        extras={
            "epsilon_segment": bounds.epsilon_segment,
            "epsilon_total": bounds.epsilon_total,
            "xi_segment": bounds.xi_segment,
            "p_cap": bounds.p_cap,
        },
        provenance={
            "error_mode": bounds.mode.value,
            "a2_adopted": "4 * delta2",
            "a2_statement": bounds.a2_statement,
            "a2_proof": bounds.a2_proof,
        },
    )


def select_cnot_count(l: int) -> tuple[float, bool]:  # noqa: E741
    """
    CNOT count of one order of Select(H): 7.5 L + 6 log2(L) - 26.

    Args:
        l: Number of Pauli terms, l >= 2

    Returns:
        (count, clamped) where the count is clamped below at 1
    """
    if l < 2:
        raise BccksError(f"select cost needs at least 2 terms, got {l}")
    w = math.log2(l)
    count = 7.5 * 2.0**w + 6.0 * w - 26.0
    if count < 1.0:
        logger.warning("select cost %.3f for L=%d is below 1; clamping", count, l)
        return 1.0, True
    return count, False


def cnot_cost(
    k_effective: float, l: int, r: int, selects_per_segment: float = V1_SELECTS
) -> CostPoint:
    """
    Raw CNOT count selects · r · K · c(L) for an effective truncation order.

    Args:
        k_effective: Effective truncation order K
        l: Number of Pauli terms
        r: Number of segments
        selects_per_segment: 3 for V1, 4 for V2, 3p + 4(1-p) for a mixture

    Returns:
        CostPoint in raw mode; g_indicator normalizes by 3 r c(L)
    """
    per_select, clamped = select_cnot_count(l)
    return CostPoint(
        mode=CostMode.RAW,
        g_indicator=selects_per_segment * k_effective / V1_SELECTS,
        g_cnot=selects_per_segment * r * k_effective * per_select,
        k_mean=k_effective,
        per_select_cost=per_select,
        clamped=clamped,
    )


def rts_cost_point(k1: int, k2: int, p: float, l: int, r: int) -> CostPoint:
    """Cost indicator p K1 + (1-p)(4/3) K2 and its CNOT count."""
    check_k_pair(k1, k2)
    per_select, clamped = select_cnot_count(l)
    g = p * k1 + (1.0 - p) * V2_SELECT_WEIGHT * k2
    return CostPoint(
        mode=CostMode.RTS,
        g_indicator=g,
        g_cnot=V1_SELECTS * r * per_select * g,
        k1=k1,
        k2=k2,
        p=p,
        k_mean=p * k1 + (1.0 - p) * k2,
        per_select_cost=per_select,
        clamped=clamped,
    )


def original_cost_point(k: int, l: int, r: int) -> CostPoint:
    """Cost of the unrandomized method at truncation order K."""
    point = cnot_cost(float(k), l, r, V1_SELECTS)
    return point.model_copy(update={"mode": CostMode.ORIGINAL, "k1": k, "k2": k})


def ancilla_width(k: int, l: int) -> int:
    """Ancilla qubits of one segment: K index registers of ⌈log2 L⌉ qubits plus one."""
    return k * math.ceil(math.log2(max(l, 2))) + 1


def average_ancilla_width(k1: int, k2: int, p: float, l: int) -> float:
    """Expected ancilla width per segment under the mixture."""
    return p * ancilla_width(k1, l) + (1.0 - p) * ancilla_width(k2, l)


def _check_hermitian(h: DenseOperator) -> None:
    if np.max(np.abs(h.entries - h.entries.conj().T)) > HERMITIAN_TOL:
        raise BccksError("hamiltonian must be Hermitian")


def build_truncated_operator(
    h: DenseOperator,
    tau: float,
    k: int,
    k1_for_modified: int | None = None,
    p: float | None = None,
) -> DenseOperator:
    """
    Truncated Taylor operator F = Σ_{j<=K} (-iτ)^j H^j / j!.

    Args:
        h: Hermitian operator
        tau: Segment time
        k: Truncation order
        k1_for_modified: With p, amplify orders above this by 1/(1-p)
        p: Mixing probability for the modified operator

    Returns:
        F, or the modified F2 when both optional arguments are given
    """
    _check_hermitian(h)
    if (k1_for_modified is None) != (p is None):
        raise BccksError("k1_for_modified and p must be given together")
    coefficients = taylor_exp_coefficients(-1j * tau, k)
    if k1_for_modified is not None:
        spec = SeriesMixSpec(base=coefficients, k1=k1_for_modified, k2=k, p=p)
        coefficients = modified_coefficients(spec)[1]
    return matrix_polynomial(coefficients, h)


def truncated_normalization(k1: int) -> float:
    """s1 = Σ_{k<=K1} (ln 2)^k / k!."""
    return math.fsum(math.exp(k * math.log(LN2) - log_factorial(k)) for k in range(k1 + 1))


def build_oaa_operator(
    f: DenseOperator, variant: OaaVariant, k1: int | None = None
) -> DenseOperator:
    """
    Oblivious amplitude amplification of an LCU-implemented operator.

    V1 = (3/s1) F - (4/s1³) F F† F with s1 the K1-truncated normalization
    (2 when k1 is omitted); V2 = (5/s2) F - (20/s2³) F F† F + (16/s2⁵) F F† F F† F
    with s2 = 1/sin(π/10).

    Args:
        f: Operator to amplify
        variant: One round (V1) or two rounds (V2)
        k1: Truncation order that fixes s1

    Returns:
        The amplified operator
    """
    fm = f.entries
    fff = fm @ fm.conj().T @ fm
    if variant == OaaVariant.V1:
        s1 = 2.0 if k1 is None else truncated_normalization(k1)
        return DenseOperator(entries=(3.0 / s1) * fm - (4.0 / s1**3) * fff)
    fffff = fff @ fm.conj().T @ fm
    return DenseOperator(
        entries=(5.0 / S2) * fm - (20.0 / S2**3) * fff + (16.0 / S2**5) * fffff
    )


def exact_evolution(h: DenseOperator, t: float) -> DenseOperator:
    """
    e^{-iHt} by eigendecomposition.

    Args:
        h: Hermitian operator
        t: Evolution time

    Returns:
        The unitary evolution operator
    """
    _check_hermitian(h)
    hermitian = 0.5 * (h.entries + h.entries.conj().T)
    eigenvalues, eigenvectors = np.linalg.eigh(hermitian)
    phases = np.exp(-1j * eigenvalues * t)
    return DenseOperator(entries=(eigenvectors * phases) @ eigenvectors.conj().T)


def segment_mix_spec(plan: SegmentPlan, k1: int, k2: int, p: float) -> SeriesMixSpec:
    """Mixing spec over the Taylor coefficients of e^{-iHτ} for one segment."""
    return SeriesMixSpec(base=taylor_exp_coefficients(-1j * plan.tau, k2), k1=k1, k2=k2, p=p)


def segment_operators(
    h_dense: DenseOperator, spec: SeriesMixSpec
) -> tuple[DenseOperator, DenseOperator]:
    """Amplified V1 and V2 for one segment."""
    f1_coeffs, f2_coeffs = modified_coefficients(spec)
    v1 = build_oaa_operator(matrix_polynomial(f1_coeffs, h_dense), OaaVariant.V1, k1=spec.k1)
    v2 = build_oaa_operator(matrix_polynomial(f2_coeffs, h_dense), OaaVariant.V2)
    return v1, v2


def _pure_state_vector(rho0: DenseOperator) -> np.ndarray:
    entries = rho0.entries
    if abs(np.trace(entries).real - 1.0) > HERMITIAN_TOL:
        raise BccksError("initial state must have unit trace")
    if abs(np.trace(entries @ entries).real - 1.0) > PURITY_TOL:
        raise BccksError("initial state must be pure")
    eigenvalues, eigenvectors = np.linalg.eigh(0.5 * (entries + entries.conj().T))
    return eigenvectors[:, int(np.argmax(eigenvalues))]


def shot_choices(seed: int, shots: int, r: int, p: float) -> np.ndarray:
    """
    Per-shot, per-segment branch choices (True selects V1).

    Each shot draws from its own Philox stream keyed by (seed, shot index), so
    a shot's choices do not depend on how many shots run or in what order.
    """
    choices = np.empty((shots, r), dtype=bool)
    for shot in range(shots):
        sequence = np.random.SeedSequence(seed, spawn_key=(shot,))
        generator = np.random.Generator(np.random.Philox(sequence))
        choices[shot] = generator.random(r) < p
    return choices


def simulate_rts_evolution(
    h: PauliSumHamiltonian,
    t: float,
    spec: SeriesMixSpec,
    rho0: DenseOperator,
    mode: SimulationMode = SimulationMode.EXACT_CHANNEL,
    shots: int | None = None,
    seed: int | None = None,
    error_mode: ErrorMode = ErrorMode.SUM_FORM,
) -> SimulationResult:
    """
    Segmented randomized evolution compared with e^{-iHt}.

    Args:
        h: Pauli-sum Hamiltonian on at most max_qubits qubits
        t: Total evolution time
        spec: Mixing spec over the segment Taylor coefficients (see segment_mix_spec)
        rho0: Pure initial state
        mode: Composed channel or Monte Carlo sampling of branch sequences
        shots: Number of sampled shots (sampled mode)
        seed: Seed of the per-shot generators (sampled mode)
        error_mode: Packaging of the per-segment bound used in the verdict

    Returns:
        SimulationResult holding the final state and its verdict

    Raises:
        BccksError: On oversized systems, impure input, a spec built for another
            segment length, or all shots discarded
    """
    if h.n_qubits > simulation_config.max_qubits:
        raise BccksError(
            f"{h.n_qubits} qubits exceed the dense limit of {simulation_config.max_qubits}"
        )
    shots = simulation_config.shots if shots is None else shots
    seed = simulation_config.seed if seed is None else seed
    h_dense = pauli_sum_to_dense(h)
    if rho0.dim != h_dense.dim:
        raise BccksError("initial state dimension does not match the hamiltonian")
    psi0 = _pure_state_vector(rho0)
    plan = plan_segments(h, t)
    expected = taylor_exp_coefficients(-1j * plan.tau, spec.base.truncation_order)
    if not np.allclose(spec.base.values, expected.values, rtol=1e-12, atol=1e-15):
        raise BccksError(f"spec coefficients do not match the segment plan (tau={plan.tau:.6g})")
    bounds = bccks_bounds(spec.k1, spec.k2, spec.p, plan.r, error_mode)

    v1, v2 = segment_operators(h_dense, spec)
    u_segment = exact_evolution(h_dense, plan.tau).entries
    a1 = spectral_norm(v1.entries - u_segment)
    a2 = spectral_norm(v2.entries - u_segment)
    b = spectral_norm(spec.p * v1.entries + (1.0 - spec.p) * v2.entries - u_segment)
    logger.info("simulating %d segments of tau=%.6g (%s)", plan.r, plan.tau, mode.value)

    discarded = 0
    standard_error = 0.0
    if mode == SimulationMode.EXACT_CHANNEL:
        state = rho0.entries
        for _ in range(plan.r):
            state = branch_sum(v1.entries, v2.entries, spec.p, state)
        state = normalize_trace(state)
        shots_run = 0
    else:
        if shots < 2:
            raise BccksError("sampled mode needs at least 2 shots")
        choices = shot_choices(seed, shots, plan.r, spec.p)
        psi = np.repeat(psi0[:, None], shots, axis=1)
        for segment in range(plan.r):
            pick = choices[:, segment]
            psi[:, pick] = v1.entries @ psi[:, pick]
            psi[:, ~pick] = v2.entries @ psi[:, ~pick]
        norms = np.sum(np.abs(psi) ** 2, axis=0)
        kept = norms >= 1e-14
        discarded = int(shots - np.count_nonzero(kept))
        if discarded:
            logger.warning("%d of %d shots had a vanishing post-selection norm", discarded, shots)
        if discarded == shots:
            raise BccksError("every shot was discarded")
        normalized = psi[:, kept] / np.sqrt(norms[kept])
        n_kept = normalized.shape[1]
        state = normalized @ normalized.conj().T / n_kept
        state = 0.5 * (state + state.conj().T)
        spread = max(n_kept * (1.0 - float(np.sum(np.abs(state) ** 2))), 0.0)
        frobenius_se = math.sqrt(spread / (n_kept * (n_kept - 1)))
        standard_error = math.sqrt(h_dense.dim) * frobenius_se
        shots_run = shots

    final = DenseOperator(entries=state)
    u_total = exact_evolution(h_dense, t).entries
    exact = DenseOperator(entries=u_total @ rho0.entries @ u_total.conj().T)
    lhs = trace_distance(final, exact)
    verdict = MixingVerdict.evaluate(
        lhs,
        bounds.epsilon_total,
        a1,
        a2,
        b,
        epsilon_prime=mixing_error_bound(a1, a2, b, spec.p) / 2.0,
        slack=simulation_config.mixing_slack,
    )
    return SimulationResult(
        state=final,
        exact=exact,
        verdict=verdict,
        mode=mode,
        r=plan.r,
        shots=shots_run,
        discarded_shots=discarded,
        failure_rate=discarded / shots_run if shots_run else 0.0,
        standard_error=standard_error,
    )


__all__ = [
    "BccksError",
    "ancilla_width",
    "average_ancilla_width",
    "bccks_bounds",
    "bounds_report",
    "build_oaa_operator",
    "build_truncated_operator",
    "cnot_cost",
    "exact_evolution",
    "ising_hamiltonian",
    "original_cost_point",
    "pauli_sum_to_dense",
    "plan_for_alpha_sum",
    "plan_segments",
    "rts_cost_point",
    "segment_mix_spec",
    "select_cnot_count",
    "simulate_rts_evolution",
]
