"""Tests for truncated-Taylor simulation under randomized truncation."""

import math

import numpy as np
import pytest

import rts_lab.services.bccks as bccks_service
from rts_lab.schemas.bccks import (
    CostMode,
    ErrorMode,
    OaaVariant,
    PauliSumHamiltonian,
    PauliTerm,
    SimulationMode,
)
from rts_lab.schemas.mixing import DenseOperator
from rts_lab.services.bccks import (
    LN2,
    BccksError,
    ancilla_width,
    average_ancilla_width,
    bccks_bounds,
    bounds_report,
    build_oaa_operator,
    build_truncated_operator,
    cnot_cost,
    exact_evolution,
    ising_hamiltonian,
    original_cost_point,
    pauli_sum_to_dense,
    plan_for_alpha_sum,
    plan_segments,
    rts_cost_point,
    segment_mix_spec,
    segment_operators,
    select_cnot_count,
    shot_choices,
    simulate_rts_evolution,
)
from rts_lab.services.mixing_core import (
    matrix_polynomial,
    modified_coefficients,
    spectral_norm,
    trace_distance,
    verify_mixing_lemma,
)


# ----------------------------------------------------------------------------
# Hamiltonians and segment plans
# ----------------------------------------------------------------------------


class TestHamiltonians:
    """Tests for Ising chains and dense Pauli sums."""

    def test_periodic_chain(self):
        """Test that n >= 3 chains are periodic with 2n terms."""
        h = ising_hamiltonian(3)
        assert h.n_terms == 6
        assert h.alpha_sum == 6.0
        assert "XIX" in [term.pauli for term in h.terms]

    def test_open_chain(self):
        """Test that a two-site chain has a single bond."""
        h = ising_hamiltonian(2)
        assert [term.pauli for term in h.terms] == ["XX", "ZI", "IZ"]

    def test_negative_coupling_keeps_sign(self):
        """Test that negative strengths are stored as signs."""
        h = ising_hamiltonian(2, coupling=-0.5)
        assert h.terms[0].coefficient == 0.5
        assert h.terms[0].sign == -1
        assert h.alpha_sum == 2.5

    def test_dense_two_site_chain(self):
        """Test the dense matrix of XX + ZI + IZ."""
        dense = pauli_sum_to_dense(ising_hamiltonian(2)).entries
        expected = np.array(
            [[2, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, -2]], dtype=complex
        )
        np.testing.assert_allclose(dense, expected)

    def test_dense_limit(self):
        """Test that oversized systems are rejected."""
        with pytest.raises(BccksError, match="dense limit"):
            pauli_sum_to_dense(ising_hamiltonian(40))

    def test_plan_large_chain(self):
        """Test r for a 100-site chain evolved for t = 100."""
        plan = plan_segments(ising_hamiltonian(100), 100.0)
        assert plan.r == 28854
        assert plan.alpha_sum * plan.tau <= LN2

    def test_plan_exact_ln2(self):
        """Test that α t = ln 2 gives a single segment."""
        assert plan_for_alpha_sum(3.0, LN2 / 3.0).r == 1

    def test_plan_rejects_non_positive_time(self):
        """Test that t <= 0 is rejected."""
        with pytest.raises(BccksError):
            plan_for_alpha_sum(1.0, 0.0)


# ----------------------------------------------------------------------------
# Bounds
# ----------------------------------------------------------------------------


class TestBccksBounds:
    """Tests for the δ/a/b/ε/ξ bound set."""

    def test_delta_values(self):
        """Test δ1 and δm from the closed tail bound."""
        bounds = bccks_bounds(7, 10, 0.5, 1)
        assert bounds.delta1 == pytest.approx(2.6431e-6, rel=1e-4)
        assert bounds.delta_m == pytest.approx(2.0 * LN2**11 / math.factorial(11), rel=1e-12)

    def test_operator_errors(self):
        """Test a1, a2 = 4 δ2 and b at p = 0.5."""
        bounds = bccks_bounds(3, 6, 0.5, 1)
        d1 = bounds.delta1
        assert bounds.delta2 == pytest.approx(d1 / 2.0)
        assert bounds.a1 == pytest.approx(d1 * (d1**2 + 3.0 * d1 + 4.0) / 2.0)
        assert bounds.a2 == pytest.approx(2.0 * d1)
        assert bounds.b == pytest.approx(bounds.delta_m + 6.0 * d1**2)
        assert bounds.a2_statement < bounds.a2_proof

    def test_total_error_scales_with_r(self):
        """Test ε_total = r ε_segment."""
        bounds = bccks_bounds(3, 6, 0.7, 18)
        assert bounds.epsilon_total == pytest.approx(18 * bounds.epsilon_segment)
        assert bounds.epsilon_total == pytest.approx(0.446, abs=1e-3)

    def test_sum_form_below_max_form(self):
        """Test that the sum packaging never exceeds the max packaging."""
        for k1, k2, p in [(2, 4, 0.1), (5, 11, 0.5), (7, 10, 0.9)]:
            total_sum = bccks_bounds(k1, k2, p, 1, ErrorMode.SUM_FORM).epsilon_segment
            total_max = bccks_bounds(k1, k2, p, 1, ErrorMode.MAX_FORM).epsilon_segment
            assert total_sum <= total_max

    def test_failure_probability_capped(self):
        """Test that a vacuous ξ is reported as 1."""
        assert bccks_bounds(1, 3, 0.5, 1).xi_segment == 1.0

    def test_k_pair_rejected(self):
        """Test that k2 <= k1 is rejected."""
        with pytest.raises(BccksError, match="k2 must exceed k1"):
            bccks_bounds(10, 7, 0.5, 1)

    def test_k1_zero_rejected(self):
        """Test that k1 = 0 is rejected."""
        with pytest.raises(BccksError, match="k1 must be at least 1"):
            bccks_bounds(0, 3, 0.5, 1)

    def test_probability_above_cap(self):
        """Test the amplification cap 1/(1 + 2 δ1)."""
        with pytest.raises(BccksError, match="cap"):
            bccks_bounds(1, 3, 0.6, 1)

    def test_bounds_report(self):
        """Test the generic report of a bound set."""
        report = bounds_report(bccks_bounds(7, 10, 0.5, 4))
        flat = report.flat()
        assert flat["application"] == "bccks"
        assert flat["epsilon"] == flat["epsilon_total"]
        assert report.provenance["a2_adopted"] == "4 * delta2"


# ----------------------------------------------------------------------------
# Costs
# ----------------------------------------------------------------------------


class TestCosts:
    """Tests for cost indicators and CNOT counts."""

    def test_select_count(self):
        """Test 7.5 L + 6 log2 L - 26 at L = 200."""
        count, clamped = select_cnot_count(200)
        assert count == pytest.approx(1500.0 + 6.0 * math.log2(200) - 26.0)
        assert not clamped

    def test_select_count_clamped(self):
        """Test that small L is clamped to one CNOT."""
        assert select_cnot_count(2) == (1.0, True)

    def test_raw_cnot_count(self):
        """Test the raw count for K = 1, L = 200 and r = 28854."""
        point = cnot_cost(1.0, 200, 28854)
        assert point.mode == CostMode.RAW
        assert point.g_cnot == pytest.approx(1.3156e8, rel=1e-4)

    def test_rts_indicator(self):
        """Test G = p K1 + (1-p)(4/3) K2."""
        point = rts_cost_point(7, 10, 0.5, 200, 1)
        assert point.g_indicator == pytest.approx(10.1667, rel=1e-4)
        assert point.k_mean == pytest.approx(8.5)

    def test_rts_reduces_to_original_with_p_one_limit(self):
        """Test that p close to 1 approaches K1."""
        point = rts_cost_point(7, 10, 1.0 - 1e-6, 200, 1)
        assert point.g_indicator == pytest.approx(7.0, abs=1e-4)

    def test_original_point(self):
        """Test the unrandomized cost at K = 13."""
        point = original_cost_point(13, 200, 10)
        assert point.mode == CostMode.ORIGINAL
        assert point.g_indicator == 13.0
        assert point.k1 == point.k2 == 13

    def test_ancilla_width(self):
        """Test K ⌈log2 L⌉ + 1 and its mixture average."""
        assert ancilla_width(7, 200) == 57
        assert average_ancilla_width(7, 10, 0.5, 200) == pytest.approx(0.5 * 57 + 0.5 * 81)


# ----------------------------------------------------------------------------
# Operators and simulation
# ----------------------------------------------------------------------------


def two_site_segment():
    """Dense two-site chain with one segment of phase ln 2."""
    h = ising_hamiltonian(2)
    plan = plan_for_alpha_sum(h.alpha_sum, LN2 / h.alpha_sum, h.n_terms)
    return h, pauli_sum_to_dense(h), plan


def random_segment(rng: np.random.Generator):
    """Random one- or two-qubit Pauli sum with one segment of phase ln 2."""
    n = int(rng.integers(1, 3))
    terms = [
        PauliTerm(
            coefficient=float(rng.uniform(0.1, 1.0)),
            pauli="".join(rng.choice(list("IXYZ"), size=n)),
            sign=int(rng.choice([-1, 1])),
        )
        for _ in range(int(rng.integers(1, 5)))
    ]
    h = PauliSumHamiltonian(terms=terms, n_qubits=n)
    plan = plan_for_alpha_sum(h.alpha_sum, LN2 / h.alpha_sum, h.n_terms)
    return h, pauli_sum_to_dense(h), plan


class TestOperators:
    """Tests for truncated and amplified operators."""

    def test_long_truncation_matches_exact(self):
        """Test that a long Taylor truncation equals e^{-iHτ}."""
        _, dense, plan = two_site_segment()
        truncated = build_truncated_operator(dense, plan.tau, 30)
        np.testing.assert_allclose(
            truncated.entries, exact_evolution(dense, plan.tau).entries, atol=1e-13
        )

    def test_modified_operator_needs_both_arguments(self):
        """Test that k1 and p come together."""
        _, dense, plan = two_site_segment()
        with pytest.raises(BccksError, match="together"):
            build_truncated_operator(dense, plan.tau, 4, k1_for_modified=2)

    def test_amplification_fixes_unitaries(self):
        """Test that both amplification variants map a unitary to itself."""
        _, dense, plan = two_site_segment()
        u = exact_evolution(dense, plan.tau)
        for variant in OaaVariant:
            v = build_oaa_operator(u, variant)
            np.testing.assert_allclose(v.entries, u.entries, atol=1e-12)

    def test_exact_evolution_is_unitary(self):
        """Test U†U = I."""
        _, dense, _ = two_site_segment()
        u = exact_evolution(dense, 1.3).entries
        np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-13)

    def test_measured_errors_below_bounds(self):
        """Test measured a1, a2 and b against their bounds at p = 0.5."""
        _, dense, plan = two_site_segment()
        spec = segment_mix_spec(plan, 3, 6, 0.5)
        bounds = bccks_bounds(3, 6, 0.5, plan.r)

        v1, v2 = segment_operators(dense, spec)
        u = exact_evolution(dense, plan.tau).entries

        assert spectral_norm(v1.entries - u) <= bounds.a1
        assert spectral_norm(v2.entries - u) <= bounds.a2
        assert spectral_norm(0.5 * v1.entries + 0.5 * v2.entries - u) <= bounds.b

    def test_quadratic_error_suppression(self):
        """Test that the mixed-channel distance scales as the square of the branch error."""
        _, dense, plan = two_site_segment()
        u = exact_evolution(dense, plan.tau)
        rng = np.random.default_rng(5)
        rho = DenseOperator.pure_state(rng.normal(size=4) + 1j * rng.normal(size=4))

        a1s, distances = [], []
        for k1 in range(1, 5):
            spec = segment_mix_spec(plan, k1, 2 * k1 + 2, 0.5)
            first, second = modified_coefficients(spec)
            verdict = verify_mixing_lemma(
                matrix_polynomial(first, dense), matrix_polynomial(second, dense), u, 0.5, rho
            )
            assert verdict.holds
            a1s.append(verdict.a1)
            distances.append(verdict.lhs)

        slope = np.polyfit(np.log(a1s), np.log(distances), 1)[0]
        assert slope == pytest.approx(2.0, abs=0.3)

    def test_quadratic_suppression_with_amplified_operators(self):
        """Test the quadratic scaling with the amplified V1 and V2 over K1 = 1..6."""
        _, dense, plan = two_site_segment()
        u = exact_evolution(dense, plan.tau)
        rng = np.random.default_rng(5)
        rho = DenseOperator.pure_state(rng.normal(size=4) + 1j * rng.normal(size=4))

        a1s, distances = [], []
        for k1 in range(1, 7):
            v1, v2 = segment_operators(dense, segment_mix_spec(plan, k1, 2 * k1 + 2, 0.5))
            verdict = verify_mixing_lemma(v1, v2, u, 0.5, rho)
            assert verdict.holds, f"k1={k1}"
            a1s.append(verdict.a1)
            distances.append(verdict.lhs)

        slope = np.polyfit(np.log(a1s), np.log(distances), 1)[0]
        assert 1.6 <= slope <= 2.4

    def test_mixing_bound_on_random_segments(self):
        """Test the mixing bound for raw and amplified operators on random segments."""
        rng = np.random.default_rng(2024)
        for trial in range(1000):
            h, dense, plan = random_segment(rng)
            k1 = int(rng.integers(1, 7))
            k2 = int(rng.integers(k1 + 1, 13))
            p = float(rng.uniform(0.0, 0.95))
            dim = 2**h.n_qubits
            rho = DenseOperator.pure_state(rng.normal(size=dim) + 1j * rng.normal(size=dim))
            spec = segment_mix_spec(plan, k1, k2, p)
            u = exact_evolution(dense, plan.tau)

            first, second = modified_coefficients(spec)
            raw = verify_mixing_lemma(
                matrix_polynomial(first, dense), matrix_polynomial(second, dense), u, p, rho
            )
            v1, v2 = segment_operators(dense, spec)
            amplified = verify_mixing_lemma(v1, v2, u, p, rho)

            assert raw.holds, f"raw trial {trial}: {raw.lhs} > {raw.rhs}"
            assert amplified.holds, f"amplified trial {trial}: {amplified.lhs} > {amplified.rhs}"


class TestSimulation:
    """Tests for segmented simulation."""

    def test_shot_choices_deterministic(self):
        """Test that a shot's choices ignore the total shot count."""
        many = shot_choices(7, 5, 10, 0.5)
        few = shot_choices(7, 3, 10, 0.5)
        np.testing.assert_array_equal(many[:3], few)
        np.testing.assert_array_equal(many, shot_choices(7, 5, 10, 0.5))

    def test_shot_choices_extremes(self):
        """Test that p = 0 always picks V2."""
        assert not shot_choices(1, 4, 6, 0.0).any()

    def test_exact_channel_within_bound(self):
        """Test a three-site chain for t = 2 with (3, 6, 0.7)."""
        h = ising_hamiltonian(3)
        spec = segment_mix_spec(plan_segments(h, 2.0), 3, 6, 0.7)
        rho0 = DenseOperator.pure_state(np.eye(8)[0])

        result = simulate_rts_evolution(h, 2.0, spec, rho0)

        assert result.r == 18
        assert result.verdict.holds
        assert result.verdict.rhs == pytest.approx(0.446, abs=1e-3)
        assert np.trace(result.state.entries).real == pytest.approx(1.0)

    def test_sampled_matches_channel(self):
        """Test that sampling agrees with the composed channel within its standard error."""
        h = ising_hamiltonian(2)
        spec = segment_mix_spec(plan_segments(h, 1.5), 5, 8, 0.5)
        rho0 = DenseOperator.pure_state(np.array([1.0, 1.0, 0.0, 1.0j]))

        channel = simulate_rts_evolution(h, 1.5, spec, rho0)
        sampled = simulate_rts_evolution(
            h, 1.5, spec, rho0, mode=SimulationMode.SAMPLED, shots=400, seed=11
        )

        assert sampled.shots == 400
        assert sampled.discarded_shots == 0
        assert sampled.standard_error > 0.0
        assert trace_distance(sampled.state, channel.state) <= 4.0 * sampled.standard_error
        assert sampled.verdict.holds

    def test_sampled_three_site_chain(self):
        """Test 20000 sampled shots on a three-site chain against the composed channel."""
        h = ising_hamiltonian(3)
        spec = segment_mix_spec(plan_segments(h, 2.0), 3, 6, 0.7)
        rho0 = DenseOperator.pure_state(np.eye(8)[0])

        channel = simulate_rts_evolution(h, 2.0, spec, rho0)
        sampled = simulate_rts_evolution(h, 2.0, spec, rho0, SimulationMode.SAMPLED, 20000, 42)
        rerun = simulate_rts_evolution(h, 2.0, spec, rho0, SimulationMode.SAMPLED, 20000, 42)

        assert sampled.discarded_shots == 0
        assert trace_distance(sampled.state, channel.state) <= 3.0 * sampled.standard_error
        assert sampled.verdict.holds
        np.testing.assert_array_equal(sampled.state.entries, rerun.state.entries)

    def test_sampled_is_reproducible(self):
        """Test that the same seed gives the same state."""
        h = ising_hamiltonian(2)
        spec = segment_mix_spec(plan_segments(h, 1.0), 2, 4, 0.5)
        rho0 = DenseOperator.pure_state(np.eye(4)[1])

        first = simulate_rts_evolution(h, 1.0, spec, rho0, SimulationMode.SAMPLED, 50, 3)
        second = simulate_rts_evolution(h, 1.0, spec, rho0, SimulationMode.SAMPLED, 50, 3)

        np.testing.assert_array_equal(first.state.entries, second.state.entries)

    def test_rejects_mixed_initial_state(self):
        """Test that the initial state must be pure."""
        h = ising_hamiltonian(2)
        spec = segment_mix_spec(plan_segments(h, 1.0), 2, 4, 0.5)
        with pytest.raises(BccksError, match="pure"):
            simulate_rts_evolution(h, 1.0, spec, DenseOperator(entries=np.eye(4) / 4.0))

    def test_rejects_dimension_mismatch(self):
        """Test that the state must match the Hamiltonian."""
        h = ising_hamiltonian(2)
        spec = segment_mix_spec(plan_segments(h, 1.0), 2, 4, 0.5)
        with pytest.raises(BccksError, match="dimension"):
            simulate_rts_evolution(h, 1.0, spec, DenseOperator.pure_state(np.ones(2)))

    def test_rejects_spec_for_other_segment_length(self):
        """Test that the mixing coefficients must belong to the planned segment length."""
        h = ising_hamiltonian(2)
        spec = segment_mix_spec(plan_segments(h, 2.0), 2, 4, 0.5)
        rho0 = DenseOperator.pure_state(np.eye(4)[0])
        with pytest.raises(BccksError, match="segment plan"):
            simulate_rts_evolution(h, 1.0, spec, rho0)

    def test_verdict_slack_from_simulation_config(self, monkeypatch):
        """Test that the simulation verdict uses the configured domination slack."""
        monkeypatch.setattr(bccks_service.simulation_config, "mixing_slack", 0.5)
        h = ising_hamiltonian(2)
        spec = segment_mix_spec(plan_segments(h, 1.0), 2, 4, 0.5)

        result = simulate_rts_evolution(h, 1.0, spec, DenseOperator.pure_state(np.eye(4)[0]))

        assert result.verdict.slack == 0.5

    def test_sampled_needs_two_shots(self):
        """Test that sampling needs at least two shots."""
        h = ising_hamiltonian(2)
        spec = segment_mix_spec(plan_segments(h, 1.0), 2, 4, 0.5)
        rho0 = DenseOperator.pure_state(np.eye(4)[0])
        with pytest.raises(BccksError, match="2 shots"):
            simulate_rts_evolution(h, 1.0, spec, rho0, SimulationMode.SAMPLED, 1, 0)
