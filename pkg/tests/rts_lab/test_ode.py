"""Tests for the history-state linear ODE solver."""

import math

import numpy as np
import pytest
from scipy.linalg import expm

import rts_lab.services.ode as ode_service
from rts_lab.schemas.ode import OdeConstants, OdeProblem
from rts_lab.services.ode import (
    OdeError,
    build_encoding,
    eigenvector_condition,
    eval_propagators,
    extract_state,
    ode_bounds,
    ode_constants,
    random_ode_problem,
    reference_solution,
    solve_encoding,
    verify_mixed_solution,
)


def augmented_solution(prob: OdeProblem, t: float) -> np.ndarray:
    """x(t) from the exponential of the affine generator [[A, b], [0, 0]]."""
    n = prob.n
    generator = np.zeros((n + 1, n + 1), dtype=complex)
    generator[:n, :n] = prob.a
    generator[:n, n] = prob.b
    start = np.append(prob.x0, 1.0)
    return (expm(generator * t) @ start)[:n]


class TestPropagators:
    """Tests for the Taylor propagator pair."""

    def test_identity_z_s_equals_t_minus_one(self):
        """Test z S_K(z) = T_K(z) - I, plain and modified."""
        rng = np.random.default_rng(0)
        z = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        z *= 0.8 / np.linalg.norm(z, 2)
        for modified in (None, (2, 0.4)):
            t_matrix, s_matrix = eval_propagators(z, 6, modified)
            np.testing.assert_allclose(z @ s_matrix, t_matrix - np.eye(3), atol=1e-14)

    def test_long_truncation_matches_exponential(self):
        """Test T_K(z) -> e^z."""
        z = np.array([[0.0, 0.5], [-0.5, 0.0]], dtype=complex)
        t_matrix, _ = eval_propagators(z, 30)
        np.testing.assert_allclose(t_matrix, expm(z), atol=1e-15)

    def test_zero_order(self):
        """Test T_0 = I and S_0 = 0."""
        z = 0.5 * np.eye(2)
        t_matrix, s_matrix = eval_propagators(z, 0)
        np.testing.assert_allclose(t_matrix, np.eye(2))
        assert not s_matrix.any()

    def test_rejects_large_argument(self):
        """Test that ||z|| > 1 is rejected."""
        with pytest.raises(OdeError, match="<= 1"):
            eval_propagators(2.0 * np.eye(2), 3)


class TestEncoding:
    """Tests for the history-state encoding."""

    def problem(self, **overrides):
        """Default random problem."""
        params = dict(dim=2, h=0.5, m=4, seed=0)
        params.update(overrides)
        return random_ode_problem(**params)

    def test_layout(self):
        """Test d = m(K+1) + pad and the step blocks."""
        prob = self.problem()
        enc = build_encoding(prob, 3)

        assert enc.d == 4 * 4 + 1
        assert enc.matrix.shape == (18 * 2, 18 * 2)
        assert enc.block_index[(4, 0)] == 16
        assert enc.step_block(2) == 8

    def test_matrix_is_unit_lower_triangular(self):
        """Test the forward-substitution structure."""
        dense = build_encoding(self.problem(), 3).matrix.toarray()
        assert not np.any(np.triu(dense, 1))
        np.testing.assert_array_equal(np.diag(dense), np.ones(dense.shape[0]))

    def test_first_step_matches_propagators(self):
        """Test x_1 = T_K(Ah) x0 + S_K(Ah) h b."""
        prob = self.problem()
        enc = build_encoding(prob, 4)
        solution = solve_encoding(enc)

        t_matrix, s_matrix = eval_propagators(prob.a * prob.h, 4)
        expected = t_matrix @ prob.x0 + s_matrix @ (prob.h * prob.b)

        np.testing.assert_allclose(extract_state(enc, solution, 1), expected, atol=1e-13)
        np.testing.assert_allclose(extract_state(enc, solution, 0), prob.x0)

    def test_pad_blocks_copy_final_state(self):
        """Test that the padding repeats the state after m steps."""
        prob = self.problem(pad=2)
        enc = build_encoding(prob, 3)
        solution = solve_encoding(enc)

        final = extract_state(enc, solution, prob.m)
        last = solution[enc.d * enc.n :]

        np.testing.assert_allclose(last, final)

    def test_high_order_converges(self):
        """Test that a high order reproduces the exact solution."""
        prob = self.problem()
        enc = build_encoding(prob, 20)
        state = extract_state(enc, solve_encoding(enc), prob.m)
        np.testing.assert_allclose(state, reference_solution(prob, prob.m * prob.h), atol=1e-12)

    def test_modified_needs_matching_order(self):
        """Test that the modified encoding uses k == k2."""
        with pytest.raises(OdeError, match="k == k2"):
            build_encoding(self.problem(), 5, modified=(3, 6, 0.5))

    def test_modified_needs_ordered_pair(self):
        """Test that k2 must exceed k1."""
        with pytest.raises(ValueError, match="k2 must exceed k1"):
            build_encoding(self.problem(), 3, modified=(3, 3, 0.5))

    def test_size_limit(self, monkeypatch):
        """Test that oversized encodings are rejected."""
        monkeypatch.setattr(ode_service.simulation_config, "max_dense_entries", 10)
        with pytest.raises(OdeError, match="exceeds"):
            build_encoding(self.problem(), 3)

    def test_step_out_of_range(self):
        """Test that steps beyond m are rejected."""
        prob = self.problem()
        enc = build_encoding(prob, 2)
        with pytest.raises(OdeError):
            extract_state(enc, solve_encoding(enc), prob.m + 1)


class TestReferenceSolution:
    """Tests for the exact solution."""

    def test_matches_affine_exponential(self):
        """Test against the exponential of the affine generator."""
        prob = random_ode_problem(3, 0.25, 2, seed=4)
        np.testing.assert_allclose(
            reference_solution(prob, 1.7), augmented_solution(prob, 1.7), atol=1e-12
        )

    def test_zero_generator(self):
        """Test x(t) = x0 + t b when A = 0."""
        prob = OdeProblem(a=np.zeros((2, 2)), b=[1.0, 2.0], x0=[1.0, 0.0], h=0.1, m=1)
        np.testing.assert_allclose(reference_solution(prob, 2.0), [3.0, 4.0])

    def test_initial_time(self):
        """Test x(0) = x0."""
        prob = random_ode_problem(2, 0.5, 1, seed=1)
        np.testing.assert_allclose(reference_solution(prob, 0.0), prob.x0)

    def test_negative_time(self):
        """Test that t < 0 is rejected."""
        prob = random_ode_problem(2, 0.5, 1, seed=1)
        with pytest.raises(OdeError):
            reference_solution(prob, -1.0)


class TestConstants:
    """Tests for κ_V, C_j and the bound set."""

    def test_identity_condition(self):
        """Test that the identity has κ = 1."""
        assert eigenvector_condition(np.eye(3)) == (1.0, False)

    def test_unit_lower_triangular_is_defective(self):
        """Test that a non-identity unit lower-triangular matrix is flagged."""
        matrix = np.array([[1.0, 0.0], [0.5, 1.0]])
        kappa, defective = eigenvector_condition(matrix)
        assert defective
        assert math.isinf(kappa)

    def test_normal_matrix(self):
        """Test that a Hermitian matrix has well-conditioned eigenvectors."""
        kappa, defective = eigenvector_condition(np.array([[2.0, 1.0], [1.0, 3.0]]))
        assert kappa == pytest.approx(1.0)
        assert not defective

    def test_encoding_uses_matrix_condition(self):
        """Test the fallback κ = cond(C) for the defective encoding."""
        prob = random_ode_problem(2, 0.5, 2, seed=0)
        enc = build_encoding(prob, 3)

        constants = ode_constants(enc, prob, 1)

        singular = np.linalg.svd(enc.matrix.toarray(), compute_uv=False)
        assert constants.defective
        assert constants.kappa_source == "matrix_condition"
        assert constants.kappa_v == pytest.approx(singular[0] / singular[-1])
        assert constants.c_j == pytest.approx(2.8 * constants.kappa_v * (1.0 + 2 * 0.5))

    def test_smallest_encoding_is_defective(self):
        """Test that m = 1, A = 0, K = 1 already takes the cond(C) fallback."""
        prob = OdeProblem(a=np.zeros((1, 1)), b=np.array([1.0]), x0=np.array([1.0]), h=0.5, m=1)
        enc = build_encoding(prob, 1)

        constants = ode_constants(enc, prob, 1)

        assert eigenvector_condition(enc.matrix.toarray())[1]
        assert constants.kappa_source == "matrix_condition"
        assert constants.kappa_v == pytest.approx(np.linalg.cond(enc.matrix.toarray()))
        assert constants.kappa_v > 1.0

    def test_constants_reject_zero_step(self):
        """Test that j must be positive."""
        prob = random_ode_problem(2, 0.5, 2, seed=0)
        with pytest.raises(OdeError):
            ode_constants(build_encoding(prob, 2), prob, 0)

    def test_bounds(self):
        """Test δ = C_j/(K+1)! and ε = max{8 δm, 4 δ1²/(1-p)}."""
        constants = OdeConstants(kappa_v=1.0, c_j=2.8, j=1)
        bounds = ode_bounds(constants, 3, 6, 0.6)
        assert bounds.delta1 == pytest.approx(2.8 / 24.0)
        assert bounds.delta_m == pytest.approx(2.8 / 5040.0)
        assert bounds.epsilon == pytest.approx(4.0 / 0.4 * (2.8 / 24.0) ** 2)

    def test_bounds_with_zero_constant(self):
        """Test that C_j = 0 gives zero bounds."""
        bounds = ode_bounds(OdeConstants(kappa_v=1.0, c_j=0.0, j=1), 3, 6, 0.6)
        assert bounds.epsilon == 0.0


class TestMixedSolution:
    """Tests for the mixed-truncation ODE solution."""

    def test_first_step_cancels_exactly(self):
        """Test that the mixture equals the plain K2 solution after one step."""
        prob = random_ode_problem(2, 0.5, 4, seed=0)

        result = verify_mixed_solution(prob, 3, 6, 0.6, 1)

        assert result.cancellation_residual <= 1e-12
        assert result.measured_error == pytest.approx(result.plain_k2_error, abs=1e-12)
        assert result.verdict.holds
        assert result.verdict.name == "mixed_solution_error"

    def test_later_steps_within_bound(self):
        """Test the error bound at every step."""
        prob = random_ode_problem(3, 0.5, 4, seed=2)
        for j in range(1, 5):
            result = verify_mixed_solution(prob, 3, 6, 0.6, j)
            assert result.verdict.holds, f"step {j}"
        assert result.cancellation_residual > 0.0

    def test_mixture_beats_k1(self):
        """Test that mixing improves on the K1 truncation alone."""
        prob = random_ode_problem(2, 0.5, 4, seed=3)
        enc = build_encoding(prob, 3)
        x1 = extract_state(enc, solve_encoding(enc), 4)
        k1_error = float(np.linalg.norm(x1 - reference_solution(prob, 2.0)))

        result = verify_mixed_solution(prob, 3, 6, 0.6, 4)

        assert result.measured_error < k1_error

    def test_random_problems_within_bound(self):
        """Test the final-step bound on random problems up to 4x4."""
        rng = np.random.default_rng(11)
        for trial in range(50):
            dim = int(rng.choice([2, 4]))
            m = int(rng.integers(1, 5))
            k1 = int(rng.integers(1, 5))
            k2 = int(rng.integers(k1 + 1, 9))
            p = float(rng.uniform(0.0, 0.9))
            prob = random_ode_problem(dim, 0.5, m, seed=trial, norm=float(rng.uniform(0.05, 0.5)))

            result = verify_mixed_solution(prob, k1, k2, p, m)

            assert result.verdict.holds, f"trial {trial}: {result.measured_error} > {result.verdict.rhs}"
            if m == 1:
                assert result.cancellation_residual <= 1e-12

    def test_report(self):
        """Test the report fields."""
        result = verify_mixed_solution(random_ode_problem(2, 0.5, 4, seed=0), 3, 6, 0.6, 2)
        flat = result.report.flat()
        assert flat["application"] == "ode"
        assert "kappa_v" in flat
        assert result.report.provenance["kappa_source"] == "matrix_condition"

    def test_step_range(self):
        """Test that j must lie in [1, m]."""
        prob = random_ode_problem(2, 0.5, 4, seed=0)
        with pytest.raises(OdeError, match="j must lie"):
            verify_mixed_solution(prob, 3, 6, 0.6, 5)


class TestRandomProblem:
    """Tests for the random problem generator."""

    def test_step_norm(self):
        """Test ||A h|| = norm and unit vectors."""
        prob = random_ode_problem(4, 0.25, 3, seed=9, norm=0.7)
        assert np.linalg.norm(prob.a * prob.h, 2) == pytest.approx(0.7)
        assert np.linalg.norm(prob.x0) == pytest.approx(1.0)
        assert np.linalg.norm(prob.b) == pytest.approx(1.0)

    def test_reproducible(self):
        """Test that the same seed gives the same problem."""
        first = random_ode_problem(2, 0.5, 1, seed=5)
        second = random_ode_problem(2, 0.5, 1, seed=5)
        np.testing.assert_array_equal(first.a, second.a)

    def test_rejects_large_norm(self):
        """Test that norm > 1 is rejected."""
        with pytest.raises(OdeError):
            random_ode_problem(2, 0.5, 1, seed=0, norm=1.5)
