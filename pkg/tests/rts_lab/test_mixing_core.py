"""Tests for the mixing core."""

import numpy as np
import pytest
from scipy.linalg import expm

import rts_lab.services.mixing_core as mixing_core
from rts_lab.schemas.mixing import DenseOperator, SeriesMixSpec
from rts_lab.schemas.series import SeriesCoefficients
from rts_lab.services.mixing_core import (
    MixingError,
    amplify_tail,
    apply_mixing_channel,
    matrix_polynomial,
    mixing_error_bound,
    modified_coefficients,
    trace_distance,
    verify_mixing_lemma,
)
from rts_lab.services.series_kernel import taylor_exp_coefficients


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Random Hermitian matrix with unit spectral norm."""
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = m + m.conj().T
    return h / np.linalg.norm(h, 2)


def random_pure_state(rng: np.random.Generator, dim: int) -> DenseOperator:
    """Random normalized pure state."""
    return DenseOperator.pure_state(rng.normal(size=dim) + 1j * rng.normal(size=dim))


class TestModifiedCoefficients:
    """Tests for F1/F2 coefficient construction."""

    def test_taylor_example(self):
        """Test K1=1, K2=2, p=0.5 on the e^{-iz} Taylor series."""
        spec = SeriesMixSpec(base=taylor_exp_coefficients(-1j, 2), k1=1, k2=2, p=0.5)

        first, second = modified_coefficients(spec)

        np.testing.assert_allclose(first.values, [1.0, -1j])
        np.testing.assert_allclose(second.values, [1.0, -1j, -1.0])

    def test_mixture_recovers_base(self):
        """Test p F1 + (1-p) F2 = base series to order K2."""
        base = SeriesCoefficients.from_values(np.linspace(1.0, 2.0, 8))
        spec = SeriesMixSpec(base=base, k1=3, k2=6, p=0.3)

        first, second = modified_coefficients(spec)
        mixed = spec.p * first.padded(6) + (1.0 - spec.p) * second.values

        np.testing.assert_allclose(mixed, base.values[:7], rtol=1e-14)

    def test_amplify_tail_zero_probability(self):
        """Test that p = 0 leaves the coefficients unchanged."""
        values = np.array([1.0, 2.0, 3.0])
        np.testing.assert_array_equal(amplify_tail(values, 0, 0.0), values)

    def test_amplify_tail_rejects_probability_one(self):
        """Test that p = 1 is rejected."""
        with pytest.raises(ValueError):
            amplify_tail(np.ones(3), 0, 1.0)


class TestMatrixPolynomial:
    """Tests for polynomial evaluation on matrices."""

    def test_diagonal_matrix(self):
        """Test that a diagonal matrix evaluates entrywise."""
        coeffs = SeriesCoefficients.from_values([1.0, 2.0, 3.0])
        h = DenseOperator(entries=np.diag([0.5, -1.0]))

        result = matrix_polynomial(coeffs, h)

        np.testing.assert_allclose(np.diag(result.entries), [2.75, 2.0])

    def test_long_taylor_matches_expm(self):
        """Test that a long truncation reproduces the matrix exponential."""
        rng = np.random.default_rng(3)
        h = random_hermitian(rng, 4)

        result = matrix_polynomial(taylor_exp_coefficients(-0.5j, 30), DenseOperator(entries=h))

        np.testing.assert_allclose(result.entries, expm(-0.5j * h), atol=1e-13)


class TestMixingChannel:
    """Tests for the two-branch channel."""

    def test_unitary_branches_preserve_trace(self):
        """Test that identical unitary branches give U ρ U†."""
        rng = np.random.default_rng(0)
        u = expm(-1j * random_hermitian(rng, 2))
        rho = random_pure_state(rng, 2)
        v = DenseOperator(entries=u)

        out = apply_mixing_channel(v, v, 0.4, rho)

        np.testing.assert_allclose(out.entries, u @ rho.entries @ u.conj().T, atol=1e-13)

    def test_normalization_divides_once(self):
        """Test that the output has unit trace when normalized."""
        rho = DenseOperator.pure_state(np.array([1.0, 0.0]))
        v1 = DenseOperator(entries=0.5 * np.eye(2))
        v2 = DenseOperator(entries=2.0 * np.eye(2))

        raw = apply_mixing_channel(v1, v2, 0.5, rho, normalize=False)
        out = apply_mixing_channel(v1, v2, 0.5, rho)

        assert np.trace(raw.entries).real == pytest.approx(0.5 * 0.25 + 0.5 * 4.0)
        assert np.trace(out.entries).real == pytest.approx(1.0)

    def test_zero_trace_output(self):
        """Test that annihilating branches are rejected."""
        rho = DenseOperator.pure_state(np.array([1.0, 0.0]))
        zero = DenseOperator(entries=np.zeros((2, 2)))

        with pytest.raises(MixingError, match="zero-trace"):
            apply_mixing_channel(zero, zero, 0.5, rho)

    def test_dimension_mismatch(self):
        """Test that operator dimensions must agree."""
        rho = DenseOperator.pure_state(np.array([1.0, 0.0]))
        with pytest.raises(MixingError, match="dimension mismatch"):
            apply_mixing_channel(DenseOperator.identity(3), DenseOperator.identity(2), 0.5, rho)

    def test_rejects_non_density(self):
        """Test that a non-unit-trace input is rejected."""
        with pytest.raises(MixingError, match="unit trace"):
            apply_mixing_channel(
                DenseOperator.identity(2), DenseOperator.identity(2), 0.5, DenseOperator.identity(2)
            )


class TestTraceDistance:
    """Tests for the Schatten 1-norm distance."""

    def test_orthogonal_pure_states(self):
        """Test that orthogonal pure states are at distance 2."""
        rho1 = DenseOperator.pure_state(np.array([1.0, 0.0]))
        rho2 = DenseOperator.pure_state(np.array([0.0, 1.0]))
        assert trace_distance(rho1, rho2) == pytest.approx(2.0)

    def test_identical_states(self):
        """Test that identical states are at distance 0."""
        rho = DenseOperator.pure_state(np.array([1.0, 1.0j]))
        assert trace_distance(rho, rho) == pytest.approx(0.0, abs=1e-15)


class TestMixingBound:
    """Tests for the mixing bound and its verifier."""

    def test_bound_formula(self):
        """Test ε = 4b + 2p a1² + 2(1-p) a2²."""
        assert mixing_error_bound(0.1, 0.2, 0.01, 0.25) == pytest.approx(
            0.04 + 2 * 0.25 * 0.01 + 2 * 0.75 * 0.04
        )

    def test_bound_rejects_negative(self):
        """Test that negative errors are rejected."""
        with pytest.raises(MixingError):
            mixing_error_bound(-0.1, 0.0, 0.0, 0.5)

    def test_lemma_holds_for_truncated_series(self):
        """Test the lemma on Taylor truncations over 100 random instances."""
        for seed in range(100):
            rng = np.random.default_rng(seed)
            h = DenseOperator(entries=random_hermitian(rng, 4))
            spec = SeriesMixSpec(base=taylor_exp_coefficients(-0.5j, 4), k1=2, k2=4, p=0.5)
            first, second = modified_coefficients(spec)
            u = DenseOperator(entries=expm(-0.5j * h.entries))

            verdict = verify_mixing_lemma(
                matrix_polynomial(first, h),
                matrix_polynomial(second, h),
                u,
                spec.p,
                random_pure_state(rng, 4),
            )

            assert verdict.holds, f"seed {seed}: {verdict.lhs} > {verdict.rhs}"
            assert verdict.b < verdict.a1

    def test_lemma_holds_for_random_perturbations(self):
        """Test the lemma for arbitrary small non-unitary branch errors."""
        for seed in range(100):
            rng = np.random.default_rng(1000 + seed)
            u = expm(-1j * random_hermitian(rng, 3))
            e1 = 0.02 * (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
            e2 = 0.02 * (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
            p = float(rng.uniform(0.0, 0.9))

            verdict = verify_mixing_lemma(
                DenseOperator(entries=u + e1),
                DenseOperator(entries=u + e2),
                DenseOperator(entries=u),
                p,
                random_pure_state(rng, 3),
            )

            assert verdict.holds

    def test_rejects_non_unitary_target(self):
        """Test that the target must be unitary."""
        rho = DenseOperator.pure_state(np.array([1.0, 0.0]))
        v = DenseOperator.identity(2)
        with pytest.raises(MixingError, match="unitary"):
            verify_mixing_lemma(v, v, DenseOperator(entries=2.0 * np.eye(2)), 0.5, rho)

    def test_rejects_mixed_state(self):
        """Test that the input must be pure."""
        v = DenseOperator.identity(2)
        rho = DenseOperator(entries=0.5 * np.eye(2))
        with pytest.raises(MixingError, match="pure"):
            verify_mixing_lemma(v, v, v, 0.5, rho)

    def test_epsilon_prime_flag(self):
        """Test that large errors set the epsilon' flag."""
        rho = DenseOperator.pure_state(np.array([1.0, 0.0]))
        u = DenseOperator.identity(2)
        v = DenseOperator(entries=2.0 * np.eye(2))

        verdict = verify_mixing_lemma(v, v, u, 0.5, rho)

        assert verdict.epsilon_prime_exceeds_one

    def test_slack_from_simulation_config(self, monkeypatch):
        """Test that the domination slack comes from the simulation config unless given."""
        monkeypatch.setattr(mixing_core.simulation_config, "mixing_slack", 0.25)
        rho = DenseOperator.pure_state(np.array([1.0, 1.0j]))
        u = DenseOperator.identity(2)
        v = DenseOperator(entries=np.diag([1.0, 0.9]))

        assert verify_mixing_lemma(v, v, u, 0.5, rho).slack == 0.25
        assert verify_mixing_lemma(v, v, u, 0.5, rho, slack=0.0).slack == 0.0
