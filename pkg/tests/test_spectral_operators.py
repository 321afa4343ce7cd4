import numpy as np
import pytest

from shapefilter.errors import (
    InputError,
    ResonantParametersError,
    SingularOperatorError,
    UnsupportedPoleStructureError,
)
from shapefilter.impulse_response import impulse_from_fractions, kernel_norm_squared
from shapefilter.presets import get_preset
from shapefilter.spectral_basis import CosineBasis, project_kernel
from shapefilter.spectral_operators import (
    BlockParameters,
    SpectralOperator,
    aperiodic2_matrix,
    aperiodic_matrix,
    compose_rational,
    differentiation_matrix,
    exact_projection,
    integration_matrix,
    oscillatory_matrix,
    whitening_operator,
)
from shapefilter.tf_core import RationalTransferFunction, partial_fractions

T = 5.0


class TestBlockParameters:
    def test_aperiodic_branch(self):
        p = BlockParameters(3.0)
        assert p.mu == pytest.approx(-1 / 3)
        assert p.nu == 0.0
        assert abs(p.lam**2 - (p.mu**2 + p.nu**2)) < 1e-12

    def test_oscillatory_branch(self):
        p = BlockParameters(2.0, 0.5)
        assert p.mu == pytest.approx(-0.25)
        assert p.nu == pytest.approx(np.sqrt(3) / 4)
        assert abs(p.lam**2 - (p.mu**2 + p.nu**2)) < 1e-12
        assert p.eta_sq == pytest.approx(0.0625 - 3 / 16)  # signed, negative here

    def test_invalid(self):
        with pytest.raises(InputError):
            BlockParameters(-1.0)
        with pytest.raises(InputError):
            BlockParameters(1.0, 1.5)


class TestIntegrationMatrix:
    def test_corner(self):
        assert integration_matrix(T, 4).matrix[0, 0] == pytest.approx(2.5)

    def test_even_column_zero(self):
        w = integration_matrix(T, 4).matrix
        assert w[0, 2] == 0.0

    def test_antisymmetry(self):
        w = integration_matrix(T, 8).matrix
        for i in range(1, 8):
            for j in range(1, 8):
                assert w[i, j] == -w[j, i]


class TestDifferentiationMatrix:
    def test_corner(self):
        assert differentiation_matrix(T, 4).matrix[0, 0] == pytest.approx(0.2)

    def test_first_row_column(self):
        w = differentiation_matrix(T, 4).matrix
        assert w[1, 0] == pytest.approx(np.sqrt(2) / 5)
        assert w[0, 1] == pytest.approx(-np.sqrt(2) / 5)

    def test_mutually_inverse_in_the_limit(self):
        # the infinite matrices are mutually inverse; the truncated product
        # approaches the identity on fixed leading blocks at rate O(1/L)
        errs = []
        for order in (32, 64, 128, 256):
            w = differentiation_matrix(T, order).matrix @ integration_matrix(T, order).matrix
            errs.append(np.max(np.abs(w[:4, :4] - np.eye(4))))
        assert errs[0] > errs[1] > errs[2] > errs[3]
        ratios = [a / b for a, b in zip(errs, errs[1:])]
        assert all(1.7 < r < 2.3 for r in ratios)  # first-order rate
        assert errs[-1] < 2e-3

    def test_quadrature_of_defining_integral(self):
        # P_ij = q_i(0) q_j(0) + integral q_i(t) q_j'(t) dt
        order = 6
        basis = CosineBasis(T)
        nodes, weights = np.polynomial.legendre.leggauss(64)
        t = T / 2 + T / 2 * nodes
        w = T / 2 * weights
        p = differentiation_matrix(T, order).matrix
        q0 = basis.eval_matrix(order, np.array([0.0]))[:, 0]
        qt = basis.eval_matrix(order, t)
        idx = np.arange(order)[:, None]
        dqt = -np.sqrt(2 / T) * (idx * np.pi / T) * np.sin(idx * np.pi * t[None, :] / T)
        dqt[0] = 0.0
        expected = np.outer(q0, q0) + qt @ (w[:, None] * dqt.T)
        np.testing.assert_allclose(p, expected, atol=1e-12)


class TestClosedFormsAgainstOracle:
    # acceptance runs these at L=16; keep the unit versions lean
    def test_aperiodic(self):
        kernel = impulse_from_fractions(partial_fractions(get_preset("dryden1").tf))
        oracle = project_kernel(CosineBasis(T), kernel, 8)
        np.testing.assert_allclose(aperiodic_matrix(3.0, T, 8).matrix, oracle, atol=1e-8)

    def test_aperiodic2(self):
        oracle = project_kernel(
            CosineBasis(T), lambda e: e * np.exp(-e / 4.0) / 16.0, 8
        )
        np.testing.assert_allclose(aperiodic2_matrix(4.0, T, 8).matrix, oracle, atol=1e-8)

    def test_oscillatory(self):
        kernel = impulse_from_fractions(partial_fractions(get_preset("osc").tf))
        oracle = project_kernel(CosineBasis(T), kernel, 8)
        got = oscillatory_matrix(BlockParameters(2.0, 0.5), T, 8).matrix
        np.testing.assert_allclose(got, oracle, atol=1e-8)

    def test_negative_damping_still_matches_oracle(self):
        params = BlockParameters(2.0, -0.3)
        kernel_scale = 1 / (2.0 * np.sqrt(1 - 0.09))
        oracle = project_kernel(
            CosineBasis(T),
            lambda e: kernel_scale * np.exp(0.15 * e) * np.sin(np.sqrt(0.91) / 2 * e),
            6,
        )
        np.testing.assert_allclose(
            oscillatory_matrix(params, T, 6).matrix, oracle, atol=1e-8
        )


class TestSymmetries:
    def test_aperiodic_sign_relation(self):
        w = aperiodic_matrix(3.0, T, 6).matrix
        assert w[2, 1] == -w[1, 2]  # (-1)^3 relation
        for i in range(1, 6):
            for j in range(1, 6):
                assert w[i, j] == pytest.approx((-1.0) ** (i + j) * w[j, i], rel=1e-15)

    def test_oscillatory_and_second_order_sign_relations(self):
        for w in (
            aperiodic2_matrix(4.0, T, 6).matrix,
            oscillatory_matrix(BlockParameters(2.0, 0.5), T, 6).matrix,
            differentiation_matrix(T, 6).matrix,
        ):
            for i in range(1, 6):
                for j in range(1, 6):
                    assert w[i, j] == pytest.approx((-1.0) ** (i + j) * w[j, i], rel=1e-14)

    def test_aperiodic2_off_diagonal_parity(self):
        # zeta vanishes for i+j even, i != j: element reduces to the
        # symmetric exponential part, which the sign relation then ties.
        w = aperiodic2_matrix(4.0, T, 8).matrix
        for i in range(1, 8):
            for j in range(1, 8):
                if i != j and (i + j) % 2 == 0:
                    assert w[i, j] == pytest.approx(w[j, i], rel=1e-14)

    def test_bessel_bound_for_aperiodic(self):
        w = aperiodic_matrix(3.0, T, 32).matrix
        assert float(np.sum(w * w)) <= 0.592252


class TestExactProjection:
    def test_third_order_combination(self):
        got = exact_projection(get_preset("dryden3").tf, T, 12).matrix
        expected = (
            -1.0 * aperiodic_matrix(3.0, T, 12).matrix
            + 1.5 * aperiodic_matrix(4.0, T, 12).matrix
            - 0.5 * aperiodic2_matrix(4.0, T, 12).matrix
        )
        np.testing.assert_allclose(got, expected, atol=1e-12)

    def test_first_order_is_single_block(self):
        got = exact_projection(get_preset("dryden1").tf, T, 8).matrix
        np.testing.assert_allclose(got, aperiodic_matrix(3.0, T, 8).matrix, atol=1e-12)

    def test_oscillatory_is_single_block(self):
        got = exact_projection(get_preset("osc").tf, T, 8).matrix
        expected = oscillatory_matrix(BlockParameters(2.0, 0.5), T, 8).matrix
        np.testing.assert_allclose(got, expected, atol=1e-10)

    def test_unstable_real_pole_rejected(self):
        tf = RationalTransferFunction.from_coefficients([1.0], [-1.0, 1.0])
        with pytest.raises(UnsupportedPoleStructureError):
            exact_projection(tf, T, 8)


class TestResonance:
    def test_resonant_configuration(self):
        # zero damping with nu T = pi: denominator vanishes at index 1
        with pytest.raises(ResonantParametersError):
            oscillatory_matrix(BlockParameters(T / np.pi, 0.0), T, 8)

    def test_zero_damping_off_resonance_matches_oracle(self):
        params = BlockParameters(1.0, 0.0)
        oracle = project_kernel(CosineBasis(T), lambda e: np.sin(e), 6)
        np.testing.assert_allclose(
            oscillatory_matrix(params, T, 6).matrix, oracle, atol=1e-8
        )


class TestComposeRational:
    def test_proportional_block(self):
        tf = RationalTransferFunction((2.5,), (1.0,))  # constant gain bypass
        for form in ("factored", "polynomial"):
            w = compose_rational(tf, T, 4, form=form)
            np.testing.assert_allclose(w.matrix, 2.5 * np.eye(4), atol=1e-12)
            assert w.provenance == "rational_in_P"

    def test_first_order_explicit_inverse(self):
        w = compose_rational(get_preset("dryden1").tf, T, 16).matrix
        p = differentiation_matrix(T, 16).matrix
        expected = np.linalg.solve(3.0 * p + np.eye(16), np.eye(16))
        np.testing.assert_allclose(w, expected, atol=1e-10)

    def test_oscillator_polynomial_form(self):
        w = compose_rational(get_preset("osc").tf, T, 16, form="polynomial").matrix
        p = differentiation_matrix(T, 16).matrix
        expected = np.linalg.solve(4.0 * p @ p + 2.0 * p + np.eye(16), np.eye(16))
        np.testing.assert_allclose(w, expected, atol=1e-10)

    @pytest.mark.parametrize("name", ["dryden1", "dryden2", "dryden3", "osc"])
    def test_forms_agree(self, name):
        tf = get_preset(name).tf
        a = compose_rational(tf, T, 24, form="factored").matrix
        b = compose_rational(tf, T, 24, form="polynomial").matrix
        np.testing.assert_allclose(a, b, atol=1e-9)

    def test_unknown_form(self):
        with pytest.raises(InputError):
            compose_rational(get_preset("dryden1").tf, T, 4, form="midway")

    @pytest.mark.parametrize("name", ["dryden1", "dryden2", "dryden3", "osc"])
    def test_construction_error_shrinks_with_order(self, name):
        tf = get_preset(name).tf
        errs = []
        for order in (16, 32, 64):
            exact = exact_projection(tf, T, order).matrix
            rational = compose_rational(tf, T, order).matrix
            errs.append(float(np.sum((exact - rational) ** 2)))
        assert errs[0] > errs[1] > errs[2] > 0

    def test_second_order_block_square_converges(self):
        # closed-form (theta s + 1)^{-2} matrix vs squared first-order matrix
        gaps = []
        for order in (16, 32, 64):
            closed = aperiodic2_matrix(4.0, T, order).matrix
            squared = aperiodic_matrix(4.0, T, order).matrix
            gaps.append(np.linalg.norm(closed - squared @ squared))
        assert gaps[0] > gaps[1] > gaps[2]


class TestWhitening:
    def test_proportional_inverse(self):
        w = SpectralOperator(2.0 * np.eye(4), T, 4, "rational_in_P")
        np.testing.assert_allclose(whitening_operator(w).matrix, 0.5 * np.eye(4), atol=1e-14)

    def test_first_order_whitening_formula(self):
        w = compose_rational(get_preset("dryden1").tf, T, 16)
        inv = whitening_operator(w).matrix
        expected = 3.0 * differentiation_matrix(T, 16).matrix + np.eye(16)
        np.testing.assert_allclose(inv, expected, atol=1e-8)

    def test_round_trip(self):
        w = compose_rational(get_preset("osc").tf, T, 64)
        inv = whitening_operator(w)
        residual = np.linalg.norm(inv.matrix @ w.matrix - np.eye(64))
        assert residual < 1e-8

    def test_singular(self):
        w = SpectralOperator(np.zeros((4, 4)), T, 4, "rational_in_P")
        with pytest.raises(SingularOperatorError):
            whitening_operator(w)
