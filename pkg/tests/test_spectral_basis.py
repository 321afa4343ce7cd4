import numpy as np
import pytest
from scipy.integrate import quad

from shapefilter.errors import IndexNegativeError, TimeOutOfRangeError
from shapefilter.impulse_response import impulse_from_fractions, kernel_norm_squared
from shapefilter.presets import get_preset
from shapefilter.spectral_basis import (
    CosineBasis,
    basis_eval,
    project_kernel,
    synthesize_function,
)
from shapefilter.spectral_operators import aperiodic_matrix, integration_matrix
from shapefilter.tf_core import partial_fractions


class TestBasisEval:
    def test_constant_mode(self):
        basis = CosineBasis(5.0)
        for t in (0.0, 1.7, 5.0):
            assert basis_eval(basis, 0, t) == pytest.approx(np.sqrt(0.2))

    def test_first_mode_at_zero(self):
        assert basis_eval(CosineBasis(5.0), 1, 0.0) == pytest.approx(np.sqrt(0.4))

    def test_second_mode_at_horizon(self):
        assert basis_eval(CosineBasis(5.0), 2, 5.0) == pytest.approx(np.sqrt(0.4))

    def test_negative_index(self):
        with pytest.raises(IndexNegativeError):
            basis_eval(CosineBasis(5.0), -1, 1.0)

    def test_time_out_of_range(self):
        with pytest.raises(TimeOutOfRangeError):
            basis_eval(CosineBasis(5.0), 0, 5.1)
        with pytest.raises(TimeOutOfRangeError):
            basis_eval(CosineBasis(5.0), 0, -0.1)

    def test_bad_horizon(self):
        with pytest.raises(TimeOutOfRangeError):
            CosineBasis(0.0)

    def test_orthonormality(self):
        basis = CosineBasis(5.0)
        for i in range(9):
            for j in range(i, 9):
                val, _ = quad(
                    lambda t: basis.eval(i, t) * basis.eval(j, t),
                    0.0, 5.0, limit=200, epsabs=1e-13, epsrel=1e-13,
                )
                assert abs(val - (1.0 if i == j else 0.0)) < 1e-10


class TestProjectKernel:
    def test_unit_step_corner(self):
        w = project_kernel(CosineBasis(5.0), lambda e: np.ones_like(e), 2)
        assert w[0, 0] == pytest.approx(2.5, abs=1e-12)

    def test_unit_step_equals_integration_matrix(self):
        w = project_kernel(CosineBasis(5.0), lambda e: np.ones_like(e), 6)
        np.testing.assert_allclose(w, integration_matrix(5.0, 6).matrix, atol=1e-10)

    def test_zero_kernel(self):
        w = project_kernel(CosineBasis(5.0), lambda e: np.zeros_like(e), 4)
        np.testing.assert_array_equal(w, np.zeros((4, 4)))

    def test_first_order_kernel_matches_closed_form(self):
        kernel = impulse_from_fractions(partial_fractions(get_preset("dryden1").tf))
        w = project_kernel(CosineBasis(5.0), kernel, 8)
        np.testing.assert_allclose(w, aperiodic_matrix(3.0, 5.0, 8).matrix, atol=1e-8)

    @pytest.mark.parametrize("name", ["dryden1", "dryden2", "osc"])
    def test_bessel_monotone_in_order(self, name):
        kernel = impulse_from_fractions(partial_fractions(get_preset(name).tf))
        basis = CosineBasis(5.0)
        norm = kernel_norm_squared(kernel, 5.0)
        previous = 0.0
        for order in (4, 8, 16):
            w = project_kernel(basis, kernel, order)
            energy = float(np.sum(w * w))
            assert energy >= previous - 1e-12
            assert energy <= norm + 1e-10
            previous = energy


class TestSynthesize:
    def test_single_constant_coefficient(self):
        out = synthesize_function(CosineBasis(5.0), [1.0], [0.0])
        assert out[0] == pytest.approx(np.sqrt(0.2))

    def test_constant_is_reproduced_exactly(self):
        basis = CosineBasis(5.0)
        # projections of f = 1: only the constant mode survives
        coeffs = [np.sqrt(5.0)] + [0.0] * 7
        grid = np.linspace(0, 5, 11)
        np.testing.assert_allclose(
            synthesize_function(basis, coeffs, grid), np.ones(11), atol=1e-12
        )

    def test_ramp_reconstruction_error(self):
        # cosine coefficients of f(t) = t on [0, T]:
        # c_0 = T^{3/2}/2, c_i = sqrt(2/T) T^2 ((-1)^i - 1)/(i pi)^2
        T, order = 5.0, 64
        basis = CosineBasis(T)
        idx = np.arange(1, order)
        coeffs = np.concatenate((
            [T**1.5 / 2],
            np.sqrt(2 / T) * T**2 * ((-1.0) ** idx - 1) / (idx * np.pi) ** 2,
        ))
        err, _ = quad(
            lambda t: (synthesize_function(basis, coeffs, [t])[0] - t) ** 2,
            0.0, T, limit=400,
        )
        # Parseval remainder of the truncated series
        tail_idx = np.arange(order, 20000)
        tail = np.sum((np.sqrt(2 / T) * T**2 * ((-1.0) ** tail_idx - 1) / (tail_idx * np.pi) ** 2) ** 2)
        assert err == pytest.approx(tail, rel=1e-3)
        assert err < 1e-4

    def test_grid_out_of_range(self):
        with pytest.raises(TimeOutOfRangeError):
            synthesize_function(CosineBasis(5.0), [1.0, 0.0], [6.0])
