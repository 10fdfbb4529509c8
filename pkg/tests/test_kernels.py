from math import e, factorial, pi, sinh

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from kedmd.kernels import (
    KernelKind,
    KernelSpec,
    eval_exp_power,
    eval_laplace_rk,
    eval_polynomial,
    gram,
    interaction,
    make_kernel,
    median_heuristic,
    pairwise,
)

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


def vectors(n):
    return arrays(np.float64, n, elements=finite)


def series(t, terms=40):
    return sum(t**N / factorial(2 * N + 1) for N in range(terms + 1))


class TestExpPower:
    def test_equal_arguments(self):
        assert eval_exp_power([0.3, -1.2], [0.3, -1.2], 1.0, 1.0) == 1.0

    def test_unit_distance_laplace(self):
        assert eval_exp_power([0.0], [1.0], 1.0, 1.0) == pytest.approx(1 / e, rel=1e-15)

    def test_grbf_scaling(self):
        assert eval_exp_power([0.0, 0.0], [2.0, 0.0], 2.0, 4.0) == pytest.approx(0.3678794412, rel=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            eval_exp_power([1.0], [1.0, 2.0], 1.0, 1.0)

    @pytest.mark.parametrize("gamma, sigma", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0), (1.0, np.nan)])
    def test_bad_parameters(self, gamma, sigma):
        with pytest.raises(ValueError):
            eval_exp_power([1.0], [0.0], gamma, sigma)

    @given(vectors(3), vectors(3), st.sampled_from([0.5, 1.0, 2.0]), st.floats(0.1, 10))
    def test_bounded(self, x, z, gamma, sigma):
        v = eval_exp_power(x, z, gamma, sigma)
        assert 0.0 <= v <= 1.0


class TestPolynomial:
    def test_zero_vector(self):
        assert eval_polynomial([0.0, 0.0], [3.0, -7.0], 3, 1.0) == 1.0

    def test_scalar(self):
        assert eval_polynomial([1.0], [1.0], 1, 1.0) == 2.0

    def test_arithmetic_oracle(self):
        assert eval_polynomial([1.0, 2.0], [3.0, 4.0], 2, 1.0) == 144.0

    def test_scale_d(self):
        assert eval_polynomial([2.0], [2.0], 1, 2.0) == 2.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            eval_polynomial([1.0, 2.0], [1.0], 1, 1.0)

    def test_alpha_must_be_integer(self):
        with pytest.raises((TypeError, ValueError)):
            KernelSpec.polynomial(1.5)


class TestLaplaceRK:
    def test_zero(self):
        assert eval_laplace_rk(0.0) == 1.0

    def test_one(self):
        assert eval_laplace_rk(1.0) == pytest.approx(series(1.0), rel=1e-14)
        assert eval_laplace_rk(1.0) == pytest.approx(1.1752011936, rel=1e-10)

    def test_negative_pi_squared(self):
        assert abs(eval_laplace_rk(-(pi**2))) < 1e-15

    def test_real_in_real_out(self):
        assert isinstance(eval_laplace_rk(-2.0), float)
        assert isinstance(eval_laplace_rk(2.0 + 0j), complex)

    def test_array_shape_preserved(self):
        t = np.linspace(-3, 3, 12).reshape(3, 4)
        assert eval_laplace_rk(t).shape == (3, 4)

    @pytest.mark.parametrize("t", [1e-3, -5e-3, 9.99e-3, 1.01e-2, 2e-2j, -1e-2 + 1e-2j])
    def test_series_switch_continuous(self, t):
        assert abs(eval_laplace_rk(t) - series(t)) <= 1e-15

    @given(st.floats(0, 10), st.floats(0, 2 * pi))
    def test_series_agreement(self, r, theta):
        t = r * np.exp(1j * theta)
        got = eval_laplace_rk(t)
        assert abs(got - series(t)) <= 1e-12 * max(1.0, abs(got))

    @given(st.floats(-50, 50))
    def test_real_axis(self, t):
        if t > 0:
            ref = sinh(np.sqrt(t)) / np.sqrt(t)
        elif t < 0:
            ref = np.sin(np.sqrt(-t)) / np.sqrt(-t)
        else:
            ref = 1.0
        assert eval_laplace_rk(t) == pytest.approx(ref, rel=1e-12, abs=1e-15)

    def test_spec_call_uses_hermitian_product(self):
        k = KernelSpec.laplace_rk(2.0)
        x = np.array([1 + 1j, 0.5])
        z = np.array([0.3j, -1.0])
        t = np.sum(x * np.conj(z)) / 4.0
        assert k(x, z) == pytest.approx(eval_laplace_rk(t), rel=1e-15)


class TestGram:
    def test_identical_columns(self):
        X = np.tile([[1.0], [2.0], [-3.0]], (1, 5))
        np.testing.assert_array_equal(gram(X, KernelSpec.laplace(0.7)), np.ones((5, 5)))

    def test_single_column(self):
        G = gram(np.array([[1.0], [2.0]]), KernelSpec.polynomial(2))
        assert G.shape == (1, 1) and G[0, 0] == 36.0

    def test_two_points(self):
        G = gram(np.array([[0.0, 1.0], [0.0, 0.0]]), KernelSpec.laplace(1.0))
        ref = np.array([[1.0, eval_exp_power([0, 0], [1, 0], 1, 1)], [eval_exp_power([1, 0], [0, 0], 1, 1), 1.0]])
        np.testing.assert_allclose(G, ref, rtol=1e-15)
        assert G[0, 1] == pytest.approx(np.exp(-1), rel=1e-15)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            gram(np.empty((2, 0)), KernelSpec.laplace(1.0))

    @pytest.mark.parametrize(
        "spec",
        [KernelSpec.laplace(1.1), KernelSpec.grbf(0.4), KernelSpec.polynomial(3, 2.0), KernelSpec.laplace_rk(1.5)],
    )
    def test_exactly_symmetric_and_matches_scalar(self, rng, spec):
        X = rng.standard_normal((3, 9))
        G = gram(X, spec)
        np.testing.assert_array_equal(G, G.T)
        for i in range(9):
            for j in range(9):
                assert G[i, j] == pytest.approx(spec(X[:, i], X[:, j]), rel=1e-13)

    @given(st.integers(2, 30), st.integers(1, 5), st.sampled_from([1.0, 2.0]), st.floats(0.05, 20), st.integers(0, 2**32))
    def test_psd(self, m, n, gamma, scale, seed):
        X = np.random.Generator(np.random.PCG64(seed)).standard_normal((n, m))
        lam = np.linalg.eigvalsh(gram(X, KernelSpec.exp_power(gamma, scale)))
        assert lam[0] >= -1e-10 * lam[-1]


class TestInteraction:
    def test_y_equals_x(self, rng):
        X = rng.standard_normal((2, 6))
        spec = KernelSpec.laplace(1.3)
        np.testing.assert_array_equal(interaction(X, X, spec), gram(X, spec))

    def test_single_pair_at_sigma(self):
        A = interaction(np.array([[2.5]]), np.array([[0.5]]), KernelSpec.laplace(2.0))
        assert A[0, 0] == pytest.approx(np.exp(-1), rel=1e-15)

    def test_swapped_columns(self, rng):
        X = rng.standard_normal((3, 2))
        spec = KernelSpec.grbf(0.9)
        A = interaction(X[:, ::-1], X, spec)
        np.testing.assert_allclose(A, gram(X, spec)[::-1], rtol=1e-15)

    def test_not_symmetric_in_general(self, rng):
        X = rng.standard_normal((2, 4))
        Y = rng.standard_normal((2, 4))
        A = interaction(Y, X, KernelSpec.laplace(1.0))
        assert A[0, 1] == pytest.approx(eval_exp_power(Y[:, 0], X[:, 1], 1.0, 1.0), rel=1e-14)
        assert not np.allclose(A, A.T)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            interaction(np.ones((2, 3)), np.ones((2, 4)), KernelSpec.laplace(1.0))


@given(vectors(4), vectors(4))
def test_symmetry_all_kinds(x, z):
    for spec in (KernelSpec.laplace(0.8), KernelSpec.grbf(1.7), KernelSpec.polynomial(2, 1.3), KernelSpec.laplace_rk(2.5)):
        a, b = spec(x, z), spec(z, x)
        assert abs(a - b) <= 1e-15 * max(abs(a), 1e-300)


def test_pairwise_matches_gram(rng):
    X = rng.standard_normal((2, 5))
    spec = KernelSpec.exp_power(1.5, 2.0)
    np.testing.assert_allclose(pairwise(X, X, spec), gram(X, spec), rtol=1e-15)


class TestMedianHeuristic:
    def test_small_oracle(self):
        X = np.array([[0.0, 3.0, 0.0], [0.0, 4.0, 1.0]])
        dists = [5.0, 1.0, np.hypot(3, 3)]
        assert median_heuristic(X) == pytest.approx(np.median(dists))
        assert median_heuristic(X, gamma=2.0) == pytest.approx(np.median(dists) ** 2)

    def test_constant_data_falls_back(self):
        assert median_heuristic(np.ones((2, 4))) == 1.0

    def test_subsampled_is_seeded(self, rng):
        X = rng.standard_normal((3, 200))
        assert median_heuristic(X, seed=3) == median_heuristic(X, seed=3)
        assert median_heuristic(X, seed=3) == pytest.approx(median_heuristic(X, max_pairs=10**6), rel=0.05)


class TestMakeKernel:
    def test_names(self):
        X = np.arange(6.0).reshape(2, 3)
        assert make_kernel("laplace", X).gamma == 1.0
        assert make_kernel("grbf", X).gamma == 2.0
        assert make_kernel("poly", alpha=2, d=3.0) == KernelSpec.polynomial(2, 3.0)
        assert make_kernel("laplace-rk", sigma=2.0).kind is KernelKind.LAPLACE_RK

    def test_explicit_sigma_wins(self):
        assert make_kernel("grbf", np.ones((1, 3)), sigma=0.25).sigma == 0.25

    def test_unknown(self):
        with pytest.raises(ValueError, match="unknown kernel"):
            make_kernel("cauchy", sigma=1.0)

    def test_to_dict(self):
        assert KernelSpec.grbf(2.0).to_dict() == {"kind": "exp_power", "sigma": 2.0, "gamma": 2.0}
        assert KernelSpec.polynomial(3, 0.5).to_dict() == {"kind": "polynomial", "alpha": 3, "d": 0.5}
