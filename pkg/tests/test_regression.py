import numpy as np
import pytest

from epispread import PolyModel, RankDeficient, fit_poly, predict_poly


class TestFit:
    def test_exact_line(self):
        model = fit_poly([0.0, 1.0, 2.0], [0.0, 1.0, 2.0], 1)
        assert np.allclose(model.coefficients, [0.0, 1.0], atol=1e-14)
        assert model.residual_sum_squares < 1e-28

    def test_exact_parabola_through_three_points(self):
        # hand solve: y = 1 + x^2 passes (0,1), (1,2), (2,5)
        model = fit_poly([0.0, 1.0, 2.0], [1.0, 2.0, 5.0], 2)
        assert np.allclose(model.coefficients, [1.0, 0.0, 1.0], atol=1e-12)

    def test_exact_recovery_from_noiseless_samples(self):
        x = np.linspace(-3.0, 3.0, 50)
        y = 2.0 + 3.0 * x - x * x
        model = fit_poly(x, y, 2)
        assert np.allclose(model.coefficients, [2.0, 3.0, -1.0], atol=1e-9)

    def test_rank_deficiency_detected(self):
        with pytest.raises(RankDeficient):
            fit_poly([1.0, 1.0, 1.0], [0.0, 1.0, 2.0], 1)
        with pytest.raises(RankDeficient):
            fit_poly([0.0, 1.0], [0.0, 1.0], 2)

    def test_residual_orthogonality_certificate(self):
        # least-squares optimality: residuals are orthogonal to every
        # monomial column of the design matrix
        rng = np.random.default_rng(17)
        for degree in (1, 2, 3):
            x = rng.uniform(-2.0, 2.0, 80)
            y = 1.5 - 0.5 * x + 0.25 * x ** 2 + rng.normal(0.0, 0.3, 80)
            model = fit_poly(x, y, degree)
            r = y - predict_poly(model, x)
            for j in range(degree + 1):
                col = x ** j
                bound = 1e-8 * max(1.0, np.linalg.norm(r) * np.linalg.norm(col))
                assert abs(r @ col) <= bound

    def test_rss_never_increases_with_degree(self):
        rng = np.random.default_rng(18)
        x = rng.uniform(-1.0, 1.0, 60)
        y = np.sin(2.0 * x) + rng.normal(0.0, 0.1, 60)
        rss = [fit_poly(x, y, d).residual_sum_squares for d in range(5)]
        assert all(b <= a + 1e-12 for a, b in zip(rss, rss[1:]))

    def test_fit_invariant_to_point_order(self):
        rng = np.random.default_rng(19)
        x = rng.uniform(-1.0, 1.0, 40)
        y = 0.3 + 1.2 * x - 0.7 * x ** 2 + rng.normal(0.0, 0.2, 40)
        perm = rng.permutation(40)
        a = fit_poly(x, y, 2)
        b = fit_poly(x[perm], y[perm], 2)
        grid = np.linspace(-1.0, 1.0, 33)
        assert np.allclose(predict_poly(a, grid), predict_poly(b, grid),
                           rtol=1e-8, atol=1e-10)


class TestPredict:
    def test_horner_on_parabola(self):
        model = PolyModel(degree=2, coefficients=np.array([1.0, 0.0, 1.0]),
                          residual_sum_squares=0.0)
        assert predict_poly(model, 3.0) == 10.0

    def test_constant_polynomial(self):
        model = PolyModel(degree=0, coefficients=np.array([4.25]),
                          residual_sum_squares=0.0)
        for x in (-7.0, 0.0, 2.5):
            assert predict_poly(model, x) == 4.25

    def test_identity_polynomial(self):
        model = PolyModel(degree=1, coefficients=np.array([0.0, 1.0]),
                          residual_sum_squares=0.0)
        xs = np.linspace(-5.0, 5.0, 11)
        assert np.array_equal(predict_poly(model, xs), xs)
