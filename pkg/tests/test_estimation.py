import math

import numpy as np
import pytest

from sphera import models as M
from sphera.estimation import (CoefficientEstimate, estimate_c, estimate_coeffs,
                               estimate_mean, pair_covariance)
from sphera.expansion import HarmonicCoefficients, to_real
from sphera.geometry import NORTH, UnitVector
from sphera.sampling import SampleSet, sample_uniform, sample_vmf, sample_watson

FOUR_PI = 4.0 * math.pi
Y00 = 1.0 / math.sqrt(FOUR_PI)


def _single_point_sample(theta, phi):
    return SampleSet(np.array([theta]), np.array([phi]))


class TestEstimateCoeffs:
    def test_single_north_pole_point(self):
        s = _single_point_sample(0.0, 0.0)
        est = estimate_coeffs(s, 4)
        for l in range(5):
            want = math.sqrt((2 * l + 1) / FOUR_PI)
            assert est.coeffs.get(l, 0).real == pytest.approx(want, abs=1e-14)
            for m in range(1, l + 1):
                assert abs(est.coeffs.get(l, m)) < 1e-14

    def test_constant_entry_exact(self):
        s = sample_uniform(137, seed=0)
        est = estimate_coeffs(s, 3)
        assert est.coeffs.get(0, 0) == Y00

    def test_watson_table_estimate(self):
        s = sample_watson(4096, NORTH, 2.0, seed=1)
        est = estimate_coeffs(s, 2)
        c2_hat = math.sqrt(FOUR_PI / 5.0) * est.coeffs.get(2, 0).real
        assert abs(c2_hat - 0.2969) < 3 * 0.4757 / math.sqrt(4096)

    def test_unbiasedness_monte_carlo(self):
        # E a-hat = a: the mean over replicates converges at the 1/sqrt(reps n) scale
        model = M.VonMisesFisher(UnitVector(1.0, 0.5), 1.5)
        ana = M.coefficients(model, 3)
        acc = np.zeros(0, dtype=complex)
        reps = 50
        for r in range(reps):
            s = sample_vmf(2000, UnitVector(1.0, 0.5), 1.5, seed=100 + r)
            est = estimate_coeffs(s, 3)
            vals = np.array([est.coeffs.get(l, m) for l in range(4) for m in range(0, l + 1)])
            acc = vals if acc.size == 0 else acc + vals
        mean = acc / reps
        want = np.array([ana.get(l, m) for l in range(4) for m in range(0, l + 1)])
        assert np.max(np.abs(mean - want)) < 4.0 / math.sqrt(reps * 2000)


class TestEstimateC:
    def test_point_mass_at_pole(self):
        s = SampleSet(np.zeros(7), np.linspace(0, 5, 7))
        ce = estimate_c(s, 5)
        assert np.allclose(ce.values, 1.0, atol=1e-14)

    def test_uniform_null(self):
        s = sample_uniform(10**4, seed=2)
        ce = estimate_c(s, 6)
        assert np.max(np.abs(ce.values[1:])) < 4.0 / math.sqrt(s.n)

    def test_watson_values_and_errors(self):
        s = sample_watson(4096, NORTH, 2.0, seed=3)
        ce = estimate_c(s, 4)
        # population std of P_l(X_3), from the variance identity with exact c
        want_std = {1: 0.7289, 2: 0.4757, 3: 0.4652, 4: 0.4024}
        for l, sd in want_std.items():
            assert ce.std_errors[l] * math.sqrt(s.n) == pytest.approx(sd, abs=0.02)
            true_c = {1: 0.0, 2: 0.296897, 3: 0.0, 4: 0.057579}[l]
            assert abs(ce.values[l] - true_c) < 3.5 * sd / math.sqrt(s.n)

    def test_variance_identity_against_monte_carlo(self):
        reps, n = 400, 1000
        vals = []
        for r in range(reps):
            s = sample_watson(n, NORTH, 2.0, seed=500 + r)
            vals.append(estimate_c(s, 2).values[2])
        mc_var = np.var(vals) * n
        # identity value: 1/5 + 2/7 c2 + 18/35 c4 - c2^2
        c2, c4 = 0.2968968365297993, 0.05757851864514719
        ident = 0.2 + 2.0 / 7.0 * c2 + 18.0 / 35.0 * c4 - c2 * c2
        assert mc_var == pytest.approx(ident, rel=0.15)


class TestEstimateMean:
    def test_antipodal_pair(self):
        s = SampleSet(np.array([0.3, math.pi - 0.3]), np.array([1.0, 1.0 + math.pi]))
        md = estimate_mean(s)
        assert md.resultant < 1e-12 and md.mean_undefined

    def test_single_point(self):
        x = UnitVector(1.2, 0.7)
        md = estimate_mean(_single_point_sample(1.2, 0.7))
        assert np.max(np.abs(md.mean - x.xyz)) < 1e-15

    def test_vmf_mean(self, fine_rule):
        n = 10**5
        model = M.VonMisesFisher(NORTH, 2.0)
        dens = M.density_batch(model, fine_rule.theta, fine_rule.phi)
        ez = fine_rule.integrate(dens * fine_rule.ct)
        ez2 = fine_rule.integrate(dens * fine_rule.ct ** 2)
        sigma = math.sqrt((ez2 - ez * ez) / n)
        s = sample_vmf(n, NORTH, 2.0, seed=4)
        assert abs(estimate_mean(s).mean[2] - ez) < 3 * sigma

    def test_equals_degree_one_route(self):
        s = sample_vmf(5000, UnitVector(0.8, 2.5), 3.0, seed=5)
        md = estimate_mean(s)
        est = estimate_coeffs(s, 1)
        r = to_real(est.coeffs)
        scale = math.sqrt(FOUR_PI / 3.0)
        # real layout l(l+1)+m: a_{1,1} at 3, a_{1,-1} at 1, a_{1,0} at 2
        route = scale * np.array([r.data[3], r.data[1], r.data[2]])
        assert np.max(np.abs(md.mean - route)) < 1e-14


class TestPairCovariance:
    def _uniform_estimate(self, max_degree=4):
        data = np.zeros((max_degree + 1) * (max_degree + 2) // 2, dtype=complex)
        data[0] = Y00
        return CoefficientEstimate(HarmonicCoefficients(max_degree, "complex", data), 1000)

    def test_null_uniform(self):
        est = self._uniform_estimate()
        assert pair_covariance(est, 2, 1, 2, 1, "null-uniform") == pytest.approx(1 / FOUR_PI)
        assert pair_covariance(est, 2, 1, 3, 1, "null-uniform") == 0.0
        assert pair_covariance(est, 2, 1, 2, -1, "null-uniform") == 0.0

    def test_null_rotational_uniform_reduction(self):
        # with c_k = delta_{k0} the rotational covariance is the uniform one
        est = self._uniform_estimate(6)
        assert pair_covariance(est, 2, 1, 2, 1, "null-rotational") == \
            pytest.approx(1.0 / FOUR_PI, abs=1e-15)
        assert abs(pair_covariance(est, 2, 1, 3, 1, "null-rotational")) < 1e-15

    def test_plugin_matches_sample_moments(self):
        s = sample_watson(50000, NORTH, 2.0, seed=6)
        est = estimate_coeffs(s, 6)
        from sphera import special as S
        y21 = S.sph_harm(2, 1, s.theta, s.phi)
        direct = np.mean(np.abs(y21) ** 2) - abs(est.coeffs.get(2, 1)) ** 2
        got = pair_covariance(est, 2, 1, 2, 1, "plugin").real
        assert got == pytest.approx(direct, abs=0.02)

    def test_insufficient_degree_raises(self):
        est = self._uniform_estimate(2)
        with pytest.raises(ValueError):
            pair_covariance(est, 2, 0, 2, 0, "null-rotational")
        with pytest.raises(ValueError):
            pair_covariance(est, 3, 0, 3, 0, "plugin")


class TestAsymptotics:
    def test_convergence_rate(self):
        model = M.VonMisesFisher(UnitVector(1.0, 0.5), 2.0)
        ana = M.coefficients(model, 4)
        want = np.array([ana.get(l, m) for l in range(5) for m in range(0, l + 1)])
        errs = []
        for n in (10**3, 10**4, 10**5):
            per_seed = []
            for r in range(8):
                s = sample_vmf(n, UnitVector(1.0, 0.5), 2.0, seed=1000 + r)
                est = estimate_coeffs(s, 4)
                got = np.array([est.coeffs.get(l, m)
                                for l in range(5) for m in range(0, l + 1)])
                per_seed.append(np.max(np.abs(got - want)))
            err = float(np.mean(per_seed))
            assert err < 4.0 / math.sqrt(n)
            errs.append(err)
        slope = np.polyfit(np.log([1e3, 1e4, 1e5]), np.log(errs), 1)[0]
        assert slope == pytest.approx(-0.5, abs=0.1)

    def test_asymptotic_normality(self):
        # standardized Re/Im of a_2^1-hat over replicates look Gaussian
        n, reps = 2000, 2000
        re, im = [], []
        for r in range(reps):
            s = sample_vmf(n, UnitVector(1.0, 0.5), 1.0, seed=3000 + r)
            a = estimate_coeffs(s, 2).coeffs.get(2, 1)
            re.append(a.real)
            im.append(a.imag)

        def skew_kurt(x):
            x = np.asarray(x)
            z = (x - x.mean()) / x.std()
            return abs(np.mean(z ** 3)), abs(np.mean(z ** 4) - 3.0)

        for vals in (re, im):
            sk, ku = skew_kurt(vals)
            assert sk < 0.15
            assert ku < 0.3
