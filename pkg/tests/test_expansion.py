import math

import numpy as np
import pytest

from conftest import max_coeff_diff
from sphera import models as M
from sphera import special as S
from sphera.coupling import clebsch_gordan
from sphera.expansion import (HarmonicCoefficients, evaluate, evaluate_grid, inertia,
                              mean_direction, project, rotate, square_expand,
                              symmetry_pattern, to_complex, to_real)
from sphera.geometry import NORTH, UnitVector, euler_matrix
from sphera.quadrature import gauss_legendre, sphere_rule

FOUR_PI = 4.0 * math.pi
Y00 = 1.0 / math.sqrt(FOUR_PI)


def random_density_coeffs(max_degree, rng, scale=0.05):
    """Conjugate-symmetric coefficients of a strictly positive band-limited density."""
    ents = {(0, 0): Y00}
    for l in range(1, max_degree + 1):
        ents[(l, 0)] = complex(rng.normal(0, scale / l))
        for m in range(1, l + 1):
            ents[(l, m)] = complex(rng.normal(0, scale / l), rng.normal(0, scale / l))
    return HarmonicCoefficients.from_entries(max_degree, ents)


class TestStorage:
    def test_conjugate_symmetry_structural(self):
        rng = np.random.default_rng(0)
        c = random_density_coeffs(4, rng)
        for l in range(5):
            for m in range(1, l + 1):
                assert c.get(l, -m) == (-1.0) ** m * np.conj(c.get(l, m))

    def test_violation_rejected(self):
        good = {(0, 0): Y00, (1, 1): 0.1 + 0.2j, (1, -1): -0.1 + 0.2j}
        HarmonicCoefficients.from_entries(1, good)
        bad = {(0, 0): Y00, (1, 1): 0.1 + 0.2j, (1, -1): 0.1 + 0.2j}
        with pytest.raises(ValueError):
            HarmonicCoefficients.from_entries(1, bad)
        with pytest.raises(ValueError):
            HarmonicCoefficients.from_entries(1, {(1, 0): 0.1j})

    def test_json_round_trip(self):
        rng = np.random.default_rng(1)
        c = random_density_coeffs(3, rng)
        back = HarmonicCoefficients.from_json_dict(c.to_json_dict())
        assert max_coeff_diff(c, back) < 1e-15
        r = to_real(c)
        back_r = HarmonicCoefficients.from_json_dict(r.to_json_dict())
        assert np.allclose(r.data, back_r.data, atol=1e-15)


class TestEvaluate:
    def test_uniform(self):
        c = HarmonicCoefficients.from_entries(2, {(0, 0): Y00})
        assert evaluate(c, UnitVector(0.3, 4.0)) == pytest.approx(1.0 / FOUR_PI, abs=1e-15)

    def test_zero(self):
        c = HarmonicCoefficients.zeros(3)
        assert evaluate(c, UnitVector(1.0, 1.0)) == 0.0

    def test_vmf_closed_form_at_mode(self):
        mu = UnitVector(0.9, 0.4)
        model = M.VonMisesFisher(mu, 5.0)
        c = M.coefficients(model, 40)
        want = M.density(model, mu)
        assert evaluate(c, mu) == pytest.approx(want, abs=1e-8)

    def test_real_basis_evaluation_matches(self):
        rng = np.random.default_rng(2)
        c = random_density_coeffs(5, rng)
        r = to_real(c)
        x = UnitVector(1.2, 5.1)
        assert evaluate(r, x) == pytest.approx(evaluate(c, x), abs=1e-13)

    def test_nonnegative_on_grid(self):
        # band-limited true density stays >= -1e-8 wherever sampled
        c = M.coefficients(M.HarmonicSquare(3, 2), 6)
        rng = np.random.default_rng(3)
        th = np.arccos(rng.uniform(-1, 1, 10**4))
        ph = rng.uniform(0, 2 * math.pi, 10**4)
        assert evaluate_grid(c, th, ph).min() > -1e-8


class TestProject:
    def test_uniform(self):
        c = project(lambda th, ph: np.full_like(th, 1.0 / FOUR_PI), 4)
        assert c.get(0, 0).real == pytest.approx(Y00, abs=1e-14)
        for l in range(1, 5):
            for m in range(0, l + 1):
                assert abs(c.get(l, m)) < 1e-14

    def test_harmonic_square_closed_form(self):
        # |Y_2^1|^2 projects onto the Clebsch-Gordan zonal series
        got = project(lambda th, ph: np.abs(S.sph_harm(2, 1, th, ph)) ** 2, 4)
        for h in range(0, 3):
            want = ((-1.0) * 5.0 / math.sqrt(FOUR_PI) / math.sqrt(4 * h + 1)
                    * clebsch_gordan(2, 0, 2, 0, 2 * h, 0)
                    * clebsch_gordan(2, 1, 2, -1, 2 * h, 0))
            assert got.get(2 * h, 0).real == pytest.approx(want, abs=1e-12)
        assert abs(got.get(1, 0)) < 1e-13
        assert abs(got.get(3, 2)) < 1e-13

    def test_watson_table_value(self):
        model = M.Watson(NORTH, 2.0)
        rule = sphere_rule(64, 128)
        c = project(lambda th, ph: M.density_batch(model, th, ph), 4, rule=rule)
        c2 = math.sqrt(FOUR_PI / 5.0) * c.get(2, 0).real
        assert c2 == pytest.approx(0.2969, abs=5e-4)

    def test_unnormalized_warns(self):
        with pytest.warns(UserWarning, match="not a normalized density"):
            project(lambda th, ph: np.full_like(th, 1.0), 2)

    def test_project_evaluate_identity(self):
        rng = np.random.default_rng(4)
        for L in (3, 10, 20):
            c = random_density_coeffs(L, rng)
            back = project(lambda th, ph: evaluate_grid(c, th, ph), L)
            assert max_coeff_diff(c, back) < 1e-10


class TestBasisConversion:
    def test_round_trip(self):
        rng = np.random.default_rng(5)
        c = random_density_coeffs(6, rng)
        back = to_complex(to_real(c))
        assert max_coeff_diff(c, back) < 1e-14

    def test_m0_unchanged(self):
        rng = np.random.default_rng(6)
        c = random_density_coeffs(4, rng)
        r = to_real(c)
        for l in range(5):
            assert r.data[l * (l + 1)] == pytest.approx(c.get(l, 0).real, abs=1e-16)

    def test_equatorial_vmf_mean_components(self, fine_rule):
        # real a_{1,+-1} must reproduce the directly integrated mean components
        mu = UnitVector(math.pi / 2, 0.7)
        model = M.VonMisesFisher(mu, 1.5)
        c = M.coefficients(model, 2)
        r = to_real(c)
        dens = M.density_batch(model, fine_rule.theta, fine_rule.phi)
        mu1 = fine_rule.integrate(dens * fine_rule.st * fine_rule.cp)
        mu2 = fine_rule.integrate(dens * fine_rule.st * fine_rule.sp)
        scale = math.sqrt(FOUR_PI / 3.0)
        assert scale * r.data[1 * 2 + 1] == pytest.approx(mu1, abs=1e-10)
        assert scale * r.data[1 * 2 - 1] == pytest.approx(mu2, abs=1e-10)

    def test_zero_maps_to_zero(self):
        z = HarmonicCoefficients.zeros(3)
        assert np.all(to_real(z).data == 0.0)


class TestRotate:
    def test_identity(self):
        rng = np.random.default_rng(7)
        c = random_density_coeffs(5, rng)
        r = rotate(c, (0.0, 0.0, 0.0))
        assert max_coeff_diff(c, r) < 1e-14

    def test_uniform_invariant(self):
        c = HarmonicCoefficients.from_entries(3, {(0, 0): Y00})
        r = rotate(c, (0.4, 1.1, -2.0))
        assert max_coeff_diff(c, r) < 1e-15

    def test_vmf_pole_to_x_axis(self):
        cn = M.coefficients(M.VonMisesFisher(NORTH, 2.0), 8)
        cx = M.coefficients(M.VonMisesFisher(UnitVector(math.pi / 2, 0.0), 2.0), 8)
        assert max_coeff_diff(rotate(cn, (0.0, math.pi / 2, 0.0)), cx) < 1e-10

    def test_power_preserved(self):
        rng = np.random.default_rng(8)
        c = random_density_coeffs(6, rng)
        for _ in range(5):
            euler = tuple(rng.uniform(-math.pi, math.pi, 3))
            r = rotate(c, euler)
            for l in range(7):
                assert r.degree_power(l) == pytest.approx(c.degree_power(l), abs=1e-12)

    def test_mean_rotates_with_matrix(self):
        rng = np.random.default_rng(9)
        c = M.coefficients(M.VonMisesFisher(UnitVector(1.0, 2.0), 1.3), 4)
        for _ in range(5):
            euler = tuple(rng.uniform(-math.pi, math.pi, 3))
            got = mean_direction(rotate(c, euler)).mean
            want = euler_matrix(euler) @ mean_direction(c).mean
            assert np.max(np.abs(got - want)) < 1e-10

    def test_brute_force_projection(self):
        rng = np.random.default_rng(10)
        c = random_density_coeffs(4, rng)
        euler = (0.7, 1.1, -0.4)
        r = euler_matrix(euler)
        rule = sphere_rule(24, 48)

        def rotated_density(th, ph):
            pts = np.column_stack((np.sin(th) * np.cos(ph),
                                   np.sin(th) * np.sin(ph), np.cos(th)))
            back = pts @ r  # R^{-1} applied to each point
            tb = np.arccos(np.clip(back[:, 2], -1, 1))
            pb = np.arctan2(back[:, 1], back[:, 0])
            return evaluate_grid(c, tb, pb)

        got = rotate(c, euler)
        want = project(rotated_density, 4, rule=rule, check_normalization=False)
        assert max_coeff_diff(got, want) < 1e-12


class TestSquareExpand:
    def test_constant(self):
        b = 1.7 + 0.0j
        out = square_expand({(0, 0): b})
        assert out.get(0, 0).real == pytest.approx(abs(b) ** 2 * Y00, abs=1e-14)

    @pytest.mark.parametrize("l,m", [(1, 0), (2, 1), (3, 3), (4, -2)])
    def test_single_complex_harmonic(self, l, m):
        out = square_expand({(l, m): 1.0})
        want = M.coefficients(M.HarmonicSquare(l, m), 2 * l)
        assert max_coeff_diff(out, want) < 1e-13

    def test_single_real_harmonic_both_terms(self):
        l, mm = 3, 2
        b = {(l, mm): (-1.0) ** mm / math.sqrt(2), (l, -mm): 1.0 / math.sqrt(2)}
        out = square_expand(b)
        # the zonal and the order-2m terms are both present
        # (the (2,0) one vanishes for (3,2) because C^{2,0}_{3,2;3,-2} = 0)
        assert abs(out.get(4, 0)) > 1e-3
        assert abs(out.get(4, 4)) + abs(out.get(6, 4)) > 1e-3
        got = project(lambda th, ph: S.real_sph_harm(l, mm, th, ph) ** 2, 6,
                      rule=sphere_rule(32, 64))
        assert max_coeff_diff(out, got) < 1e-12

    def test_truncation_flag(self):
        full = square_expand({(2, 1): 1.0})
        assert full.max_degree == 4 and not full.truncated
        cut = square_expand({(2, 1): 1.0}, max_degree=2)
        assert cut.max_degree == 2 and cut.truncated


class TestMoments:
    def test_watson_mean_zero(self):
        c = M.coefficients(M.Watson(UnitVector(0.7, 0.3), -3.0), 4)
        md = mean_direction(c)
        assert md.resultant < 1e-12 and md.mean_undefined

    def test_brownian_resultant(self):
        for zeta in (0.5, 1.0, 2.0):
            c = M.coefficients(M.BrownianMotion(UnitVector(1.0, 1.0), zeta), 2)
            assert mean_direction(c).resultant == pytest.approx(
                math.exp(-1.0 / (2.0 * zeta)), abs=1e-12)

    def test_vmf_mean_against_quadrature(self, fine_rule):
        mu = UnitVector(0.6, 5.0)
        model = M.VonMisesFisher(mu, 2.0)
        c = M.coefficients(model, 2)
        dens = M.density_batch(model, fine_rule.theta, fine_rule.phi)
        xyz = np.column_stack((fine_rule.st * fine_rule.cp,
                               fine_rule.st * fine_rule.sp, fine_rule.ct))
        want = xyz.T @ (fine_rule.weights * dens)
        assert np.max(np.abs(mean_direction(c).mean - want)) < 1e-10

    def test_uniform_inertia(self):
        c = HarmonicCoefficients.from_entries(2, {(0, 0): Y00})
        isum = inertia(c)
        assert np.max(np.abs(isum.inertia - np.eye(3) / 3.0)) < 1e-15

    def test_harmonic_square_inertia(self):
        c = M.coefficients(M.HarmonicSquare(3, 2, real=True), 6)
        isum = inertia(c)
        assert np.max(np.abs(isum.covariance - np.eye(3) / 3.0)) < 1e-10
        assert np.trace(isum.inertia) == pytest.approx(1.0, abs=1e-10)

    def test_rotationally_symmetric_inertia(self):
        model = M.Watson(NORTH, 2.0)
        c = M.coefficients(model, 2)
        c2 = math.sqrt(FOUR_PI / 5.0) * c.get(2, 0).real
        isum = inertia(c)
        want = np.diag([1 / 3 - c2 / 3, 1 / 3 - c2 / 3, 1 / 3 + 2 * c2 / 3])
        assert np.max(np.abs(isum.inertia - want)) < 1e-12


class TestSymmetryPattern:
    def test_watson(self):
        c = M.coefficients(M.Watson(NORTH, 2.0), 6)
        assert symmetry_pattern(c, "rotational")[0]
        assert symmetry_pattern(c, "axial")[0]
        assert symmetry_pattern(c, "equatorial")[0]

    def test_harmonic_square_axial(self):
        c = M.coefficients(M.HarmonicSquare(3, 1), 6)
        assert symmetry_pattern(c, "axial")[0]

    def test_vmf_not_axial(self):
        c = M.coefficients(M.VonMisesFisher(NORTH, 1.0), 6)
        holds, worst = symmetry_pattern(c, "axial")
        assert not holds
        want_c1 = S.bessel_ratio(1, 1.0)
        assert worst == pytest.approx(want_c1 * math.sqrt(3.0 / FOUR_PI), rel=1e-10)

    def test_meridial_pattern(self):
        phi0 = 1.1
        ents = {(0, 0): Y00}
        rng = np.random.default_rng(11)
        for l in range(1, 4):
            for m in range(1, l + 1):
                rho = rng.uniform(0, 0.05)
                ents[(l, m)] = rho * np.exp(-1j * m * (phi0 + math.pi))
        c = HarmonicCoefficients.from_entries(3, ents)
        assert symmetry_pattern(c, "meridial", phi0=phi0)[0]
        assert not symmetry_pattern(c, "meridial", phi0=phi0 + 0.8)[0]

    def test_uniform_pattern(self):
        c = HarmonicCoefficients.from_entries(3, {(0, 0): Y00})
        assert symmetry_pattern(c, "uniform")[0]
        c2 = M.coefficients(M.VonMisesFisher(NORTH, 0.5), 3)
        assert not symmetry_pattern(c2, "uniform")[0]


class TestFunkHecke:
    def test_projection_factorizes(self):
        # for f(x) = g(x0 . x): a_l^m = c_l Y_l^m*(x0) with c_l a 1-D integral
        x0 = UnitVector(1.3, 0.9)
        kappa = 1.7
        model = M.VonMisesFisher(x0, kappa)
        proj = project(lambda th, ph: M.density_batch(model, th, ph), 6,
                       rule=sphere_rule(48, 96))
        rule = gauss_legendre(200)
        g, _ = M._radial_profile(model)
        for l in range(7):
            cl = 2.0 * math.pi * float(np.dot(rule.weights,
                                              g(rule.nodes) * S.legendre_p(l, rule.nodes)))
            for m in range(-l, l + 1):
                want = cl * np.conj(S.sph_harm(l, m, x0.theta, x0.phi))
                assert abs(proj.get(l, m) - want) < 1e-10
