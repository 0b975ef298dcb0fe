import math

import numpy as np
import pytest

from pemc_casimir import pfa
from pemc_casimir.constants import ZETA3
from pemc_casimir.errors import DomainError


class TestMatsubaraCoefficients:
    def test_zeta3_values(self):
        assert pfa.pfa_f_n(0, 1.0, 0.0, 0.0) == pytest.approx(-ZETA3 / 2.0, rel=1e-14)
        assert pfa.pfa_f_n(0, 1.0, 0.0, math.pi / 2) == pytest.approx(
            0.375 * ZETA3, rel=1e-13
        )

    def test_series_oracle(self):
        n, delta, tau, x = 2, math.pi / 3, 0.7, 0.01
        k = np.arange(1, 400, dtype=float)
        z = np.exp((2j * delta - 2 * n * tau) * k)
        oracle = -np.sum(z.real / k**3) / (2 * x)
        assert pfa.pfa_f_n(n, x, tau, delta) == pytest.approx(oracle, rel=1e-12)


class TestEnergyT0:
    def test_endpoints(self):
        assert pfa.pfa_energy_T0(1.0, 0.0) == pytest.approx(-math.pi**3 / 720.0)
        assert pfa.pfa_energy_T0(1.0, math.pi / 2) == pytest.approx(
            (7.0 / 8.0) * math.pi**3 / 720.0
        )

    def test_bracket_zero(self):
        # energy zero where delta(pi - delta) = pi^2/sqrt(30)
        delta = (1.0 - math.sqrt(1.0 - 4.0 / math.sqrt(30.0))) * math.pi / 2.0
        assert pfa.pfa_energy_T0(1.0, delta) == pytest.approx(0.0, abs=1e-12)

    def test_monotone_in_delta(self):
        deltas = np.linspace(0, math.pi / 2, 40)
        vals = [pfa.pfa_energy_T0(1.0, d) for d in deltas]
        assert np.all(np.diff(vals) > 0)


class TestFreeEnergy:
    def test_high_temperature_limit(self):
        for delta in (0.0, 0.4, math.pi / 2):
            _, fkbt = pfa.pfa_free_energy(1.0, 30.0, delta)
            assert fkbt == pytest.approx(pfa.pfa_high_T(1.0, delta), rel=1e-12)

    def test_high_t_endpoints(self):
        assert pfa.pfa_high_T(1.0, 0.0) == pytest.approx(-ZETA3 / 4.0, rel=1e-14)
        assert pfa.pfa_high_T(1.0, math.pi / 2) == pytest.approx(3.0 * ZETA3 / 16.0, rel=1e-13)

    def test_exponential_approach_to_high_t(self):
        # remainder decays like e^{-2 tau}
        taus = np.array([4.0, 5.0, 6.0])
        rems = [
            abs(pfa.pfa_free_energy(1.0, t, 0.3)[1] - pfa.pfa_high_T(1.0, 0.3))
            for t in taus
        ]
        rate = np.diff(np.log(rems)) / np.diff(taus)
        assert np.allclose(rate, -2.0, atol=0.1)

    def test_low_t_correction_positive_at_critical_angle(self):
        d = pfa.DELTA_CRIT_T0
        fe, _ = pfa.pfa_free_energy(1.0, 0.2, d)
        assert fe - pfa.pfa_energy_T0(1.0, d) > 0.0


class TestLowTCorrection:
    def test_matches_matsubara_sum(self):
        # Fig.-2 convergence for several delta
        for delta in (math.pi / 5, 3 * math.pi / 10, 2 * math.pi / 5, math.pi / 2):
            for tau in (0.05, 0.1, 0.2):
                fe, _ = pfa.pfa_free_energy(1.0, tau, delta)
                exact = fe - pfa.pfa_energy_T0(1.0, delta)
                approx = pfa.pfa_low_T_correction(1.0, tau, delta)
                assert approx == pytest.approx(exact, rel=5e-2)

    def test_tau2_coefficient_root(self):
        # 5(pi^2 - 6 d(pi-d)) vanishes at d(pi-d) = pi^2/6
        d = (1.0 - math.sqrt(1.0 - 2.0 / 3.0)) * math.pi / 2.0
        tau = 0.1
        val = pfa.pfa_low_T_correction(1.0, tau, d)
        assert val == pytest.approx(-(tau**4) / (720.0 * math.pi), rel=1e-10)

    def test_pi_half_coefficient(self):
        # 5(pi^2 - 6 (pi/2)^2) = -5 pi^2/2, the known parallel-plate-type value
        tau = 0.1
        val = pfa.pfa_low_T_correction(1.0, tau, math.pi / 2)
        expected = -(-2.5 * math.pi**2 * tau**2 + tau**4) / (720.0 * math.pi)
        assert val == pytest.approx(expected, rel=1e-12)

    def test_warns(self):
        with pytest.warns(UserWarning):
            pfa.pfa_low_T_correction(1.0, 0.8, 0.4)
        with pytest.warns(UserWarning):
            pfa.pfa_low_T_correction(1.0, 0.1, 0.0)


class TestCriticalAngle:
    def test_t0_closed_form(self):
        expected = (1.0 - math.sqrt(1.0 - 2.0 * math.sqrt(2.0 / 15.0))) * math.pi / 2.0
        assert pfa.pfa_critical_angle(0.0) == pytest.approx(expected, abs=1e-14)
        assert pfa.pfa_critical_angle(0.0) / (math.pi / 4) == pytest.approx(0.9613, abs=1e-4)

    def test_high_t(self):
        assert pfa.pfa_critical_angle(1e9) / (math.pi / 4) == pytest.approx(0.9233, abs=1e-4)

    def test_monotone_decreasing(self):
        taus = np.geomspace(0.05, 10.0, 12)
        vals = [pfa.pfa_critical_angle(float(t)) for t in taus]
        assert np.all(np.diff(vals) < 1e-12)
        assert vals[0] <= pfa.DELTA_CRIT_T0 + 1e-9

    def test_transition_temperature_scale(self):
        # the attraction->repulsion switch happens around k_B T ~ 0.2 hbar c/L
        mid = 0.5 * (pfa.DELTA_CRIT_T0 + pfa.pfa_critical_angle(1e9))
        from scipy.optimize import brentq

        tau_star = brentq(lambda t: pfa.pfa_critical_angle(t) - mid, 0.1, 10.0)
        kbt_over_hbarc = tau_star / (2.0 * math.pi)
        assert 0.1 < kbt_over_hbarc < 0.4


class TestGeometricCorrection:
    def test_substitution(self):
        val = pfa.pfa_geometric_correction(1e-3, 0.0, 0.0)
        assert val == pytest.approx(
            (20.0 * math.pi**2 - math.pi**4 / 3.0) / (720.0 * math.pi), rel=1e-14
        )

    def test_u_coefficient_range(self):
        for u in (0.0, 0.1, 0.25):
            coeff = (1.0 - 3.0 * u) / 3.0
            assert 1.0 / 12.0 <= coeff <= 1.0 / 3.0

    def test_symmetry_bracket(self):
        # both brackets depend on delta through delta(pi - delta)
        for d in (0.3, 0.9):
            mirror = math.pi - d
            assert d * (math.pi - d) == pytest.approx(mirror * (math.pi - mirror))
