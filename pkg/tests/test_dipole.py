import math

import numpy as np
import pytest

from pemc_casimir import dipole
from pemc_casimir.errors import DomainError


class TestThermalFunctions:
    def test_zero_temperature_values(self):
        tf = dipole.thermal_functions(0.0)
        assert tf.f_pp == pytest.approx(115.0 / 8.0, rel=1e-14)
        assert tf.f_pp_bar == pytest.approx(3.5, rel=1e-14)
        assert tf.g_pp == pytest.approx(15.0 / 16.0, rel=1e-14)
        assert tf.g_pp_bar == pytest.approx(3.0 / 16.0, rel=1e-14)

    def test_dipole_energy_consistency(self):
        # cos^2 d (f_pp + f_ppbar) - sin^2 d (4/5 f_pp + 5/4 f_ppbar)
        # reproduces [8 + 135 cos(2d)]/8 at tau~ = 0
        tf = dipole.thermal_functions(0.0)
        for d in (0.0, 0.4, 1.2):
            br = math.cos(d) ** 2 * (tf.f_pp + tf.f_pp_bar) - math.sin(d) ** 2 * (
                0.8 * tf.f_pp + 1.25 * tf.f_pp_bar
            )
            assert br == pytest.approx((8.0 + 135.0 * math.cos(2 * d)) / 8.0, rel=1e-13)

    def test_high_temperature_asymptotes(self):
        tt = 200.0
        tf = dipole.thermal_functions(tt)
        assert tf.f_pp / tt == pytest.approx(15.0 / 4.0, rel=1e-12)
        assert tf.g_pp / tt == pytest.approx(3.0 / 8.0, rel=1e-12)
        assert tf.f_pp_bar < 1e-12 and tf.g_pp_bar < 1e-12

    def test_extended_precision_oracle(self):
        import mpmath as mp

        with mp.workdps(40):
            t = mp.mpf(1)
            g = t / mp.sinh(t)
            ch = mp.cosh(t)
            f_pp = mp.mpf(5) / 8 * (
                6 * g * ch + 6 * g**2 + 5 * g**3 * ch + g**4 * (1 + 2 * ch**2)
                + g**5 * ch * (2 + ch**2)
            )
            f_pb = mp.mpf(1) / 2 * (
                g**3 * ch + g**4 * (1 + 2 * ch**2) + g**5 * ch * (2 + ch**2)
            )
            g_pp = mp.mpf(3) / 16 * (2 * g * ch + 2 * g**2 + g**3 * ch)
            g_pb = mp.mpf(3) / 16 * g**3 * ch
        tf = dipole.thermal_functions(1.0)
        assert tf.f_pp == pytest.approx(float(f_pp), rel=1e-13)
        assert tf.f_pp_bar == pytest.approx(float(f_pb), rel=1e-13)
        assert tf.g_pp == pytest.approx(float(g_pp), rel=1e-13)
        assert tf.g_pp_bar == pytest.approx(float(g_pb), rel=1e-13)

    def test_nonnegative(self):
        for tt in np.geomspace(1e-3, 100, 40):
            tf = dipole.thermal_functions(float(tt))
            assert min(tf.f_pp, tf.f_pp_bar, tf.g_pp, tf.g_pp_bar) >= 0.0

    def test_derivatives_vs_finite_differences(self):
        h = 1e-5
        for tt in (0.3, 1.0, 5.0, 40.0):
            d = dipole.thermal_functions_derivative(tt)
            up = dipole.thermal_functions(tt + h)
            dn = dipole.thermal_functions(tt - h)
            for name in ("f_pp", "f_pp_bar", "g_pp", "g_pp_bar"):
                fd = (getattr(up, name) - getattr(dn, name)) / (2 * h)
                assert getattr(d, name) == pytest.approx(fd, rel=2e-4, abs=1e-12)


class TestDipoleDipole:
    def test_zero_temperature_energy(self):
        r1 = r2 = 0.01
        el = 1.0
        for d in (0.0, 0.5, math.pi / 2):
            got = dipole.dipole_dipole_free_energy(r1, r2, el, 0.0, d)
            ref = -((r1 * r2 / el**2) ** 3) / (16.0 * math.pi) * (
                8.0 + 135.0 * math.cos(2 * d)
            )
            assert got == pytest.approx(ref, rel=1e-13)

    def test_boyer_repulsion_magnitude(self):
        got = dipole.dipole_dipole_free_energy(0.01, 0.01, 1.0, 0.0, math.pi / 2)
        assert got == pytest.approx(127.0 / (16.0 * math.pi) * (1e-4) ** 3, rel=1e-12)

    def test_high_temperature_limit(self):
        r1, r2, el, tt = 0.01, 0.02, 1.0, 300.0
        got = dipole.dipole_dipole_free_energy(r1, r2, el, tt, 0.3)
        # F/k_B T = got * 2 pi/tau~ -> -(3/8)(...)^3 [1 + 9 cos 2d]
        ref = -(3.0 / 8.0) * ((r1 * r2 / el**2) ** 3) * (1.0 + 9.0 * math.cos(0.6))
        assert got * 2.0 * math.pi / tt == pytest.approx(ref, rel=1e-10)

    def test_critical_angles(self):
        assert dipole.dipole_dipole_critical_angle(0.0) == pytest.approx(
            0.5 * math.acos(-8.0 / 135.0), abs=1e-10
        )
        assert dipole.dipole_dipole_critical_angle(1e9) == pytest.approx(
            0.5 * math.acos(-1.0 / 9.0), abs=1e-8
        )
        assert dipole.dipole_dipole_critical_angle(0.0) / (math.pi / 4) == pytest.approx(
            1.0377, abs=2e-4
        )
        assert dipole.dipole_dipole_critical_angle(1e9) / (math.pi / 4) == pytest.approx(
            1.0709, abs=2e-4
        )

    def test_critical_angle_monotone_increasing(self):
        tts = np.geomspace(0.05, 100.0, 20)
        vals = [dipole.dipole_dipole_critical_angle(float(t)) for t in tts]
        assert np.all(np.diff(vals) > -1e-12)
        assert vals[-1] > vals[0]

    def test_transition_temperature_scale(self):
        # switch occurs around k_B T ~ 0.8 hbar c / script_l
        from scipy.optimize import brentq

        lo = dipole.dipole_dipole_critical_angle(0.0)
        hi = dipole.dipole_dipole_critical_angle(1e9)
        mid = 0.5 * (lo + hi)
        tt_star = brentq(
            lambda t: dipole.dipole_dipole_critical_angle(t) - mid, 0.5, 20.0
        )
        kbt = tt_star / (2.0 * math.pi)
        assert 0.4 < kbt < 1.6

    def test_force_zero_at_critical_angle(self):
        tt = 2.0
        dc = dipole.dipole_dipole_critical_angle(tt)
        f = dipole.dipole_dipole_force(0.01, 0.01, 1.0, tt, dc)
        scale = abs(dipole.dipole_dipole_force(0.01, 0.01, 1.0, tt, 0.0))
        assert abs(f) < 1e-10 * scale

    def test_single_sign_change(self):
        # the force flips sign exactly once in delta at every temperature
        for tt in (0.0, 1.0, 10.0):
            deltas = np.linspace(0.0, math.pi / 2, 200)
            f = np.array(
                [dipole.dipole_dipole_force(0.01, 0.01, 1.0, tt, d) for d in deltas]
            )
            assert np.sum(np.diff(np.sign(f)) != 0) == 1

    def test_validity_warning(self):
        with pytest.warns(UserWarning):
            dipole.dipole_dipole_free_energy(0.3, 0.3, 1.0, 0.0, 0.0)


class TestDipolePlane:
    def test_central_angle_zero(self):
        for tt in (0.0, 1.0, 50.0):
            val = dipole.dipole_plane_free_energy(0.01, 1.0, tt, math.pi / 4)
            scale = abs(dipole.dipole_plane_free_energy(0.01, 1.0, tt, 0.0))
            assert abs(val) < 1e-15 * scale

    def test_pec_value(self):
        got = dipole.dipole_plane_free_energy(0.01, 1.0, 0.0, 0.0)
        assert got == pytest.approx(-(1e-6) * 9.0 / (16.0 * math.pi), rel=1e-13)

    def test_sign_flip_symmetry(self):
        a = dipole.dipole_plane_free_energy(0.01, 1.0, 0.7, math.pi / 6)
        b = dipole.dipole_plane_free_energy(0.01, 1.0, 0.7, math.pi / 3)
        assert a == pytest.approx(-b, rel=1e-13)


class TestSumRule:
    def test_zero_temperature_endpoint(self):
        r1, r2, el = 0.01, 0.02, 1.0
        got = dipole.sumrule_dipole_dipole(r1, r2, el, 0.0)
        assert got == pytest.approx(-1.75 * (r1 * r2) ** 3 / el**6, rel=1e-10)

    def test_high_temperature_endpoint(self):
        r1, r2, el, tt = 0.01, 0.02, 1.0, 500.0
        got = dipole.sumrule_dipole_dipole(r1, r2, el, tt)
        # I = (script_l/k_B T) int F = got * 2 pi / tau~
        scaled = got * 2.0 * math.pi / tt
        assert scaled == pytest.approx(
            -9.0 * math.pi / 8.0 * (r1 * r2 / el**2) ** 3, rel=1e-10
        )

    def test_always_negative(self):
        for tt in np.linspace(0.0, 50.0, 26):
            assert dipole.sumrule_dipole_dipole(0.01, 0.01, 1.0, float(tt)) < 0.0

    def test_quadrature_oracle(self):
        # Gauss-Legendre of the closed-form force over delta
        r1, r2, el, tt = 0.01, 0.015, 1.0, 1.3
        t, w = np.polynomial.legendre.leggauss(64)
        d = 0.25 * math.pi * (t + 1.0)
        wd = 0.25 * math.pi * w
        quad = np.sum(
            wd * np.array([dipole.dipole_dipole_force(r1, r2, el, tt, dd) for dd in d])
        )
        assert quad == pytest.approx(
            dipole.sumrule_dipole_dipole(r1, r2, el, tt), rel=1e-12
        )

    def test_plane_exact_zero(self):
        assert dipole.sumrule_dipole_plane() == 0.0
        # quadrature of the dipole-plane force vanishes by antisymmetry
        t, w = np.polynomial.legendre.leggauss(48)
        d = 0.25 * math.pi * (t + 1.0)
        wd = 0.25 * math.pi * w
        quad = np.sum(
            wd * np.array([dipole.dipole_plane_force(0.01, 1.0, 0.8, dd) for dd in d])
        )
        assert abs(quad) < 1e-14
        # discontinuous transition: the sphere-sphere value stays finite
        assert dipole.sumrule_dipole_dipole(0.01, 0.01, 1.0, 0.8) != 0.0
