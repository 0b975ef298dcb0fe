import math

import numpy as np
import pytest

from pemc_casimir import hightemp as ht
from pemc_casimir.errors import DomainError


class TestClosedForms:
    def test_sphere_plane_value(self):
        # y = 2: 2/3 - 1/4 + log(3/4)
        assert ht.tr_m_sphere_plane(2.0) == pytest.approx(
            2.0 / 3.0 - 0.25 + math.log(0.75), rel=1e-14
        )

    def test_conformal_variables(self):
        g = ht.ConformalGeometry(y=2.0, u=0.25)
        assert g.alpha_plus == pytest.approx(1.0)
        assert g.alpha_minus == pytest.approx(1.0)
        assert g.z == pytest.approx(6.0)
        g0 = ht.ConformalGeometry(y=2.0, u=1e-6)
        assert g0.alpha_plus * g0.alpha_minus == pytest.approx(1.0, rel=1e-9)

    def test_sphere_plane_limit_of_two_spheres(self):
        # deviation is O(u)
        y = 3.0
        ref = ht.tr_m_sphere_plane(y)
        errs = []
        for u in (1e-3, 1e-4, 1e-5):
            errs.append(abs(ht.tr_m_pec_pec(y, u) - ref))
            assert abs(ht.tr_m_pec_pmc(y, u) - ref) < 10 * u
        rate = np.diff(np.log(errs)) / np.diff(np.log([1e-3, 1e-4, 1e-5]))
        assert np.allclose(rate, 1.0, atol=0.1)

    def test_positivity(self):
        for y in np.geomspace(1.01, 100.0, 12):
            for u in (0.01, 0.1, 0.25):
                assert ht.tr_m_pec_pec(float(y), u) > 0.0
                assert ht.tr_m_pec_pmc(float(y), u) > 0.0

    def test_large_y_power_law(self):
        ys = np.geomspace(50.0, 500.0, 5)
        vals = [ht.tr_m_sphere_plane(float(y)) for y in ys]
        slope = np.polyfit(np.log(ys), np.log(vals), 1)[0]
        assert slope == pytest.approx(-3.0, abs=0.05)

    def test_near_contact_divergence(self):
        # tr M ~ 1/(2(y-1)) as y -> 1+
        for eps in (1e-4, 1e-6):
            val = ht.tr_m_sphere_plane(1.0 + eps)
            assert val * 2.0 * eps == pytest.approx(1.0, rel=5e-2)

    def test_near_contact_asymptote_finite(self):
        for u in (0.05, 0.25):
            vals = [
                (y - 1.0) * ht.tr_m_pec_pec(y, u) for y in (1.0 + 1e-5, 1.0 + 1e-6)
            ]
            assert vals[0] == pytest.approx(vals[1], rel=1e-2)

    def test_mpmath_switch_consistency(self):
        # the extended-precision path used below the switch agrees with the
        # double evaluation at a point where both are accurate
        import mpmath as mp
        from pemc_casimir.hightemp import _trace_closed

        y = 1.0 + 2e-3
        for u in (0.1, 0.25):
            direct = _trace_closed(y, u, "pec-pec")
            with mp.workdps(40):
                via_mp = float(_trace_closed(y, u, "pec-pec", mp_ctx=mp))
            assert direct == pytest.approx(via_mp, rel=1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            ht.tr_m_pec_pec(0.9, 0.25)
        with pytest.raises(DomainError):
            ht.tr_m_pec_pec(2.0, 0.0)
        with pytest.raises(DomainError):
            ht.tr_m_sphere_plane(1.0)


class TestMonteCarloOracle:
    """Validate the closed forms against the printed Gaussian integrals.

    In the rotated coordinates p = (x1+x2)/sqrt(2), q = (x1-x2)/sqrt(2) the
    coupling is x1 x2 = (p^2 - q^2)/2 and the integrand grows like
    e^{s p^2/2} with s = 2(R1+R2)/L'.  Sampling p from the flattened Gaussian
    e^{-(1-s/2)p^2} (importance sampling) keeps the estimator variance finite
    even close to contact, where the naive estimator has infinite variance.
    """

    @staticmethod
    def _mc(y, u, kind, n_samples=10_000_000, seed=7):
        # geometry: y = (L'^2 - R1^2 - R2^2)/(2 R1 R2), u = R1R2/(R1+R2)^2
        if u == 0.25:
            r_ratio = 1.0
        else:
            sq = math.sqrt(1.0 - 4.0 * u)
            r_ratio = (1.0 + sq) / (1.0 - sq)
        r1, r2 = r_ratio, 1.0
        lp = math.sqrt(2.0 * y * r1 * r2 + r1 * r1 + r2 * r2)
        s = 2.0 * (r1 + r2) / lp
        assert s < 2.0
        # cosh is even in chi, so both p and q tails grow like e^{s v^2/2};
        # flattening all four coordinates bounds the weighted integrand by 3
        sig = math.sqrt(0.5 / (1.0 - 0.5 * s))
        wnorm = 1.0 / (1.0 - 0.5 * s) ** 2
        rng = np.random.default_rng(seed)
        total = 0.0
        total_sq = 0.0
        chunks = 10
        m = n_samples // chunks
        for _ in range(chunks):
            px, py, qx, qy = rng.normal(0.0, sig, size=(4, m))
            t1, t2 = rng.uniform(0.0, 1.0, size=(2, m))
            dot = 0.5 * (px * px - qx * qx + py * py - qy * qy)
            chi1 = 2.0 * r1 * dot / lp
            chi2 = 2.0 * r2 * dot / lp
            f1 = np.cosh(chi1) - 1.0
            f2 = np.cosh(chi2) - 1.0
            g1 = np.cosh(chi1) - 2.0 * t1 * np.cosh(t1 * chi1)
            g2 = np.cosh(chi2) - 2.0 * t2 * np.cosh(t2 * chi2)
            if kind == "pec-pec":
                vals = f1 * f2 + g1 * g2
            else:
                vals = f1 * g2 + g1 * f2
            weight = wnorm * np.exp(
                -0.5 * s * (px * px + py * py + qx * qx + qy * qy)
            )
            vals *= weight * r1 * r2 / lp**2
            total += vals.sum()
            total_sq += (vals**2).sum()
        n = chunks * m
        mean = total / n
        var = total_sq / n - mean**2
        return mean, math.sqrt(var / n)

    def test_pec_pec(self):
        mean, sigma = self._mc(1.5, 0.25, "pec-pec")
        ref = ht.tr_m_pec_pec(1.5, 0.25)
        assert abs(mean - ref) < 3.0 * sigma
        assert sigma < 0.02 * abs(ref)

    def test_pec_pmc(self):
        mean, sigma = self._mc(2.0, 0.25, "pec-pmc")
        ref = ht.tr_m_pec_pmc(2.0, 0.25)
        assert abs(mean - ref) < 3.0 * sigma
        assert sigma < 0.02 * abs(ref)

    def test_asymmetric_radii(self):
        mean, sigma = self._mc(2.5, 0.1, "pec-pec")
        ref = ht.tr_m_pec_pec(2.5, 0.1)
        assert abs(mean - ref) < 3.0 * sigma


class TestSingleRoundTrip:
    def test_central_angle_sphere_plane(self):
        scale = abs(ht.single_roundtrip_highT(0.0, 2.0, 0.0))
        assert abs(ht.single_roundtrip_highT(math.pi / 4, 2.0, 0.0)) < 1e-15 * scale

    def test_pec_pec(self):
        assert ht.single_roundtrip_highT(0.0, 2.0, 0.25) == pytest.approx(
            -0.5 * ht.tr_m_pec_pec(2.0, 0.25)
        )

    def test_pfa_ratio(self):
        # F_T/F_T^(1) -> Re Li3(e^{2 i delta})/cos(2 delta) for x << 1
        from pemc_casimir.specfun import re_polylog_circle
        from pemc_casimir.pfa import pfa_high_T

        y = 1.0 + 1e-4
        for delta in (0.0, math.pi / 6, math.pi / 2):
            single = ht.single_roundtrip_highT(delta, y, 0.0)
            exact = pfa_high_T(y - 1.0, delta)  # u = 0: x = y - 1
            ratio = exact / single
            expected = re_polylog_circle(3, 2 * delta) / math.cos(2 * delta)
            assert ratio == pytest.approx(expected, rel=2e-3)


class TestDoubleRoundTrip:
    def test_substitution_identity(self):
        for y in (1.2, 2.0, 5.0):
            pp, pm = ht.double_roundtrip_u0(y)
            assert pp == pytest.approx(ht.tr_m_pec_pec(2 * y * y - 1, 0.25), rel=1e-12)
            assert pm == pytest.approx(ht.tr_m_pec_pmc(2 * y * y - 1, 0.25), rel=1e-12)

    def test_combination(self):
        y, delta = 1.7, 0.6
        pp, pm = ht.double_roundtrip_u0(y)
        got = ht.double_roundtrip_combination(delta, y)
        assert got == pytest.approx(
            math.cos(2 * delta) ** 2 * pp - math.sin(2 * delta) ** 2 * pm
        )

    def test_sumrule_approximation_negative(self):
        for y in (1.5, 3.0, 10.0):
            assert ht.sumrule_double_roundtrip_u0(y) < 0.0


class TestRationalModel:
    def test_table_rows(self):
        table = ht.rational_model_table()
        assert len(table) == 4
        row0 = table[0.0]
        assert (row0.nu1, row0.nu2, row0.mu1, row0.mu2) == (
            0.01148,
            0.18511,
            0.01103,
            0.16069,
        )
        assert table[math.pi / 2].max_dev == pytest.approx(1.9e-3)

    def test_large_distance_limit(self):
        for d in (0.0, math.pi / 6, math.pi / 3, math.pi / 2):
            assert ht.rational_model(d, 60.0) == pytest.approx(1.0, abs=1e-10)

    def test_unsupported_delta(self):
        with pytest.raises(DomainError):
            ht.rational_model(0.123, 2.0)

    def test_contact_limit_near_pfa_ratio(self):
        # as y -> 1 the delta = 0 model approaches zeta(3) (the PFA ratio)
        from pemc_casimir.constants import ZETA3

        assert ht.rational_model(0.0, 1.0 + 1e-6) == pytest.approx(ZETA3, rel=3e-3)
