"""Verifier sweeps, Poisson reconstruction, disk transfer, asymptotics."""

import json

import numpy as np
import pytest

from mingraphs import (
    AffineMap,
    BoundaryArgumentData,
    ConvergenceError,
    ParameterError,
    PowerAffineMap,
    SampleGrid,
    SumMap,
    WeierstrassPair,
    curvature_closed_form,
    disk_transfer_check,
    estimate_asymptotic_angles,
    lw_family,
    poisson_im_log_hprime,
    poisson_re_ratio,
    verify_lemma2,
    verify_poisson,
    verify_scaling,
    verify_thm1,
    verify_thm2,
)

GRID = SampleGrid.rectangular(0.02, 10.0, 24, 10.0, 21)


def sign_flip_pair() -> WeierstrassPair:
    """Synthetic negative control: h' = zeta - 4 so Re h' changes sign."""
    h = SumMap((PowerAffineMap(offset=1.0, exponent=2.0, coeff=0.5), AffineMap(-5.0)))
    return WeierstrassPair(h=h, k0=2.0, g_anchor=(1.0 + 0j, 0j), label="sign-flip")


class TestSampleGrid:
    def test_points_shape(self):
        grid = SampleGrid.rectangular(0.1, 1.0, 3, 2.0, 5)
        assert grid.points().shape == (3, 5)

    def test_positive_sigma_enforced(self):
        with pytest.raises(ParameterError):
            SampleGrid(sigmas=np.array([0.0, 1.0]), taus=np.array([0.0]), descriptor="bad")


class TestLemma2:
    def test_lw15_pointwise_value(self, lw15):
        jet = lw15.h.jet(1.0 + 0j)
        assert 1.0 * abs(jet.d2 / jet.d1) == pytest.approx(0.25, rel=1e-13)

    def test_planar_zero(self, planar22):
        report = verify_lemma2(planar22, GRID)
        assert report.passed and report.empirical_constant == 0.0

    def test_lw19_supremum_on_real_axis(self):
        grid = SampleGrid.rectangular(0.5, 50.0, 25, 50.0, 21, geometric=False)
        report = verify_lemma2(lw_family(1.9), grid)
        assert report.passed
        assert report.empirical_constant == pytest.approx(50.0 * 0.9 / 51.0, rel=1e-12)
        assert report.empirical_constant < 0.9
        assert report.extremal_point == (50.0, 0.0)

    @pytest.mark.parametrize("gamma", [1.1, 1.5, 1.9])
    def test_family_bound(self, gamma):
        report = verify_lemma2(lw_family(gamma), GRID)
        assert report.passed
        assert report.empirical_constant <= gamma - 1.0 + 1e-12


class TestThm1:
    def test_planar(self, planar22):
        report = verify_thm1(planar22, [0.5, 1.0, 2.0], GRID)
        assert report.passed and report.empirical_constant == 0.0

    def test_lw15_chain(self, lw15):
        report = verify_thm1(lw15, [0.5, 1.0, 2.0, 4.0, 8.0], GRID)
        assert report.passed
        # C=2, tau=0 sits on the sampled set: C*kappa there is a lower bound
        assert report.empirical_constant >= 2.0 * curvature_closed_form(lw15, 1.0 + 0j) - 1e-12
        assert "chain bound" in report.notes

    def test_no_growth_across_levels(self, lw15):
        report = verify_thm1(lw15, [0.5, 1.0, 2.0, 4.0, 8.0], GRID)
        a_emp = verify_lemma2(lw15, GRID).empirical_constant
        assert report.empirical_constant <= 2.0 * a_emp + 1e-9

    def test_rejects_zero_level(self, lw15):
        with pytest.raises(ParameterError):
            verify_thm1(lw15, [0.0, 1.0], GRID)


class TestThm2:
    def test_lw15_passes(self, lw15):
        report = verify_thm2(lw15, GRID)
        assert report.passed
        assert report.empirical_constant > 0.0
        assert report.notes == "all sub-checks passed"

    def test_planar_fails_strict_positivity(self, planar22):
        report = verify_thm2(planar22, GRID)
        assert not report.passed
        assert "(d)" in report.notes
        assert "planar" in report.notes

    def test_sign_flip_fails_re_hprime(self):
        grid = SampleGrid.rectangular(1.0, 10.0, 10, 10.0, 9, geometric=False)
        # keep |tau| >= 2 so h' = zeta - 4 never vanishes on the grid
        grid = SampleGrid(sigmas=grid.sigmas, taus=np.linspace(2.0, 10.0, 9),
                          descriptor="sigma [1,10], tau [2,10]")
        report = verify_thm2(sign_flip_pair(), grid)
        assert not report.passed
        assert "(b)" in report.notes  # Re h' <= 0 named with its point
        assert "(a)" in report.notes  # boundary y_tau < 0 as well


class TestPoisson:
    def test_zero_data(self, lw15):
        data = BoundaryArgumentData.from_function(lambda t: 0.0, dpsi_fn=lambda t: 0.0)
        est = poisson_im_log_hprime(data, 1.0 + 0j)
        assert est.value == pytest.approx(0.0, abs=1e-12)
        ratio = poisson_re_ratio(data, 1.0 + 0j)
        assert ratio.derivative_form == pytest.approx(0.0, abs=1e-12)
        assert ratio.by_parts_form == pytest.approx(0.0, abs=1e-12)

    def test_constant_data_gives_zero_ratio(self):
        data = BoundaryArgumentData.from_function(lambda t: 0.3, dpsi_fn=lambda t: 0.0)
        ratio = poisson_re_ratio(data, 1.5 + 0.5j)
        assert ratio.derivative_form == pytest.approx(0.0, abs=1e-9)
        assert ratio.by_parts_form == pytest.approx(0.0, abs=1e-12)

    def test_odd_data_at_real_point(self, lw15):
        data = BoundaryArgumentData.from_function(
            lambda t: 0.5 * np.arctan(t), dpsi_fn=lambda t: 0.5 / (1 + t * t)
        )
        est = poisson_im_log_hprime(data, 1.0 + 0j)
        assert est.value == pytest.approx(0.0, abs=1e-10)
        assert np.angle(lw15.h.jet(1.0 + 0j).d1) == 0.0

    def test_interior_reconstruction(self, lw15):
        data = BoundaryArgumentData.from_pair(lw15)
        est = poisson_im_log_hprime(data, 1.0 + 1.0j)
        assert est.value == pytest.approx(0.5 * np.angle(2.0 + 1.0j), abs=1e-4)
        ratio = poisson_re_ratio(data, 1.0 + 0j)
        assert ratio.derivative_form == pytest.approx(0.25, abs=1e-4)
        assert ratio.by_parts_form == pytest.approx(0.25, abs=1e-4)
        assert ratio.agreement_delta <= 2e-4

    def test_gamma19_point(self):
        pair = lw_family(1.9)
        data = BoundaryArgumentData.from_function(
            lambda t: 0.9 * np.arctan(t), dpsi_fn=lambda t: 0.9 / (1 + t * t)
        )
        ratio = poisson_re_ratio(data, 2.0 + 3.0j)
        assert ratio.derivative_form == pytest.approx(0.15, abs=1e-4)
        assert np.real(0.9 / (3.0 + 3.0j)) == pytest.approx(0.15)

    def test_psi_bound_enforced(self):
        with pytest.raises(ParameterError):
            BoundaryArgumentData.from_function(lambda t: 2.0)

    @pytest.mark.parametrize("gamma", [1.1, 1.3, 1.5, 1.7, 1.9])
    def test_psi_bound_on_family(self, gamma):
        data = BoundaryArgumentData.from_pair(lw_family(gamma), n_samples=801)
        assert np.max(np.abs(data.psi)) <= np.pi / 2

    def test_report(self, lw15):
        report = verify_poisson(lw15, points=[0.5 + 0j, 1.0 + 2.0j, 2.0 - 1.0j])
        assert report.passed
        assert report.empirical_constant <= 1e-4


class TestScaling:
    def test_identity_factor(self, lw15):
        report = verify_scaling(lw15, 1.0, [1.0 + 0j, 2.0 + 1.0j])
        assert report.passed and report.empirical_constant == 0.0

    def test_doubling_halves_curvature(self, lw15):
        from mingraphs import scale_solution
        scaled = scale_solution(lw15, 2.0)
        kappa_scaled = curvature_closed_form(scaled, 1.0 + 0j)
        assert kappa_scaled == pytest.approx(
            curvature_closed_form(lw15, 1.0 + 0j) / 2.0, rel=1e-12
        )
        report = verify_scaling(lw15, 2.0, [1.0 + 0j, 0.5 + 2.0j, 3.0 - 1.0j])
        assert report.passed

    def test_planar_trivial(self, planar22):
        report = verify_scaling(planar22, 10.0, [1.0 + 0j, 2.0 + 2.0j])
        assert report.passed and report.empirical_constant == pytest.approx(0.0, abs=1e-15)


class TestDiskTransfer:
    def test_center_of_disk(self, lw15):
        grid = SampleGrid(sigmas=np.array([1.0]), taus=np.array([0.0]), descriptor="zeta=1")
        report = disk_transfer_check(lw15, grid)
        # w = 0 there: A1 = |H''/H'| = |(h''/h')*(zeta+1)^2/2 + (zeta+1)| = 2.5
        assert report.passed
        assert report.empirical_constant == pytest.approx(2.5, rel=1e-12)

    def test_planar_finite(self, planar22):
        report = disk_transfer_check(planar22, GRID)
        assert report.passed and np.isfinite(report.empirical_constant)

    def test_lw15_chain_consistent(self, lw15):
        report = disk_transfer_check(lw15, GRID)
        assert report.passed
        assert "holds" in report.notes


class TestAsymptoticAngles:
    def test_planar_vertical(self, planar22):
        plus, minus = estimate_asymptotic_angles(planar22)
        assert plus == pytest.approx(np.pi / 2, abs=1e-12)
        assert minus == pytest.approx(np.pi / 2, abs=1e-12)

    def test_lw15(self, lw15):
        plus, minus = estimate_asymptotic_angles(lw15)
        assert plus == pytest.approx(3 * np.pi / 4, abs=1e-6)
        assert minus == pytest.approx(np.pi / 4, abs=1e-6)

    def test_nonconvergence_flagged(self):
        with pytest.raises(ConvergenceError):
            estimate_asymptotic_angles(lw_family(1.9), tau_probes=(1.0, 2.0))

    def test_probe_validation(self, lw15):
        with pytest.raises(ParameterError):
            estimate_asymptotic_angles(lw15, tau_probes=(100.0, 10.0))


class TestReportSerialization:
    def test_fixed_field_order(self, planar22):
        report = verify_lemma2(planar22, GRID)
        parsed = json.loads(report.to_json())
        assert list(parsed.keys()) == [
            "check_name", "passed", "empirical_constant", "extremal_point",
            "tolerance", "grid_descriptor", "notes",
        ]
        assert parsed["passed"] is True
        assert isinstance(parsed["extremal_point"], list)

    def test_determinism(self, lw15):
        a = verify_thm2(lw15, GRID).to_json()
        b = verify_thm2(lw15, GRID).to_json()
        assert a == b
