"""Jet evaluation: exact derivative rules, branches, and FD consistency."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mingraphs import (
    AffineMap,
    DomainError,
    Jet2,
    PowerAffineMap,
    ScaledMap,
    SingularityError,
    SumMap,
    jet_affine,
    jet_pow_affine,
    log_derivative,
)


class TestPowAffine:
    def test_power_three_halves_at_one(self):
        jet = jet_pow_affine(1.0, 1.5, 1.0 + 0j)
        assert jet.v == pytest.approx(2.0**1.5, rel=1e-14)
        assert jet.d1 == pytest.approx(1.5 * 2.0**0.5, rel=1e-14)
        assert jet.d2 == pytest.approx(0.75 * 2.0**-0.5, rel=1e-14)

    def test_identity_power(self):
        jet = jet_pow_affine(1.0, 1.0, 0.7 + 2.3j)
        assert jet.v == pytest.approx(1.7 + 2.3j)
        assert jet.d1 == 1.0
        assert jet.d2 == 0.0

    def test_half_power_at_i(self):
        jet = jet_pow_affine(1.0, 0.5, 1j)
        expected = 2.0**0.25 * np.exp(1j * np.pi / 8)
        assert jet.v == pytest.approx(expected, rel=1e-14)
        assert jet.v**2 == pytest.approx(1.0 + 1.0j, rel=1e-14)

    def test_branch_domain_error(self):
        with pytest.raises(DomainError):
            jet_pow_affine(1.0, 1.5, -1.0 + 2j)  # Re(zeta+1) = 0
        with pytest.raises(DomainError):
            jet_pow_affine(0.0, 0.5, -0.5 + 0j)

    def test_nonfinite_input_rejected(self):
        with pytest.raises(DomainError):
            jet_pow_affine(1.0, 1.5, complex(np.nan, 0.0))
        with pytest.raises(DomainError):
            jet_pow_affine(np.inf, 1.5, 1.0 + 0j)

    def test_vertical_line_continuity(self):
        # principal branch must not jump anywhere on sigma = const > 0
        for sigma in (0.1, 1.0, 10.0):
            for p in (0.5, 1.5, 1.9):
                taus = np.linspace(-40.0, 40.0, 4001)
                jets = jet_pow_affine(1.0, p, sigma + 1j * taus)
                dv = np.abs(np.diff(jets.v))
                step_bound = np.abs(jets.d1)[:-1] * (taus[1] - taus[0])
                assert np.all(dv <= 1.5 * step_bound + 1e-12)


class TestAffine:
    def test_linear(self):
        jet = jet_affine(2.0, 0.0, 1.0 + 1.0j)
        assert (jet.v, jet.d1, jet.d2) == (2.0 + 2.0j, 2.0, 0.0)

    def test_constant(self):
        jet = jet_affine(0.0, 5.0, 3.0 + 0j)
        assert (jet.v, jet.d1, jet.d2) == (5.0, 0.0, 0.0)

    def test_complex_slope(self):
        jet = jet_affine(1.0 - 1.0j, 2.0, 1.0 + 0j)
        assert jet.v == pytest.approx(3.0 - 1.0j)
        assert jet.d1 == pytest.approx(1.0 - 1.0j)
        assert jet.d2 == 0.0


class TestLogDerivative:
    def test_power_closed_form(self):
        jet = jet_pow_affine(1.0, 1.5, 1.0 + 0j)
        assert log_derivative(jet) == pytest.approx(0.25, rel=1e-13)

    def test_affine_is_zero(self):
        assert log_derivative(jet_affine(3.0, 1.0, 2.0 + 0j)) == 0.0

    def test_power_19_at_i(self):
        jet = jet_pow_affine(1.0, 1.9, 1j)
        assert log_derivative(jet) == pytest.approx(0.45 - 0.45j, rel=1e-13)

    def test_floor_raises(self):
        with pytest.raises(SingularityError):
            log_derivative(Jet2(1.0, 0.0, 1.0))


def _catalog_maps():
    lw_h = PowerAffineMap(offset=1.0, exponent=1.5)
    lw_g = PowerAffineMap(offset=1.0, exponent=0.5, coeff=-4.0 / 3.0)
    return [
        lw_h,
        lw_g,
        AffineMap(2.0),
        ScaledMap(2.0, lw_h),
        SumMap((PowerAffineMap(offset=1.0, exponent=2.0, coeff=0.5), AffineMap(-5.0))),
    ]


def test_finite_difference_consistency(rng):
    """Central differences of v reproduce d1 (and of d1 reproduce d2) at
    order >= 1.9 over 120 random interior points, for every catalog map."""
    zetas = rng.uniform(0.1, 5.0, 120) + 1j * rng.uniform(-5.0, 5.0, 120)
    for amap in _catalog_maps():
        center = amap.jet(zetas)

        def fd_errors(eps):
            plus, minus = amap.jet(zetas + eps), amap.jet(zetas - eps)
            return (
                np.max(np.abs((plus.v - minus.v) / (2 * eps) - center.d1)),
                np.max(np.abs((plus.d1 - minus.d1) / (2 * eps) - center.d2)),
            )

        coarse = fd_errors(1e-3)
        fine = fd_errors(5e-4)
        for c_err, f_err, key in zip(coarse, fine, ("d1", "d2")):
            if c_err < 1e-11:
                assert f_err < 1e-11  # exact up to difference roundoff (affine map)
            else:
                order = np.log2(c_err / f_err)
                assert order >= 1.9, f"{amap.name} {key}: observed order {order:.3f}"


def test_determinism():
    z = 0.37 + 1.41j
    first = jet_pow_affine(1.0, 1.7, z)
    second = jet_pow_affine(1.0, 1.7, z)
    assert first.v == second.v and first.d1 == second.d1 and first.d2 == second.d2


def test_jet_is_finite_helper():
    assert jet_affine(1.0, 0.0, 1.0 + 0j).is_finite()
    assert not Jet2(complex(np.nan), 0.0, 0.0).is_finite()


@settings(max_examples=150, deadline=None)
@given(
    p=st.floats(0.25, 3.0),
    sigma=st.floats(1e-3, 50.0),
    tau=st.floats(-50.0, 50.0),
)
def test_log_derivative_matches_power_rule(p, sigma, tau):
    zeta = complex(sigma, tau)
    got = log_derivative(jet_pow_affine(1.0, p, zeta))
    want = (p - 1.0) / (zeta + 1.0)
    assert abs(got - want) <= 1e-12 * max(1.0, abs(want))


@settings(max_examples=100, deadline=None)
@given(
    sigma=st.floats(1e-3, 20.0),
    tau=st.floats(-20.0, 20.0),
    c=st.floats(0.1, 10.0),
)
def test_scaled_map_scales_all_jet_entries(sigma, tau, c):
    inner = PowerAffineMap(offset=1.0, exponent=1.5)
    scaled = ScaledMap(c, inner)
    zeta = complex(sigma, tau)
    base, got = inner.jet(zeta), scaled.jet(zeta)
    assert got.v == pytest.approx(c * base.v, rel=1e-14)
    assert got.d1 == pytest.approx(c * base.d1, rel=1e-14)
    assert got.d2 == pytest.approx(c * base.d2, rel=1e-14)
