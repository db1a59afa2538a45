import math

import mpmath as mp
import numpy as np
import pytest

import oracles
from subplanck import DomainError, scaled_bessel

mp.mp.dps = 50


def reference(nu: float, xi: float) -> float:
    if xi == 0.0:
        return 1.0
    j = mp.besselj(nu, xi, maxterms=2 * 10 ** 6, maxprec=10 ** 6)
    return float(mp.gamma(nu + 1) * (mp.mpf(xi) / 2) ** (-nu) * j)


def envelope(nu: float, xi: float) -> float:
    if xi <= max(nu, 1.0):
        return 1.0
    ln = (math.lgamma(nu + 1.0) - nu * math.log(xi / 2.0)
          + 0.5 * math.log(2.0 / (math.pi * xi)))
    return math.exp(min(ln, 0.0))


class TestExactValues:
    @pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 2.0, 6.5, 150.0, 1499.0, 2000.0])
    def test_unity_at_zero(self, nu):
        assert scaled_bessel(nu, 0.0) == 1.0

    @pytest.mark.parametrize("xi", [0.1, 1.0, 10.0])
    def test_half_order_is_sinc(self, xi):
        assert scaled_bessel(0.5, xi) == pytest.approx(np.sin(xi) / xi, abs=1e-12)

    @pytest.mark.parametrize("xi", [0.3, 2.0, 5.0, 12.0, 30.0])
    def test_order_one_against_quadrature(self, xi):
        expected = 2.0 * oracles.jn_trapezoid(1, xi) / xi
        assert scaled_bessel(1.0, xi) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("xi", [0.5, 3.0, 8.0, 25.0, 60.0])
    def test_order_zero_against_quadrature(self, xi):
        assert scaled_bessel(0.0, xi) == pytest.approx(
            oracles.jn_trapezoid(0, xi), abs=1e-12)

    @pytest.mark.parametrize("nu,xi", [(2.5, 4.0), (6.5, 9.0), (10.0, 14.0)])
    def test_poisson_representation(self, nu, xi):
        assert scaled_bessel(nu, xi) == pytest.approx(
            oracles.lambda_poisson(nu, xi), abs=1e-10)


class TestAccuracyLattice:
    @pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 2.0, 3.5, 6.5, 20.0, 55.5,
                                    150.0, 600.5, 1499.0, 2000.0])
    def test_against_mpmath(self, nu):
        boundary = math.sqrt(4.0 * nu + 10.0)
        points = [0.0, 1e-3, 0.9 * boundary, 1.02 * boundary]
        points += list(np.linspace(1.05 * boundary, max(0.98 * nu, 1.06 * boundary), 4))
        points += [max(nu, boundary) * 1.05, max(nu, boundary) * 2.0, 50.0, 500.0, 2e4]
        for xi in points:
            xi = float(min(max(xi, 0.0), 1e6))
            value = scaled_bessel(nu, xi)
            ref = reference(nu, xi)
            assert np.isfinite(value)
            scale = max(abs(ref), 1e-3 * envelope(nu, xi), 1e-300)
            tol = 1e-10 if xi <= 50.0 else 1e-8
            assert abs(value - ref) / scale < tol, (nu, xi)

    @pytest.mark.parametrize("nu", [0.0, 1.0, 3.5, 20.0])
    def test_huge_arguments(self, nu):
        for xi in (1e5, 1e6):
            value = scaled_bessel(nu, xi)
            ref = reference(nu, xi)
            assert np.isfinite(value)
            scale = max(abs(ref), 1e-3 * envelope(nu, xi))
            assert abs(value - ref) / scale < 1e-8

    def test_deep_monotone_zone(self):
        # order far above the argument: the log-scaled backward recurrence
        # must neither overflow nor lose the tiny result
        value = scaled_bessel(1499.0, 200.0)
        ref = reference(1499.0, 200.0)
        assert value == pytest.approx(ref, rel=1e-8)

    def test_graceful_underflow(self):
        # true value far below the double floor: clean zero, not nan/inf
        assert scaled_bessel(2000.0, 1e6) == 0.0


class TestEnvelope:
    @pytest.mark.parametrize("nu", [0.0, 0.5, 2.0, 6.5, 55.5, 1499.0])
    def test_bounded_by_one(self, nu):
        xi = np.linspace(0.0, 2500.0, 700)
        values = scaled_bessel(nu, xi)
        assert np.all(np.abs(values) <= 1.0 + 1e-12)

    def test_scalar_matches_array(self):
        xi = np.array([0.0, 1.0, 7.7, 123.4])
        arr = scaled_bessel(6.5, xi)
        for i, x in enumerate(xi):
            assert scaled_bessel(6.5, float(x)) == arr[i]


class TestDomain:
    def test_rejects_negative_order(self):
        with pytest.raises(DomainError):
            scaled_bessel(-1.0, 1.0)

    def test_rejects_large_order(self):
        with pytest.raises(DomainError):
            scaled_bessel(2000.5, 1.0)

    def test_rejects_quarter_order(self):
        with pytest.raises(DomainError):
            scaled_bessel(0.25, 1.0)

    def test_rejects_negative_argument(self):
        with pytest.raises(DomainError):
            scaled_bessel(1.0, -0.5)

    def test_rejects_huge_argument(self):
        with pytest.raises(DomainError):
            scaled_bessel(1.0, 1.1e6)
