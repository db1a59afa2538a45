import numpy as np
import pytest

import oracles
from subplanck import (CoverageError, Displacement, NyquistError,
                       OverlapSeries, cat_state, displace, gaussian_packet,
                       overlap_direct, overlap_from_wigner, overlap_ray,
                       overlap_sq_autocorr, wigner_transform)
from subplanck.errors import SupportError


class TestDisplacement:
    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            Displacement([1.0, 2.0], [0.0])

    def test_negation(self):
        d = Displacement([1.0], [-2.0])
        n = -d
        assert n.dx[0] == -1.0 and n.dp[0] == 2.0


class TestDisplace:
    def test_identity(self, gauss):
        out = displace(gauss, Displacement([0.0], [0.0]))
        assert np.max(np.abs(out.amplitudes - gauss.amplitudes)) < 1e-14

    def test_shift_inverse(self, gauss):
        fwd = displace(gauss, Displacement([1.7], [0.0]))
        back = displace(fwd, Displacement([-1.7], [0.0]))
        assert np.max(np.abs(back.amplitudes - gauss.amplitudes)) < 1e-10

    def test_position_mean_moves_opposite(self, gauss):
        # (D psi)(x) = psi(x + dx): the packet center moves by -dx
        moved = displace(gauss, Displacement([2.0], [0.0]))
        assert moved.position_mean() == pytest.approx(-2.0, abs=1e-8)

    def test_norm_preserved(self, gauss):
        moved = displace(gauss, Displacement([1.3], [2.1]))
        assert moved.norm() == pytest.approx(1.0, abs=1e-10)

    def test_escaping_support_rejected(self, gauss):
        with pytest.raises(SupportError):
            displace(gauss, Displacement([7.5], [0.0]))

    def test_weyl_phase_splitting(self, cat_grid):
        psi = gaussian_packet(cat_grid, 0.0, 0.0, 1.0)
        dx_amt, dp_amt = 1.1, 0.8
        split = displace(displace(psi, Displacement([dx_amt], [0.0])),
                         Displacement([0.0], [dp_amt]))
        joint = displace(psi, Displacement([dx_amt], [dp_amt]))
        phase = np.exp(-1j * dp_amt * dx_amt / 2.0)
        assert np.max(np.abs(split.amplitudes - phase * joint.amplitudes)) < 1e-10


class TestOverlapDirect:
    def test_unit_at_zero(self, gauss, cat8):
        for psi in (gauss, cat8):
            assert overlap_direct(psi, Displacement([0.0], [0.0])) == pytest.approx(1.0, abs=1e-12)

    def test_gaussian_closed_form(self, gauss):
        value = overlap_direct(gauss, Displacement([2.0], [0.0]))
        assert abs(value) == pytest.approx(np.exp(-0.5), abs=1e-6)
        assert abs(value) == pytest.approx(oracles.gaussian_overlap(2.0, 0.0, 1.0, 1.0), abs=1e-10)

    def test_hermiticity(self, cat8):
        d = Displacement([0.9], [0.6])
        assert overlap_direct(cat8, -d) == pytest.approx(
            np.conj(overlap_direct(cat8, d)), abs=1e-10)

    def test_mixed_displacement_oracle(self, gauss):
        value = overlap_direct(gauss, Displacement([1.2], [0.7]))
        assert abs(value) == pytest.approx(
            oracles.gaussian_overlap(1.2, 0.7, 1.0, 1.0), abs=1e-10)


class TestOverlapFromWigner:
    def test_unit_at_zero(self, cat8_wigner):
        assert overlap_from_wigner(cat8_wigner, Displacement([0.0], [0.0])) == pytest.approx(
            1.0, abs=1e-6)

    def test_agrees_with_direct_on_ray(self, gauss, gauss_wigner):
        for t in np.linspace(0.0, 3.5, 21):
            d = Displacement([t], [0.0])
            assert abs(overlap_from_wigner(gauss_wigner, d)
                       - overlap_direct(gauss, d)) < 1e-6

    def test_cat_first_zero_along_dp(self, cat8_wigner):
        # cosine interference factor: first zero of Re<D> at pi hbar / separation
        t = np.linspace(0.01, 0.6, 200)
        re = np.array([overlap_from_wigner(cat8_wigner, Displacement([0.0], [ti])).real
                       for ti in t])
        crossing = t[np.nonzero(np.diff(np.sign(re)))[0][0]]
        assert crossing == pytest.approx(np.pi / 8.0, rel=0.05)

    def test_nyquist_rejected(self, gauss_wigner):
        bound = np.pi * gauss_wigner.hbar / gauss_wigner.dx
        with pytest.raises(NyquistError):
            overlap_from_wigner(gauss_wigner, Displacement([0.0], [bound * 1.01]))


class TestAutocorrRoute:
    def test_purity_at_zero(self, cat8_wigner):
        assert overlap_sq_autocorr(cat8_wigner, Displacement([0.0], [0.0])) == pytest.approx(
            1.0, abs=1e-5)

    def test_matches_direct_squared(self, cat8, cat8_wigner):
        for d in (Displacement([1.0], [0.0]), Displacement([0.0], [0.5]),
                  Displacement([1.5], [0.3])):
            expected = abs(overlap_direct(cat8, d)) ** 2
            assert overlap_sq_autocorr(cat8_wigner, d) == pytest.approx(expected, abs=1e-5)

    def test_symmetric_under_negation(self, cat8_wigner):
        d = Displacement([1.1], [0.4])
        assert overlap_sq_autocorr(cat8_wigner, d) == pytest.approx(
            overlap_sq_autocorr(cat8_wigner, -d), abs=1e-10)

    def test_coverage_violation(self, gauss_wigner):
        with pytest.raises(CoverageError):
            overlap_sq_autocorr(gauss_wigner, Displacement([15.0], [0.0]))


class TestThreeRouteConsistency:
    @pytest.mark.parametrize("direction,t_max", [
        (Displacement([1.0], [0.0]), 4.0),
        (Displacement([0.0], [1.0]), 1.6),
    ])
    def test_cat_rays(self, cat8, cat8_wigner, direction, t_max):
        for t in np.linspace(0.0, t_max, 21):
            d = direction.scaled(float(t))
            direct = abs(overlap_direct(cat8, d))
            fourier = abs(overlap_from_wigner(cat8_wigner, d))
            auto = np.sqrt(max(overlap_sq_autocorr(cat8_wigner, d), 0.0))
            assert abs(direct - fourier) < 1e-5
            assert abs(direct - auto) < 1e-5
            assert abs(fourier - auto) < 1e-5

    def test_gaussian_rays(self, gauss, gauss_wigner):
        for t in np.linspace(0.0, 3.0, 21):
            for direction in (Displacement([1.0], [0.0]), Displacement([0.0], [1.0])):
                d = direction.scaled(float(t))
                direct = abs(overlap_direct(gauss, d))
                fourier = abs(overlap_from_wigner(gauss_wigner, d))
                auto = np.sqrt(max(overlap_sq_autocorr(gauss_wigner, d), 0.0))
                assert max(abs(direct - fourier), abs(direct - auto)) < 1e-5


class TestOverlapRay:
    def test_starts_at_unity(self, gauss):
        series = overlap_ray(gauss, Displacement([1.0], [0.0]), 3.0, 32)
        assert abs(series.values[0] - 1.0) < 1e-9

    def test_gaussian_monotone(self, gauss):
        series = overlap_ray(gauss, Displacement([1.0], [0.0]), 4.0, 64)
        mags = np.abs(series.values)
        assert np.all(np.diff(mags) < 0)

    def test_cat_dp_ray_rings(self, cat8):
        # zeros of the interference cosine sit at odd multiples of
        # pi hbar / separation; three sign changes need t past 5 pi / 8
        t_max = 5.5 * np.pi / 8.0
        series = overlap_ray(cat8, Displacement([0.0], [1.0]), t_max, 256)
        signs = np.sign(series.values.real)
        changes = int(np.sum(signs[:-1] * signs[1:] < 0))
        assert changes >= 3
        expected = oracles.cat_overlap_dp(series.t, 4.0, 1.0, 1.0)
        assert np.max(np.abs(series.values.real - expected)) < 1e-6

    def test_cat_dx_ray_oracle(self, cat8):
        series = overlap_ray(cat8, Displacement([1.0], [0.0]), 6.0, 64)
        expected = oracles.cat_overlap_dx(series.t, 4.0, 1.0, 1.0)
        assert np.max(np.abs(series.values.real - expected)) < 1e-6

    def test_scaled_direction_units(self, gauss):
        series = overlap_ray(gauss, Displacement([1.0], [0.0]), 2.0, 16, P=2.0)
        assert series.direction.dx[0] == pytest.approx(0.5)
        assert "P" in series.metadata

    def test_too_few_points(self, gauss):
        with pytest.raises(ValueError):
            overlap_ray(gauss, Displacement([1.0], [0.0]), 2.0, 8)

    def test_wigner_routes(self, cat8_wigner):
        fourier = overlap_ray(cat8_wigner, Displacement([1.0], [0.0]), 3.0, 16)
        auto = overlap_ray(cat8_wigner, Displacement([1.0], [0.0]), 3.0, 16,
                           route="autocorr")
        assert fourier.metadata["route"] == "wigner-ft"
        assert auto.metadata["route"] == "autocorr"
        assert np.max(np.abs(np.abs(fourier.values) - auto.values.real)) < 1e-5

    def test_callable_source(self):
        series = overlap_ray(lambda d: np.exp(-d.dx[0] ** 2), Displacement([1.0], [0.0]),
                             2.0, 16, metadata={"source": "toy"})
        assert series.metadata["route"] == "oracle"
        assert series.values[3] == pytest.approx(np.exp(-series.t[3] ** 2))


class TestSeriesValidation:
    def test_magnitude_bound_enforced(self):
        t = np.linspace(0.0, 1.0, 16)
        values = np.ones(16, dtype=complex)
        values[5] = 1.5
        with pytest.raises(ValueError):
            OverlapSeries(t, values, Displacement([1.0], [0.0]))

    def test_unit_at_zero_enforced(self):
        t = np.linspace(0.0, 1.0, 16)
        values = np.full(16, 0.5, dtype=complex)
        with pytest.raises(ValueError):
            OverlapSeries(t, values, Displacement([1.0], [0.0]))


class TestSeriesSerialization:
    def test_csv_roundtrip(self, tmp_path, gauss):
        series = overlap_ray(gauss, Displacement([1.0], [0.2]), 3.0, 48)
        path = tmp_path / "s.csv"
        series.to_csv(path)
        loaded = OverlapSeries.from_csv(path)
        assert np.array_equal(loaded.t, series.t)
        assert np.array_equal(loaded.values, series.values)
        path2 = tmp_path / "s2.csv"
        loaded.to_csv(path2)
        assert path.read_bytes() == path2.read_bytes()

    def test_json_roundtrip(self, tmp_path, gauss):
        series = overlap_ray(gauss, Displacement([1.0], [0.0]), 3.0, 32)
        path = tmp_path / "s.json"
        series.to_json(path)
        loaded = OverlapSeries.from_json(path)
        assert np.allclose(loaded.values, series.values, atol=0)
        path2 = tmp_path / "s2.json"
        loaded.to_json(path2)
        assert path.read_bytes() == path2.read_bytes()
