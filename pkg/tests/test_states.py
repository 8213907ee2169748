import math

import hypothesis as hyp
import hypothesis.strategies as st
import numpy as np
import pytest

from subvac.errors import DimensionError, DomainError, TruncationError
from subvac.states import (
    FieldPoint,
    PhotonState,
    ladder_sums,
    make_number_state,
    make_random_state,
    make_squeezed_vacuum,
    make_vacuum,
    make_vacuum_plus_two,
    mean_E_squared,
    mean_photon_number,
    negative_fraction,
    pair_correlation,
    squeezed_dim,
    subvac_decomposition,
    subvac_functional,
    subvac_maximum,
    subvac_minimum,
    worst_phase,
)

BETA = 0.32


def brute_min_over_phase(s, samples=20001):
    phases = np.linspace(0, 2 * np.pi, samples)
    return min(subvac_functional(s, p) for p in phases)


def eq55(r, phi, f2, omega, t):
    return 2 * f2 * (np.sinh(r) ** 2 + np.cosh(r) * np.sinh(r) * np.cos(phi + 2 * omega * t))


amplitude_lists = st.lists(
    st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=3, max_size=16
).filter(lambda v: sum(a * a + b * b for a, b in v) > 1e-6)


def to_state(pairs):
    return PhotonState(np.array([a + 1j * b for a, b in pairs]))


class TestConstructors:
    def test_number_states(self):
        np.testing.assert_array_equal(make_number_state(0, 5).amplitudes, [1, 0, 0, 0, 0])
        np.testing.assert_array_equal(make_number_state(2, 5).amplitudes, [0, 0, 1, 0, 0])
        with pytest.raises(DimensionError):
            make_number_state(5, 5)
        with pytest.raises(DimensionError):
            make_number_state(-1, 5)

    def test_vacuum_plus_two(self):
        np.testing.assert_array_equal(make_vacuum_plus_two(0.0).amplitudes, make_vacuum(3).amplitudes)
        s = make_vacuum_plus_two(1.0)
        assert s.amplitudes[0] == pytest.approx(1 / math.sqrt(2), abs=1e-15)
        assert s.amplitudes[2] == pytest.approx(1 / math.sqrt(2), abs=1e-15)
        s = make_vacuum_plus_two(BETA, dim=6)
        assert s.amplitudes[0].real == pytest.approx(0.9524, abs=5e-5)
        assert s.amplitudes[2].real == pytest.approx(0.3048, abs=5e-5)
        assert s.truncation_dim == 6

    def test_vacuum_plus_two_rejects(self):
        with pytest.raises(DimensionError):
            make_vacuum_plus_two(0.5, dim=2)
        with pytest.raises(DomainError):
            make_vacuum_plus_two(-0.1)
        with pytest.raises(DomainError):
            make_vacuum_plus_two(float("nan"))

    def test_rejects_null_vector(self):
        with pytest.raises(DomainError):
            PhotonState(np.zeros(4))
        with pytest.raises(DomainError):
            PhotonState(np.full(3, 1e-16))

    def test_state_is_immutable(self):
        s = make_vacuum_plus_two(BETA)
        with pytest.raises(ValueError):
            s.amplitudes[0] = 0.0

    @hyp.given(amplitude_lists)
    def test_constructor_normalises(self, pairs):
        s = to_state(pairs)
        assert abs(np.sum(np.abs(s.amplitudes) ** 2) - 1) < 1e-12

    @pytest.mark.parametrize("r", [0.0, 0.1, 0.5, 1.0, 2.0, 3.0])
    def test_squeezed_normalised_even_only(self, r):
        s = make_squeezed_vacuum(r, 0.7)
        assert abs(np.sum(np.abs(s.amplitudes) ** 2) - 1) < 1e-12
        assert np.all(s.amplitudes[1::2] == 0)

    def test_squeezed_r0_is_vacuum(self):
        s = make_squeezed_vacuum(0.0, 1.3)
        assert s.amplitudes[0] == 1
        assert mean_photon_number(s) == 0

    def test_squeezed_truncation_error_names_dim(self):
        with pytest.raises(TruncationError) as err:
            make_squeezed_vacuum(2.0, 0.0, dim=40)
        need = err.value.required_dim
        assert need is not None and str(need) in str(err.value)
        make_squeezed_vacuum(2.0, 0.0, dim=need)  # accepted at the named size

    @pytest.mark.parametrize("r", [0.25, 0.5, 1.0, 2.0, 3.0])
    def test_squeezed_dim_meets_tail(self, r):
        # direct probability sum against the analytic tail bound
        dim = squeezed_dim(r, 1e-8)
        m = np.arange(dim // 2 + 1)
        t = math.tanh(r)
        from scipy.special import gammaln
        p = np.exp(2 * m * np.log(t) + gammaln(2 * m + 1) - 2 * m * np.log(2) - 2 * gammaln(m + 1)) / math.cosh(r)
        kept = p[: (dim + 1) // 2].sum()
        assert kept >= 1 - 1e-8


class TestMoments:
    def test_mean_photon_number(self):
        assert mean_photon_number(make_vacuum(4)) == 0
        assert mean_photon_number(make_number_state(3, 6)) == pytest.approx(3, abs=1e-15)
        nbar = mean_photon_number(make_vacuum_plus_two(BETA))
        assert nbar == pytest.approx(2 * BETA**2 / (1 + BETA**2), rel=1e-14)
        assert nbar == pytest.approx(0.18578, abs=5e-6)

    def test_squeezed_mean_photon_number(self):
        assert mean_photon_number(make_squeezed_vacuum(1.0)) == pytest.approx(math.sinh(1) ** 2, rel=1e-12)
        assert math.sinh(1) ** 2 == pytest.approx(1.3811, abs=5e-5)

    @pytest.mark.parametrize("n", [0, 1, 2, 5])
    def test_number_state_pair_correlation_vanishes(self, n):
        assert pair_correlation(make_number_state(n, 8)) == 0

    def test_pair_correlation_vacuum_plus_two(self):
        C = pair_correlation(make_vacuum_plus_two(BETA))
        assert C == pytest.approx(math.sqrt(2) * BETA / (1 + BETA**2), rel=1e-14)
        assert C.real == pytest.approx(0.41051, abs=5e-6)

    def test_pair_correlation_squeezed(self):
        # magnitude cosh r sinh r; phase exp(i phi) so that <E^2> follows the closed form
        r = 0.5
        assert abs(pair_correlation(make_squeezed_vacuum(r, 0.0))) == pytest.approx(0.5876, abs=5e-5)
        assert pair_correlation(make_squeezed_vacuum(r, 0.0)) == pytest.approx(math.cosh(r) * math.sinh(r), rel=1e-12)
        assert pair_correlation(make_squeezed_vacuum(r, math.pi)) == pytest.approx(-math.cosh(r) * math.sinh(r), rel=1e-12)

    def test_pair_correlation_needs_dim3(self):
        with pytest.raises(DimensionError):
            pair_correlation(make_vacuum(2))

    @hyp.given(amplitude_lists)
    def test_pair_correlation_loose_bound(self, pairs):
        s = to_state(pairs)
        assert abs(pair_correlation(s)) <= mean_photon_number(s) + 2

    def test_ladder_sums_random(self, rng):
        for _ in range(200):
            s = make_random_state(int(rng.integers(1, 17)), rng)
            up, down = ladder_sums(s)
            nbar = mean_photon_number(s)
            assert up == pytest.approx(nbar, abs=1e-12)
            assert down == pytest.approx(nbar + 1, abs=1e-12)

    def test_global_phase_irrelevant(self, rng):
        for _ in range(50):
            s = make_random_state(10, rng)
            t = PhotonState(s.amplitudes * np.exp(1j * rng.uniform(0, 2 * np.pi)))
            assert subvac_minimum(t) == pytest.approx(subvac_minimum(s), abs=1e-13)
            assert abs(pair_correlation(t)) == pytest.approx(abs(pair_correlation(s)), abs=1e-13)
            assert subvac_functional(t, 0.4) == pytest.approx(subvac_functional(s, 0.4), abs=1e-13)


class TestSubvacFunctional:
    @pytest.mark.parametrize("phase", [0.0, 1.0, math.pi, 5.0])
    def test_vacuum(self, phase):
        assert subvac_functional(make_vacuum(3), phase) == 0

    def test_vacuum_plus_two_worst(self):
        s = make_vacuum_plus_two(BETA)
        expected = 2 * 0.18578 - 2 * 0.41051
        assert subvac_minimum(s) == pytest.approx(-0.44946, abs=2e-5)
        assert subvac_minimum(s) == pytest.approx(expected, abs=2e-5)
        assert subvac_functional(s, worst_phase(s)) == pytest.approx(subvac_minimum(s), abs=1e-14)
        assert brute_min_over_phase(s) == pytest.approx(subvac_minimum(s), abs=1e-7)

    def test_squeezed_r3_near_saturation(self):
        s = make_squeezed_vacuum(3.0)
        assert subvac_minimum(s) == pytest.approx(-(1 - math.exp(-6)), abs=1e-9)
        assert -(1 - math.exp(-6)) == pytest.approx(-0.99752, abs=5e-6)

    def test_max_is_min_reflected(self, rng):
        s = make_random_state(7, rng)
        assert subvac_functional(s, worst_phase(s) + math.pi) == pytest.approx(subvac_maximum(s), abs=1e-12)


class TestDecomposition:
    def test_vacuum(self):
        assert subvac_decomposition(make_vacuum(3)) == pytest.approx(0.0, abs=1e-15)

    def test_vacuum_plus_two(self):
        s = make_vacuum_plus_two(BETA)
        assert subvac_decomposition(s) == pytest.approx(-0.44946, abs=2e-5)
        assert subvac_decomposition(s) == pytest.approx(subvac_minimum(s), abs=1e-12)

    def test_random_instance(self):
        s = make_random_state(12, np.random.default_rng(12))
        assert subvac_decomposition(s) >= -1

    def test_random_states_bound_and_identity(self, rng):
        for _ in range(10_000):
            s = make_random_state(int(rng.integers(3, 17)), rng)
            smin = subvac_minimum(s)
            assert smin >= -1
            assert abs(subvac_decomposition(s) - smin) < 1e-10

    @hyp.given(amplitude_lists, st.floats(0, 2 * math.pi))
    def test_every_phase_above_minus_one(self, pairs, phase):
        s = to_state(pairs)
        assert subvac_functional(s, phase) >= -1 - 1e-12
        assert subvac_functional(s, phase) >= subvac_decomposition(s) - 1e-10


class TestMeanESquared:
    def test_vacuum_zero(self):
        fp = FieldPoint(2.5, 3.0)
        np.testing.assert_array_equal(mean_E_squared(make_vacuum(3), fp, np.linspace(0, 5, 11)), 0.0)

    def test_vacuum_plus_two_minimum(self):
        omega = 1.7
        fp = FieldPoint(1.0, omega)
        t = math.pi / (2 * omega)  # cos(2 omega t) = -1
        assert mean_E_squared(make_vacuum_plus_two(BETA), fp, t) == pytest.approx(-0.44946, abs=2e-5)

    def test_vacuum_plus_two_closed_form(self):
        omega, f2 = 0.9, 3.0
        t = np.linspace(0, 10, 101)
        b = BETA
        closed = 2 * b / (1 + b * b) * f2 * (2 * b + math.sqrt(2) * np.cos(2 * omega * t))
        np.testing.assert_allclose(mean_E_squared(make_vacuum_plus_two(b), FieldPoint(f2, omega), t), closed, rtol=1e-13, atol=1e-13)

    def test_negative_fraction(self):
        # brute force: sample one period of <E^2>
        s = make_vacuum_plus_two(BETA)
        omega = 1.0
        t = np.linspace(0, math.pi / omega, 2_000_001)[:-1]
        frac = np.mean(mean_E_squared(s, FieldPoint(1.0, omega), t) < 0)
        assert frac == pytest.approx(negative_fraction(s), abs=1e-5)
        assert negative_fraction(s) == pytest.approx(0.350, abs=1e-3)
        assert negative_fraction(s) == pytest.approx(math.acos(math.sqrt(2) * BETA) / math.pi, rel=1e-13)

    def test_negative_fraction_threshold(self):
        assert negative_fraction(make_vacuum_plus_two(math.sqrt(2) / 2)) == 0
        assert negative_fraction(make_vacuum_plus_two(0.75)) == 0
        assert negative_fraction(make_vacuum_plus_two(math.sqrt(2) / 2 - 1e-6)) < 1e-3

    @pytest.mark.parametrize("r", [0.1, 0.5, 1.0, 1.5, 2.0])
    @pytest.mark.parametrize("phi", [0.0, 0.9, math.pi, 4.0])
    def test_squeezed_matches_closed_form(self, r, phi):
        omega, f2 = 1.3, 0.7
        t = np.linspace(0, 3, 37)
        got = mean_E_squared(make_squeezed_vacuum(r, phi), FieldPoint(f2, omega), t)
        want = eq55(r, phi, f2, omega, t)
        scale = 2 * f2 * (np.sinh(r) ** 2 + np.cosh(r) * np.sinh(r))
        np.testing.assert_allclose(got, want, rtol=1e-8, atol=1e-8 * scale)

    def test_squeezed_minimum(self):
        omega = 2.0
        t = math.pi / (2 * omega)  # phi + 2 omega t = pi with phi = 0
        got = mean_E_squared(make_squeezed_vacuum(1.0, 0.0), FieldPoint(1.0, omega), t)
        assert got == pytest.approx(-(1 - math.exp(-2)), rel=1e-10)
        assert got == pytest.approx(-0.8647, abs=5e-5)

    def test_squeezed_minimum_monotone(self):
        mins = [subvac_minimum(make_squeezed_vacuum(r)) for r in np.linspace(0, 3, 31)]
        assert np.all(np.diff(mins) < 0)
        assert mins[-1] > -1

    @hyp.given(amplitude_lists, st.floats(0.01, 10), st.floats(0.1, 5), st.floats(-10, 10))
    def test_lower_bound(self, pairs, f2, omega, t):
        assert mean_E_squared(to_state(pairs), FieldPoint(f2, omega), t) >= -f2 * (1 + 1e-12)

    def test_field_point_validation(self):
        with pytest.raises(DomainError):
            FieldPoint(-1.0, 1.0)
        with pytest.raises(DomainError):
            FieldPoint(1.0, 0.0)
