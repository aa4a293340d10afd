import math

import numpy as np
import pytest
from scipy import special

from floqeels.eels import (Peak, PeakSet, appendix_peak_tensor,
                           appendix_peaks_oracle, broaden_spectrum,
                           compute_I, compute_peaks, coupling_factor,
                           peak_tensor, spectrum_peaks, suppression, sweep_map)
from floqeels.exceptions import DimensionMismatch, MissingFloquetBasis
from floqeels.floquet import solve_floquet, stark_shift
from floqeels.lindblad import steady_state_fourier, to_floquet_basis
from floqeels.model import (CouplingGeometry, NumericsConfig,
                            builtin_scenario)

SPECTRUM_AXIS = np.linspace(-3.0, 3.0, 6001)


def test_intensity_symmetry(two_level):
    model, _, _, solution, _ = two_level
    intensities = compute_I(solution, model)

    assert intensities.shape == (2, 2, 2 * solution.l_max + 1)
    np.testing.assert_allclose(intensities,
                               intensities.transpose(1, 0, 2)[:, :, ::-1],
                               atol=1e-14)


def test_intensity_needs_matching_model(two_level):
    _, _, _, solution, _ = two_level
    model, _, _ = builtin_scenario('lambda_a')

    with pytest.raises(DimensionMismatch):
        compute_I(solution, model)


def test_undriven_single_peak(undriven):
    model, drive, numerics, solution, steady = undriven
    peaks = compute_peaks(compute_I(solution, model), steady, solution, drive,
                          numerics.peak_tol)

    assert len(peaks) == 1
    peak = peaks.entries[0]
    assert (peak.j, peak.jp, peak.l) == (1, 0, 1)
    assert peak.omega == pytest.approx(1.0, abs=1e-12)
    assert peak.prob == pytest.approx(1.0, abs=1e-8)
    assert peaks.sum_prob == pytest.approx(1.0, abs=1e-8)
    assert peaks.window == (-(solution.l_max - 2), solution.l_max - 2)
    assert peaks.negative == ()

    spectrum = broaden_spectrum(peaks, numerics.broadening_fwhm,
                                SPECTRUM_AXIS)
    assert spectrum.area() == pytest.approx(1.0, abs=1e-6)
    assert SPECTRUM_AXIS[spectrum.gamma.argmax()] == pytest.approx(1.0)


def test_undriven_peak_with_beam_geometry(undriven):
    model, drive, numerics, solution, steady = undriven
    geometry = CouplingGeometry(impact_parameter=1.0, velocity=0.5)
    peaks = compute_peaks(compute_I(solution, model), steady, solution, drive,
                          numerics.peak_tol, geometry)
    x = 1.0 / (0.5 * geometry.gamma)

    assert len(peaks) == 1
    assert peaks.entries[0].prob == pytest.approx(
        float(suppression(x)) ** 2, rel=1e-10)


def test_peaks_are_sorted(two_level):
    model, drive, numerics, solution, steady = two_level
    peaks = compute_peaks(compute_I(solution, model), steady, solution, drive,
                          numerics.peak_tol)
    magnitudes = np.abs(peaks.probs)

    assert len(peaks) > 1
    assert np.all(np.diff(magnitudes) <= 0)
    assert np.all(magnitudes >= numerics.peak_tol)
    assert peaks.sum_prob == pytest.approx(peaks.probs.sum())
    assert all(not (peak.j == peak.jp and peak.l == 0) for peak in peaks)
    for peak in peaks:
        assert peak.omega == pytest.approx(
            solution.omega_tilde[peak.j] - solution.omega_tilde[peak.jp]
            + peak.l * drive.omega_l)


def test_explicit_sums_agree(two_level):
    model, drive, numerics, solution, steady = two_level
    _, fast = peak_tensor(compute_I(solution, model), steady, solution)
    _, slow = appendix_peak_tensor(solution, steady, model)
    peaks = compute_peaks(compute_I(solution, model), steady, solution, drive,
                          numerics.peak_tol)
    oracle = appendix_peaks_oracle(solution, steady, model, drive,
                                   numerics.peak_tol)

    assert np.abs(fast - slow).max() < 1e-10
    assert len(oracle) == len(peaks)
    for peak in peaks:
        assert oracle.lookup(peak.j, peak.jp, peak.l).prob == pytest.approx(
            peak.prob, abs=1e-10)


def test_sign_flips_leave_peaks_alone(two_level):
    model, _, _, solution, steady = two_level
    _, baseline = peak_tensor(compute_I(solution, model), steady, solution)
    for band in range(solution.n_bands):
        flipped = solution.flipped(band)
        _, tensor = peak_tensor(compute_I(flipped, model),
                                to_floquet_basis(steady, flipped), flipped)

        assert np.abs(tensor - baseline).max() < 1e-14


def test_two_level_selection_rule(two_level):
    model, _, _, solution, steady = two_level
    window, tensor = peak_tensor(compute_I(solution, model), steady, solution)
    l_max = solution.l_max
    parity = []
    for band in range(2):
        level, harmonic = np.unravel_index(
            np.abs(solution.coeffs[band]).argmax(), (2, 2 * l_max + 1))
        parity.append((level + harmonic - l_max) % 2)

    for j in range(2):
        for jp in range(2):
            for index, harmonic in enumerate(window):
                if j == jp and harmonic == 0:
                    continue
                if (harmonic + parity[j] + parity[jp]) % 2 == 0:
                    assert abs(tensor[j, jp, index]) < 1e-10


def test_lambda_b_peaks_are_squared_intensities(lambda_b):
    model, drive, numerics, solution, steady = lambda_b
    intensities = compute_I(solution, model)
    peaks = compute_peaks(intensities, steady, solution, drive,
                          numerics.peak_tol)
    l_max = solution.l_max

    assert len(peaks) > 0
    for peak in peaks:
        assert peak.jp == 0
        assert peak.prob == pytest.approx(
            intensities[peak.j, peak.jp, peak.l + l_max] ** 2, abs=1e-10)
    assert any(peak.omega < 0 for peak in peaks)
    assert all(peak.prob > 0 for peak in peaks)


@pytest.mark.parametrize('name', ['lambda_b', 'lambda_c'])
def test_no_peaks_inside_a_band(name):
    model, drive, numerics = builtin_scenario(name)
    peaks = spectrum_peaks(model, drive, numerics)

    assert len(peaks) > 0
    assert not [peak for peak in peaks if peak.j == peak.jp]


@pytest.mark.parametrize('omega_l', [0.6, 0.8, 1.2, 1.6, 2.0])
def test_intraband_sidebands_follow_the_light(omega_l):
    model, drive, numerics = builtin_scenario('two_level', omega_l=omega_l)
    intraband = [peak for peak in spectrum_peaks(model, drive, numerics)
                 if peak.j == peak.jp]

    assert [abs(peak.l) for peak in intraband[:2]] == [1, 1]
    for peak in intraband:
        assert peak.omega == pytest.approx(peak.l * omega_l, abs=1e-12)


def test_transition_peak_follows_the_stark_shift():
    positions = []
    for rabi in (0.1, 0.2, 0.3):
        model, drive, numerics = builtin_scenario('two_level', rabi=rabi,
                                                  omega_l=1.5)
        solution = solve_floquet(model, drive, numerics)
        interband = [peak for peak in spectrum_peaks(model, drive, numerics)
                     if peak.j != peak.jp]
        nearest = min(interband, key=lambda peak: abs(peak.omega - 1.0))

        assert nearest.omega == pytest.approx(
            1.0 + stark_shift(solution, model), abs=1e-10)
        positions.append(nearest.omega)

    assert positions[0] < 1.0
    assert np.all(np.diff(positions) < 0)


def _lambda_b_doublet(omega_l):
    model, drive, numerics = builtin_scenario('lambda_b', omega_l=omega_l)
    strongest = spectrum_peaks(model, drive, numerics).entries[:2]

    return sorted(peak.omega for peak in strongest), strongest


def test_lambda_b_avoided_crossing():
    (low, high), strongest = _lambda_b_doublet(0.3)

    assert [low, high] == pytest.approx([0.856, 1.144], abs=0.01)
    assert all(peak.prob > 0.3 for peak in strongest)
    for omega_l in (0.2, 0.4):
        (lower, upper), _ = _lambda_b_doublet(omega_l)
        assert upper - lower > high - low


def test_lambda_c_gain_and_loss_lines():
    model, drive, numerics = builtin_scenario('lambda_c')
    omegas = spectrum_peaks(model, drive, numerics).omegas

    for target in (0.354, 0.254, -0.254, -0.354):
        assert np.abs(omegas - target).min() < 0.01


def test_peaks_need_floquet_basis(two_level):
    model, drive, numerics, solution, _ = two_level
    steady = steady_state_fourier(model, drive, numerics, solution.l_max)

    with pytest.raises(MissingFloquetBasis):
        compute_peaks(compute_I(solution, model), steady, solution, drive)


@pytest.mark.parametrize('x', [1e-3, 0.5, 1.0, 5.0, 20.0])
def test_suppression_is_x_k1(x):
    assert float(suppression(x)) == pytest.approx(x * special.k1(x),
                                                  rel=1e-12)


def test_suppression_limits():
    assert float(suppression(0.0)) == 1.0
    assert float(suppression(1e-4)) == pytest.approx(1.0, abs=1e-6)
    # large x, first correction of the asymptotic series included
    asymptotic = math.sqrt(5 * math.pi / 2) * math.exp(-5) * (1 + 3 / 40)
    assert float(suppression(5.0)) / asymptotic == pytest.approx(1.0,
                                                                 abs=0.01)
    assert float(suppression(800.0)) == 0.0


def test_coupling_factor_decreases():
    geometry = CouplingGeometry(impact_parameter=2.0, velocity=0.7)
    factors = coupling_factor(np.array([0.0, 0.5, 1.0, 2.0]), geometry)

    assert factors[0] == 1.0
    assert np.all(np.diff(factors) < 0)
    assert coupling_factor(-1.0, geometry) == coupling_factor(1.0, geometry)


def test_broadening_checks_its_input():
    peaks = PeakSet(entries=(Peak(1, 0, 1, 0.5, 2.0),), window=(-1, 1),
                    sum_prob=2.0)

    with pytest.raises(ValueError):
        broaden_spectrum(peaks, 0.0, SPECTRUM_AXIS)
    with pytest.raises(ValueError):
        broaden_spectrum(peaks, 0.01, SPECTRUM_AXIS[::-1])
    assert broaden_spectrum(peaks, 0.01, SPECTRUM_AXIS).area() == \
        pytest.approx(2.0, abs=1e-6)


def test_peak_set_queries():
    peaks = PeakSet(entries=(Peak(1, 0, 1, 1.0, 0.6), Peak(0, 1, -1, -1.0,
                                                           0.3),
                             Peak(1, 0, 3, 3.4, 0.1)),
                    window=(-2, 2), sum_prob=1.0)

    assert peaks.lookup(0, 1, -1).prob == 0.3
    assert peaks.lookup(0, 0, 1) is None
    assert [peak.l for peak in peaks.select(j=1)] == [1, 3]
    np.testing.assert_allclose(peaks.omegas, [1.0, -1.0, 3.4])


def test_sweep_map_reports_failed_rows():
    omega_axis = np.linspace(-2.0, 2.0, 401)
    result = sweep_map('two_level', 'rabi', [0.0, 0.2, -0.1], omega_axis)

    assert result.gamma.shape == (3, 401)
    assert list(result.failures) == [2]
    assert result.failures[2].startswith('InvalidModel')
    assert np.isnan(result.gamma[2]).all()
    assert result.peaks[2] is None
    assert not np.isnan(result.gamma[:2]).any()
    assert result.peaks[0].sum_prob == pytest.approx(1.0, abs=1e-8)


def test_sweep_map_is_deterministic():
    omega_axis = np.linspace(-2.0, 2.0, 401)
    scenario = builtin_scenario('two_level', numerics=NumericsConfig(l_max=12))
    serial = sweep_map(scenario, 'omega_l', [0.9, 1.0, 1.2], omega_axis)
    parallel = sweep_map(scenario, 'omega_l', [0.9, 1.0, 1.2], omega_axis,
                         threads=2)

    assert np.array_equal(serial.gamma, parallel.gamma)
    assert serial.failures == parallel.failures == {}


@pytest.mark.parametrize('axis, values', [('decay', [0.1]), ('rabi', [])])
def test_sweep_map_rejects(axis, values):
    with pytest.raises(ValueError):
        sweep_map('two_level', axis, values, SPECTRUM_AXIS)
