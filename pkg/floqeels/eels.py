# -*- coding: utf-8 -*-
#
# pylint: disable=superfluous-parens
#
"""
floqeels.eels
~~~~~~~~~~~~~

This module turns a Floquet solution and a steady state into the electron
energy-loss spectrum. A loss peak sits at

    ω = ω̃_j - ω̃_j' + l ω_L

and its probability follows from the Floquet intensities I_{jj'l} and the
Floquet-basis steady state. The peak at j = j', l = 0 is the elastic line and
it is never reported.

Probabilities are normalized to the loss probability of the undriven atom,
frequencies are in units of ω₀.

"""
import logging
import math
from collections import namedtuple
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.integrate import trapezoid

from floqeels.exceptions import DimensionMismatch, MissingFloquetBasis
from floqeels.floquet import solve_floquet
from floqeels.lindblad import steady_state_fourier, to_floquet_basis
from floqeels.model import (SCENARIOS, CouplingGeometry, DriveParams,
                            builtin_scenario)
from floqeels.utils import SWEEP_AXES, run_across_workers, should_die

__all__ = [
    'CouplingGeometry',
    'MapResult',
    'Peak',
    'PeakSet',
    'SpectrumGrid',
    'appendix_coefficients',
    'appendix_peak_tensor',
    'appendix_peaks_oracle',
    'broaden_spectrum',
    'compute_I',
    'compute_peaks',
    'coupling_factor',
    'peak_tensor',
    'spectrum_peaks',
    'suppression',
    'sweep_map',
]

log = logging.getLogger(__name__)

FWHM_TO_SIGMA = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))
# Gaussians are evaluated this many sigmas around their center
_GAUSSIAN_REACH = 10.0

Peak = namedtuple('Peak', ['j', 'jp', 'l', 'omega', 'prob'])


@dataclass(frozen=True)
class PeakSet(object):
    """Loss peaks sorted by decreasing ``|prob|``.

    :param entries: tuple of :class:`Peak`.
    :param window: (lowest, highest) harmonic that was considered.
    :param sum_prob: sum of all reported probabilities.
    :param negative: peaks whose probability came out negative.
    """
    entries: tuple
    window: tuple
    sum_prob: float
    negative: tuple = ()

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def omegas(self):
        return np.array([peak.omega for peak in self.entries])

    @property
    def probs(self):
        return np.array([peak.prob for peak in self.entries])

    def lookup(self, j, jp, l):
        """Return the peak with the given indices or ``None``."""
        for peak in self.entries:
            if (peak.j, peak.jp, peak.l) == (j, jp, l):
                return peak

        return None

    def select(self, j=None, jp=None, l=None):
        """Return the peaks matching every index that is set."""
        return [peak for peak in self.entries
                if (j is None or peak.j == j)
                and (jp is None or peak.jp == jp)
                and (l is None or peak.l == l)]


@dataclass(frozen=True, eq=False)
class SpectrumGrid(object):
    """Broadened spectrum on a frequency axis."""
    omega_axis: np.ndarray
    gamma: np.ndarray
    fwhm: float

    def area(self):
        """Return the integral of the spectrum over its axis."""
        return float(trapezoid(self.gamma, self.omega_axis))


@dataclass(frozen=True, eq=False)
class MapResult(object):
    """Spectra along a sweep of a light parameter.

    Rows that failed hold NaN in ``gamma``, ``None`` in ``peaks`` and the
    reason in ``failures``.
    """
    axis: str
    values: np.ndarray
    omega_axis: np.ndarray
    gamma: np.ndarray
    peaks: tuple
    failures: dict
    fwhm: float


def _check_sizes(expected, got):
    if tuple(expected) != tuple(got):
        raise DimensionMismatch(tuple(expected), tuple(got))


def compute_I(solution, model):
    """Return the Floquet intensities.

    ``I[j, j', l + l_max] = Σ_{l'} Σ_{aa'} f_{jal'} d_{aa'} f_{j'a',l'-l}``
    for l in [-l_max, l_max].

    :param solution: Floquet solution.
    :type solution: :class:`floqeels.floquet.FloquetSolution`
    :param model: the atom, for the dipole ratios.
    :type model: :class:`floqeels.model.AtomModel`
    :rtype: :class:`numpy.ndarray`
    :raise: :class:`.DimensionMismatch` when the atom and the solution
      don't have the same number of levels.
    """
    _check_sizes((model.n_levels,), (solution.coeffs.shape[1],))
    l_max = solution.l_max
    pair = np.einsum('jap,ab,kbq->jkpq', solution.coeffs, model.dipole_ratio,
                     solution.coeffs)
    intensities = np.empty(pair.shape[:2] + (2 * l_max + 1,))
    for index, harmonic in enumerate(range(-l_max, l_max + 1)):
        intensities[:, :, index] = np.diagonal(
            pair, offset=-harmonic, axis1=2, axis2=3).sum(axis=-1)

    return intensities


def _window(l_max):
    width = max(l_max - 2, 0)

    return np.arange(-width, width + 1)


def _require_floquet_basis(steady, solution):
    if steady.rho_floquet is None:
        raise MissingFloquetBasis()
    _check_sizes((solution.n_bands, solution.l_max),
                 (steady.rho_floquet.shape[0], steady.l_max))


def peak_tensor(intensities, steady, solution):
    """Return the peak probabilities before pruning.

    ``P[j, j', l] = I_{jj'l} Σ_{j''l'} I_{jj''l'} Re ρ̃_{j''j', l'-l}`` for
    ``|l| <= l_max - 2``, harmonics past the truncation count as zero.

    :return: the harmonics of the window and the tensor.
    :rtype: ``tuple``
    :raise: :class:`.MissingFloquetBasis` when the steady state has no
      Floquet-basis harmonics.
    """
    _require_floquet_basis(steady, solution)
    l_max = solution.l_max
    window = _window(l_max)
    rho = steady.rho_floquet.real
    padded = np.zeros(rho.shape[:2] + (4 * l_max + 1,))
    padded[:, :, l_max:3 * l_max + 1] = rho
    harmonics = np.arange(-l_max, l_max + 1)
    # gathered[j'', j', l', l] = Re ρ̃_{j''j', l'-l}
    gathered = padded[:, :, harmonics[:, None] - window[None, :] + 2 * l_max]
    inner = np.einsum('jpk,pqkl->jql', intensities, gathered)
    selected = intensities[:, :, window + l_max]

    return window, selected * inner


def _loss_frequencies(solution, window, omega_l):
    return (solution.omega_tilde[:, None, None]
            - solution.omega_tilde[None, :, None]
            + window[None, None, :] * omega_l)


def _collect(tensor, omegas, window, peak_tol):
    entries = []
    negative = []
    for j, jp, index in zip(*np.nonzero(np.abs(tensor) >= peak_tol)):
        harmonic = int(window[index])
        if j == jp and harmonic == 0:
            continue
        peak = Peak(int(j), int(jp), harmonic, float(omegas[j, jp, index]),
                    float(tensor[j, jp, index]))
        entries.append(peak)
        if peak.prob < 0:
            negative.append(peak)

    entries.sort(key=lambda peak: (-abs(peak.prob), peak.j, peak.jp, peak.l))
    if negative:
        lowest = min(negative, key=lambda peak: peak.prob)
        log.warning("%d peak(s) with negative probability, lowest %.3e at "
                    "j=%d j'=%d l=%d", len(negative), lowest.prob, lowest.j,
                    lowest.jp, lowest.l)

    return PeakSet(entries=tuple(entries),
                   window=(int(window[0]), int(window[-1])),
                   sum_prob=float(sum(peak.prob for peak in entries)),
                   negative=tuple(negative))


def compute_peaks(intensities, steady, solution, drive, peak_tol=1e-8,
                  geometry=None):
    """Return the loss peaks.

    :param intensities: output of :func:`compute_I`.
    :type intensities: :class:`numpy.ndarray`
    :param steady: steady state with Floquet-basis harmonics.
    :type steady: :class:`floqeels.lindblad.SteadyState`
    :param solution: Floquet solution.
    :type solution: :class:`floqeels.floquet.FloquetSolution`
    :param drive: the drive.
    :type drive: :class:`floqeels.model.DriveParams`
    :param peak_tol: peaks with ``|prob|`` below it are dropped.
    :type peak_tol: ``float``
    :param geometry: (optional) weigh each peak with the squared beam
      coupling factor of its frequency.
    :type geometry: :class:`CouplingGeometry`
    :rtype: :class:`PeakSet`
    :raise: :class:`.MissingFloquetBasis` when the steady state has no
      Floquet-basis harmonics.
    """
    window, tensor = peak_tensor(intensities, steady, solution)
    omegas = _loss_frequencies(solution, window, drive.omega_l)
    if geometry is not None:
        tensor = tensor * coupling_factor(omegas, geometry) ** 2

    return _collect(tensor, omegas, window, peak_tol)


def appendix_coefficients(solution, steady, model):
    """Return the coupling and memory coefficients with explicit sums.

    ``N[j, j', l] = Σ_{l'} f_{l'} d f_{l+l'}`` and
    ``M[j, j', l] = Σ_{j''l'} ρ̃_{j''j', l-l'} N[j, j'', l']``.
    It walks the sums one term at a time and serves as a reference for
    :func:`peak_tensor`.

    :return: a 2-item tuple, (N, M), harmonics on the last axis.
    :rtype: ``tuple``
    """
    _require_floquet_basis(steady, solution)
    l_max = solution.l_max
    coeffs = solution.coeffs
    size = 2 * l_max + 1
    n_bands = solution.n_bands
    coupling = np.zeros((n_bands, n_bands, size))
    for harmonic in range(-l_max, l_max + 1):
        for inner in range(-l_max, l_max + 1):
            if abs(harmonic + inner) <= l_max:
                coupling[:, :, harmonic + l_max] += (
                    coeffs[:, :, inner + l_max] @ model.dipole_ratio
                    @ coeffs[:, :, harmonic + inner + l_max].T)

    memory = np.zeros((n_bands, n_bands, size), dtype=complex)
    for harmonic in range(-l_max, l_max + 1):
        for inner in range(-l_max, l_max + 1):
            if abs(harmonic - inner) <= l_max:
                memory[:, :, harmonic + l_max] += (
                    coupling[:, :, inner + l_max]
                    @ steady.rho_floquet[:, :, harmonic - inner + l_max])

    return coupling, memory


def appendix_peak_tensor(solution, steady, model):
    """Return ``P[j, j', l] = Re(conj(M_{jj',-l}) N_{jj',-l})``.

    :return: the harmonics of the window and the tensor.
    :rtype: ``tuple``
    """
    coupling, memory = appendix_coefficients(solution, steady, model)
    window = _window(solution.l_max)
    index = solution.l_max - window

    return window, (memory[:, :, index].conj() * coupling[:, :, index]).real


def appendix_peaks_oracle(solution, steady, model, drive, peak_tol=1e-8):
    """Return the loss peaks computed with :func:`appendix_peak_tensor`.

    :rtype: :class:`PeakSet`
    """
    window, tensor = appendix_peak_tensor(solution, steady, model)

    return _collect(tensor, _loss_frequencies(solution, window,
                                              drive.omega_l),
                    window, peak_tol)


def suppression(x):
    """Return ``s(x) = x K₁(x)``, with s(0) = 1.

    K₁ comes from the scaled ``k1e``, so large x underflows to 0 instead of
    producing NaN.

    Usage::

      >>> from floqeels import eels
      >>> float(eels.suppression(0.0))
      1.0
    """
    x = np.abs(np.asarray(x, dtype=float))
    with np.errstate(invalid='ignore', divide='ignore', over='ignore'):
        factor = np.where(x > 0, x * special.k1e(x) * np.exp(-x), 1.0)

    return factor


def coupling_factor(omega, geometry):
    """Return the beam coupling factor of a loss frequency.

    The argument is ``x = |ω| R_e / (v γ)``.

    :param omega: loss frequencies.
    :type omega: ``float`` or :class:`numpy.ndarray`
    :param geometry: the beam geometry.
    :type geometry: :class:`CouplingGeometry`
    :rtype: ``float`` or :class:`numpy.ndarray`
    """
    x = (np.abs(np.asarray(omega, dtype=float)) * geometry.impact_parameter
         / (geometry.velocity * geometry.gamma))
    factor = suppression(x)
    if factor.ndim == 0:
        return float(factor)

    return factor


def broaden_spectrum(peaks, fwhm, omega_axis):
    """Replace every peak by a normalized Gaussian.

    :param peaks: the peaks.
    :type peaks: :class:`PeakSet`
    :param fwhm: full width at half maximum.
    :type fwhm: ``float``
    :param omega_axis: sorted frequencies.
    :type omega_axis: :class:`numpy.ndarray`
    :rtype: :class:`SpectrumGrid`
    :raise: :class:`ValueError` for a non-positive width or an unsorted
      axis.
    """
    if not fwhm > 0:
        raise ValueError("fwhm must be positive, got {}".format(fwhm))
    axis = np.asarray(omega_axis, dtype=float)
    if axis.ndim != 1 or axis.size == 0:
        raise ValueError("omega axis must be a non-empty 1D array")
    if np.any(np.diff(axis) < 0):
        raise ValueError("omega axis must be sorted")

    sigma = fwhm * FWHM_TO_SIGMA
    norm = 1.0 / (sigma * math.sqrt(2.0 * math.pi))
    gamma = np.zeros_like(axis)
    for peak in peaks:
        start, stop = np.searchsorted(
            axis, [peak.omega - _GAUSSIAN_REACH * sigma,
                   peak.omega + _GAUSSIAN_REACH * sigma])
        offset = (axis[start:stop] - peak.omega) / sigma
        gamma[start:stop] += peak.prob * norm * np.exp(-0.5 * offset ** 2)

    return SpectrumGrid(omega_axis=axis, gamma=gamma, fwhm=float(fwhm))


def spectrum_peaks(model, drive, numerics):
    """Run the whole pipeline for one parameter point.

    :rtype: :class:`PeakSet`
    """
    solution = solve_floquet(model, drive, numerics)
    steady = to_floquet_basis(
        steady_state_fourier(model, drive, numerics, solution.l_max),
        solution)

    return compute_peaks(compute_I(solution, model), steady, solution, drive,
                         numerics.peak_tol, numerics.geometry)


@should_die
def _spectrum_row(model, drive, numerics, axis, value, omega_axis, fwhm):
    if axis == 'rabi':
        model = model.with_rabi(value)
    else:
        drive = DriveParams(value)
    peaks = spectrum_peaks(model, drive, numerics)

    return broaden_spectrum(peaks, fwhm, omega_axis).gamma, peaks


def _map_row(job):
    outcome = _spectrum_row(*job, die=False)
    if isinstance(outcome, Exception):
        return "{}: {}".format(type(outcome).__name__, outcome)

    return outcome


def sweep_map(scenario, axis, values, omega_axis, threads=1, fwhm=None):
    """Compute broadened spectra along a light parameter.

    Rows are independent and run on a pool of ``threads`` processes. A row
    that fails is reported in ``failures`` and the sweep goes on.

    :param scenario: a built-in scenario name or a tuple of
      (:class:`AtomModel`, :class:`DriveParams`, :class:`NumericsConfig`).
    :param axis: any of ``rabi`` and ``omega_l``.
    :type axis: ``string``
    :param values: parameter values, one row each.
    :param omega_axis: frequencies of every row.
    :param threads: number of worker processes.
    :type threads: ``integer``
    :param fwhm: (optional) width, ``numerics.broadening_fwhm`` by default.
    :type fwhm: ``float``
    :rtype: :class:`MapResult`
    :raise: :class:`ValueError` for an unknown axis or an empty sweep.
    """
    if isinstance(scenario, str):
        if scenario not in SCENARIOS:
            raise ValueError("unknown scenario {}".format(scenario))
        model, drive, numerics = builtin_scenario(scenario)
    else:
        model, drive, numerics = scenario
    if axis not in SWEEP_AXES:
        raise ValueError("{} is not a valid sweep axis, use one of {}".format(
            axis, ', '.join(SWEEP_AXES)))
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("sweep needs at least one value")
    omega_axis = np.asarray(omega_axis, dtype=float)
    fwhm = numerics.broadening_fwhm if fwhm is None else fwhm

    jobs = [(model, drive, numerics, axis, value, omega_axis, fwhm)
            for value in values]
    gamma = np.full((values.size, omega_axis.size), np.nan)
    peaks = [None] * values.size
    failures = {}
    for index, outcome in run_across_workers(_map_row, jobs, threads):
        if isinstance(outcome, str):
            log.warning("row %d (%s=%g) failed: %s", index, axis,
                        values[index], outcome)
            failures[index] = outcome
        else:
            gamma[index], peaks[index] = outcome

    return MapResult(axis=axis, values=values, omega_axis=omega_axis,
                     gamma=gamma, peaks=tuple(peaks), failures=failures,
                     fwhm=float(fwhm))
