# -*- coding: utf-8 -*-
#
# pylint: disable=superfluous-parens
#
"""
floqeels.lindblad
~~~~~~~~~~~~~~~~~

This module provides the periodic steady state of the driven, decaying
atom. The density matrix is expanded as

    ρ(t) = Σ_l exp(-i l ω_L t) ρ_l

and the harmonics ρ_l are obtained either from the nullspace of the
truncated Fourier system or by propagating the master equation in time.
:func:`to_floquet_basis` expresses the result in the Floquet basis.

"""
import logging
import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from floqeels.exceptions import (DegenerateSteadyState, DimensionMismatch,
                                 MissingFloquetBasis, NotConverged)
from floqeels.floquet import solve_floquet
from floqeels.internal.harmonics import _HarmonicGrid
from floqeels.internal.liouville import _Liouvillian
from floqeels.internal.propagator import _PeriodicPropagator
from floqeels.model import DriveParams
from floqeels.utils import run_across_workers, should_die

log = logging.getLogger(__name__)

METHOD_FOURIER = 'fourier_nullspace'
METHOD_TIME = 'time_propagation'
STEADY_METHODS = [METHOD_FOURIER, METHOD_TIME]

# singular values below this fraction of the largest count as zero
_NULL_RTOL = 1e-10
_RELAXATION_TIMES = 40.0
_MIN_RELAXATION_TIMES = 20.0
_STEPS_PER_PERIOD = 1000
_MAX_STEP = 0.002
_MIN_STEPS_PER_PERIOD = 200
_EXTENSION_FACTOR = 4


@dataclass(frozen=True, eq=False)
class SteadyState(object):
    """Harmonics of the periodic steady state.

    :param rho_level: ``rho_level[a, a', l + l_max]`` in the level basis.
    :param l_max: harmonic cutoff.
    :param method: any of :data:`STEADY_METHODS`.
    :param residual: residual of the method, the Fourier system norm or the
      change between the last two sampled periods.
    :param spectral_gap: second smallest singular value of the Fourier
      system, ``None`` for time propagation.
    :param rho_floquet: same harmonics in the Floquet basis, set by
      :func:`to_floquet_basis`.
    """
    rho_level: np.ndarray
    l_max: int
    method: str
    residual: float
    spectral_gap: float = None
    rho_floquet: np.ndarray = None

    @property
    def n_levels(self):
        """Return the number of levels."""
        return self.rho_level.shape[0]

    def populations(self):
        """Return the time-averaged level populations ρ_{aa,0}."""
        diagonal = np.arange(self.n_levels)

        return self.rho_level[diagonal, diagonal, self.l_max].real

    def floquet_populations(self):
        """Return the time-averaged Floquet populations ρ̃_{jj,0}.

        :raise: :class:`.MissingFloquetBasis` before
          :func:`to_floquet_basis` ran.
        """
        if self.rho_floquet is None:
            raise MissingFloquetBasis()
        diagonal = np.arange(self.rho_floquet.shape[0])

        return self.rho_floquet[diagonal, diagonal, self.l_max].real

    def density_at(self, time, omega_l):
        """Return the level-basis density matrix at ``time``."""
        harmonics = np.arange(-self.l_max, self.l_max + 1)
        phases = np.exp(-1j * harmonics * omega_l * time)

        return self.rho_level @ phases


def dissipator(rho, decay):
    """Return the dissipative part of the master equation.

    Population flows from a to a' at rate ``decay[a, a']`` and coherence
    ρ_{aa'} decays at (Γ_a + Γ_a')/2 with Γ_a the total rate out of a.

    :rtype: :class:`numpy.ndarray`
    """
    rho = np.asarray(rho, dtype=complex)
    gain = np.diag(decay.T @ np.diag(rho))
    rates = decay.sum(axis=1)

    return gain - 0.5 * (rates[:, None] + rates[None, :]) * rho


def lindblad_rhs(rho, time, model, drive):
    """Return dρ/dt of the master equation at ``time``.

    :param rho: density matrix in the level basis.
    :type rho: :class:`numpy.ndarray`
    :param time: time.
    :type time: ``float``
    :param model: the atom.
    :type model: :class:`floqeels.model.AtomModel`
    :param drive: the drive.
    :type drive: :class:`floqeels.model.DriveParams`
    :rtype: :class:`numpy.ndarray`
    """
    rho = np.asarray(rho, dtype=complex)
    hamiltonian = (np.diag(model.energies)
                   + np.cos(drive.omega_l * time) * model.rabi)

    return (-1j * (hamiltonian @ rho - rho @ hamiltonian)
            + dissipator(rho, model.decay))


def steady_state_fourier(model, drive, numerics, l_max=None):
    """Solve the Fourier system of the steady state through its nullspace.

    The truncated system is exactly singular, its null vector is taken from
    a singular value decomposition and scaled to unit trace.

    :param l_max: (optional) harmonic cutoff, ``numerics.l_max`` when it
      isn't set.
    :type l_max: ``integer``
    :rtype: :class:`SteadyState`
    :raise: :class:`.DegenerateSteadyState` when the nullspace is not one
      dimensional.
    """
    l_max = numerics.l_max if l_max is None else int(l_max)
    n_levels = model.n_levels
    system = _Liouvillian(model).fourier_matrix(drive.omega_l, l_max)

    _, singular, vh = scipy.linalg.svd(system)
    threshold = _NULL_RTOL * max(singular[0], 1.0)
    null_dimension = int(np.count_nonzero(singular <= threshold))
    if null_dimension != 1:
        log.error("nullspace of dimension %d, threshold %.3e",
                  null_dimension, threshold)
        raise DegenerateSteadyState(singular[-3:])

    vector = vh[-1].conj()
    coeffs = vector.reshape(2 * l_max + 1, n_levels, n_levels)
    coeffs = coeffs / np.trace(coeffs[l_max])
    residual = float(np.abs(system @ coeffs.ravel()).max())
    log.debug("Fourier steady state: residual %.3e, gap %.3e",
              residual, singular[-2])

    return SteadyState(rho_level=coeffs.transpose(1, 2, 0), l_max=l_max,
                       method=METHOD_FOURIER, residual=residual,
                       spectral_gap=float(singular[-2]))


def _slowest_rate(model):
    rates = model.decay[model.decay > 0]
    if rates.size == 0:
        raise ValueError("time propagation needs at least one positive "
                         "decay rate")

    return float(rates.min())


def _sample_period(propagator, grid, state, every):
    state, samples = propagator.propagate(state, record_every=every)

    return grid.analyze(np.stack(samples, axis=-1)), state


def steady_state_time_domain(model, drive, numerics, l_max=None):
    """Propagate the master equation until it settles into the steady state.

    Integration starts from the ground level and runs with fourth-order
    Runge-Kutta until ``numerics.propagate_t_end``, 40/min(κ) by default.
    Harmonics are read from the last period and checked against the one
    before. The run is extended up to four times when they differ by more
    than ``numerics.steady_tol``.

    :rtype: :class:`SteadyState`
    :raise: :class:`.NotConverged` when the last two periods keep
      disagreeing, :class:`ValueError` for a too short integration window.
    """
    l_max = numerics.l_max if l_max is None else int(l_max)
    n_levels = model.n_levels
    rate = _slowest_rate(model)
    t_end = numerics.propagate_t_end or _RELAXATION_TIMES / rate
    if t_end < _MIN_RELAXATION_TIMES / rate:
        raise ValueError("propagate_t_end={} is below {} relaxation "
                         "times".format(t_end, _MIN_RELAXATION_TIMES))

    period = drive.period
    dt = numerics.propagate_dt or min(period / _STEPS_PER_PERIOD, _MAX_STEP)
    if dt > period / _MIN_STEPS_PER_PERIOD:
        log.warning("propagate_dt=%g is too coarse, using T/%d", dt,
                    _MIN_STEPS_PER_PERIOD)
        dt = period / _MIN_STEPS_PER_PERIOD

    grid = _HarmonicGrid(l_max)
    every = int(math.ceil(period / (dt * grid.samples)))
    liouvillian = _Liouvillian(model)
    propagator = _PeriodicPropagator(liouvillian.static, liouvillian.drive,
                                     drive.omega_l, grid.samples * every)
    one_period = propagator.period_map()

    state = np.zeros(n_levels ** 2, dtype=complex)
    state[0] = 1.0
    periods = max(int(math.ceil(t_end / period)), 2)
    limit = _EXTENSION_FACTOR * periods
    elapsed = 0
    target = periods
    while True:
        for _ in range(target - elapsed - 2):
            state = one_period @ state
        previous, state = _sample_period(propagator, grid, state, every)
        current, state = _sample_period(propagator, grid, state, every)
        elapsed = target
        residual = float(np.abs(current - previous).max())
        log.debug("time propagation: %d periods, change %.3e", elapsed,
                  residual)
        if residual <= numerics.steady_tol:
            break
        if elapsed >= limit:
            raise NotConverged('steady', residual)
        target = min(elapsed + periods, limit)

    coeffs = current.reshape(n_levels, n_levels, 2 * l_max + 1)
    coeffs = coeffs / np.trace(coeffs[:, :, l_max])

    return SteadyState(rho_level=coeffs, l_max=l_max, method=METHOD_TIME,
                       residual=residual)


def solve_steady_state(model, drive, numerics, method=METHOD_FOURIER,
                       l_max=None):
    """Dispatch to the steady-state solver named by ``method``.

    :raise: :class:`ValueError` for an unknown method.
    """
    if method == METHOD_FOURIER:
        return steady_state_fourier(model, drive, numerics, l_max)
    if method == METHOD_TIME:
        return steady_state_time_domain(model, drive, numerics, l_max)

    raise ValueError("unknown steady-state method {}, use one of {}".format(
        method, ', '.join(STEADY_METHODS)))


def _check_sizes(steady, solution):
    expected = (solution.n_bands, solution.l_max)
    got = (steady.n_levels, steady.l_max)
    if expected != got:
        raise DimensionMismatch(expected, got)


def _floquet_states(solution):
    grid = _HarmonicGrid(solution.l_max)

    # states[a, j, k] = F_j(t_k)[a]
    return grid, grid.synthesize(solution.coeffs.transpose(1, 0, 2))


def to_floquet_basis(steady, solution):
    """Express the steady state in the Floquet basis.

    ``ρ̃(t) = F(t)^† ρ(t) F(t)`` with F(t) the Floquet states as columns.
    All factors are sampled on 4 l_max + 1 points per period.

    :param steady: steady state in the level basis.
    :type steady: :class:`SteadyState`
    :param solution: Floquet solution with the same cutoff.
    :type solution: :class:`floqeels.floquet.FloquetSolution`
    :return: a copy of ``steady`` with ``rho_floquet`` set.
    :rtype: :class:`SteadyState`
    :raise: :class:`.DimensionMismatch` when sizes differ.
    """
    _check_sizes(steady, solution)
    grid, states = _floquet_states(solution)
    rho = grid.synthesize(steady.rho_level)
    projected = np.einsum('ajk,abk,bmk->jmk', states.conj(), rho, states)

    return replace(steady, rho_floquet=grid.analyze(projected))


def from_floquet_basis(rho_floquet, solution):
    """Return level-basis harmonics of Floquet-basis harmonics.

    :rtype: :class:`numpy.ndarray`
    """
    grid, states = _floquet_states(solution)
    rho = grid.synthesize(rho_floquet)
    level = np.einsum('ajk,jmk,bmk->abk', states, rho, states.conj())

    return grid.analyze(level)


@should_die
def _upper_population(model, drive, numerics, band):
    solution = solve_floquet(model, drive, numerics)
    steady = steady_state_fourier(model, drive, numerics, solution.l_max)

    populations = to_floquet_basis(steady, solution).floquet_populations()

    return float(populations[band])


def _population_job(job):
    value = _upper_population(*job, die=False)
    if isinstance(value, Exception):
        log.warning("population point failed: %s", value)
        return math.nan

    return value


def population_map(model, numerics, omega_l_values, rabi_values, band=1,
                   threads=1):
    """Return the Floquet population ρ̃_{jj,0} over a light parameter grid.

    Points that fail are NaN.

    :param band: Floquet band j.
    :type band: ``integer``
    :return: array of shape (len(rabi_values), len(omega_l_values)).
    :rtype: :class:`numpy.ndarray`
    """
    jobs = [(model.with_rabi(strength), DriveParams(omega_l), numerics, band)
            for strength in rabi_values for omega_l in omega_l_values]
    results = run_across_workers(_population_job, jobs, threads)
    values = np.array([value for _, value in results], dtype=float)

    return values.reshape(len(rabi_values), len(omega_l_values))
