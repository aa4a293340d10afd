# -*- coding: utf-8 -*- #
# pylint: disable=superfluous-parens
#

"""
floqeels.simulation
~~~~~~~~~~~~~~~~~~~

This module implements the main floqeels API.

"""
import logging
import time
from dataclasses import replace
from functools import cached_property

import numpy as np

from floqeels.eels import broaden_spectrum, compute_I, compute_peaks, sweep_map
from floqeels.exceptions import FloqEelsBaseError
from floqeels.floquet import solve_floquet, stark_shift
from floqeels.lindblad import (METHOD_FOURIER, solve_steady_state,
                               to_floquet_basis)
from floqeels.model import (CouplingGeometry, DriveParams, NumericsConfig,
                            builtin_scenario, load_config)
from floqeels.oracle import run_full_validation

log = logging.getLogger(__name__)

STAGE_FLOQUET = 'floquet'
STAGE_STEADY = 'steady'
STAGE_INTENSITIES = 'intensities'
STAGE_PEAKS = 'peaks'
STAGE_SPECTRUM = 'spectrum'
STAGE_MAP = 'map'
STAGE_VALIDATE = 'validate'


class Simulation(object):
    """Build a user-created :class:`Simulation` for a driven atom.

    This is the main class to compute the energy-loss spectrum of an atom
    under continuous illumination. Every stage of the pipeline runs on first
    access and its result is kept, thus asking for the peaks after the
    Floquet solution reuses it.

    :param model: the atom.
    :type model: :class:`floqeels.model.AtomModel`
    :param drive: the drive.
    :type drive: :class:`floqeels.model.DriveParams`
    :param numerics: (optional) numerical controls.
    :type numerics: :class:`floqeels.model.NumericsConfig`
    :return: a user-created :class:`Simulation` object.
    :rtype: :class:`Simulation`

    Usage::

      >>> from floqeels.simulation import Simulation
      >>> sim = Simulation.from_scenario('two_level', rabi=0.4, omega_l=1.2)
      >>> sim.floquet.n_bands
      2
      >>> len(sim.peaks) > 0
      True
    """

    def __init__(self, model, drive, numerics=None):
        self.model = model
        self.drive = drive
        self.numerics = numerics or NumericsConfig()
        self.timings = {}
        self.failed_stage = None

    @classmethod
    def from_config(cls, path, rabi=None, omega_l=None):
        """Build a :class:`Simulation` out of a configuration file.

        :param path: configuration file.
        :type path: ``string``
        :param rabi: (optional) overrides the Rabi frequency.
        :type rabi: ``float``
        :param omega_l: (optional) overrides the light frequency.
        :type omega_l: ``float``
        :rtype: :class:`Simulation`
        """
        return cls(*load_config(path)).with_overrides(rabi, omega_l)

    @classmethod
    def from_scenario(cls, name, rabi=None, omega_l=None, numerics=None):
        """Build a :class:`Simulation` for a built-in scenario.

        :param name: scenario name.
        :type name: ``string``
        :rtype: :class:`Simulation`
        """
        return cls(*builtin_scenario(name, rabi=rabi, omega_l=omega_l,
                                     numerics=numerics))

    def with_overrides(self, rabi=None, omega_l=None, geometry=None):
        """Return a new :class:`Simulation` with some light parameters set.

        :param rabi: (optional) new Rabi frequency.
        :type rabi: ``float``
        :param omega_l: (optional) new light frequency.
        :type omega_l: ``float``
        :param geometry: (optional) new beam geometry.
        :type geometry: :class:`floqeels.model.CouplingGeometry`
        :rtype: :class:`Simulation`
        """
        model = self.model if rabi is None else self.model.with_rabi(rabi)
        drive = self.drive if omega_l is None else DriveParams(omega_l)
        numerics = self.numerics
        if geometry is not None:
            if not isinstance(geometry, CouplingGeometry):
                geometry = CouplingGeometry(*geometry)
            numerics = replace(numerics, geometry=geometry)

        return Simulation(model, drive, numerics)

    def _timed(self, stage, function, *args, **kwargs):
        start = time.perf_counter()
        try:
            result = function(*args, **kwargs)
        except FloqEelsBaseError as error:
            self.failed_stage = stage
            log.error("stage %s failed: %s", stage, error)
            raise
        self.timings[stage] = time.perf_counter() - start
        log.info("stage %s finished in %.3fs", stage, self.timings[stage])

        return result

    @cached_property
    def floquet(self):
        """Return the Floquet solution.

        :rtype: :class:`floqeels.floquet.FloquetSolution`
        """
        return self._timed(STAGE_FLOQUET, solve_floquet, self.model,
                           self.drive, self.numerics)

    def steady_state(self, method=METHOD_FOURIER):
        """Return the steady state with Floquet-basis harmonics.

        :param method: any of :data:`floqeels.lindblad.STEADY_METHODS`.
        :type method: ``string``
        :rtype: :class:`floqeels.lindblad.SteadyState`
        """
        if method == METHOD_FOURIER:
            return self.steady

        return self._steady(method)

    def _steady(self, method):
        solution = self.floquet
        steady = self._timed(STAGE_STEADY, solve_steady_state, self.model,
                             self.drive, self.numerics, method,
                             solution.l_max)

        return to_floquet_basis(steady, solution)

    @cached_property
    def steady(self):
        """Return the Fourier-nullspace steady state in both bases.

        :rtype: :class:`floqeels.lindblad.SteadyState`
        """
        return self._steady(METHOD_FOURIER)

    @cached_property
    def intensities(self):
        """Return the Floquet intensities I_{jj'l}.

        :rtype: :class:`numpy.ndarray`
        """
        return self._timed(STAGE_INTENSITIES, compute_I, self.floquet,
                           self.model)

    @cached_property
    def peaks(self):
        """Return the loss peaks.

        :rtype: :class:`floqeels.eels.PeakSet`
        """
        return self._timed(STAGE_PEAKS, compute_peaks, self.intensities,
                           self.steady, self.floquet, self.drive,
                           self.numerics.peak_tol, self.numerics.geometry)

    def spectrum(self, omega_axis, fwhm=None):
        """Return the broadened spectrum on ``omega_axis``.

        :param omega_axis: sorted frequencies.
        :type omega_axis: :class:`numpy.ndarray`
        :param fwhm: (optional) width, ``numerics.broadening_fwhm`` by
          default.
        :type fwhm: ``float``
        :rtype: :class:`floqeels.eels.SpectrumGrid`
        """
        fwhm = self.numerics.broadening_fwhm if fwhm is None else fwhm

        return self._timed(STAGE_SPECTRUM, broaden_spectrum, self.peaks, fwhm,
                           np.asarray(omega_axis, dtype=float))

    def reference(self):
        """Return the same :class:`Simulation` with the light switched off.

        :rtype: :class:`Simulation`
        """
        return Simulation(self.model.with_rabi(0.0), self.drive,
                          self.numerics)

    def stark_shift(self):
        """Return the dynamical Stark shift of a two-level atom.

        :rtype: ``float``
        """
        return stark_shift(self.floquet, self.model)

    def sweep(self, axis, values, omega_axis, threads=1, fwhm=None):
        """Return spectra along a sweep of the light around this point.

        :param axis: any of ``rabi`` and ``omega_l``.
        :type axis: ``string``
        :param values: parameter values, one row each.
        :param omega_axis: frequencies of every row.
        :param threads: number of worker processes.
        :type threads: ``integer``
        :rtype: :class:`floqeels.eels.MapResult`
        """
        return self._timed(STAGE_MAP, sweep_map,
                           (self.model, self.drive, self.numerics), axis,
                           values, omega_axis, threads=threads, fwhm=fwhm)

    def validate(self, threads=1, label=None):
        """Run the validation checks on this configuration.

        :param label: (optional) scenario name of the report, a built-in
          name adds the checks of that scenario.
        :type label: ``string``
        :rtype: :class:`floqeels.oracle.ValidationReport`
        """
        return self._timed(STAGE_VALIDATE, run_full_validation,
                           (self.model, self.drive, self.numerics),
                           threads=threads, label=label)
