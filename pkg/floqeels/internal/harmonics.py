# -*- coding: utf-8 -*-
#
# pylint: disable=superfluous-parens
#
"""
floqeels.internal.harmonics
~~~~~~~~~~~~~~~~~~~~~~~~~~~

This module provides a class, which is used within floqeels for moving
periodic quantities between harmonic coefficients and samples over one
drive period.

"""
import numpy as np


class _HarmonicGrid(object):
    """Sampling grid for harmonics l in [-l_max, l_max].

    A quantity with coefficients ``c_l`` is sampled as
    ``x(t_k) = sum_l exp(-i l ω t_k) c_l`` with ``t_k = k T / samples``.

    The default of ``4 l_max + 1`` samples resolves the product of two such
    quantities without aliasing.

    :param l_max: harmonic cutoff.
    :type l_max: ``integer``
    :param samples: (optional) number of samples per period.
    :type samples: ``integer``
    """
    def __init__(self, l_max, samples=None):
        self.l_max = int(l_max)
        self.samples = 4 * self.l_max + 1 if samples is None else int(samples)
        if self.samples < 2 * self.l_max + 1:
            raise ValueError("{} samples can't resolve {} harmonics".format(
                self.samples, 2 * self.l_max + 1))

    def times(self, omega_l):
        """Return the sampling times over one period of the drive."""
        return np.arange(self.samples) * (2 * np.pi / omega_l) / self.samples

    def synthesize(self, coeffs):
        """Evaluate coefficients on the grid.

        :param coeffs: harmonics on the last axis, l = -l_max first.
        :type coeffs: :class:`numpy.ndarray`
        :return: samples on the last axis.
        :rtype: :class:`numpy.ndarray`
        """
        coeffs = np.asarray(coeffs, dtype=complex)
        padded = np.zeros(coeffs.shape[:-1] + (self.samples,), dtype=complex)
        padded[..., :self.l_max + 1] = coeffs[..., self.l_max:]
        if self.l_max:
            padded[..., self.samples - self.l_max:] = coeffs[..., :self.l_max]

        return np.fft.fft(padded, axis=-1)

    def analyze(self, values):
        """Recover harmonics l in [-l_max, l_max] from samples.

        :param values: samples on the last axis.
        :type values: :class:`numpy.ndarray`
        :return: harmonics on the last axis, l = -l_max first.
        :rtype: :class:`numpy.ndarray`
        """
        spectrum = np.fft.ifft(np.asarray(values, dtype=complex), axis=-1)

        return np.concatenate(
            (spectrum[..., self.samples - self.l_max:],
             spectrum[..., :self.l_max + 1]), axis=-1)
