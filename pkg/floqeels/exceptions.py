# -*- coding: utf-8 -*-
# vim:fenc=utf-8

"""
floqeels.exceptions
~~~~~~~~~~~~~~~~~~~

This module contains the set of floqeels' exceptions with the following
hierarchy::

    FloqEelsBaseError
    ├── ConfigError
    │   ├── ConfigParseError
    │   ├── InvalidModel
    │   └── UnknownScenario
    ├── NumericalError
    │   ├── NotConverged
    │   ├── BandGroupingError
    │   └── DegenerateSteadyState
    ├── DimensionMismatch
    └── MissingFloquetBasis
"""


class FloqEelsBaseError(Exception):
    """floqeels base exception.

    :param message: error message.
    :type message: ``string``
    """
    message = ''

    def __init__(self, message=''):
        if message:
            self.message = message
        super(FloqEelsBaseError, self).__init__(self.message)


class ConfigError(FloqEelsBaseError):
    """Base class for problems with the run configuration."""
    message = 'Invalid configuration'


class ConfigParseError(ConfigError):
    """Raised when a configuration file can't be read or parsed.

    :param path: configuration file.
    :type path: ``string``
    :param reason: what went wrong.
    :type reason: ``string``
    """
    message = 'Failed to parse configuration'

    def __init__(self, path, reason):
        self.path = path
        self.reason = reason
        super(ConfigParseError, self).__init__(
            "{} {}: {}".format(self.message, path, reason))


class InvalidModel(ConfigError):
    """Raised when a value violates an invariant of the model.

    :param field: name of the offending field.
    :type field: ``string``
    :param reason: which invariant is violated.
    :type reason: ``string``
    """
    message = 'Invalid value for'

    def __init__(self, field, reason):
        self.field = field
        self.reason = reason
        super(InvalidModel, self).__init__(
            "{} {}: {}".format(self.message, field, reason))


class UnknownScenario(ConfigError):
    """Raised when a built-in scenario name is not recognized.

    :param name: requested scenario.
    :type name: ``string``
    """
    message = 'Unknown scenario'

    def __init__(self, name):
        self.name = name
        super(UnknownScenario, self).__init__(
            "{} {}".format(self.message, name))


class NumericalError(FloqEelsBaseError):
    """Base class for failures of the numerical pipeline."""
    message = 'Numerical failure'


class NotConverged(NumericalError):
    """Raised when an iterative stage does not reach its tolerance.

    :param stage: pipeline stage, ``floquet`` or ``steady``.
    :type stage: ``string``
    :param residual: last residual measured.
    :type residual: ``float``
    """
    message = 'No convergence in stage'

    def __init__(self, stage, residual):
        self.stage = stage
        self.residual = residual
        super(NotConverged, self).__init__(
            "{} {}, last residual {:.3e}".format(self.message, stage,
                                                 residual))


class BandGroupingError(NumericalError):
    """Raised when eigenpairs can't be grouped into N Floquet bands.

    :param overlap: overlap matrix between the band representatives.
    :type overlap: :class:`numpy.ndarray`
    """
    message = 'Failed to group eigenpairs into Floquet bands'

    def __init__(self, overlap, reason=''):
        self.overlap = overlap
        text = self.message
        if reason:
            text = "{}: {}".format(text, reason)
        super(BandGroupingError, self).__init__(
            "{}\noverlap matrix:\n{}".format(text, overlap))


class DegenerateSteadyState(NumericalError):
    """Raised when the steady-state nullspace is not one dimensional.

    :param singular_values: the smallest singular values of the system.
    :type singular_values: :class:`numpy.ndarray`
    """
    message = 'Steady state is not unique'

    def __init__(self, singular_values):
        self.singular_values = singular_values
        super(DegenerateSteadyState, self).__init__(
            "{}, smallest singular values {}".format(self.message,
                                                     singular_values))


class DimensionMismatch(FloqEelsBaseError):
    """Raised when two results are built with different sizes.

    :param expected: expected (N, l_max).
    :type expected: ``tuple``
    :param got: received (N, l_max).
    :type got: ``tuple``
    """
    message = 'Dimension mismatch'

    def __init__(self, expected, got):
        self.expected = expected
        self.got = got
        super(DimensionMismatch, self).__init__(
            "{}: expected (N, l_max)={} got {}".format(self.message,
                                                       expected, got))


class MissingFloquetBasis(FloqEelsBaseError):
    """Raised when peaks are requested before the Floquet transform ran."""
    message = ('Steady state has no Floquet-basis coefficients, '
               'run to_floquet_basis first')
