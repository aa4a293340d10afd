# -*- coding: utf-8 -*-
#
# pylint: disable=superfluous-parens
#
"""
floqeels.model
~~~~~~~~~~~~~~

This module provides the description of the driven atom and of the run
configuration: :class:`AtomModel`, :class:`DriveParams`,
:class:`NumericsConfig` and :class:`CouplingGeometry`. It also loads and
writes JSON configuration files and builds the built-in scenarios.

All frequencies are angular frequencies with ħ = 1, expressed in units of the
transition between the ground level and the top level.

"""
import json
import logging
import math
from dataclasses import dataclass, fields, replace

import numpy as np

from floqeels.exceptions import (ConfigParseError, InvalidModel,
                                 UnknownScenario)

log = logging.getLogger(__name__)

SCENARIO_TWO_LEVEL = 'two_level'
SCENARIO_LAMBDA_A = 'lambda_a'
SCENARIO_LAMBDA_B = 'lambda_b'
SCENARIO_LAMBDA_C = 'lambda_c'

SCENARIOS = [
    SCENARIO_TWO_LEVEL,
    SCENARIO_LAMBDA_A,
    SCENARIO_LAMBDA_B,
    SCENARIO_LAMBDA_C,
]

DEFAULT_L_MAX = 20
DEFAULT_L_MAX_CAP = 64
DEFAULT_EIG_TOL = 1e-10
DEFAULT_STEADY_TOL = 1e-8
DEFAULT_PEAK_TOL = 1e-8
DEFAULT_FWHM = 0.01
DEFAULT_DECAY = 0.01

# level indices of the Λ atom
_G, _M, _E = 0, 1, 2

# (transitions coupled to light, transitions coupled to the electron)
_LAMBDA_COUPLINGS = {
    SCENARIO_LAMBDA_A: ([(_G, _E), (_M, _E)], [(_G, _E), (_M, _E)]),
    SCENARIO_LAMBDA_B: ([(_M, _E)], [(_G, _E)]),
    SCENARIO_LAMBDA_C: ([(_G, _E)], [(_M, _E)]),
}

_SCENARIO_DEFAULTS = {
    SCENARIO_TWO_LEVEL: {'rabi': 0.4, 'omega_l': 1.2},
    SCENARIO_LAMBDA_A: {'rabi': 0.3, 'omega_l': 0.5},
    SCENARIO_LAMBDA_B: {'rabi': 0.3, 'omega_l': 0.5},
    SCENARIO_LAMBDA_C: {'rabi': 0.3, 'omega_l': 0.5},
}


def _finite_number(name, value, positive=False, nonnegative=False):
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise InvalidModel(name, "{!r} is not a number".format(value))
    if not math.isfinite(number):
        raise InvalidModel(name, "must be finite")
    if positive and number <= 0:
        raise InvalidModel(name, "must be positive, got {}".format(number))
    if nonnegative and number < 0:
        raise InvalidModel(name, "must not be negative, got {}".format(number))

    return number


def _level_matrix(name, value, n_levels, symmetric=False,
                  nonnegative=False):
    try:
        matrix = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidModel(name, "not a numeric matrix ({})".format(exc))

    if matrix.shape != (n_levels, n_levels):
        raise InvalidModel(name, "expected shape {}, got {}".format(
            (n_levels, n_levels), matrix.shape))
    if not np.all(np.isfinite(matrix)):
        raise InvalidModel(name, "all entries must be finite")
    if np.any(np.diag(matrix) != 0):
        raise InvalidModel(name, "diagonal entries must be zero")
    if symmetric and not np.array_equal(matrix, matrix.T):
        raise InvalidModel(name, "matrix must be symmetric")
    if nonnegative and np.any(matrix < 0):
        raise InvalidModel(name, "rates must not be negative")

    matrix.setflags(write=False)
    return matrix


def _pattern(pairs, n_levels):
    matrix = np.zeros((n_levels, n_levels))
    for first, second in pairs:
        matrix[first, second] = matrix[second, first] = 1.0

    return matrix


def downward_decay(n_levels, rate=DEFAULT_DECAY):
    """Return a decay matrix with ``rate`` on every downward channel.

    :param n_levels: number of levels.
    :type n_levels: ``integer``
    :param rate: decay rate of each channel.
    :type rate: ``float``
    :rtype: :class:`numpy.ndarray`
    """
    return np.tril(np.full((n_levels, n_levels), float(rate)), k=-1)


@dataclass(frozen=True, eq=False)
class AtomModel(object):
    """Build a :class:`AtomModel` for an N-level atom.

    Arrays are copied and made read-only, thus instances can be shared
    across workers.

    :param energies: level energies, sorted ascending.
    :type energies: ``list`` of ``float``
    :param rabi: symmetric Rabi matrix with zero diagonal.
    :param dipole_ratio: symmetric dipole matrix, normalized to the
      reference dipole, with zero diagonal.
    :param decay: ``decay[a][b]`` is the rate of the jump a -> b.
    :param light_mask: (optional) coupling pattern of the light, used when
      the Rabi matrix is rescaled. Defaults to the nonzero pattern of
      ``rabi``, or to every transition when ``rabi`` is all zero.
    :param names: (optional) level labels.
    :type names: ``tuple`` of ``string``
    :raise: :class:`.InvalidModel` when an invariant is violated.
    """
    energies: np.ndarray
    rabi: np.ndarray
    dipole_ratio: np.ndarray
    decay: np.ndarray
    light_mask: np.ndarray = None
    names: tuple = None

    def __post_init__(self):
        try:
            energies = np.array(self.energies, dtype=float)
        except (TypeError, ValueError) as exc:
            raise InvalidModel('energies', str(exc))
        if energies.ndim != 1 or energies.size < 2:
            raise InvalidModel('energies', "at least two levels are required")
        if not np.all(np.isfinite(energies)):
            raise InvalidModel('energies', "all entries must be finite")
        if np.any(np.diff(energies) < 0):
            raise InvalidModel('energies', "must be sorted ascending")
        if energies[1] <= energies[0]:
            raise InvalidModel('energies', "first transition must be positive")
        energies.setflags(write=False)

        n_levels = energies.size
        rabi = _level_matrix('rabi', self.rabi, n_levels, symmetric=True)
        dipole = _level_matrix('dipole_ratio', self.dipole_ratio, n_levels,
                               symmetric=True)
        decay = _level_matrix('decay', self.decay, n_levels,
                              nonnegative=True)

        if self.light_mask is None:
            if np.any(rabi):
                mask = (rabi != 0).astype(float)
            else:
                mask = 1.0 - np.eye(n_levels)
        else:
            mask = self.light_mask
        mask = _level_matrix('light_mask', mask, n_levels, symmetric=True)

        if self.names is None:
            names = tuple(str(index) for index in range(n_levels))
        else:
            names = tuple(str(name) for name in self.names)
        if len(names) != n_levels:
            raise InvalidModel('names', "expected {} labels, got {}".format(
                n_levels, len(names)))

        for name, value in (('energies', energies), ('rabi', rabi),
                            ('dipole_ratio', dipole), ('decay', decay),
                            ('light_mask', mask), ('names', names)):
            object.__setattr__(self, name, value)

        if abs(self.omega_0 - 1.0) > 1e-12:
            log.warning("frequencies are expected in units of the top "
                        "transition, which is %g here", self.omega_0)

    def __eq__(self, other):
        if not isinstance(other, AtomModel):
            return NotImplemented

        return (self.names == other.names and
                all(np.array_equal(getattr(self, name), getattr(other, name))
                    for name in ('energies', 'rabi', 'dipole_ratio', 'decay',
                                 'light_mask')))

    @property
    def n_levels(self):
        """Return the number of levels.

        :rtype: ``integer``
        """
        return self.energies.size

    @property
    def omega_0(self):
        """Return the gap between the ground level and the top level.

        :rtype: ``float``
        """
        return float(self.energies[-1] - self.energies[0])

    @property
    def rabi_strength(self):
        """Return the largest Rabi frequency.

        :rtype: ``float``
        """
        return float(np.abs(self.rabi).max())

    def with_rabi(self, strength):
        """Return a copy whose largest Rabi frequency equals ``strength``.

        The ratios between couplings are kept. An undriven model takes its
        pattern from ``light_mask``.

        :param strength: new coupling strength.
        :type strength: ``float``
        :rtype: :class:`AtomModel`
        """
        strength = _finite_number('rabi', strength, nonnegative=True)
        current = self.rabi_strength
        if current > 0:
            pattern = self.rabi / current
        else:
            pattern = self.light_mask

        return replace(self, rabi=pattern * strength)


@dataclass(frozen=True)
class DriveParams(object):
    """Build a :class:`DriveParams` for a monochromatic drive.

    :param omega_l: light frequency.
    :type omega_l: ``float``
    """
    omega_l: float

    def __post_init__(self):
        object.__setattr__(self, 'omega_l',
                           _finite_number('drive.omega_l', self.omega_l,
                                          positive=True))

    @property
    def period(self):
        """Return the drive period 2π/ω_L.

        :rtype: ``float``
        """
        return 2 * math.pi / self.omega_l


@dataclass(frozen=True)
class CouplingGeometry(object):
    """Beam geometry of the electron.

    :param impact_parameter: distance between beam and atom in units of
      c/ω₀.
    :type impact_parameter: ``float``
    :param velocity: electron speed as a fraction of c.
    :type velocity: ``float``
    """
    impact_parameter: float
    velocity: float

    def __post_init__(self):
        object.__setattr__(self, 'impact_parameter',
                           _finite_number('geometry.impact_parameter',
                                          self.impact_parameter,
                                          nonnegative=True))
        velocity = _finite_number('geometry.velocity', self.velocity,
                                  positive=True)
        if velocity >= 1:
            raise InvalidModel('geometry.velocity',
                               "must be below the speed of light")
        object.__setattr__(self, 'velocity', velocity)

    @property
    def gamma(self):
        """Return the Lorentz factor.

        :rtype: ``float``
        """
        return 1.0 / math.sqrt(1.0 - self.velocity ** 2)


@dataclass(frozen=True)
class NumericsConfig(object):
    """Numerical controls of a run.

    ``propagate_t_end`` and ``propagate_dt`` set to ``None`` let the
    time-domain solver pick 40/min(κ) and one thousandth of a period.
    """
    l_max: int = DEFAULT_L_MAX
    l_max_cap: int = DEFAULT_L_MAX_CAP
    eig_tol: float = DEFAULT_EIG_TOL
    steady_tol: float = DEFAULT_STEADY_TOL
    peak_tol: float = DEFAULT_PEAK_TOL
    propagate_t_end: float = None
    propagate_dt: float = None
    broadening_fwhm: float = DEFAULT_FWHM
    geometry: CouplingGeometry = None

    def __post_init__(self):
        for name in ('l_max', 'l_max_cap'):
            value = getattr(self, name)
            integral = isinstance(value, (int, np.integer))
            if isinstance(value, bool) or not integral or value < 1:
                raise InvalidModel("numerics.{}".format(name),
                                   "must be an integer >= 1, got {!r}".format(
                                       value))
            object.__setattr__(self, name, int(value))
        if self.l_max_cap < self.l_max:
            raise InvalidModel('numerics.l_max_cap',
                               "must not be below l_max={}".format(self.l_max))

        for name in ('eig_tol', 'steady_tol', 'peak_tol', 'broadening_fwhm'):
            object.__setattr__(self, name, _finite_number(
                "numerics.{}".format(name), getattr(self, name),
                positive=True))
        for name in ('propagate_t_end', 'propagate_dt'):
            if getattr(self, name) is not None:
                object.__setattr__(self, name, _finite_number(
                    "numerics.{}".format(name), getattr(self, name),
                    positive=True))

        if (self.geometry is not None and
                not isinstance(self.geometry, CouplingGeometry)):
            raise InvalidModel('geometry', "expected a CouplingGeometry")

    def to_dict(self):
        """Return the options as a JSON friendly dictionary.

        The geometry is left out, it has its own section in a config file.

        :rtype: ``dict``
        """
        return {item.name: getattr(self, item.name) for item in fields(self)
                if item.name != 'geometry'}


NUMERICS_OPTIONS = [item.name for item in fields(NumericsConfig)
                    if item.name != 'geometry']


def config_from_dict(data):
    """Build the run configuration out of a parsed JSON document.

    :param data: the parsed document.
    :type data: ``dict``
    :return: a 3-item tuple, (:class:`AtomModel`, :class:`DriveParams`,
      :class:`NumericsConfig`)
    :rtype: ``tuple``
    :raise: :class:`.InvalidModel` when a value violates an invariant.
    """
    if not isinstance(data, dict):
        raise InvalidModel('config', "top level must be an object")

    levels = data.get('levels')
    if not isinstance(levels, list) or len(levels) < 2:
        raise InvalidModel('levels', "at least two levels are required")

    energies = []
    names = []
    for index, level in enumerate(levels):
        if not isinstance(level, dict) or 'energy' not in level:
            raise InvalidModel("levels[{}]".format(index),
                               "expected an object with an energy")
        energies.append(_finite_number("levels[{}].energy".format(index),
                                       level['energy']))
        names.append(level.get('name', str(index)))

    n_levels = len(levels)
    model = AtomModel(
        energies=energies,
        rabi=data.get('rabi', np.zeros((n_levels, n_levels))),
        dipole_ratio=data.get('dipole_ratio', 1.0 - np.eye(n_levels)),
        decay=data.get('decay', downward_decay(n_levels)),
        light_mask=data.get('light_mask'),
        names=tuple(names),
    )

    drive = data.get('drive')
    if not isinstance(drive, dict) or 'omega_l' not in drive:
        raise InvalidModel('drive.omega_l', "missing")
    drive = DriveParams(omega_l=drive['omega_l'])

    options = data.get('numerics') or {}
    if not isinstance(options, dict):
        raise InvalidModel('numerics', "expected an object")
    for key in options:
        if key not in NUMERICS_OPTIONS:
            raise InvalidModel("numerics.{}".format(key), "unknown option")

    geometry = data.get('geometry')
    if geometry is not None:
        if not isinstance(geometry, dict):
            raise InvalidModel('geometry', "expected an object")
        try:
            geometry = CouplingGeometry(**geometry)
        except TypeError as exc:
            raise InvalidModel('geometry', str(exc))

    numerics = NumericsConfig(geometry=geometry, **options)

    return model, drive, numerics


def load_config(path):
    """Load and validate a JSON configuration file.

    :param path: configuration file.
    :type path: ``string``
    :return: a 3-item tuple, (:class:`AtomModel`, :class:`DriveParams`,
      :class:`NumericsConfig`)
    :rtype: ``tuple``
    :raise: :class:`.ConfigParseError` when the file can't be read or
      parsed, :class:`.InvalidModel` when a value violates an invariant.

    Usage::

      >>> from floqeels import model
      >>> atom, drive, numerics = model.load_config('tools/two_level.json')
      >>> atom.n_levels, drive.omega_l, numerics.l_max
      (2, 1.2, 20)
    """
    try:
        with open(path) as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ConfigParseError(path, exc.strerror or str(exc))
    except ValueError as exc:
        raise ConfigParseError(path, str(exc))

    log.debug("loaded configuration %s", path)
    return config_from_dict(data)


def dump_config(model, drive, numerics):
    """Serialize a run configuration to the JSON schema of config files.

    :rtype: ``dict``
    """
    data = {
        'levels': [{'name': name, 'energy': float(energy)}
                   for name, energy in zip(model.names, model.energies)],
        'rabi': model.rabi.tolist(),
        'dipole_ratio': model.dipole_ratio.tolist(),
        'decay': model.decay.tolist(),
        'light_mask': model.light_mask.tolist(),
        'drive': {'omega_l': drive.omega_l},
        'numerics': numerics.to_dict(),
    }
    if numerics.geometry is not None:
        data['geometry'] = {
            'impact_parameter': numerics.geometry.impact_parameter,
            'velocity': numerics.geometry.velocity,
        }

    return data


def save_config(path, model, drive, numerics):
    """Write a run configuration to a JSON file.

    :param path: output file.
    :type path: ``string``
    """
    with open(path, 'w') as handle:
        json.dump(dump_config(model, drive, numerics), handle, indent=2,
                  sort_keys=True)
        handle.write('\n')


def builtin_scenario(name, rabi=None, omega_l=None, decay=DEFAULT_DECAY,
                     numerics=None):
    """Build one of the canonical scenarios.

    * ``two_level``: ground and excited level one ω₀ apart.
    * ``lambda_a``: Λ atom with g↔e and m↔e coupled to light and electron.
    * ``lambda_b``: electron couples g↔e only, light couples m↔e only.
    * ``lambda_c``: light couples g↔e only, electron couples m↔e only.

    The Λ atom has ε = [0, 0.7, 1] for (g, m, e) and equal decay rates on
    e→g, e→m and m→g.

    :param name: any of :data:`SCENARIOS`.
    :type name: ``string``
    :param rabi: (optional) Rabi frequency of every light-coupled transition.
    :type rabi: ``float``
    :param omega_l: (optional) light frequency.
    :type omega_l: ``float``
    :param decay: decay rate of every channel.
    :type decay: ``float``
    :param numerics: (optional) numerical controls, defaults are used when
      it isn't set.
    :type numerics: :class:`NumericsConfig`
    :return: a 3-item tuple, (:class:`AtomModel`, :class:`DriveParams`,
      :class:`NumericsConfig`)
    :rtype: ``tuple``
    :raise: :class:`.UnknownScenario` when name is not recognized.

    Usage::

      >>> from floqeels import model
      >>> atom, drive, _ = model.builtin_scenario('lambda_b')
      >>> atom.rabi[2, 0], atom.dipole_ratio[2, 1]
      (0.0, 0.0)
    """
    if name not in SCENARIOS:
        raise UnknownScenario(name)

    defaults = _SCENARIO_DEFAULTS[name]
    strength = defaults['rabi'] if rabi is None else rabi
    strength = _finite_number('rabi', strength, nonnegative=True)
    decay = _finite_number('decay', decay, nonnegative=True)

    if name == SCENARIO_TWO_LEVEL:
        light = electron = _pattern([(0, 1)], 2)
        energies = [0.0, 1.0]
        decay_matrix = downward_decay(2, decay)
        names = ('g', 'e')
    else:
        light_pairs, electron_pairs = _LAMBDA_COUPLINGS[name]
        light = _pattern(light_pairs, 3)
        electron = _pattern(electron_pairs, 3)
        energies = [0.0, 0.7, 1.0]
        decay_matrix = downward_decay(3, decay)
        names = ('g', 'm', 'e')

    model = AtomModel(energies=energies, rabi=strength * light,
                      dipole_ratio=electron, decay=decay_matrix,
                      light_mask=light, names=names)
    drive = DriveParams(defaults['omega_l'] if omega_l is None else omega_l)

    return model, drive, numerics or NumericsConfig()
