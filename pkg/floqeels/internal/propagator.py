# -*- coding: utf-8 -*-
#
# pylint: disable=superfluous-parens
#
"""
floqeels.internal.propagator
~~~~~~~~~~~~~~~~~~~~~~~~~~~~

This module provides a class, which is used within floqeels for integrating
a linear equation with a periodic generator using the classic fourth-order
Runge-Kutta scheme.

"""
import math

import numpy as np


class _PeriodicPropagator(object):
    """Integrate ``dx/dt = (static + cos(ω t) drive) x`` over whole periods.

    Steps always start on the grid ``t = k T / steps``, thus any state can
    be advanced by a full period with the matrix returned by
    :meth:`period_map`.

    :param static: time independent part of the generator.
    :param drive: part of the generator multiplied by ``cos(ω t)``.
    :param omega_l: drive frequency.
    :type omega_l: ``float``
    :param steps: RK4 steps per period.
    :type steps: ``integer``
    """
    def __init__(self, static, drive, omega_l, steps):
        self.static = static
        self.drive = drive
        self.steps = int(steps)
        self.period = 2 * math.pi / omega_l
        self.dt = self.period / self.steps

        starts = np.arange(self.steps) * self.dt
        self._start = np.cos(omega_l * starts)
        self._middle = np.cos(omega_l * (starts + 0.5 * self.dt))
        self._end = np.cos(omega_l * (starts + self.dt))

    def step(self, state, index):
        """Advance ``state`` by one step starting at ``t = index * dt``."""
        dt = self.dt
        middle = self.static + self._middle[index] * self.drive
        k1 = (self.static + self._start[index] * self.drive) @ state
        k2 = middle @ (state + 0.5 * dt * k1)
        k3 = middle @ (state + 0.5 * dt * k2)
        k4 = (self.static + self._end[index] * self.drive) @ (state + dt * k3)

        return state + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)

    def propagate(self, state, record_every=0):
        """Advance ``state`` by one period.

        :param state: vector or matrix of column vectors at ``t = 0 mod T``.
        :param record_every: (optional) keep the state every that many
          steps, the state at the start of the period included.
        :type record_every: ``integer``
        :return: final state and list of recorded states.
        :rtype: ``tuple``
        """
        samples = []
        for index in range(self.steps):
            if record_every and index % record_every == 0:
                samples.append(state)
            state = self.step(state, index)

        return state, samples

    def period_map(self):
        """Return the one-period map of the integrator."""
        final, _ = self.propagate(np.eye(self.static.shape[0], dtype=complex))

        return final
