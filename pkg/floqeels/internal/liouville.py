# -*- coding: utf-8 -*-
#
# pylint: disable=superfluous-parens
#
"""
floqeels.internal.liouville
~~~~~~~~~~~~~~~~~~~~~~~~~~~

This module provides a class, which is used within floqeels for building the
Lindblad generator of a driven atom as matrices acting on the row-major
vectorized density matrix.

"""
import numpy as np


def _commutator(operator):
    identity = np.eye(operator.shape[0])

    return np.kron(operator, identity) - np.kron(identity, operator.T)


def _dissipator(decay):
    n_levels = decay.shape[0]
    identity = np.eye(n_levels)
    superop = np.zeros((n_levels ** 2, n_levels ** 2), dtype=complex)
    for source, target in zip(*np.nonzero(decay)):
        jump = np.zeros((n_levels, n_levels))
        jump[target, source] = 1.0
        projector = jump.T @ jump
        superop += decay[source, target] * (
            np.kron(jump, jump)
            - 0.5 * np.kron(projector, identity)
            - 0.5 * np.kron(identity, projector))

    return superop


class _Liouvillian(object):
    """Split the generator into a static part and the drive.

    ``d vec(rho)/dt = (static + cos(ω t) drive) vec(rho)`` where ``vec``
    stacks rows, index ``a * N + a'``.

    :param model: the atom.
    :type model: :class:`floqeels.model.AtomModel`
    """
    def __init__(self, model):
        self.n_levels = model.n_levels
        self.dimension = self.n_levels ** 2
        self.static = (-1j * _commutator(np.diag(model.energies))
                       + _dissipator(model.decay))
        self.drive = -1j * _commutator(model.rabi)

    def fourier_matrix(self, omega_l, l_max):
        """Return the linear system of the harmonics of the steady state.

        Block row l reads ``(static + i l ω) ρ_l + drive (ρ_{l-1} +
        ρ_{l+1}) / 2 = 0``. The unknown stacks ρ_l with index
        ``(l + l_max) * N² + a * N + a'``.

        :rtype: :class:`numpy.ndarray`
        """
        harmonics = np.arange(-l_max, l_max + 1)
        hopping = np.eye(harmonics.size, k=1) + np.eye(harmonics.size, k=-1)

        return (np.kron(np.eye(harmonics.size), self.static)
                + np.kron(np.diag(1j * harmonics * omega_l),
                          np.eye(self.dimension))
                + np.kron(hopping, 0.5 * self.drive))
