# -*- coding: utf-8 -*-
#
# pylint: disable=superfluous-parens
#
"""
floqeels.floquet
~~~~~~~~~~~~~~~~

This module provides the Floquet solver for a driven atom without
dissipation. A Floquet state reads

    |ψ_j(t)⟩ = exp(-i ω̃_j t) Σ_l exp(-i l ω_L t) Σ_a f_{jal} |a⟩

and the coefficients follow from the eigenproblem of the truncated
quasienergy matrix :func:`build_quasienergy_matrix`. The real-symmetric
matrix gives real coefficients, which the rest of the package relies on.

"""
import logging
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from floqeels.exceptions import BandGroupingError, NotConverged
from floqeels.utils import fold, folded_distance

log = logging.getLogger(__name__)

# Eigenpairs with less weight than this on the outermost harmonics are fully
# resolved by the truncation and must match a band.
_RESOLVED_EDGE_WEIGHT = 1e-12
_BAND_MATCH_TOLERANCE = 1e-6
_ORTHOGONALITY_TOLERANCE = 1e-6


def _shift(block, shift):
    """Return g with g[..., l] = block[..., l + shift], zero padded."""
    shifted = np.zeros_like(block)
    size = block.shape[-1]
    if abs(shift) >= size:
        return shifted
    if shift >= 0:
        shifted[..., :size - shift] = block[..., shift:]
    else:
        shifted[..., -shift:] = block[..., :size + shift]

    return shifted


@dataclass(frozen=True, eq=False)
class FloquetSolution(object):
    """Quasienergies and Fourier coefficients of the Floquet states.

    :param omega_tilde: folded quasienergies, one per band.
    :param coeffs: real coefficients ``coeffs[j, a, l + l_max]``.
    :param l_max: truncation the solution was obtained with.
    :param omega_l: drive frequency.
    :param converged: whether the quasienergies agree with the next
      truncation.
    :param residual: largest residual of the defining recursion.
    :param delta: change of the quasienergies against the next truncation.
    :param band_index: band of every eigenpair of the truncated matrix.
    """
    omega_tilde: np.ndarray
    coeffs: np.ndarray
    l_max: int
    omega_l: float
    converged: bool = True
    residual: float = 0.0
    delta: float = 0.0
    band_index: np.ndarray = None

    @property
    def n_bands(self):
        """Return the number of Floquet bands."""
        return self.omega_tilde.size

    @property
    def harmonics(self):
        """Return the harmonic indices l in [-l_max, l_max]."""
        return np.arange(-self.l_max, self.l_max + 1)

    def flipped(self, band):
        """Return a copy with the sign of band ``band`` reversed."""
        coeffs = self.coeffs.copy()
        coeffs[band] *= -1

        return replace(self, coeffs=coeffs)

    def shifted(self, band, shift):
        """Return a copy where band ``band`` is replaced by a replica.

        The replica has coefficients ``f_{a, l + shift}`` and quasienergy
        ``ω̃ + shift ω_L``. Weight shifted past the truncation is lost.
        """
        coeffs = self.coeffs.copy()
        coeffs[band] = _shift(self.coeffs[band], shift)
        omega_tilde = self.omega_tilde.copy()
        omega_tilde[band] += shift * self.omega_l

        return replace(self, coeffs=coeffs, omega_tilde=omega_tilde)

    def states_at(self, time):
        """Return the Floquet states at ``time`` as columns.

        :rtype: :class:`numpy.ndarray` of shape (levels, bands)
        """
        phases = np.exp(-1j * self.harmonics * self.omega_l * time)

        return np.einsum('jal,l->aj', self.coeffs, phases)


def build_quasienergy_matrix(model, drive, l_max):
    """Build the truncated quasienergy matrix.

    Row ``(l + l_max) * N + a`` holds ``ε_a - l ω_L`` on the diagonal and
    couples to harmonics l ± 1 through ``Ω / 2``.

    :param model: the atom.
    :type model: :class:`floqeels.model.AtomModel`
    :param drive: the drive.
    :type drive: :class:`floqeels.model.DriveParams`
    :param l_max: harmonic cutoff.
    :type l_max: ``integer``
    :return: real symmetric matrix of size ``N (2 l_max + 1)``.
    :rtype: :class:`numpy.ndarray`
    :raise: :class:`ValueError` when l_max is below 1.

    Usage::

      >>> from floqeels import floquet, model
      >>> atom, drive, _ = model.builtin_scenario('two_level', rabi=0.4)
      >>> floquet.build_quasienergy_matrix(atom, drive, 1).shape
      (6, 6)
    """
    if int(l_max) < 1:
        raise ValueError("l_max must be at least 1, got {}".format(l_max))

    harmonics = np.arange(-l_max, l_max + 1)
    n_levels = model.n_levels
    diagonal = (np.kron(np.ones(harmonics.size), model.energies)
                - np.kron(harmonics * drive.omega_l, np.ones(n_levels)))
    hopping = np.eye(harmonics.size, k=1) + np.eye(harmonics.size, k=-1)

    return np.diag(diagonal) + np.kron(hopping, 0.5 * model.rabi)


def _diagonalize(matrix):
    """Diagonalize every decoupled block of a symmetric matrix on its own.

    Blocks that never mix, parity sectors or levels the light leaves alone,
    keep exact zeros in their eigenvectors.
    """
    size = matrix.shape[0]
    n_blocks, labels = connected_components(csr_matrix(matrix != 0),
                                            directed=False)
    values = np.empty(size)
    vectors = np.zeros((size, size))
    column = 0
    for block in range(n_blocks):
        index = np.flatnonzero(labels == block)
        width = index.size
        if width == 1:
            values[column] = matrix[index[0], index[0]]
            vectors[index[0], column] = 1.0
        else:
            block_values, block_vectors = scipy.linalg.eigh(
                matrix[np.ix_(index, index)])
            values[column:column + width] = block_values
            vectors[index, column:column + width] = block_vectors
        column += width

    order = np.argsort(values, kind='stable')

    return values[order], vectors[:, order]


def _shifted_overlap(blocks):
    """Return max over shifts |m| <= 2 of |Σ f_j g_{j', m}| minus identity."""
    worst = np.zeros((blocks.shape[0], blocks.shape[0]))
    for shift in range(-2, 3):
        overlap = np.abs(np.einsum('jal,kal->jk', blocks,
                                   _shift(blocks, shift)))
        if shift == 0:
            overlap = np.abs(overlap - np.eye(blocks.shape[0]))
        worst = np.maximum(worst, overlap)

    return worst


def _solve_truncated(model, drive, l_max, eig_tol):
    matrix = build_quasienergy_matrix(model, drive, l_max)
    values, vectors = _diagonalize(matrix)
    n_levels = model.n_levels
    size = 2 * l_max + 1
    omega_l = drive.omega_l

    # blocks[k, a, l] for eigenpair k
    blocks = vectors.T.reshape(values.size, size, n_levels).transpose(0, 2, 1)
    harmonics = np.arange(-l_max, l_max + 1)
    weights = (blocks ** 2).sum(axis=1)
    centrality = weights[:, np.abs(harmonics) <= l_max // 2].sum(axis=1)
    edge_weight = weights[:, np.abs(harmonics) >= l_max - 1].sum(axis=1)

    _, shifts = fold(values, omega_l, tol=eig_tol)
    candidates = np.flatnonzero(shifts == 0)
    if candidates.size < n_levels:
        raise BandGroupingError(
            _shifted_overlap(blocks[candidates]),
            "{} eigenvalues in the folded window, expected {}".format(
                candidates.size, n_levels))

    ranked = candidates[np.argsort(-centrality[candidates], kind='stable')]
    seeds = ranked[:n_levels]
    seeds = seeds[np.argsort(values[seeds], kind='stable')]

    overlap = _shifted_overlap(blocks[seeds])
    if overlap.max() > _ORTHOGONALITY_TOLERANCE:
        raise BandGroupingError(overlap,
                                "band representatives are not orthogonal")

    # Labels follow the level that carries most of the weight.
    level_weight = (blocks[seeds] ** 2).sum(axis=2)
    rows, labels = linear_sum_assignment(level_weight, maximize=True)
    order = np.empty(n_levels, dtype=int)
    order[labels] = rows
    representatives = seeds[order]

    matches = np.abs(np.stack([
        np.einsum('al,jal->j', _shift(blocks[index], shifts[index]),
                  blocks[representatives])
        for index in range(values.size)]))
    band_index = matches.argmax(axis=1)
    resolved = edge_weight < _RESOLVED_EDGE_WEIGHT
    quality = matches.max(axis=1)
    if np.any(resolved & (quality < 1 - _BAND_MATCH_TOLERANCE)):
        worst = np.flatnonzero(resolved)[quality[resolved].argmin()]
        raise BandGroupingError(
            _shifted_overlap(blocks[representatives]),
            "eigenpair {} matches no band, best overlap {:.3e}".format(
                worst, quality[worst]))

    coeffs = blocks[representatives].copy()
    for band in range(n_levels):
        flat = coeffs[band].ravel()
        if flat[np.abs(flat).argmax()] < 0:
            coeffs[band] *= -1

    omega_tilde = values[representatives]
    stacked = coeffs.transpose(0, 2, 1).reshape(n_levels, -1)
    residual = np.abs(stacked @ matrix
                      - omega_tilde[:, None] * stacked).max()

    return FloquetSolution(omega_tilde=omega_tilde, coeffs=coeffs,
                           l_max=l_max, omega_l=omega_l, residual=residual,
                           band_index=band_index)


def _quasienergy_change(current, trial, omega_l):
    distance = folded_distance(current.omega_tilde[:, None],
                               trial.omega_tilde[None, :], omega_l)

    return float(max(distance.min(axis=1).max(), distance.min(axis=0).max()))


def solve_floquet(model, drive, numerics):
    """Compute Floquet quasienergies and coefficients.

    The cutoff starts at ``numerics.l_max`` and doubles, up to
    ``numerics.l_max_cap``, until the folded quasienergies change by less
    than ``numerics.eig_tol``. The smaller of the two agreeing truncations
    is returned.

    Bands are labelled so that band j carries most of its weight on level
    j, quasienergies are folded into (-ω_L/2, ω_L/2] and the largest
    coefficient of every band is positive.

    :param model: the atom.
    :type model: :class:`floqeels.model.AtomModel`
    :param drive: the drive.
    :type drive: :class:`floqeels.model.DriveParams`
    :param numerics: numerical controls.
    :type numerics: :class:`floqeels.model.NumericsConfig`
    :rtype: :class:`FloquetSolution`
    :raise: :class:`.NotConverged` when the cap is reached,
      :class:`.BandGroupingError` when eigenpairs can't be grouped.

    Usage::

      >>> from floqeels import floquet, model
      >>> atom, drive, numerics = model.builtin_scenario('two_level')
      >>> solution = floquet.solve_floquet(atom, drive, numerics)
      >>> solution.n_bands, solution.converged
      (2, True)
    """
    l_max = numerics.l_max
    cap = max(numerics.l_max_cap, l_max)
    current = _solve_truncated(model, drive, l_max, numerics.eig_tol)
    while True:
        trial_l_max = max(min(2 * l_max, cap), l_max + 1)
        trial = _solve_truncated(model, drive, trial_l_max, numerics.eig_tol)
        delta = _quasienergy_change(current, trial, drive.omega_l)
        log.debug("l_max %d against %d: quasienergies moved by %.3e",
                  l_max, trial_l_max, delta)
        if delta < numerics.eig_tol:
            return replace(current, converged=True, delta=delta)
        if trial_l_max >= cap:
            raise NotConverged('floquet', delta)
        current, l_max = trial, trial_l_max


def recursion_residual(solution, model, drive):
    """Return the largest residual of the defining recursion.

    :param solution: Floquet solution, possibly modified.
    :type solution: :class:`FloquetSolution`
    :rtype: ``float``
    """
    matrix = build_quasienergy_matrix(model, drive, solution.l_max)
    stacked = solution.coeffs.transpose(0, 2, 1).reshape(solution.n_bands, -1)

    return float(np.abs(stacked @ matrix
                        - solution.omega_tilde[:, None] * stacked).max())


def stark_shift(solution, model, reference=0.0):
    """Return the dynamical Stark shift of a two-level atom.

    The quasienergy difference is unfolded to the branch closest to
    ``ω₀ + reference`` and the shift is its modulus minus ω₀.

    :param solution: Floquet solution.
    :type solution: :class:`FloquetSolution`
    :param model: the atom, it must have two levels.
    :type model: :class:`floqeels.model.AtomModel`
    :param reference: (optional) expected shift, used to follow a branch.
    :type reference: ``float``
    :rtype: ``float``
    :raise: :class:`ValueError` for anything but a two-level atom.
    """
    if model.n_levels != 2 or solution.n_bands != 2:
        raise ValueError("the Stark shift needs a two-level atom, got {} "
                         "levels".format(model.n_levels))

    omega_0 = model.omega_0
    difference = solution.omega_tilde[1] - solution.omega_tilde[0]
    turns = np.round((omega_0 + reference - difference) / solution.omega_l)

    return float(abs(difference + turns * solution.omega_l) - omega_0)


def stark_shift_curve(model, drive, numerics, rabi_values):
    """Return the Stark shift along a sequence of Rabi frequencies.

    Each point unfolds against the previous shift, thus ``rabi_values``
    should start close to zero and be ordered.

    :rtype: :class:`numpy.ndarray`
    """
    shifts = []
    reference = 0.0
    for strength in rabi_values:
        solution = solve_floquet(model.with_rabi(strength), drive, numerics)
        reference = stark_shift(solution, model, reference)
        shifts.append(reference)

    return np.array(shifts)
