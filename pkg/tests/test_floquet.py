import numpy as np
import pytest

from floqeels import floquet
from floqeels.exceptions import NotConverged
from floqeels.floquet import (build_quasienergy_matrix, recursion_residual,
                              solve_floquet, stark_shift, stark_shift_curve)
from floqeels.model import NumericsConfig, builtin_scenario


def test_quasienergy_matrix_layout():
    model, drive, _ = builtin_scenario('two_level', rabi=0.4, omega_l=1.2)
    matrix = build_quasienergy_matrix(model, drive, 1)

    assert matrix.shape == (6, 6)
    np.testing.assert_array_equal(matrix, matrix.T)
    np.testing.assert_allclose(np.diag(matrix),
                               [1.2, 2.2, 0.0, 1.0, -1.2, -0.2])
    off_diagonal = matrix - np.diag(np.diag(matrix))
    assert np.count_nonzero(off_diagonal) == 8
    np.testing.assert_allclose(off_diagonal[off_diagonal != 0], 0.2)
    # g at l = 0 couples to e at l = ±1 only
    assert set(np.flatnonzero(off_diagonal[2])) == {1, 5}


def test_quasienergy_matrix_needs_harmonics():
    model, drive, _ = builtin_scenario('two_level')

    with pytest.raises(ValueError):
        build_quasienergy_matrix(model, drive, 0)


def test_undriven_bands(undriven):
    _, _, _, solution, _ = undriven
    l_max = solution.l_max

    assert solution.converged
    np.testing.assert_allclose(solution.omega_tilde, [0.0, -0.2], atol=1e-12)
    assert solution.coeffs[0, 0, l_max] == 1.0
    assert solution.coeffs[1, 1, l_max + 1] == 1.0
    assert np.count_nonzero(solution.coeffs) == 2


@pytest.mark.parametrize('name', ['two_level', 'lambda_a', 'lambda_b'])
def test_solution_invariants(name):
    model, drive, numerics = builtin_scenario(name)
    solution = solve_floquet(model, drive, numerics)
    half = 0.5 * drive.omega_l

    assert solution.converged
    assert solution.delta < numerics.eig_tol
    assert solution.n_bands == model.n_levels
    assert solution.residual < 1e-10
    assert np.all(solution.omega_tilde > -half - numerics.eig_tol)
    assert np.all(solution.omega_tilde <= half + numerics.eig_tol)
    np.testing.assert_allclose((solution.coeffs ** 2).sum(axis=(1, 2)), 1.0,
                               atol=1e-12)
    for band in range(solution.n_bands):
        coeffs = solution.coeffs[band]
        # sign gauge and labels
        assert coeffs.ravel()[np.abs(coeffs).argmax()] > 0
        assert (coeffs ** 2).sum(axis=1).argmax() == band


def test_replicas_solve_the_recursion(two_level):
    model, drive, _, solution, _ = two_level
    replica = solution.shifted(0, 1)

    assert replica.omega_tilde[0] == pytest.approx(
        solution.omega_tilde[0] + drive.omega_l)
    assert recursion_residual(replica, model, drive) < 1e-10
    assert recursion_residual(solution, model, drive) < 1e-10


def test_parity_sectors(two_level):
    _, _, _, solution, _ = two_level
    l_max = solution.l_max
    levels = np.arange(2)[:, None]
    harmonics = np.arange(-l_max, l_max + 1)[None, :]
    for band in range(2):
        coeffs = solution.coeffs[band]
        leading = np.unravel_index(np.abs(coeffs).argmax(), coeffs.shape)
        parity = (leading[0] + leading[1] - l_max) % 2
        odd_sector = (levels + harmonics) % 2 != parity

        assert np.all(coeffs[odd_sector] == 0.0)


def test_states_at_are_orthonormal(two_level):
    _, _, _, solution, _ = two_level
    for time in (0.0, 0.7, 2.1):
        states = solution.states_at(time)

        np.testing.assert_allclose(states.conj().T @ states, np.eye(2),
                                   atol=1e-12)


def test_convergence_loop(monkeypatch):
    model, drive, _ = builtin_scenario('two_level')
    tried = []
    original = floquet._solve_truncated

    def _record(model, drive, l_max, eig_tol):
        tried.append(l_max)
        return original(model, drive, l_max, eig_tol)

    monkeypatch.setattr(floquet, '_solve_truncated', _record)
    monkeypatch.setattr(floquet, '_quasienergy_change',
                        lambda *args: 1.0)

    with pytest.raises(NotConverged) as error:
        solve_floquet(model, drive, NumericsConfig(l_max=5, l_max_cap=12))

    assert tried == [5, 10, 12]
    assert error.value.stage == 'floquet'


def test_converged_returns_smaller_truncation():
    model, drive, _ = builtin_scenario('two_level')
    solution = solve_floquet(model, drive, NumericsConfig(l_max=12))

    assert solution.l_max == 12
    assert solution.coeffs.shape == (2, 2, 25)


@pytest.mark.parametrize('omega_l, sign', [(0.9, 1.0), (1.2, -1.0)])
def test_stark_shift_sign(omega_l, sign):
    model, drive, numerics = builtin_scenario('two_level', rabi=0.1,
                                              omega_l=omega_l)
    shift = stark_shift(solve_floquet(model, drive, numerics), model)

    assert np.sign(shift) == sign


def test_stark_shift_vanishes_without_light(undriven):
    model, _, _, solution, _ = undriven

    assert abs(stark_shift(solution, model)) < 1e-12


def test_stark_shift_needs_two_levels():
    model, drive, numerics = builtin_scenario('lambda_a')
    solution = solve_floquet(model, drive, numerics)

    with pytest.raises(ValueError):
        stark_shift(solution, model)


@pytest.mark.parametrize('omega_l, direction', [(0.7, 1.0), (1.5, -1.0)])
def test_stark_shift_curve_is_monotonic(omega_l, direction):
    model, drive, numerics = builtin_scenario('two_level', omega_l=omega_l)
    shifts = stark_shift_curve(model, drive, numerics,
                               np.linspace(0.0, 0.4, 9))

    assert abs(shifts[0]) < 1e-12
    assert np.all(direction * np.diff(shifts) > 0)
