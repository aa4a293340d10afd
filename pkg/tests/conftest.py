import pytest

from floqeels.floquet import solve_floquet
from floqeels.lindblad import steady_state_fourier, to_floquet_basis
from floqeels.model import builtin_scenario


def solve(name, **overrides):
    """Return model, drive, numerics, Floquet solution and steady state."""
    model, drive, numerics = builtin_scenario(name, **overrides)
    solution = solve_floquet(model, drive, numerics)
    steady = to_floquet_basis(
        steady_state_fourier(model, drive, numerics, solution.l_max),
        solution)

    return model, drive, numerics, solution, steady


@pytest.fixture(scope='session')
def two_level():
    return solve('two_level')


@pytest.fixture(scope='session')
def undriven():
    return solve('two_level', rabi=0.0)


@pytest.fixture(scope='session')
def lambda_b():
    return solve('lambda_b')
