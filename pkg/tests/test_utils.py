from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, seed
from hypothesis import strategies as st

from floqeels import utils


def _square(value):
    return value * value


@utils.should_die
def _divide(numerator, denominator):
    return numerator / denominator


def test_should_die_raises_by_default():
    with pytest.raises(ZeroDivisionError):
        _divide(1, 0)


def test_should_die_returns_the_error():
    assert _divide(6, 3) == 2
    assert isinstance(_divide(1, 0, die=False), ZeroDivisionError)


@pytest.mark.parametrize('threads', [1, 3])
def test_run_across_workers_keeps_order(threads):
    results = utils.run_across_workers(_square, range(10), threads,
                                       executor=ThreadPoolExecutor)

    assert results == [(index, index * index) for index in range(10)]


def test_parse_range():
    np.testing.assert_allclose(utils.parse_range('0:0.6:4'),
                               [0.0, 0.2, 0.4, 0.6])


@pytest.mark.parametrize('text', ['0:1', 'a:1:3', '0:1:x', '0:1:2:3'])
def test_parse_range_malformed(text):
    with pytest.raises(ValueError):
        utils.parse_range(text)


def test_parse_range_too_short():
    with pytest.raises(ValueError, match='range too short'):
        utils.parse_range('0:0.4:1')


def test_parse_sweep():
    axis, values = utils.parse_sweep('omega_l:0.8:1.2:3')

    assert axis == 'omega_l'
    np.testing.assert_allclose(values, [0.8, 1.0, 1.2])
    with pytest.raises(ValueError, match='not a valid sweep axis'):
        utils.parse_sweep('decay:0:1:3')


@seed(1)
@given(st.floats(-50, 50), st.floats(0.1, 3.0))
def test_fold_lands_in_window(value, omega_l):
    folded, shift = utils.fold(value, omega_l)

    assert -0.5 * omega_l - 1e-12 <= folded <= 0.5 * omega_l + 1e-12
    assert folded == value + shift * omega_l


def test_fold_arrays():
    folded, shift = utils.fold(np.array([1.0, -0.2, 0.6]), 1.2)

    np.testing.assert_allclose(folded, [-0.2, -0.2, 0.6])
    np.testing.assert_array_equal(shift, [-1, 0, 0])


def test_folded_distance():
    assert utils.folded_distance(0.1, 0.1 + 3 * 1.2, 1.2) < 1e-14
    assert utils.folded_distance(0.5, -0.5, 1.2) == pytest.approx(0.2)


def test_write_csv(tmp_path):
    path = tmp_path / 'out.csv'
    utils.write_csv(str(path), ['first', 'second'], ['j', 'omega', 'ok'],
                    [[0, 1 / 3, True], [1, 2.5, False]])

    assert path.read_text() == ("# first\n# second\nj,omega,ok\n"
                                "0,0.333333333333,1\n1,2.5,0\n")


def test_write_matrix(tmp_path):
    path = tmp_path / 'map.txt'
    utils.write_matrix(str(path), ['rows'], np.array([[1.0, np.nan],
                                                      [0.5, 2.0]]))

    assert path.read_text() == "# rows\n1 nan\n0.5 2\n"
