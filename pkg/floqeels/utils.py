# pylint: disable=superfluous-parens
#
"""
floqeels.utils
~~~~~~~~~~~~~~

This module provides utility functions that are used within floqeels.

"""
import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from functools import wraps

import numpy as np

log = logging.getLogger(__name__)

SWEEP_AXES = ['rabi', 'omega_l']


def should_die(old_implementation):
    """Build a decorator to control exceptions.

    A long sweep should not stop because a single point failed, but the
    caller still wants to know why it failed. We add an extra argument to the
    decorated function with the name ``die`` to control this behavior. When it
    is set to ``True``, which is the default value, it raises any exception
    raised by the decorated function. When it is set to ``False`` it returns
    the exception object instead of raising it, so callers can tell a failure
    apart with ``isinstance(result, Exception)``.
    """
    @wraps(old_implementation)
    def new_implementation(*args, **kwargs):
        die = kwargs.pop('die', True)

        try:
            return old_implementation(*args, **kwargs)
        except Exception as error:
            if die:
                raise
            log.debug("%s failed: %s", old_implementation.__name__, error)
            return error

    return new_implementation


def run_across_workers(function, jobs, threads=1,
                       executor=ProcessPoolExecutor):
    """Return the result of a function executed over all jobs.

    Jobs are dispatched to a pool of ``threads`` workers. The order of the
    returned list follows the order of ``jobs`` no matter how the pool
    schedules them.

    .. note::
        With a process pool ``function`` and every job must be picklable,
        thus ``function`` has to be defined at module level.

    :param function: a callable which accepts a single job.
    :param jobs: the jobs.
    :type jobs: ``list``
    :param threads: number of workers, ``1`` runs everything in the caller.
    :type threads: ``integer``
    :param executor: a :mod:`concurrent.futures` executor class.
    :return: list of 2-item tuple

      #. index of the job
      #. what the function returned

    :rtype: ``list``
    """
    jobs = list(jobs)
    if threads is None or threads <= 1 or len(jobs) <= 1:
        return [(index, function(job)) for index, job in enumerate(jobs)]

    chunksize = max(1, len(jobs) // (4 * threads))
    log.debug("running %d jobs on %d workers", len(jobs), threads)
    with executor(max_workers=threads) as pool:
        return list(enumerate(pool.map(function, jobs, chunksize=chunksize)))


def isint(value):
    """Check if input can be converted to an integer

    :param value: value to check
    :type value: a ``string`` or ``int``
    :return: ``True`` if value can be converted to an integer
    :rtype: ``bool``
    """
    try:
        int(value)
        return True
    except (TypeError, ValueError):
        return False


def converter(value):
    """Tries to convert input value to a float.

    :param value: a value to convert to float.
    :type value: ``string``
    :rtype: ``float`` or ``None`` if value can't be converted.

    Usage::

      >>> from floqeels import utils
      >>> utils.converter('0.4')
      0.4
      >>> utils.converter('1e-2')
      0.01
      >>> utils.converter('rabi')
      >>> utils.converter(None)
    """
    try:
        return float(value)
    except (TypeError, ValueError):
        return None


def parse_range(text):
    """Build an evenly spaced grid out of a ``START:STOP:POINTS`` string.

    :param text: range description.
    :type text: ``string``
    :return: the grid.
    :rtype: :class:`numpy.ndarray`
    :raise: :class:`ValueError` when the string is malformed or the range
      has less than 2 points.

    Usage::

      >>> from floqeels import utils
      >>> utils.parse_range('0:0.6:4')
      array([0. , 0.2, 0.4, 0.6])
    """
    parts = text.split(':')
    if len(parts) != 3:
        raise ValueError("range must look like START:STOP:POINTS, "
                         "got {}".format(text))

    start, stop = converter(parts[0]), converter(parts[1])
    if start is None or stop is None or not isint(parts[2]):
        raise ValueError("invalid range {}".format(text))

    points = int(parts[2])
    if points < 2:
        raise ValueError("range too short: {} has {} point(s)".format(
            text, points))

    return np.linspace(start, stop, points)


def parse_sweep(text):
    """Split an ``AXIS:START:STOP:POINTS`` string.

    :param text: sweep description, AXIS is any of :data:`SWEEP_AXES`.
    :type text: ``string``
    :return: axis name and grid.
    :rtype: ``tuple``
    :raise: :class:`ValueError` for an unknown axis or a bad range.
    """
    axis, _, rest = text.partition(':')
    if axis not in SWEEP_AXES:
        raise ValueError("{} is not a valid sweep axis, use one of "
                         "{}".format(axis, ', '.join(SWEEP_AXES)))

    return axis, parse_range(rest)


def fold(value, omega_l, tol=0.0):
    """Fold frequencies into the window (-omega_l/2 + tol, omega_l/2 + tol].

    :param value: frequencies.
    :type value: ``float`` or :class:`numpy.ndarray`
    :param omega_l: drive frequency.
    :type omega_l: ``float``
    :param tol: shift of the window edges.
    :type tol: ``float``
    :return: folded value and the integer ``shift`` so that
      ``folded == value + shift * omega_l``.
    :rtype: ``tuple``

    Usage::

      >>> from floqeels import utils
      >>> utils.fold(1.0, 0.8)
      (0.19999999999999996, -1)
    """
    shift = np.floor((0.5 * omega_l + tol - np.asarray(value)) / omega_l)
    folded = value + shift * omega_l
    if np.ndim(shift) == 0:
        return float(folded), int(shift)

    return folded, shift.astype(int)


def folded_distance(first, second, omega_l):
    """Return the distance between frequencies defined modulo omega_l.

    :rtype: ``float`` or :class:`numpy.ndarray`
    """
    delta = np.asarray(first) - np.asarray(second)

    return np.abs(delta - omega_l * np.round(delta / omega_l))


def format_float(value):
    """Format a float with 12 significant digits.

    Usage::

      >>> from floqeels import utils
      >>> utils.format_float(1 / 3)
      '0.333333333333'
    """
    return '{:.12g}'.format(value)


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(value)
    if isinstance(value, (float, np.floating)):
        return format_float(value)

    return str(value)


def write_csv(path, header, columns, rows):
    """Write a CSV file with ``#`` comment lines on top.

    :param path: output file.
    :type path: ``string``
    :param header: comment lines, without the leading ``#``.
    :type header: ``list``
    :param columns: column names.
    :type columns: ``list``
    :param rows: rows of values.
    :type rows: iterable of ``list``
    """
    with open(path, 'w', newline='') as handle:
        for line in header:
            handle.write("# {}\n".format(line))
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(value) for value in row])


def write_matrix(path, header, matrix):
    """Write a gnuplot-compatible text matrix.

    :param path: output file.
    :type path: ``string``
    :param header: comment lines, without the leading ``#``.
    :type header: ``list``
    :param matrix: 2D array, one text line per row.
    :type matrix: :class:`numpy.ndarray`
    """
    with open(path, 'w', newline='') as handle:
        for line in header:
            handle.write("# {}\n".format(line))
        for row in np.atleast_2d(matrix):
            handle.write(' '.join(format_float(value) for value in row))
            handle.write('\n')
