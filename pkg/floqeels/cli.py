# -*- coding: utf-8 -*-
#
# pylint: disable=superfluous-parens
#
"""
floqeels.cli
~~~~~~~~~~~~

This module provides the ``floqeels`` command line tool::

    floqeels spectrum --scenario two_level --rabi 0.4 --omega-l 1.2 --out run
    floqeels map --config atom.json --sweep omega_l:0.2:2.0:200 --threads 4
    floqeels floquet --sweep rabi:0:0.6:61
    floqeels steady --method time --dump
    floqeels validate lambda_b

Every run writes its data files and a ``manifest.json`` into ``--out``.

"""
import argparse
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np
from numpy.linalg import LinAlgError

from floqeels import __version__
from floqeels.exceptions import (ConfigError, DimensionMismatch,
                                 MissingFloquetBasis, NumericalError)
from floqeels.floquet import stark_shift_curve
from floqeels.lindblad import (METHOD_FOURIER, METHOD_TIME,
                               population_map)
from floqeels.model import (SCENARIO_TWO_LEVEL, SCENARIOS, CouplingGeometry,
                            builtin_scenario, dump_config, load_config)
from floqeels.oracle import model_failure
from floqeels.simulation import Simulation
from floqeels.status import (EXIT_INPUT_ERROR, EXIT_NUMERICAL_FAILURE,
                             EXIT_OK, EXIT_VALIDATION_FAILURE)
from floqeels.utils import (format_float, parse_range, parse_sweep,
                            write_csv, write_matrix)

log = logging.getLogger(__name__)

MANIFEST_FILE = 'manifest.json'
SPECTRUM_AXIS = '-3:3:6001'
MAP_AXIS = '-3:3:1201'
METHODS = {'fourier': METHOD_FOURIER, 'time': METHOD_TIME}
LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'
UNITS = 'frequencies in units of omega_0 (ground to top level), hbar = 1'
NORMALIZATION = ('probabilities normalized to the loss probability of the '
                 'undriven atom')


@dataclass
class RunManifest(object):
    """Everything needed to repeat a run.

    :param command: argv of the run.
    :param config: resolved configuration, in the config file schema.
    :param options: resolved command options.
    """
    command: list
    config: dict = None
    options: dict = field(default_factory=dict)
    version: str = __version__
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat())
    outputs: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def add_output(self, path):
        self.outputs.append(os.path.basename(path))

    def write(self, out_dir):
        """Write the manifest and return its path."""
        path = os.path.join(out_dir, MANIFEST_FILE)
        with open(path, 'w') as handle:
            json.dump(asdict(self), handle, indent=2, sort_keys=True)
            handle.write('\n')

        return path


class _ArgumentParser(argparse.ArgumentParser):
    """Exit with :data:`EXIT_INPUT_ERROR` on bad arguments."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, "{}: error: {}\n".format(self.prog,
                                                             message))


def _peak_rows(peaks, prefix=()):
    for peak in peaks:
        yield list(prefix) + [peak.j, peak.jp, peak.l, peak.omega, peak.prob]


def _peaks_header(peaks):
    return [UNITS, NORMALIZATION,
            "harmonic window l in [{}, {}]".format(*peaks.window),
            "sum_prob {}".format(format_float(peaks.sum_prob)),
            "negative peaks {}".format(len(peaks.negative))]


def _write_spectrum(out_dir, prefix, simulation, omega_axis):
    peaks = simulation.peaks
    grid = simulation.spectrum(omega_axis)
    spectrum_path = os.path.join(out_dir, "{}spectrum.csv".format(prefix))
    write_csv(spectrum_path,
              [UNITS, NORMALIZATION,
               "gaussian fwhm {}".format(format_float(grid.fwhm)),
               "area {}".format(format_float(grid.area()))],
              ['omega', 'gamma'], zip(grid.omega_axis, grid.gamma))
    peaks_path = os.path.join(out_dir, "{}peaks.csv".format(prefix))
    write_csv(peaks_path, _peaks_header(peaks),
              ['j', 'jp', 'l', 'omega', 'prob'], _peak_rows(peaks))

    return [spectrum_path, peaks_path]


def cmd_spectrum(simulation, out_dir, omega_axis, reference=False):
    """Write the spectrum and the peaks of a simulation.

    :param simulation: what to run.
    :type simulation: :class:`floqeels.simulation.Simulation`
    :param out_dir: output directory.
    :type out_dir: ``string``
    :param omega_axis: frequencies of the spectrum.
    :type omega_axis: :class:`numpy.ndarray`
    :param reference: also write the spectrum without light.
    :type reference: ``bool``
    :return: written files.
    :rtype: ``list``
    """
    files = _write_spectrum(out_dir, '', simulation, omega_axis)
    if reference:
        files.extend(_write_spectrum(out_dir, 'reference_',
                                     simulation.reference(), omega_axis))

    return files


def cmd_map(simulation, axis, values, omega_axis, out_dir, threads=1):
    """Write a spectrum map along a light parameter.

    :param simulation: the point the sweep starts from.
    :type simulation: :class:`floqeels.simulation.Simulation`
    :return: written files and the map.
    :rtype: ``tuple``
    """
    result = simulation.sweep(axis, values, omega_axis, threads=threads)
    map_path = os.path.join(out_dir, 'map.txt')
    write_matrix(map_path,
                 [UNITS, NORMALIZATION,
                  "rows: {} from {} to {} ({} rows)".format(
                      axis, format_float(values[0]), format_float(values[-1]),
                      len(values)),
                  "columns: omega from {} to {} ({} columns)".format(
                      format_float(omega_axis[0]),
                      format_float(omega_axis[-1]), len(omega_axis)),
                  "failed rows hold nan"],
                 result.gamma)

    rows_path = os.path.join(out_dir, 'map_rows.csv')
    write_csv(rows_path, [UNITS],
              ['row', axis, 'status', 'sum_prob', 'message'],
              ([index, value, 'failed', 'nan', result.failures[index]]
               if index in result.failures
               else [index, value, 'ok', result.peaks[index].sum_prob, '']
               for index, value in enumerate(result.values)))

    peaks_path = os.path.join(out_dir, 'map_peaks.csv')
    write_csv(peaks_path, [UNITS, NORMALIZATION],
              ['row', axis, 'j', 'jp', 'l', 'omega', 'prob'],
              (row for index, value in enumerate(result.values)
               if result.peaks[index] is not None
               for row in _peak_rows(result.peaks[index], (index, value))))

    return [map_path, rows_path, peaks_path], result


def _leading(coeffs, count=3):
    flat = coeffs.ravel()
    order = np.argsort(-np.abs(flat), kind='stable')[:count]
    l_max = (coeffs.shape[1] - 1) // 2
    row = []
    for index in order:
        level, harmonic = np.unravel_index(index, coeffs.shape)
        row.extend([int(level), int(harmonic) - l_max, flat[index]])

    return row


def cmd_floquet(simulation, out_dir, rabi_values=None):
    """Write quasienergies, leading coefficients and convergence data.

    With ``rabi_values`` the Stark shift along them goes to ``stark.csv``.

    :return: written files.
    :rtype: ``list``
    """
    solution = simulation.floquet
    columns = ['j', 'omega_tilde']
    for rank in range(1, 4):
        columns.extend(["a{}".format(rank), "l{}".format(rank),
                        "f{}".format(rank)])
    floquet_path = os.path.join(out_dir, 'floquet.csv')
    write_csv(floquet_path,
              [UNITS, "omega_l {}".format(format_float(solution.omega_l)),
               "quasienergies folded into (-omega_l/2, omega_l/2]"],
              columns,
              ([band, solution.omega_tilde[band]]
               + _leading(solution.coeffs[band])
               for band in range(solution.n_bands)))

    convergence_path = os.path.join(out_dir, 'convergence.csv')
    write_csv(convergence_path, [UNITS],
              ['l_max', 'converged', 'delta', 'residual'],
              [[solution.l_max, solution.converged, solution.delta,
                solution.residual]])
    files = [floquet_path, convergence_path]

    if rabi_values is not None:
        shifts = stark_shift_curve(simulation.model, simulation.drive,
                                   simulation.numerics, rabi_values)
        stark_path = os.path.join(out_dir, 'stark.csv')
        write_csv(stark_path,
                  [UNITS, "omega_l {}".format(
                      format_float(simulation.drive.omega_l))],
                  ['rabi', 'delta_omega'], zip(rabi_values, shifts))
        files.append(stark_path)

    return files


def _coefficient_rows(basis, coeffs, l_max):
    for row, col, index in np.ndindex(*coeffs.shape):
        value = coeffs[row, col, index]
        yield [basis, row, col, index - l_max, value.real, value.imag]


def cmd_steady(simulation, out_dir, method=METHOD_FOURIER, dump=False,
               omega_l_values=None, rabi_values=None, threads=1):
    """Write the steady-state populations of a simulation.

    :return: written files.
    :rtype: ``list``
    """
    steady = simulation.steady_state(method)
    populations = steady.populations()
    floquet_populations = steady.floquet_populations()
    names = simulation.model.names
    populations_path = os.path.join(out_dir, 'populations.csv')
    write_csv(populations_path,
              ["time-averaged populations, method {}".format(steady.method),
               "residual {}".format(format_float(steady.residual))],
              ['basis', 'index', 'name', 'population'],
              [['level', index, names[index], value]
               for index, value in enumerate(populations)]
              + [['floquet', index, '', value]
                 for index, value in enumerate(floquet_populations)])
    files = [populations_path]

    if dump:
        coefficients_path = os.path.join(out_dir, 'coefficients.csv')
        rows = list(_coefficient_rows('level', steady.rho_level,
                                      steady.l_max))
        rows.extend(_coefficient_rows('floquet', steady.rho_floquet,
                                      steady.l_max))
        write_csv(coefficients_path, ["harmonics of the steady state"],
                  ['basis', 'row', 'col', 'l', 're', 'im'], rows)
        files.append(coefficients_path)

    if omega_l_values is not None and rabi_values is not None:
        values = population_map(simulation.model, simulation.numerics,
                                omega_l_values, rabi_values, threads=threads)
        map_path = os.path.join(out_dir, 'population_map.txt')
        write_matrix(map_path,
                     [UNITS, "time-averaged Floquet population of band 1",
                      "rows: rabi from {} to {} ({} rows)".format(
                          format_float(rabi_values[0]),
                          format_float(rabi_values[-1]), len(rabi_values)),
                      "columns: omega_l from {} to {} ({} columns)".format(
                          format_float(omega_l_values[0]),
                          format_float(omega_l_values[-1]),
                          len(omega_l_values))],
                     values)
        files.append(map_path)

    return files


def cmd_validate(report, out_dir):
    """Print the table of a validation report and write ``report.json``.

    :param report: the checks of a run.
    :type report: :class:`floqeels.oracle.ValidationReport`
    :return: written files.
    :rtype: ``list``
    """
    print(report.format_table())
    report_path = os.path.join(out_dir, 'report.json')
    with open(report_path, 'w') as handle:
        handle.write(report.to_json())
        handle.write('\n')

    return [report_path]


def _add_common(parser):
    source = parser.add_mutually_exclusive_group()
    source.add_argument('--config', metavar='FILE',
                        help='JSON configuration file')
    source.add_argument('--scenario', choices=SCENARIOS,
                        help='built-in scenario (default {})'.format(
                            SCENARIO_TWO_LEVEL))
    parser.add_argument('--omega-l', type=float, metavar='X',
                        help='light frequency')
    parser.add_argument('--rabi', type=float, metavar='X',
                        help='Rabi frequency of the light-coupled transitions')
    parser.add_argument('--out', default='.', metavar='DIR',
                        help='output directory (default: current directory)')
    parser.add_argument('--threads', type=int, default=1, metavar='N',
                        help='number of workers')
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='-v for progress, -vv for debugging')


def build_parser():
    """Return the argument parser of the command line tool."""
    parser = _ArgumentParser(
        prog='floqeels',
        description='Electron energy-loss spectra of illuminated atoms')
    parser.add_argument('--version', action='version',
                        version="%(prog)s {}".format(__version__))
    commands = parser.add_subparsers(dest='command', metavar='COMMAND',
                                     parser_class=_ArgumentParser)
    commands.required = True

    spectrum = commands.add_parser('spectrum', help='broadened spectrum')
    _add_common(spectrum)
    spectrum.add_argument('--omega-axis', default=SPECTRUM_AXIS,
                          metavar='MIN:MAX:POINTS')
    spectrum.add_argument('--reference', action='store_true',
                          help='also compute the spectrum without light')
    spectrum.add_argument('--impact-parameter', type=float, metavar='R',
                          help='beam to atom distance in units of c/omega_0')
    spectrum.add_argument('--velocity', type=float, metavar='V',
                          help='electron speed as a fraction of c')

    spectrum_map = commands.add_parser('map', help='spectra along a sweep')
    _add_common(spectrum_map)
    spectrum_map.add_argument('--sweep', required=True,
                              metavar='AXIS:START:STOP:POINTS')
    spectrum_map.add_argument('--omega-axis', default=MAP_AXIS,
                              metavar='MIN:MAX:POINTS')

    floquet = commands.add_parser('floquet', help='Floquet solution')
    _add_common(floquet)
    floquet.add_argument('--sweep', metavar='rabi:START:STOP:POINTS',
                         help='Stark shift along a Rabi sweep')

    steady = commands.add_parser('steady', help='steady-state populations')
    _add_common(steady)
    steady.add_argument('--method', choices=sorted(METHODS),
                        default='fourier')
    steady.add_argument('--dump', action='store_true',
                        help='write every harmonic of the steady state')
    steady.add_argument('--sweep-omega-l', metavar='START:STOP:POINTS')
    steady.add_argument('--sweep-rabi', metavar='START:STOP:POINTS')

    validate = commands.add_parser('validate', help='run the checks')
    _add_common(validate)
    validate.add_argument('name', nargs='?', metavar='SCENARIO',
                          help='built-in scenario to validate')

    return parser


def _configure_logging(verbosity):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity,
                                                      logging.DEBUG)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


def _resolve(args, name=None):
    name = name or args.scenario or SCENARIO_TWO_LEVEL
    if args.config:
        model, drive, numerics = load_config(args.config)
    elif name in SCENARIOS:
        model, drive, numerics = builtin_scenario(name)
    else:
        model, drive, numerics = load_config(name)

    simulation = Simulation(model, drive, numerics).with_overrides(
        rabi=args.rabi, omega_l=args.omega_l)
    impact = getattr(args, 'impact_parameter', None)
    velocity = getattr(args, 'velocity', None)
    if (impact is None) != (velocity is None):
        raise ValueError("--impact-parameter and --velocity go together")
    if impact is not None:
        simulation = simulation.with_overrides(
            geometry=CouplingGeometry(impact, velocity))

    return simulation


def _validate(args, manifest):
    label = args.config or args.name or args.scenario or SCENARIO_TWO_LEVEL
    manifest.options['scenario'] = label
    try:
        simulation = _resolve(args, args.name)
    except ConfigError as error:
        log.error("%s", error)
        report = model_failure(label, error)
    else:
        manifest.config = dump_config(simulation.model, simulation.drive,
                                      simulation.numerics)
        report = simulation.validate(args.threads, label=label)
        manifest.timings.update(simulation.timings)

    for path in cmd_validate(report, args.out):
        manifest.add_output(path)

    return EXIT_OK if report.passed else EXIT_VALIDATION_FAILURE


def _dispatch(args, manifest):
    if args.command == 'validate':
        return _validate(args, manifest)

    simulation = _resolve(args)
    manifest.config = dump_config(simulation.model, simulation.drive,
                                  simulation.numerics)

    try:
        if args.command == 'spectrum':
            manifest.options.update(omega_axis=args.omega_axis,
                                    reference=args.reference)
            files = cmd_spectrum(simulation, args.out,
                                 parse_range(args.omega_axis),
                                 reference=args.reference)
        elif args.command == 'map':
            axis, values = parse_sweep(args.sweep)
            manifest.options.update(sweep=args.sweep,
                                    omega_axis=args.omega_axis)
            files, result = cmd_map(simulation, axis, values,
                                    parse_range(args.omega_axis), args.out,
                                    args.threads)
            if len(result.failures) == len(values):
                for path in files:
                    manifest.add_output(path)
                log.error("every row of the map failed")
                return EXIT_NUMERICAL_FAILURE
        elif args.command == 'floquet':
            rabi_values = None
            if args.sweep:
                axis, rabi_values = parse_sweep(args.sweep)
                if axis != 'rabi':
                    raise ValueError("floquet sweeps the rabi axis only")
                manifest.options['sweep'] = args.sweep
            files = cmd_floquet(simulation, args.out, rabi_values)
        else:
            if (args.sweep_omega_l is None) != (args.sweep_rabi is None):
                raise ValueError("--sweep-omega-l and --sweep-rabi go "
                                 "together")
            omega_l_values = rabi_values = None
            if args.sweep_omega_l is not None:
                omega_l_values = parse_range(args.sweep_omega_l)
                rabi_values = parse_range(args.sweep_rabi)
                manifest.options.update(sweep_omega_l=args.sweep_omega_l,
                                        sweep_rabi=args.sweep_rabi)
            manifest.options.update(method=args.method, dump=args.dump)
            files = cmd_steady(simulation, args.out, METHODS[args.method],
                               args.dump, omega_l_values, rabi_values,
                               args.threads)
    finally:
        manifest.timings.update(simulation.timings)

    for path in files:
        manifest.add_output(path)

    return EXIT_OK


def main(argv=None):
    """Run the command line tool and return its exit code.

    :param argv: (optional) arguments, ``sys.argv[1:]`` when it isn't set.
    :type argv: ``list``
    :rtype: ``integer``
    """
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    manifest = RunManifest(command=['floqeels'] + argv)
    manifest.options['threads'] = args.threads

    try:
        os.makedirs(args.out, exist_ok=True)
        code = _dispatch(args, manifest)
    except ConfigError as error:
        log.error("%s", error)
        print("error: {}".format(error), file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (NumericalError, DimensionMismatch, MissingFloquetBasis,
            LinAlgError) as error:
        log.error("%s", error)
        print("numerical failure: {}".format(error), file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE
    except (ValueError, OSError) as error:
        log.error("%s", error)
        print("error: {}".format(error), file=sys.stderr)
        return EXIT_INPUT_ERROR

    manifest.write(args.out)

    return code


if __name__ == '__main__':
    sys.exit(main())
