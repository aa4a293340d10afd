# -*- coding: utf-8 -*-
#
# pylint: disable=superfluous-parens
#
"""
floqeels.oracle
~~~~~~~~~~~~~~~

This module provides independent checks of the numerical pipeline. The
monodromy check integrates the Schrödinger equation with its own Runge-Kutta
loop, the others test algebraic identities that every exact result obeys.
Every check returns a :class:`CheckResult` and :func:`run_full_validation`
gathers them into a :class:`ValidationReport`.

"""
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from floqeels.eels import appendix_peak_tensor, compute_I, peak_tensor
from floqeels.exceptions import FloqEelsBaseError, NumericalError
from floqeels.floquet import solve_floquet
from floqeels.lindblad import (steady_state_fourier, steady_state_time_domain,
                               to_floquet_basis)
from floqeels.model import (SCENARIO_LAMBDA_B, SCENARIO_LAMBDA_C, SCENARIOS,
                            builtin_scenario, load_config)
from floqeels.status import (CHECK_APPENDIX, CHECK_COMPLETENESS,
                             CHECK_CROSS_METHOD, CHECK_FLOQUET, CHECK_GAUGE,
                             CHECK_HERMITICITY, CHECK_MODEL, CHECK_MONODROMY,
                             CHECK_ORTHOGONALITY, CHECK_PARITY,
                             CHECK_PINEM_ABSENCE, CHECK_POPULATIONS,
                             CHECK_SUM_RULE, CHECK_TOLERANCES, CHECK_TRACE,
                             MONODROMY_TOLERANCE)
from floqeels.utils import folded_distance, run_across_workers, should_die

log = logging.getLogger(__name__)

MONODROMY_STEPS = 2000
# coarsest step the monodromy check accepts is T / MIN_MONODROMY_STEPS
MIN_MONODROMY_STEPS = 1000
MONODROMY_RETRIES = 2


@dataclass(frozen=True)
class CheckResult(object):
    """Outcome of a single check.

    :param name: check name, any of :data:`floqeels.VALIDATION_CHECKS`.
    :param residual: largest deviation measured.
    :param tolerance: largest deviation accepted.
    :param passed: whether residual is within tolerance.
    :param detail: (optional) extra information.
    """
    name: str
    residual: float
    tolerance: float
    passed: bool
    detail: str = ''


def _result(name, residual, tolerance=None, detail=''):
    tolerance = CHECK_TOLERANCES[name] if tolerance is None else tolerance
    residual = float(residual)
    passed = math.isfinite(residual) and residual <= tolerance

    return CheckResult(name=name, residual=residual, tolerance=tolerance,
                       passed=passed, detail=detail)


def _failure(name, error):
    return CheckResult(name=name, residual=math.inf,
                       tolerance=CHECK_TOLERANCES[name], passed=False,
                       detail="{}: {}".format(type(error).__name__, error))


class ValidationReport(object):
    """Ordered collection of :class:`CheckResult`.

    :param scenario: what was validated.
    :type scenario: ``string``
    """
    def __init__(self, scenario=''):
        self.scenario = scenario
        self.checks = []

    def __iter__(self):
        return iter(self.checks)

    def __len__(self):
        return len(self.checks)

    def __getitem__(self, name):
        for check in self.checks:
            if check.name == name:
                return check

        raise KeyError(name)

    def __contains__(self, name):
        return any(check.name == name for check in self.checks)

    def add(self, check):
        """Append a check."""
        self.checks.append(check)

    @property
    def passed(self):
        """Return ``True`` when every check passed."""
        return all(check.passed for check in self.checks)

    @property
    def failures(self):
        """Return the checks that failed."""
        return [check for check in self.checks if not check.passed]

    def to_dict(self):
        """Return the report as a JSON friendly dictionary.

        Non finite residuals are written as strings.
        """
        checks = []
        for check in self.checks:
            entry = asdict(check)
            if not math.isfinite(entry['residual']):
                entry['residual'] = repr(entry['residual'])
            checks.append(entry)

        return {'scenario': self.scenario, 'passed': self.passed,
                'checks': checks}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def format_table(self):
        """Return a human readable table of the checks."""
        lines = ["{:<15} {:>12} {:>12}  {}".format(
            'check', 'residual', 'tolerance', 'status')]
        for check in self.checks:
            lines.append("{:<15} {:>12.3e} {:>12.3e}  {}{}".format(
                check.name, check.residual, check.tolerance,
                'PASS' if check.passed else 'FAIL',
                "  ({})".format(check.detail) if check.detail else ''))
        lines.append("overall: {}".format('PASS' if self.passed else 'FAIL'))

        return '\n'.join(lines)


def _schrodinger_period(model, omega_l, state, steps):
    """Integrate i dψ/dt = H(t) ψ over one period with RK4."""
    dt = 2 * math.pi / omega_l / steps
    energy = np.diag(model.energies).astype(complex)
    rabi = model.rabi.astype(complex)

    def generator(time):
        return -1j * (energy + math.cos(omega_l * time) * rabi)

    for index in range(steps):
        time = index * dt
        middle = generator(time + 0.5 * dt)
        k1 = generator(time) @ state
        k2 = middle @ (state + 0.5 * dt * k1)
        k3 = middle @ (state + 0.5 * dt * k2)
        k4 = generator(time + dt) @ (state + dt * k3)
        state = state + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)

    return state


def monodromy_check(model, drive, solution, dt=None,
                    tolerance=MONODROMY_TOLERANCE):
    """Propagate every Floquet state over one period and compare.

    ``|F_j(0)⟩`` must come back as ``exp(-i ω̃_j T) |F_j(0)⟩``. The step is
    halved up to two times while that lowers the residual.

    :param dt: (optional) integration step, T/2000 by default.
    :type dt: ``float``
    :rtype: :class:`CheckResult`
    :raise: :class:`ValueError` when dt is coarser than T/1000.
    """
    period = drive.period
    dt = period / MONODROMY_STEPS if dt is None else dt
    if dt > period / MIN_MONODROMY_STEPS:
        raise ValueError("dt={} is coarser than T/{}".format(
            dt, MIN_MONODROMY_STEPS))

    initial = solution.coeffs.sum(axis=2).T.astype(complex)
    target = initial * np.exp(-1j * solution.omega_tilde * period)[None, :]
    previous = math.inf
    for attempt in range(MONODROMY_RETRIES + 1):
        steps = int(math.ceil(period / dt))
        with np.errstate(all='ignore'):
            final = _schrodinger_period(model, drive.omega_l, initial, steps)
            residual = float(np.linalg.norm(final - target, axis=0).max())
        if not math.isfinite(residual):
            residual = math.inf
        if residual <= tolerance or residual > 0.5 * previous:
            break
        log.info("monodromy residual %.3e with T/%d, halving the step",
                 residual, steps)
        previous = residual
        dt /= 2

    return _result(CHECK_MONODROMY, residual, tolerance,
                   detail="T/{} steps".format(steps))


def _harmonic_shift(coeffs, shift):
    """Return g[..., l] = coeffs[..., l + shift] with zero padding."""
    size = coeffs.shape[-1]
    padded = np.zeros(coeffs.shape[:-1] + (3 * size,))
    padded[..., size:2 * size] = coeffs
    start = size + shift
    if start < 0 or start + size > 3 * size:
        return np.zeros_like(coeffs)

    return padded[..., start:start + size]


def orthogonality_check(solution):
    """Check ``Σ_{al} f_{jal} f_{j'a,l+m} = δ_{jj'} δ_{m0}`` for |m| <= 2 l_max.

    :rtype: :class:`CheckResult`
    """
    l_max = solution.l_max
    identity = np.eye(solution.n_bands)
    worst = 0.0
    for shift in range(-2 * l_max, 2 * l_max + 1):
        overlap = np.einsum('jal,kal->jk', solution.coeffs,
                            _harmonic_shift(solution.coeffs, shift))
        if shift == 0:
            overlap = overlap - identity
        worst = max(worst, float(np.abs(overlap).max()))

    return _result(CHECK_ORTHOGONALITY, worst)


def completeness_check(solution):
    """Check the closure relation over all replicas.

    ``Σ_{jm} f_{ja,l+m} f_{ja',l'+m} = δ_{aa'} δ_{ll'}`` is tested on the
    harmonics |l| <= l_max / 2, away from the truncation edge.

    :rtype: :class:`CheckResult`
    """
    l_max = solution.l_max
    replicas = np.stack([
        _harmonic_shift(solution.coeffs[band], shift).ravel()
        for band in range(solution.n_bands)
        for shift in range(-2 * l_max, 2 * l_max + 1)])
    closure = replicas.T @ replicas
    harmonics = np.arange(-l_max, l_max + 1)
    interior = np.tile(np.abs(harmonics) <= l_max // 2,
                       solution.coeffs.shape[1])
    block = closure[np.ix_(interior, interior)]

    return _result(CHECK_COMPLETENESS,
                   np.abs(block - np.eye(block.shape[0])).max())


def sum_rule_check(solution, model):
    """Check ``Σ_j ω̃_j ≡ Σ_a ε_a`` modulo ω_L.

    :rtype: :class:`CheckResult`
    """
    residual = folded_distance(solution.omega_tilde.sum(),
                               model.energies.sum(), solution.omega_l)

    return _result(CHECK_SUM_RULE, residual)


def _hermiticity_gap(coeffs):
    return float(np.abs(coeffs.conj()
                        - coeffs.transpose(1, 0, 2)[:, :, ::-1]).max())


def hermiticity_check(steady):
    """Check ``conj(ρ_{aa'l}) = ρ_{a'a,-l}`` in both bases.

    :rtype: :class:`CheckResult`
    """
    residual = _hermiticity_gap(steady.rho_level)
    if steady.rho_floquet is not None:
        residual = max(residual, _hermiticity_gap(steady.rho_floquet))

    return _result(CHECK_HERMITICITY, residual)


def _trace_gap(coeffs, l_max):
    traces = np.einsum('aal->l', coeffs)
    expected = np.zeros(traces.size)
    expected[l_max] = 1.0

    return float(np.abs(traces - expected).max())


def trace_check(steady):
    """Check that ρ_0 has unit trace and every other harmonic is traceless.

    :rtype: :class:`CheckResult`
    """
    residual = _trace_gap(steady.rho_level, steady.l_max)
    if steady.rho_floquet is not None:
        residual = max(residual, _trace_gap(steady.rho_floquet, steady.l_max))

    return _result(CHECK_TRACE, residual)


def population_check(steady):
    """Check that time-averaged populations lie in [0, 1].

    :rtype: :class:`CheckResult`
    """
    populations = steady.populations()
    if steady.rho_floquet is not None:
        populations = np.concatenate((populations,
                                      steady.floquet_populations()))
    residual = max(0.0, -populations.min(), populations.max() - 1.0)

    return _result(CHECK_POPULATIONS, residual)


def cross_validate_steady(model, drive, numerics, l_max=None):
    """Compare the Fourier nullspace against time propagation.

    :rtype: :class:`CheckResult`
    """
    fourier = steady_state_fourier(model, drive, numerics, l_max)
    timed = steady_state_time_domain(model, drive, numerics, fourier.l_max)
    residual = np.abs(fourier.rho_level - timed.rho_level).max()

    return _result(CHECK_CROSS_METHOD, residual,
                   detail="propagation residual {:.3e}".format(timed.residual))


def appendix_check(solution, steady, model):
    """Compare peak probabilities against the explicit-sum formulas.

    :rtype: :class:`CheckResult`
    """
    _, fast = peak_tensor(compute_I(solution, model), steady, solution)
    _, slow = appendix_peak_tensor(solution, steady, model)

    return _result(CHECK_APPENDIX, np.abs(fast - slow).max())


def _peaks_with_basis(solution, steady, model):
    steady = to_floquet_basis(steady, solution)

    return peak_tensor(compute_I(solution, model), steady, solution)[1]


def gauge_check(solution, steady, model):
    """Flip the sign of each band and check the peaks don't move.

    :rtype: :class:`CheckResult`
    """
    baseline = _peaks_with_basis(solution, steady, model)
    worst = 0.0
    for band in range(solution.n_bands):
        flipped = _peaks_with_basis(solution.flipped(band), steady, model)
        worst = max(worst, float(np.abs(flipped - baseline).max()))

    return _result(CHECK_GAUGE, worst)


def parity_check(solution, steady, model):
    """Check the parity selection rule of the two-level atom.

    Coefficients of band j vanish unless ``a + l`` has the parity p_j of
    the band, so a peak (j, j', l) needs ``l + p_j + p_j'`` odd, the
    elastic line aside.

    :rtype: :class:`CheckResult`
    :raise: :class:`ValueError` for anything but a two-level atom.
    """
    if model.n_levels != 2:
        raise ValueError("parity rule needs a two-level atom")

    window, tensor = peak_tensor(compute_I(solution, model), steady,
                                 solution)
    parity = np.empty(solution.n_bands, dtype=int)
    for band in range(solution.n_bands):
        level, harmonic = np.unravel_index(
            np.abs(solution.coeffs[band]).argmax(),
            solution.coeffs[band].shape)
        parity[band] = (level + harmonic - solution.l_max) % 2
    bands = np.arange(solution.n_bands)
    total = (parity[:, None, None] + parity[None, :, None]
             + window[None, None, :])
    elastic = ((bands[:, None, None] == bands[None, :, None])
               & (window[None, None, :] == 0))
    forbidden = (total % 2 == 0) & ~elastic

    return _result(CHECK_PARITY, np.abs(tensor[forbidden]).max()
                   if forbidden.any() else 0.0)


def pinem_absence_check(solution, steady, model):
    """Check that no peak keeps the Floquet band, j = j' with l != 0.

    :rtype: :class:`CheckResult`
    """
    window, tensor = peak_tensor(compute_I(solution, model), steady,
                                 solution)
    bands = np.arange(solution.n_bands)
    keep = window != 0
    residual = np.abs(tensor[bands, bands][:, keep]).max() if keep.any() \
        else 0.0

    return _result(CHECK_PINEM_ABSENCE, residual)


def _resolve(scenario):
    if isinstance(scenario, tuple):
        return scenario
    if scenario in SCENARIOS:
        return builtin_scenario(scenario)

    return load_config(scenario)


@should_die
def _evaluate(function, *args):
    return function(*args)


def _run_check(job):
    name, function, args = job
    outcome = _evaluate(function, *args, die=False)
    if isinstance(outcome, Exception):
        return _failure(name, outcome)

    return outcome


def model_failure(label, error):
    """Return a report that only holds the failed model check."""
    report = ValidationReport(label)
    report.add(_failure(CHECK_MODEL, error))

    return report


def run_full_validation(scenario, numerics=None, threads=1, label=None):
    """Run every check that applies to a scenario.

    :param scenario: a built-in scenario name, a configuration file or a
      tuple of (:class:`AtomModel`, :class:`DriveParams`,
      :class:`NumericsConfig`).
    :param numerics: (optional) overrides the numerical controls of the
      scenario.
    :type numerics: :class:`floqeels.model.NumericsConfig`
    :param threads: number of threads the checks run on.
    :type threads: ``integer``
    :param label: (optional) name of the report, the scenario name or
      ``custom`` by default. Built-in names enable the checks specific to
      that scenario.
    :type label: ``string``
    :rtype: :class:`ValidationReport`

    Usage::

      >>> from floqeels import oracle
      >>> report = oracle.run_full_validation('two_level')
      >>> report.passed
      True
    """
    if label is None:
        label = scenario if isinstance(scenario, str) else 'custom'
    try:
        model, drive, config = _resolve(scenario)
    except (FloqEelsBaseError, ValueError) as error:
        return model_failure(label, error)
    report = ValidationReport(label)
    report.add(_result(
        CHECK_MODEL, 0.0, detail="{} levels, omega_l={:g}, rabi={:g}".format(
            model.n_levels, drive.omega_l, model.rabi_strength)))
    numerics = numerics or config

    try:
        solution = solve_floquet(model, drive, numerics)
    except NumericalError as error:
        report.add(_failure(CHECK_FLOQUET, error))
        return report
    report.add(_result(CHECK_FLOQUET, solution.residual,
                       detail="l_max={}".format(solution.l_max)))

    jobs = [
        (CHECK_MONODROMY, monodromy_check, (model, drive, solution)),
        (CHECK_ORTHOGONALITY, orthogonality_check, (solution,)),
        (CHECK_COMPLETENESS, completeness_check, (solution,)),
        (CHECK_SUM_RULE, sum_rule_check, (solution, model)),
    ]
    steady_checks = [
        (CHECK_HERMITICITY, hermiticity_check, ()),
        (CHECK_TRACE, trace_check, ()),
        (CHECK_POPULATIONS, population_check, ()),
    ]
    peak_checks = [(CHECK_APPENDIX, appendix_check),
                   (CHECK_GAUGE, gauge_check)]
    if model.n_levels == 2:
        peak_checks.append((CHECK_PARITY, parity_check))
    if label in (SCENARIO_LAMBDA_B, SCENARIO_LAMBDA_C):
        peak_checks.append((CHECK_PINEM_ABSENCE, pinem_absence_check))

    try:
        steady = to_floquet_basis(
            steady_state_fourier(model, drive, numerics, solution.l_max),
            solution)
    except FloqEelsBaseError as error:
        jobs.extend((name, _raise, (error,)) for name, _, _ in steady_checks)
        jobs.append((CHECK_CROSS_METHOD, _raise, (error,)))
        jobs.extend((name, _raise, (error,)) for name, _ in peak_checks)
    else:
        jobs.extend((name, function, (steady,))
                    for name, function, _ in steady_checks)
        jobs.append((CHECK_CROSS_METHOD, cross_validate_steady,
                     (model, drive, numerics, solution.l_max)))
        jobs.extend((name, function, (solution, steady, model))
                    for name, function in peak_checks)

    for _, check in run_across_workers(_run_check, jobs, threads,
                                       executor=ThreadPoolExecutor):
        report.add(check)
    log.info("validation of %s: %s", label,
             'passed' if report.passed else 'failed')

    return report


def _raise(error):
    raise error
