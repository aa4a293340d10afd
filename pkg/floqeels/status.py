# -*- coding: utf-8 -*-
# vim:fenc=utf-8

"""
floqeels.status
~~~~~~~~~~~~~~~

This module categorizes the outcome of a run: exit codes of the command line
tool and the names and tolerances of the validation checks.

"""
EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NUMERICAL_FAILURE = 2
EXIT_VALIDATION_FAILURE = 3

CHECK_MODEL = 'model'
CHECK_FLOQUET = 'floquet'
CHECK_MONODROMY = 'monodromy'
CHECK_ORTHOGONALITY = 'orthogonality'
CHECK_COMPLETENESS = 'completeness'
CHECK_SUM_RULE = 'sum_rule'
CHECK_HERMITICITY = 'hermiticity'
CHECK_TRACE = 'trace'
CHECK_POPULATIONS = 'populations'
CHECK_CROSS_METHOD = 'cross_method'
CHECK_APPENDIX = 'appendix'
CHECK_GAUGE = 'gauge'
CHECK_PARITY = 'parity'
CHECK_PINEM_ABSENCE = 'pinem_absence'

# Order in which checks appear in a report.
VALIDATION_CHECKS = [
    CHECK_MODEL,
    CHECK_FLOQUET,
    CHECK_MONODROMY,
    CHECK_ORTHOGONALITY,
    CHECK_COMPLETENESS,
    CHECK_SUM_RULE,
    CHECK_HERMITICITY,
    CHECK_TRACE,
    CHECK_POPULATIONS,
    CHECK_CROSS_METHOD,
    CHECK_APPENDIX,
    CHECK_GAUGE,
    CHECK_PARITY,
    CHECK_PINEM_ABSENCE,
]

MONODROMY_TOLERANCE = 1e-8
CROSS_METHOD_TOLERANCE = 1e-6
ALGEBRAIC_TOLERANCE = 1e-10
GAUGE_TOLERANCE = 1e-14

CHECK_TOLERANCES = {
    CHECK_MODEL: 0.0,
    CHECK_FLOQUET: ALGEBRAIC_TOLERANCE,
    CHECK_MONODROMY: MONODROMY_TOLERANCE,
    CHECK_ORTHOGONALITY: ALGEBRAIC_TOLERANCE,
    CHECK_COMPLETENESS: ALGEBRAIC_TOLERANCE,
    CHECK_SUM_RULE: ALGEBRAIC_TOLERANCE,
    CHECK_HERMITICITY: ALGEBRAIC_TOLERANCE,
    CHECK_TRACE: ALGEBRAIC_TOLERANCE,
    CHECK_POPULATIONS: ALGEBRAIC_TOLERANCE,
    CHECK_CROSS_METHOD: CROSS_METHOD_TOLERANCE,
    CHECK_APPENDIX: ALGEBRAIC_TOLERANCE,
    CHECK_GAUGE: GAUGE_TOLERANCE,
    CHECK_PARITY: ALGEBRAIC_TOLERANCE,
    CHECK_PINEM_ABSENCE: ALGEBRAIC_TOLERANCE,
}
