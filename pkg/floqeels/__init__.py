# -*- coding: utf-8 -*-
# vim:fenc=utf-8
#
"""
floqeels
~~~~~~~~

A python library to compute electron energy-loss spectra of atoms under
continuous illumination, through Floquet states and a Lindblad steady state.
"""
__title__ = 'floqeels'
__license__ = 'Apache 2.0'
__version__ = '0.1.0'

from floqeels.model import (SCENARIOS, SCENARIO_TWO_LEVEL, SCENARIO_LAMBDA_A,
                            SCENARIO_LAMBDA_B, SCENARIO_LAMBDA_C)
from floqeels.status import (VALIDATION_CHECKS, EXIT_OK, EXIT_INPUT_ERROR,
                             EXIT_NUMERICAL_FAILURE, EXIT_VALIDATION_FAILURE)
