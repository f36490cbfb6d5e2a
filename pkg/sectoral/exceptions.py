"""
Copyright 2024 The sectoral-nk Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

   https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
"""

from typing import Dict


class SectoralException(Exception):
    """
    Base exception type.
    """

    code = "INTERNAL_ERROR"


class ConfigurationException(SectoralException):
    """
    Invalid configuration: unknown keys, out-of-range parameters or a flag that the model variant does not own.
    """

    code = "CONFIG_ERROR"


class PresetNotFound(ConfigurationException):
    """Raised when a preset name is not in the preset registry"""

    code = "PRESET_NOT_FOUND"


class DataRequired(ConfigurationException):
    """Raised when estimation is requested without a data file and without synthetic data"""

    code = "DATA_REQUIRED"


class DataSchemaException(ConfigurationException):
    """Raised when an input CSV misses a documented column or carries non-positive prices"""  # pylint: disable=line-too-long

    code = "SCHEMA_MISMATCH"


class NumericalException(SectoralException):
    """
    Base type of numerical failures.
    """

    code = "NUMERICAL_FAILURE"


class SteadyStateException(NumericalException):
    """Raised when the steady-state Newton iteration does not converge"""

    code = "STEADY_STATE_FAILED"


class DerivativeException(NumericalException):
    """Raised when a residual evaluation returns non-finite values while taking derivatives"""

    code = "DERIVATIVE_FAILED"


class SolutionException(NumericalException):
    """Raised when a perturbation solve hits a singular system or a non-determinate first-order solution"""  # pylint: disable=line-too-long

    code = "SOLUTION_FAILED"


class RamseyException(NumericalException):
    """Raised when the Ramsey system cannot be built or its steady state cannot be found"""  # pylint: disable=line-too-long

    code = "RAMSEY_FAILED"


class OptimizationException(NumericalException):
    """Raised when every start of a policy-rule search is infeasible"""

    code = "OPTIMIZATION_FAILED"


class SamplerException(NumericalException):
    """Raised when a sampler rejects every proposal of an adaptation window"""

    code = "SAMPLER_FAILED"


def error_report(exc: BaseException) -> Dict[str, str]:
    """Machine-readable description of a failure."""
    code = exc.code if isinstance(exc, SectoralException) else SectoralException.code
    return {"code": code, "type": type(exc).__name__, "message": str(exc)}
