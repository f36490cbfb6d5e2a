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

"""
Shared builders for the unit tests.
"""

import os
import tempfile

import numpy as np
import pandas as pd

from sectoral.estimation import StateSpace
from sectoral.estimation.data import RAW_COLUMNS
from sectoral.model import ModelVariant, VariantKind, build_model, stylized_calibration
from sectoral.rules import PolicyRuleSpec

SLOW = os.getenv("SECTORAL_SLOW_TESTS") == "1"


def symmetric_params(**overrides):
    """The symmetric stylized calibration."""
    return stylized_calibration(**overrides)


def stylized_system(kind=VariantKind.STYLIZED_NONDURABLE, rule=None, zlb_weight=0.0, **overrides):
    """A stylized economy with the default rule attached unless ``rule`` is ``False``."""
    if rule is None:
        rule = PolicyRuleSpec()
    variant = ModelVariant(kind, rule=rule or None, zlb_weight=zlb_weight)
    return build_model(variant, symmetric_params(**overrides))


def ar1_state_space(phi=0.5, q=1.0, h=0.25, c=0.3):
    """Univariate AR(1) state observed with noise, started from its stationary distribution."""
    return StateSpace(
        T=np.array([[phi]]),
        R=np.array([[np.sqrt(q)]]),
        Z=np.array([[1.0]]),
        c=np.array([c]),
        H=np.array([[h]]),
        P0=np.array([[q / (1.0 - phi ** 2)]]),
        observables=("y",),
    )


def raw_frame(periods=8, ffr=4.0):
    """Raw series with constant prices, population and hours, and output growing one percent a quarter."""
    growth = 1.01 ** np.arange(periods)
    frame = pd.DataFrame({column: np.ones(periods) for column in RAW_COLUMNS if column != "date"})
    for column in ("GDP", "DUR", "RI", "ND", "SERV"):
        frame[column] = 100.0 * growth
    frame["FFR"] = ffr
    frame.insert(0, "date", pd.period_range(start="2008Q1", periods=periods, freq="Q").astype(str))
    return frame[list(RAW_COLUMNS)]


def temp_home():
    """Fresh directory for experiment stores."""
    return tempfile.mkdtemp(prefix="sectoral-test-")
