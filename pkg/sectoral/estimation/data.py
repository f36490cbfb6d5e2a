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

from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..exceptions import DataSchemaException
from ..utils import get_logger, log_message
from .kalman import StateSpace
from .measurement import OBSERVABLES

log = get_logger(__name__)

RAW_COLUMNS = (
    "date", "GDP", "GDP_DEFL", "DUR", "DUR_DEFL", "RI", "RI_DEFL", "ND", "ND_DEFL", "SERV", "SERV_DEFL",
    "POP", "CE", "HOURS_C", "HOURS_D", "WAGE_C", "WAGE_D", "FFR",
)
POSITIVE_COLUMNS = tuple(c for c in RAW_COLUMNS if c not in ("date", "FFR"))
BASE_PERIOD = "2009Q1"


def _read(raw: Union[str, pd.DataFrame]) -> pd.DataFrame:
    frame = pd.read_csv(raw) if not isinstance(raw, pd.DataFrame) else raw.copy()
    missing = [c for c in RAW_COLUMNS if c not in frame.columns]
    if missing:
        raise DataSchemaException(f"Missing data columns: {', '.join(missing)}")
    return frame


def _base_row(frame: pd.DataFrame, base_period: str) -> int:
    dates = frame["date"].astype(str).str.replace(r"[\s:-]", "", regex=True).str.upper()
    hits = np.flatnonzero(dates.values == base_period.replace(":", "").replace("-", "").upper())
    if hits.size:
        return int(hits[0])
    log_message("Base period %s not in the sample; indexing to the first row", log, base_period)
    return 0


def sectoral_deflator(nominal_a: pd.Series, deflator_a: pd.Series, nominal_b: pd.Series,
                      deflator_b: pd.Series):
    """
    Nominal-share weighted deflator of two components and the real aggregate.

    :return: ``(weight_a, weight_b, deflator, real)``; the weights sum to one every period
    """
    total = nominal_a + nominal_b
    weight_a, weight_b = nominal_a / total, nominal_b / total
    deflator = weight_a * deflator_a + weight_b * deflator_b
    return weight_a, weight_b, deflator, total / deflator


def prepare_observables(raw: Union[str, pd.DataFrame], base_period: str = BASE_PERIOD) -> pd.DataFrame:
    """
    Turns raw national-accounts and labor-market series into the ten observables.

    Real per-capita series and real wages are logged and scaled by 100 and then first-differenced; hours are
    per-capita logs times 100, demeaned over the sample; inflation is 100 times the log change of the sectoral
    deflator; the quarterly policy rate is the annual rate divided by four. The first row is lost to
    differencing.

    :param raw: CSV path or frame with the columns in ``RAW_COLUMNS``
    :raises DataSchemaException: on missing columns or non-positive levels
    """
    frame = _read(raw)
    values = frame[list(POSITIVE_COLUMNS)].astype(float)
    if (values <= 0.0).any().any():
        bad = values.columns[(values <= 0.0).any()].tolist()
        raise DataSchemaException(f"Non-positive values in {', '.join(bad)}")
    base = _base_row(frame, base_period)
    pop = values["POP"] / values["POP"].iloc[base]
    emp = values["CE"] / values["CE"].iloc[base]
    _, _, p_d, durables = sectoral_deflator(values["DUR"], values["DUR_DEFL"], values["RI"], values["RI_DEFL"])
    _, _, p_c, nondurables = sectoral_deflator(values["ND"], values["ND_DEFL"], values["SERV"],
                                               values["SERV_DEFL"])

    def per_capita(series):
        return 100.0 * np.log(series / pop)

    levels = pd.DataFrame({
        "dY": per_capita(values["GDP"] / values["GDP_DEFL"]),
        "dI_D": per_capita(durables),
        "dC": per_capita(nondurables),
        "dW_C": 100.0 * np.log(values["WAGE_C"] / values["GDP_DEFL"]),
        "dW_D": 100.0 * np.log(values["WAGE_D"] / values["GDP_DEFL"]),
    })
    out = levels.diff()
    for column, hours in (("N_C", "HOURS_C"), ("N_D", "HOURS_D")):
        out[column] = 100.0 * np.log(values[hours] * emp / pop)
    out["Pi_C"] = 100.0 * np.log(p_c).diff()
    out["Pi_D"] = 100.0 * np.log(p_d).diff()
    out["R"] = frame["FFR"].astype(float) / 4.0
    out.insert(0, "date", frame["date"])
    out = out.iloc[1:].reset_index(drop=True)
    for column in ("N_C", "N_D"):
        out[column] = out[column] - out[column].mean()
    return out[["date", *OBSERVABLES]]


def observables_matrix(frame: pd.DataFrame, observables: Sequence[str] = OBSERVABLES) -> np.ndarray:
    """
    Data matrix in ``observables`` order.

    :raises DataSchemaException: on missing columns or missing values
    """
    missing = [c for c in observables if c not in frame.columns]
    if missing:
        raise DataSchemaException(f"Missing observables: {', '.join(missing)}")
    data = frame[list(observables)].to_numpy(dtype=float)
    if np.isnan(data).any():
        raise DataSchemaException("Observables contain missing values")
    return data


def simulate_observables(ss: StateSpace, periods: int, seed: int = 0, burn_in: int = 200,
                         start: Optional[str] = None) -> pd.DataFrame:
    """
    Draws ``periods`` observations from the state space, measurement noise included.

    :param start: optional first quarter (e.g. ``"1969Q2"``) for a date column
    """
    rng = np.random.default_rng(seed)
    state = np.zeros(ss.n_states)
    noise = np.linalg.cholesky(ss.H) if np.any(ss.H) else np.zeros_like(ss.H)
    rows = np.empty((periods, ss.n_observables))
    for t in range(burn_in + periods):
        state = ss.T @ state + ss.R @ rng.standard_normal(ss.R.shape[1])
        if t >= burn_in:
            rows[t - burn_in] = ss.c + ss.Z @ state + noise @ rng.standard_normal(ss.n_observables)
    frame = pd.DataFrame(rows, columns=list(ss.observables or OBSERVABLES))
    if start is not None:
        frame.insert(0, "date", pd.period_range(start=start, periods=periods, freq="Q").astype(str))
    return frame
