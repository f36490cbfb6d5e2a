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

import json
import logging
import os

import numpy as np


def log_message(msg: str, log: logging.Logger, *args, level=logging.INFO, **kwargs):
    """
    Logs a message.

    :param msg: Message to log
    :param log: logger where message should be logged
    :param level: optional log level, defaults to INFO
    :param args: a tuple of arguments passed to the logger
    :param kwargs: a dictionary of keyword arguments passed to the logger
    """
    log.log(level, msg, *args, **kwargs)


def get_logger(name):
    """
    Gets a logger with the given name.

    The level defaults to INFO and can be overridden with ``SECTORAL_LOG_LEVEL``.
    """
    log = logging.getLogger(name)
    if not log.handlers:
        formatter = logging.Formatter(
            "%(asctime)s - %(levelname)s - %(name)s/%(module)s: %(message)s"
        )
        handler = logging.StreamHandler()
        handler.setFormatter(formatter)
        log.addHandler(handler)
        log.propagate = False
    log.setLevel(os.getenv("SECTORAL_LOG_LEVEL", "INFO").upper())
    return log


def to_builtin(val):
    """
    Converts numpy scalars and arrays (possibly nested in dicts, lists or tuples) into plain Python values.
    """
    if isinstance(val, dict):
        return {str(k): to_builtin(v) for k, v in val.items()}
    if isinstance(val, (list, tuple)):
        return [to_builtin(v) for v in val]
    if isinstance(val, np.ndarray):
        return val.tolist()
    if isinstance(val, np.generic):
        return val.item()
    if isinstance(val, float) and not np.isfinite(val):
        return str(val)
    return val


def json_str(val):
    """
    Get the string representation of a json object.
    """
    try:
        return json.dumps(to_builtin(val), sort_keys=True)
    except TypeError:
        return str(val)
