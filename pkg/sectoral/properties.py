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

import copy
import threading
from contextlib import closing
from datetime import datetime
from pathlib import Path
from typing import Iterable

import yaml

from .exceptions import ConfigurationException


class PropertyManager:
    """
    Dot-key store for presets, run configurations and manifests.

    Files are read with :func:`yaml.safe_load`, so both YAML and JSON documents load.
    """

    def __init__(self, properties: dict = None):
        self._lock = threading.Lock()
        self._properties = copy.deepcopy(properties) if properties else {}

    @classmethod
    def from_file(cls, config_file) -> "PropertyManager":
        """
        Builds a manager from a YAML or JSON file.

        :param config_file: path of the file
        :rtype: PropertyManager
        """
        mgr = cls()
        mgr.load(str(config_file), replace=True)
        return mgr

    def is_key(self, key) -> bool:
        """
        Identifies if a key exists or not.

        :param key: The key of the value; should be a dot separated
        string of keys from root up the tree.
        :return: `True` if the key exists in the properties; `False`
        if the key doesn't exist in the properties.
        """
        if not key:
            return False
        branch = self._properties
        path, _, leaf = key.rpartition(".")
        if path:
            for part in path.split("."):
                if not isinstance(branch, dict):
                    return False
                branch = branch.get(part, {})
        return isinstance(branch, dict) and leaf in branch

    def get(self, key: str, default=None):
        """
        Gets a property value for the dot-separated key.

        :param key: the key of the value; should be a dot-separated string
        of keys from root up the tree
        :param default: returned when the key is missing
        :return: a deep copy of the tree under the key
        """
        if not key:
            return default
        value = self._properties
        for part in key.split("."):
            if not isinstance(value, dict) or part not in value:
                return default
            value = value[part]
        with self._lock:
            return copy.deepcopy(value)

    def set(self, key: str, value):
        """
        Sets a key-value pair, creating intermediate sections.

        :param key: the key string
        :param value: the value of the key
        """
        if not key or not isinstance(key, str):
            raise ValueError("The key must be a valid str")
        *path, leaf = key.split(".")
        with self._lock:
            branch = self._properties
            for part in path:
                if not isinstance(branch.get(part), dict):
                    branch[part] = {}
                branch = branch[part]
            branch[leaf] = copy.deepcopy(value)

    def remove(self, key) -> bool:
        """
        Removes a key-value from the in-memory configuration dictionary based on the key.

        :return: `True` if the key is removed; `False` if the key is not found
        """
        if not self.is_key(key):
            return False
        path, _, leaf = key.rpartition(".")
        branch = self._properties
        if path:
            for part in path.split("."):
                branch = branch[part]
        with self._lock:
            del branch[leaf]
        return True

    def get_all(self) -> dict:
        """
        Gets all the properties.

        :returns: a deep copy of the key-value pairs
        """
        with self._lock:
            return copy.deepcopy(self._properties)

    def validate(self, allowed: Iterable[str], section: str = None) -> None:
        """
        Rejects keys that are not in ``allowed``.

        :param allowed: accepted top-level keys (of ``section`` when given)
        :param section: optional dot-key of the section to validate
        :raises ConfigurationException: on the first unknown key
        """
        tree = self.get(section) if section else self._properties
        if tree is None:
            return
        if not isinstance(tree, dict):
            raise ConfigurationException(f"Section {section} must be a mapping")
        unknown = sorted(set(tree) - set(allowed))
        if unknown:
            where = f" in {section}" if section else ""
            raise ConfigurationException(f"Unknown configuration keys{where}: {', '.join(unknown)}")

    def load(self, config_file, replace=False) -> bool:
        """
        Loads the properties from a YAML or JSON file and merges them in, or replaces them.

        :param config_file: the path and filename of the file
        :param replace: boolean value that identifies if the file is to be added or replaced
        :return: `True` once loaded
        """
        if not config_file or not isinstance(config_file, str):
            raise ValueError("The properties configuration file must be a valid str")
        path = Path(config_file)
        if not path.is_file():
            raise FileNotFoundError(f"Can't find the configuration file {path}")
        try:
            loaded = self._load(path)
        except (IOError, TypeError, yaml.YAMLError) as exc:
            raise ConfigurationException(f"Cannot read {path}: {exc}") from exc
        if replace:
            with self._lock:
                self._properties = loaded
            return True
        for key, value in loaded.items():
            self.set(key, value)
        return True

    def save(self, file_name) -> None:
        """
        Saves properties to a YAML file and stamps ``meta.updated``.

        :param file_name: file in which to save properties
        """
        self.set("meta.updated", str(datetime.now()))
        self._dump(self.get_all(), file_name)

    @staticmethod
    def join(*names, sep=None) -> str:
        """
        Used to create a name string or join paths by passing sep=os.path.sep.
        """
        _sep = sep if sep is not None else "."
        return _sep.join(map(str, names))

    @staticmethod
    def _dump(data, config_file) -> None:
        path = Path(config_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        try:
            with closing(open(path, "w", encoding="utf-8")) as ymlfile:
                yaml.safe_dump(data, ymlfile, default_flow_style=False, sort_keys=True)
        except IOError as exc:
            raise IOError(f"The configuration file {config_file} failed to open with: {exc}") from exc

    @staticmethod
    def _load(config_file) -> dict:
        with closing(open(config_file, "r", encoding="utf-8")) as ymlfile:
            loaded = yaml.safe_load(ymlfile)
        if not isinstance(loaded, dict) or not loaded:
            raise TypeError(f"The configuration file {config_file} could not be loaded as a dict type")
        return loaded
