#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Config loader for the runs. Configuration files are either YAML mappings or
flat ``key = value`` text files with ``#`` comments; the latter may have
several comma-separated pairs on a line.
"""

from pathlib import Path
import re
from typing import Any, Dict, Optional, Union

from pydantic import ValidationError
import yaml

from tras_stbc.schemas import RunConfig


class ConfigurationError(ValueError):
    """Raised for invalid configurations; lists all problems found."""
    def __init__(self, errors: list[str]):
        super().__init__('Invalid configuration: ' + '; '.join(errors))
        self.errors = errors


ALIASES = {
    'feedback.pe': 'pe',
    'feedback.mapping': 'mapping',
    'feedback.permutation': 'permutation',
    'feedback.mixing': 'mixing',
}

# A comma only separates pairs if the next pair starts right after it
pair_separator = re.compile(r',\s*(?=[A-Za-z_][\w.-]*\s*=)')


def normalize_key(key: str) -> str:
    key = key.strip().lower()
    key = ALIASES.get(key, key)
    return key.replace('-', '_')


def parse_pairs(text: str) -> Dict[str, str]:
    """Parses the ``key = value`` text format to a dictionary."""
    values, errors = {}, []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        for pair in pair_separator.split(line):
            key, sep, value = pair.partition('=')
            if not sep or not key.strip():
                errors.append(f'line {line_no}: {pair!r} is not a '
                              'key = value pair')
                continue
            values[normalize_key(key)] = value.strip()
    if errors:
        raise ConfigurationError(errors)
    return values


def build_config(values: Dict[str, Any]) -> RunConfig:
    """Validates the configuration values."""
    values = {normalize_key(k): v for k, v in values.items() if v is not None}
    try:
        return RunConfig(**values)
    except ValidationError as ve:
        errors = []
        for error in ve.errors():
            location = '.'.join(str(loc) for loc in error['loc'])
            message = error['msg'].removeprefix('Value error, ')
            errors.append(f'{location}: {message}' if location else message)
        raise ConfigurationError(errors) from ve


def parse_config(text: str,
                 overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Parses and validates the ``key = value`` configuration in *text*. The
    values in *overrides* (e.g. from the command line) take precedence.
    """
    values = parse_pairs(text)
    values.update({normalize_key(k): v for k, v in (overrides or {}).items()
                   if v is not None})
    return build_config(values)


def load_config_file(config_file: Union[str, Path]) -> Dict[str, Any]:
    """Loads the (unvalidated) configuration values from a file."""
    config_file = Path(config_file)
    try:
        text = config_file.read_text()
    except FileNotFoundError:
        raise ConfigurationError([f'Config file {config_file} is missing.'])
    if config_file.suffix in ('.yaml', '.yml'):
        try:
            values = yaml.safe_load(text) or {}
        except yaml.YAMLError as ye:
            raise ConfigurationError([f'{config_file}: {ye}'])
        if not isinstance(values, dict):
            raise ConfigurationError(
                [f'{config_file} must contain a mapping of keys to values'])
        return {normalize_key(k): v for k, v in values.items()}
    return parse_pairs(text)


def load_config(config_file: Optional[Union[str, Path]] = None,
                overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Loads the configuration file and applies *overrides* on top of it."""
    values = load_config_file(config_file) if config_file else {}
    values.update({normalize_key(k): v for k, v in (overrides or {}).items()
                   if v is not None})
    return build_config(values)
