import configparser
import dataclasses
import os
import pathlib
import typing
from typing import Any, Dict, Mapping, Optional

from ..errors import ConfigError

ENV_PREFIX = 'PROSAILTVAE_'
RUN_SECTIONS = ('train', 'encoder', 'infer', 'evaluate')
_sampler_sections = ('simulation', 'variable.', 'rule.')
_true = ('1', 'true', 'yes', 'on')
_false = ('0', 'false', 'no', 'off')


def read_config_file(path: pathlib.Path) -> configparser.ConfigParser:
    """Reads the INI run configuration

    Sections are the sampler sections ([simulation], [variable.*], [rule.*]) and the
    command sections [train], [encoder], [infer] and [evaluate].

    Raises:
        ConfigError: if the file is missing, malformed, or has an unknown section.
    """
    path = pathlib.Path(path)
    if not path.is_file():
        raise ConfigError(f'{path}: config file not found')
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read(path, encoding='utf-8')
    except configparser.Error as error:
        raise ConfigError(f'{path}: {error}') from None

    for section in parser.sections():
        if section not in RUN_SECTIONS and not section.startswith(_sampler_sections):
            raise ConfigError(f'{path}: unknown section [{section}]')
    return parser


def _unwrap_optional(field_type):
    if typing.get_origin(field_type) is typing.Union:
        args = [arg for arg in typing.get_args(field_type) if arg is not type(None)]
        if len(args) == 1:
            return args[0], True
    return field_type, False


def _coerce(field_type, value: str, where: str):
    field_type, optional = _unwrap_optional(field_type)
    if optional and value.strip().lower() in ('', 'none'):
        return None
    try:
        if field_type is bool:
            lowered = value.strip().lower()
            if lowered not in _true + _false:
                raise ValueError(value)
            return lowered in _true
        if field_type in (int, float, str):
            return field_type(value.strip())
        if field_type is pathlib.Path:
            return pathlib.Path(value.strip())
    except ValueError:
        raise ConfigError(f'{where}: could not parse "{value}" as {field_type.__name__}') from None
    raise ConfigError(f'{where}: unsupported setting type {field_type}')


def layer_dataclass(instance, section: Optional[Mapping[str, str]] = None, flags: Optional[Dict[str, Any]] = None,
                    where: str = 'config', environ: Optional[Mapping[str, str]] = None,
                    env_prefix: str = ENV_PREFIX, exclude=()):
    """Applies configuration layers onto a frozen dataclass

    Layers, lowest precedence first: the instance (dataclass defaults), the INI section,
    environment variables named `{env_prefix}{FIELD}` and command-line flags. Flags with
    the value None are treated as not given.

    Args:
        instance: the frozen dataclass holding the defaults.
        section (Mapping[str, str], optional): the INI section of this dataclass.
        flags (Dict[str, Any], optional): parsed command-line values.
        where (str, optional): name used in error messages. Defaults to 'config'.
        environ (Mapping[str, str], optional): the environment. Defaults to os.environ.
        env_prefix (str, optional): prefix of environment variables. Defaults to 'PROSAILTVAE_'.
        exclude (Iterable[str], optional): fields that are not configurable this way.

    Raises:
        ConfigError: for unknown keys in the section, or values that do not parse.

    Returns:
        the updated dataclass instance.
    """
    environ = os.environ if environ is None else environ
    hints = typing.get_type_hints(type(instance))
    names = [field.name for field in dataclasses.fields(instance) if field.name not in exclude]

    updates = {}
    if section is not None:
        unknown = sorted(set(section.keys()) - set(names))
        if unknown:
            raise ConfigError(f'{where}: unknown key(s) {", ".join(unknown)}')
        for key, value in section.items():
            updates[key] = _coerce(hints[key], value, f'{where} {key}')

    for name in names:
        env_name = f'{env_prefix}{name.upper()}'
        if env_name in environ:
            updates[name] = _coerce(hints[name], environ[env_name], f'environment {env_name}')

    for name, value in (flags or {}).items():
        if name in names and value is not None:
            updates[name] = value

    return dataclasses.replace(instance, **updates)
