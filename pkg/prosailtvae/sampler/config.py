import configparser
import hashlib
import json
import operator
import pathlib
from dataclasses import dataclass, asdict, field
from typing import Dict, Optional, Tuple

import numpy as np

from ..errors import ConfigError
from ..types import PARAMETER_NAMES, PARAMETER_BOUNDS, GEOMETRY_NAMES

FAMILIES = ('truncated_normal', 'uniform')
NOISE_MODES = ('absolute', 'relative')

_comparators = {
    '>=': operator.ge,
    '>': operator.gt,
    '<=': operator.le,
    '<': operator.lt
}


@dataclass(frozen=True)
class VariableSpec:
    """Sampling distribution of one simulation variable

    For the truncated normal family, `mean` defaults to the interval midpoint and
    `sd` to a quarter of the interval width.
    """
    name: str
    family: str
    lower: float
    upper: float
    mean: Optional[float] = None
    sd: Optional[float] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f'variable {self.name}: unknown family "{self.family}", expected one of {FAMILIES}')
        if not self.lower < self.upper:
            raise ConfigError(f'variable {self.name}: lower ({self.lower}) must be < upper ({self.upper})')
        if self.family == 'truncated_normal':
            if self.mean is None:
                object.__setattr__(self, 'mean', (self.lower + self.upper) / 2)
            if self.sd is None:
                object.__setattr__(self, 'sd', (self.upper - self.lower) / 4)
            if not self.sd > 0:
                raise ConfigError(f'variable {self.name}: sd must be > 0, got {self.sd}')
        elif self.mean is not None or self.sd is not None:
            raise ConfigError(f'variable {self.name}: mean and sd only apply to the truncated_normal family')


@dataclass(frozen=True)
class CoDistributionRule:
    """Narrows the bounds of dependent variables when the driving variable satisfies a threshold"""
    name: str
    variable: str
    comparator: str
    threshold: float
    overrides: Tuple[Tuple[str, float, float], ...]

    def __post_init__(self):
        if self.comparator not in _comparators:
            raise ConfigError(f'rule {self.name}: unknown comparator "{self.comparator}"')
        for name, lower, upper in self.overrides:
            if not lower < upper:
                raise ConfigError(f'rule {self.name}: override of {name} needs lower < upper, got {lower}, {upper}')

    @property
    def trigger(self) -> str:
        return f'{self.variable} {self.comparator} {self.threshold:g}'

    def fires(self, values: np.ndarray) -> np.ndarray:
        """Boolean mask of where the trigger holds for the driving variable's values"""
        return _comparators[self.comparator](values, self.threshold)


def _default_variables() -> Tuple[VariableSpec, ...]:
    uniform = {'soil_wet'} | set(GEOMETRY_NAMES)
    return tuple(
        VariableSpec(name, 'uniform' if name in uniform else 'truncated_normal', *PARAMETER_BOUNDS[name])
        for name in PARAMETER_NAMES
    )


def _default_rules() -> Tuple[CoDistributionRule, ...]:
    return (CoDistributionRule('dense_canopy', 'lai', '>=', 7.0, (
        ('cab', 45.0, 90.0),
        ('n', 1.3, 1.8),
        ('soil_bright', 0.5, 1.2)
    )),)


@dataclass(frozen=True)
class SamplerConfig:
    """Simulation distribution, noise model and dataset size

    Args:
        variables (Tuple[VariableSpec, ...]): one spec per variable in PARAMETER_NAMES.
        rules (Tuple[CoDistributionRule, ...]): co-distribution rules, applied in order.
        n (int): number of samples.
        seed (int): random seed.
        noise_level (float): standard deviation of the band noise.
        noise_mode (str): "absolute" reflectance units or "relative" to the band value.
        chunk_size (int): samples simulated per decoder evaluation.
    """
    variables: Tuple[VariableSpec, ...] = field(default_factory=_default_variables)
    rules: Tuple[CoDistributionRule, ...] = field(default_factory=_default_rules)
    n: int = 500000
    seed: int = 0
    noise_level: float = 0.005
    noise_mode: str = 'absolute'
    chunk_size: int = 10000

    def __post_init__(self):
        names = [spec.name for spec in self.variables]
        unknown = sorted(set(names) - set(PARAMETER_NAMES))
        if unknown:
            raise ConfigError(f'unknown variable(s): {", ".join(unknown)}')
        missing = [name for name in PARAMETER_NAMES if name not in names]
        if missing or len(names) != len(PARAMETER_NAMES):
            raise ConfigError(f'every variable must be specified exactly once, missing: {", ".join(missing)}')
        object.__setattr__(self, 'variables', tuple(sorted(self.variables, key=lambda s: PARAMETER_NAMES.index(s.name))))

        for spec in self.variables:
            hard_lower, hard_upper = PARAMETER_BOUNDS[spec.name]
            if spec.lower < hard_lower or spec.upper > hard_upper:
                raise ConfigError(f'variable {spec.name}: bounds [{spec.lower}, {spec.upper}] exceed the '
                                  f'physical range [{hard_lower}, {hard_upper}]')

        drivers = {rule.variable for rule in self.rules}
        for rule in self.rules:
            if rule.variable not in PARAMETER_NAMES:
                raise ConfigError(f'rule {rule.name}: unknown trigger variable "{rule.variable}"')
            for name, lower, upper in rule.overrides:
                if name not in PARAMETER_NAMES:
                    raise ConfigError(f'rule {rule.name}: unknown variable "{name}"')
                if name in drivers:
                    raise ConfigError(f'rule {rule.name}: {name} drives a rule and cannot be overridden')
                base = self.spec(name)
                if lower < base.lower or upper > base.upper:
                    raise ConfigError(f'rule {rule.name}: override [{lower}, {upper}] of {name} is not nested '
                                      f'inside [{base.lower}, {base.upper}]')

        if self.noise_level < 0:
            raise ConfigError(f'noise_level must be >= 0, got {self.noise_level}')
        if self.noise_mode not in NOISE_MODES:
            raise ConfigError(f'unknown noise_mode "{self.noise_mode}", expected one of {NOISE_MODES}')
        if self.n < 1 or self.chunk_size < 1:
            raise ConfigError(f'n and chunk_size must be positive, got {self.n} and {self.chunk_size}')

    def spec(self, name: str) -> VariableSpec:
        return self.variables[PARAMETER_NAMES.index(name)]

    @property
    def drivers(self) -> Tuple[str, ...]:
        """Variables referenced by rule triggers, these are drawn before all others"""
        return tuple(dict.fromkeys(rule.variable for rule in self.rules))

    def to_dict(self) -> Dict:
        return asdict(self)

    @property
    def hash(self) -> str:
        return config_hash(self)


def config_hash(cfg: SamplerConfig) -> str:
    """sha256 of the canonical JSON serialization"""
    canonical = json.dumps(cfg.to_dict(), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def default_sampler_config(**kwargs) -> SamplerConfig:
    return SamplerConfig(**kwargs)


def _parse_float(section, key, value):
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f'[{section}] {key}: "{value}" is not a number') from None


def _parse_simulation(parser, overrides):
    section = parser['simulation']
    parsers = {'n': int, 'seed': int, 'noise_level': float, 'noise_mode': str, 'chunk_size': int, 'rules': str}
    for key, value in section.items():
        if key not in parsers:
            raise ConfigError(f'[simulation] unknown key "{key}", expected one of {", ".join(parsers)}')
        try:
            overrides[key] = parsers[key](value)
        except ValueError:
            raise ConfigError(f'[simulation] {key}: could not parse "{value}"') from None


def _parse_variable(parser, section_name, variables):
    name = section_name.split('.', 1)[1]
    if name not in PARAMETER_NAMES:
        raise ConfigError(f'[{section_name}] unknown variable "{name}"')
    section = parser[section_name]
    unknown = sorted(set(section.keys()) - {'family', 'lower', 'upper', 'mean', 'sd'})
    if unknown:
        raise ConfigError(f'[{section_name}] unknown key(s): {", ".join(unknown)}')

    base = variables[name]
    family = section.get('family', base.family)
    lower = _parse_float(section_name, 'lower', section['lower']) if 'lower' in section else base.lower
    upper = _parse_float(section_name, 'upper', section['upper']) if 'upper' in section else base.upper
    mean = _parse_float(section_name, 'mean', section['mean']) if 'mean' in section else None
    sd = _parse_float(section_name, 'sd', section['sd']) if 'sd' in section else None
    variables[name] = VariableSpec(name, family, lower, upper, mean, sd)


def _parse_rule(parser, section_name):
    name = section_name.split('.', 1)[1]
    section = parser[section_name]
    if 'trigger' not in section:
        raise ConfigError(f'[{section_name}] missing key "trigger"')
    trigger = section['trigger'].split()
    if len(trigger) != 3:
        raise ConfigError(f'[{section_name}] trigger must read "<variable> <comparator> <threshold>"')
    variable, comparator, threshold = trigger

    overrides = []
    for key, value in section.items():
        if key == 'trigger':
            continue
        if key not in PARAMETER_NAMES:
            raise ConfigError(f'[{section_name}] unknown variable "{key}"')
        bounds = [token.strip() for token in value.split(',')]
        if len(bounds) != 2:
            raise ConfigError(f'[{section_name}] {key}: expected "<lower>, <upper>"')
        overrides.append((key, *(_parse_float(section_name, key, token) for token in bounds)))
    return CoDistributionRule(name, variable, comparator, _parse_float(section_name, 'trigger', threshold),
                              tuple(overrides))


def parse_sampler_config(text: str, source: str = '<string>', ignore_sections=()) -> SamplerConfig:
    """Parses an INI sampler configuration

    Sections are `[simulation]`, `[variable.<name>]` and `[rule.<name>]`. Variables that are
    not mentioned keep their defaults. When any `[rule.*]` section is present, the default
    rules are replaced. `rules = none` in `[simulation]` samples without co-distribution rules,
    `rules = default` is the default. Sections listed in `ignore_sections` belong to other consumers.

    Raises:
        ConfigError: for unknown sections, keys or variables and for inconsistent bounds.
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as error:
        raise ConfigError(f'{source}: {error}') from None

    defaults = SamplerConfig()
    variables = {spec.name: spec for spec in defaults.variables}
    rules = []
    overrides = {}
    for section_name in parser.sections():
        if section_name in ignore_sections:
            continue
        elif section_name == 'simulation':
            _parse_simulation(parser, overrides)
        elif section_name.startswith('variable.'):
            _parse_variable(parser, section_name, variables)
        elif section_name.startswith('rule.'):
            rules.append(_parse_rule(parser, section_name))
        else:
            raise ConfigError(f'{source}: unknown section [{section_name}]')

    rules_mode = overrides.pop('rules', 'default').strip().lower()
    if rules_mode not in ('default', 'none'):
        raise ConfigError(f'[simulation] rules: expected "default" or "none", got "{rules_mode}"')
    if rules_mode == 'none':
        if rules:
            raise ConfigError(f'{source}: rules = none contradicts the [rule.*] sections')
    elif not rules:
        rules = defaults.rules

    return SamplerConfig(variables=tuple(variables.values()), rules=tuple(rules), **overrides)


def read_sampler_config(path: pathlib.Path, ignore_sections=()) -> SamplerConfig:
    path = pathlib.Path(path)
    if not path.is_file():
        raise ConfigError(f'{path}: config file not found')
    return parse_sampler_config(path.read_text(encoding='utf-8'), source=str(path), ignore_sections=ignore_sections)
