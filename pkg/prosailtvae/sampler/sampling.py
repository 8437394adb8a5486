from typing import Tuple

import numpy as np
import scipy.stats

from ..types import PARAMETER_NAMES, BAND_IDS, ParameterVector
from .config import VariableSpec, SamplerConfig

NUM_PARAMETERS = len(PARAMETER_NAMES)
NUM_BANDS = len(BAND_IDS)


def _inverse_cdf(spec: VariableSpec, u: np.ndarray, lower: np.ndarray = None, upper: np.ndarray = None):
    lower = spec.lower if lower is None else lower
    upper = spec.upper if upper is None else upper
    if spec.family == 'uniform':
        return lower + u * (upper - lower)
    a = (lower - spec.mean) / spec.sd
    b = (upper - spec.mean) / spec.sd
    value = scipy.stats.truncnorm.ppf(u, a, b, loc=spec.mean, scale=spec.sd)
    return np.clip(value, lower, upper)


def sample_truncated_normal(spec: VariableSpec, rng: np.random.Generator, size=None):
    """Draws from a truncated normal by inverse-CDF transform of uniform draws

    Args:
        spec (VariableSpec): a truncated_normal variable.
        rng (np.random.Generator): random stream.
        size (int, optional): number of draws, None for a scalar.

    Returns:
        Union[float, np.ndarray]: values in [spec.lower, spec.upper].
    """
    if spec.family != 'truncated_normal':
        raise ValueError(f'variable {spec.name} has family {spec.family}, expected truncated_normal')
    value = _inverse_cdf(spec, rng.random(size))
    return float(value) if size is None else value


def parameters_from_uniforms(cfg: SamplerConfig, u: np.ndarray) -> np.ndarray:
    """Maps uniform draws [n, 14] to parameters [n, 14], in PARAMETER_NAMES order

    Rule drivers are transformed first. Each rule that fires narrows the bounds of its
    dependent variables before these are transformed.
    """
    u = np.atleast_2d(u)
    params = np.empty_like(u, dtype=np.float64)
    lower = np.broadcast_to(np.array([spec.lower for spec in cfg.variables]), u.shape).copy()
    upper = np.broadcast_to(np.array([spec.upper for spec in cfg.variables]), u.shape).copy()

    drivers = [PARAMETER_NAMES.index(name) for name in cfg.drivers]
    for column in drivers:
        params[:, column] = _inverse_cdf(cfg.variables[column], u[:, column])

    for rule in cfg.rules:
        fired = rule.fires(params[:, PARAMETER_NAMES.index(rule.variable)])
        for name, rule_lower, rule_upper in rule.overrides:
            column = PARAMETER_NAMES.index(name)
            lower[fired, column] = rule_lower
            upper[fired, column] = rule_upper

    for column, spec in enumerate(cfg.variables):
        if column not in drivers:
            params[:, column] = _inverse_cdf(spec, u[:, column], lower[:, column], upper[:, column])
    return params


def sample_parameters(cfg: SamplerConfig, rng: np.random.Generator, size: int = 1) -> ParameterVector:
    """Draws simulation parameters, LAI first and then its co-distributed variables

    Args:
        cfg (SamplerConfig): the variable distributions and co-distribution rules.
        rng (np.random.Generator): random stream.
        size (int, optional): number of parameter vectors. Defaults to 1.

    Returns:
        ParameterVector: parameters with fields of shape [size].
    """
    return ParameterVector.from_tensor(parameters_from_uniforms(cfg, rng.random((size, NUM_PARAMETERS))))


def apply_noise(bands: np.ndarray, eps: np.ndarray, level: float, mode: str = 'absolute') -> np.ndarray:
    """Perturbs bands with given standard normal draws and clips to [0, 1]"""
    if level < 0:
        raise ValueError(f'noise level must be >= 0, got {level}')
    if mode == 'absolute':
        noisy = bands + level * eps
    elif mode == 'relative':
        noisy = bands * (1.0 + level * eps)
    else:
        raise ValueError(f'unknown noise mode "{mode}"')
    return np.clip(noisy, 0.0, 1.0)


def add_noise(bands: np.ndarray, rng: np.random.Generator, level: float, mode: str = 'absolute') -> np.ndarray:
    """Adds independent Gaussian noise to every band

    Args:
        bands (np.ndarray): band reflectance.
        rng (np.random.Generator): random stream.
        level (float): noise standard deviation, >= 0.
        mode (str, optional): "absolute" reflectance units or "relative" to each value. Defaults to 'absolute'.

    Returns:
        np.ndarray: noisy reflectance clipped to [0, 1].
    """
    bands = np.asarray(bands, dtype=np.float64)
    return apply_noise(bands, rng.standard_normal(bands.shape), level, mode)


def sample_streams(seed: int, start: int, stop: int) -> Tuple[np.ndarray, np.ndarray]:
    """Per-sample random draws for the indices [start, stop)

    Each sample has its own stream seeded by (seed, index), such that any partition of
    the indices yields the same draws.

    Returns:
        Tuple[np.ndarray, np.ndarray]: uniforms [n, 14] and standard normals [n, 10].
    """
    uniforms = np.empty((stop - start, NUM_PARAMETERS), dtype=np.float64)
    normals = np.empty((stop - start, NUM_BANDS), dtype=np.float64)
    for row, index in enumerate(range(start, stop)):
        rng = np.random.default_rng([seed, index])
        uniforms[row] = rng.random(NUM_PARAMETERS)
        normals[row] = rng.standard_normal(NUM_BANDS)
    return uniforms, normals
