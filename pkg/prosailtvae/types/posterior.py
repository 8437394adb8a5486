from dataclasses import dataclass
from typing import Tuple

import numpy as np
import tensorflow as tf

from .params import LATENT_NAMES, latent_bounds


@dataclass(frozen=True)
class TruncatedNormalSpec:
    """Two-sided truncated normal, all fields broadcastable tensors"""
    mu: tf.Tensor
    sigma: tf.Tensor
    lower: tf.Tensor
    upper: tf.Tensor

    @classmethod
    def create(cls, mu, sigma, lower=0.0, upper=1.0) -> 'TruncatedNormalSpec':
        mu = tf.convert_to_tensor(mu, dtype=tf.dtypes.float64)
        return cls(mu,
                   tf.convert_to_tensor(sigma, dtype=tf.dtypes.float64),
                   tf.broadcast_to(tf.convert_to_tensor(lower, dtype=tf.dtypes.float64), tf.shape(mu)),
                   tf.broadcast_to(tf.convert_to_tensor(upper, dtype=tf.dtypes.float64), tf.shape(mu)))

    def __getitem__(self, index) -> 'TruncatedNormalSpec':
        return TruncatedNormalSpec(self.mu[index], self.sigma[index], self.lower[index], self.upper[index])


@dataclass(frozen=True)
class LatentPosterior:
    """Encoder output: one TN marginal per latent, on the normalized [0, 1] box

    The `tn` fields have shape [B, len(names)].
    """
    tn: TruncatedNormalSpec
    names: Tuple[str, ...] = LATENT_NAMES

    def marginal(self, name: str) -> TruncatedNormalSpec:
        return self.tn[..., self.names.index(name)]

    @property
    def physical_bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        return latent_bounds(self.names)


@dataclass(frozen=True)
class IntervalEstimate:
    """Vectorized point estimates with their prediction intervals"""
    mean: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        mean, lower, upper = (np.asarray(x, dtype=np.float64) for x in (self.mean, self.lower, self.upper))
        if not (mean.shape == lower.shape == upper.shape):
            raise ValueError(f'shape mismatch: mean {mean.shape}, lower {lower.shape}, upper {upper.shape}')
        if np.any(lower > mean) or np.any(mean > upper):
            raise ValueError('intervals must satisfy lower <= mean <= upper')
        object.__setattr__(self, 'mean', mean)
        object.__setattr__(self, 'lower', lower)
        object.__setattr__(self, 'upper', upper)

    def __len__(self):
        return self.mean.shape[0]

    def __getitem__(self, index) -> 'IntervalEstimate':
        return IntervalEstimate(self.mean[index], self.lower[index], self.upper[index])


@dataclass(frozen=True)
class ParameterEstimate:
    """Physical-space posterior summaries, arrays of shape [B, len(names)]"""
    mean: np.ndarray
    sd: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    names: Tuple[str, ...] = LATENT_NAMES

    def interval(self, name: str) -> IntervalEstimate:
        i = self.names.index(name)
        return IntervalEstimate(self.mean[:, i], self.lower[:, i], self.upper[:, i])
