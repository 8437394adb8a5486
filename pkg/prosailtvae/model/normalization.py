from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
import tensorflow as tf

from ..errors import ConfigError
from ..types import GEOMETRY_NAMES, BAND_IDS, latent_bounds

ANGLE_MODES = ('range', 'cosine')


@dataclass(frozen=True)
class InputNormalization:
    """Standardizes bands and scales angles before tokenization

    Args:
        band_mean (Tuple[float, ...]): per-band mean of the training reflectance.
        band_sd (Tuple[float, ...]): per-band standard deviation of the training reflectance.
        angle_mode (str): "range" maps each angle to [0, 1] by its physical range,
            "cosine" uses the cosine of the angle.
    """
    band_mean: Tuple[float, ...]
    band_sd: Tuple[float, ...]
    angle_mode: str = 'range'

    def __post_init__(self):
        if self.angle_mode not in ANGLE_MODES:
            raise ConfigError(f'unknown angle_mode "{self.angle_mode}", expected one of {ANGLE_MODES}')
        if len(self.band_mean) != len(BAND_IDS) or len(self.band_sd) != len(BAND_IDS):
            raise ConfigError(f'normalization needs {len(BAND_IDS)} band means and sds')
        if min(self.band_sd) <= 0:
            raise ConfigError('band standard deviations must be positive')
        object.__setattr__(self, 'band_mean', tuple(float(x) for x in self.band_mean))
        object.__setattr__(self, 'band_sd', tuple(float(x) for x in self.band_sd))

    @classmethod
    def from_bands(cls, bands: np.ndarray, angle_mode: str = 'range') -> 'InputNormalization':
        """Estimates the band statistics from a training set of reflectance [n, 10]"""
        bands = np.asarray(bands, dtype=np.float64)
        sd = np.std(bands, axis=0)
        return cls(tuple(np.mean(bands, axis=0)), tuple(np.where(sd > 0, sd, 1.0)), angle_mode)

    @classmethod
    def identity(cls, angle_mode: str = 'range') -> 'InputNormalization':
        return cls((0.0, ) * len(BAND_IDS), (1.0, ) * len(BAND_IDS), angle_mode)

    def to_dict(self) -> Dict:
        return {'band_mean': list(self.band_mean), 'band_sd': list(self.band_sd), 'angle_mode': self.angle_mode}

    @classmethod
    def from_dict(cls, content: Dict) -> 'InputNormalization':
        return cls(tuple(content['band_mean']), tuple(content['band_sd']), content['angle_mode'])

    def __call__(self, bands: tf.Tensor, geometry: tf.Tensor) -> tf.Tensor:
        """Normalized tokens [B, 13] from bands [B, 10] and angles in degrees [B, 3]"""
        bands = tf.convert_to_tensor(bands, dtype=tf.dtypes.float64)
        geometry = tf.convert_to_tensor(geometry, dtype=tf.dtypes.float64)
        bands = (bands - tf.constant(self.band_mean, dtype=tf.dtypes.float64)) \
            / tf.constant(self.band_sd, dtype=tf.dtypes.float64)

        if self.angle_mode == 'range':
            lower, upper = latent_bounds(GEOMETRY_NAMES)
            angles = (geometry - lower) / (upper - lower)
        else:
            angles = tf.math.cos(geometry * (np.pi / 180.0))
        return tf.concat([bands, angles], axis=-1)
