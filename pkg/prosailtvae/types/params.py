from dataclasses import dataclass, fields
from typing import Dict, Tuple

import numpy as np
import tensorflow as tf

LEAF_NAMES = ('n', 'cab', 'car', 'cbrown', 'cw', 'cm')
CANOPY_NAMES = ('lai', 'ala', 'hotspot', 'soil_wet', 'soil_bright')
GEOMETRY_NAMES = ('tts', 'tto', 'psi')

# latents first, geometry last; this is also the column order of datasets
LATENT_NAMES = LEAF_NAMES + CANOPY_NAMES
PARAMETER_NAMES = LATENT_NAMES + GEOMETRY_NAMES

PARAMETER_BOUNDS: Dict[str, Tuple[float, float]] = {
    'n': (1.2, 1.8),
    'cab': (20.0, 90.0),
    'car': (5.0, 23.0),
    'cbrown': (0.0, 2.0),
    'cw': (0.0075, 0.075),
    'cm': (0.003, 0.011),
    'lai': (0.0, 10.0),
    'ala': (30.0, 80.0),
    'hotspot': (0.0, 0.5),
    'soil_wet': (0.0, 1.0),
    'soil_bright': (0.3, 3.5),
    'tts': (15.0, 60.0),
    'tto': (0.0, 10.0),
    'psi': (0.0, 180.0),
}

PARAMETER_UNITS: Dict[str, str] = {
    'n': '-', 'cab': 'ug/cm2', 'car': 'ug/cm2', 'cbrown': '-', 'cw': 'cm', 'cm': 'g/cm2',
    'lai': 'm2/m2', 'ala': 'deg', 'hotspot': '-', 'soil_wet': '-', 'soil_bright': '-',
    'tts': 'deg', 'tto': 'deg', 'psi': 'deg'
}


def latent_bounds(names: Tuple[str, ...] = LATENT_NAMES) -> Tuple[np.ndarray, np.ndarray]:
    """Lower and upper physical bounds, in the given variable order"""
    lower = np.array([PARAMETER_BOUNDS[name][0] for name in names], dtype=np.float64)
    upper = np.array([PARAMETER_BOUNDS[name][1] for name in names], dtype=np.float64)
    return lower, upper


class _TensorGroup:
    """Mixin for dataclasses whose fields are batched tensors of shape [B]"""

    @classmethod
    def from_tensor(cls, x: tf.Tensor):
        x = tf.convert_to_tensor(x, dtype=tf.dtypes.float64)
        return cls(*tf.unstack(x, num=len(fields(cls)), axis=-1))

    def to_tensor(self) -> tf.Tensor:
        return tf.stack([tf.convert_to_tensor(getattr(self, f.name), dtype=tf.dtypes.float64)
                         for f in fields(self)], axis=-1)


@dataclass(frozen=True)
class LeafParams(_TensorGroup):
    n: tf.Tensor
    cab: tf.Tensor
    car: tf.Tensor
    cbrown: tf.Tensor
    cw: tf.Tensor
    cm: tf.Tensor


@dataclass(frozen=True)
class CanopyParams(_TensorGroup):
    lai: tf.Tensor
    ala: tf.Tensor
    hotspot: tf.Tensor
    soil_wet: tf.Tensor
    soil_bright: tf.Tensor


@dataclass(frozen=True)
class ViewGeometry(_TensorGroup):
    """Sun zenith, view zenith and relative azimuth, all in degrees"""
    tts: tf.Tensor
    tto: tf.Tensor
    psi: tf.Tensor


@dataclass(frozen=True)
class ParameterVector:
    leaf: LeafParams
    canopy: CanopyParams
    geometry: ViewGeometry

    @classmethod
    def from_tensor(cls, x: tf.Tensor) -> 'ParameterVector':
        """Splits a [..., 14] tensor laid out as PARAMETER_NAMES"""
        x = tf.convert_to_tensor(x, dtype=tf.dtypes.float64)
        n_leaf, n_canopy = len(LEAF_NAMES), len(CANOPY_NAMES)
        return cls(
            LeafParams.from_tensor(x[..., :n_leaf]),
            CanopyParams.from_tensor(x[..., n_leaf:n_leaf + n_canopy]),
            ViewGeometry.from_tensor(x[..., n_leaf + n_canopy:])
        )

    def to_tensor(self) -> tf.Tensor:
        return tf.concat([self.leaf.to_tensor(), self.canopy.to_tensor(), self.geometry.to_tensor()], axis=-1)
