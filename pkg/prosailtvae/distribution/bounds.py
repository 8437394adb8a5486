from typing import Tuple

import numpy as np
import tensorflow as tf

from ..types import LATENT_NAMES, latent_bounds


def _bounds(names, bounds):
    lower, upper = latent_bounds(names) if bounds is None else bounds
    return (tf.constant(lower, dtype=tf.dtypes.float64), tf.constant(upper, dtype=tf.dtypes.float64))


def scale_to_physical(z_norm, names: Tuple[str, ...] = LATENT_NAMES,
                      bounds: Tuple[np.ndarray, np.ndarray] = None) -> tf.Tensor:
    """Affine map from the normalized [0, 1] box to physical units

    Args:
        z_norm (tf.Tensor): normalized values, last axis ordered as names.
        names (Tuple[str, ...], optional): variable names. Defaults to LATENT_NAMES.
        bounds (Tuple[np.ndarray, np.ndarray], optional): explicit (lower, upper), overrides names.

    Returns:
        tf.Tensor: lower + z_norm * (upper - lower).
    """
    lower, upper = _bounds(names, bounds)
    return lower + tf.convert_to_tensor(z_norm, dtype=tf.dtypes.float64) * (upper - lower)


def scale_to_normalized(x, names: Tuple[str, ...] = LATENT_NAMES,
                        bounds: Tuple[np.ndarray, np.ndarray] = None) -> tf.Tensor:
    """Inverse of `scale_to_physical`"""
    lower, upper = _bounds(names, bounds)
    return (tf.convert_to_tensor(x, dtype=tf.dtypes.float64) - lower) / (upper - lower)
