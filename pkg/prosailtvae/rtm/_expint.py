import numpy as np
import tensorflow as tf

_EULER_GAMMA = 0.57721566490153286061
_SERIES_TERMS = 40
_FRACTION_DEPTH = 60
_SERIES_LIMIT = 2.0
_SMALL_K = 1e-8


def _exp1_series(x):
    # -gamma - log(x) - sum_k (-x)^k / (k k!)
    term = tf.ones_like(x)
    total = tf.zeros_like(x)
    for k in range(1, _SERIES_TERMS + 1):
        term = term * (-x) / k
        total = total + term / k
    return -_EULER_GAMMA - tf.math.log(x) - total


def _exp1_scaled_fraction(x):
    # exp(x) E1(x) = 1 / (x + 1 - 1 / (x + 3 - 4 / (x + 5 - ...)))
    tail = tf.zeros_like(x)
    for k in range(_FRACTION_DEPTH, 0, -1):
        tail = (k * k) / (x + (2 * k + 1) - tail)
    return 1.0 / (x + 1.0 - tail)


def exp1(x: tf.Tensor) -> tf.Tensor:
    """Exponential integral E1(x) for x > 0

    Uses the power series for x <= 2 and a continued fraction otherwise, both
    accurate to about 1e-14 relative.

    Args:
        x (tf.Tensor): positive arguments.

    Returns:
        tf.Tensor: E1(x).
    """
    x = tf.convert_to_tensor(x, dtype=tf.dtypes.float64)
    x_series = tf.clip_by_value(x, np.finfo(np.float64).tiny, _SERIES_LIMIT)
    x_fraction = tf.maximum(x, _SERIES_LIMIT)
    return tf.where(x <= _SERIES_LIMIT,
                    _exp1_series(x_series),
                    tf.math.exp(-x_fraction) * _exp1_scaled_fraction(x_fraction))


@tf.custom_gradient
def plate_transmission(k: tf.Tensor) -> tf.Tensor:
    """Transmission of an absorbing plate for isotropic light, (1-k)exp(-k) + k^2 E1(k)

    The derivative is 2(k E1(k) - exp(-k)). Below k = 1e-8 the removable singularity
    is replaced by its first order expansion 1 - 2k.

    Args:
        k (tf.Tensor): non-negative total absorption.

    Returns:
        tf.Tensor: plate transmission in [0, 1].
    """
    small = k < _SMALL_K
    k_safe = tf.where(small, tf.ones_like(k), k)
    e1 = exp1(k_safe)
    decay = tf.math.exp(-k_safe)
    tau = tf.where(small, 1.0 - 2.0 * k, (1.0 - k_safe) * decay + k_safe * k_safe * e1)

    def grad(upstream):
        return upstream * tf.where(small, -2.0 * tf.ones_like(k), 2.0 * (k_safe * e1 - decay))

    return tau, grad
