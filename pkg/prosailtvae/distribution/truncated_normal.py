import math
from typing import Tuple

import numpy as np
import tensorflow as tf

from ..autodiff import check_domain
from ..types import TruncatedNormalSpec

# probability mass below which the truncation interval is treated as degenerate
DEGENERATE_MASS = 1e-12

_SQRT_HALF = math.sqrt(0.5)
_LOG_SQRT_2PI_E = 0.5 * math.log(2.0 * math.pi * math.e)
_P_MIN = np.finfo(np.float64).tiny
_P_MAX = 1.0 - np.finfo(np.float64).epsneg


def _ndtr(x):
    return 0.5 * tf.math.erfc(-x * _SQRT_HALF)


def _normal_pdf(x):
    return tf.math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


class _Standardized:
    """Standardized bounds of a truncated normal

    When both bounds lie in the upper tail, the mass is computed from the reflected
    distribution, where the normal CDF is accurate.
    """

    def __init__(self, tn: TruncatedNormalSpec):
        self.tn = tn
        self.a = (tn.lower - tn.mu) / tn.sigma
        self.b = (tn.upper - tn.mu) / tn.sigma
        self.flip = self.a > 0.0
        self.cdf_a = tf.where(self.flip, _ndtr(-self.a), _ndtr(self.a))
        self.cdf_b = tf.where(self.flip, _ndtr(-self.b), _ndtr(self.b))
        mass = tf.math.abs(self.cdf_b - self.cdf_a)
        self.degenerate = mass < DEGENERATE_MASS
        self.mass = tf.where(self.degenerate, tf.ones_like(mass), mass)

    @property
    def pdf_a(self):
        return _normal_pdf(self.a)

    @property
    def pdf_b(self):
        return _normal_pdf(self.b)

    @property
    def clamped_mu(self):
        return tf.clip_by_value(self.tn.mu, self.tn.lower, self.tn.upper)


def _as_tensor(value):
    return tf.convert_to_tensor(value, dtype=tf.dtypes.float64)


def tn_quantile(tn: TruncatedNormalSpec, p) -> tf.Tensor:
    """Inverse CDF of a truncated normal

    Args:
        tn (TruncatedNormalSpec): the distribution.
        p (tf.Tensor): probabilities in (0, 1), broadcastable against tn.

    Returns:
        tf.Tensor: quantiles in [lower, upper], monotone in p.
    """
    s = _Standardized(tn)
    p = _as_tensor(p)
    span = s.cdf_b - s.cdf_a
    target = tf.clip_by_value(s.cdf_a + p * span, _P_MIN, _P_MAX)
    reflected = tf.clip_by_value(s.cdf_a - p * (s.cdf_a - s.cdf_b), _P_MIN, _P_MAX)
    x = tf.where(s.flip, -tf.math.ndtri(reflected), tf.math.ndtri(target))
    z = tn.mu + tn.sigma * x
    # degenerate intervals collapse onto the bound region nearest to mu
    z = tf.where(s.degenerate, s.clamped_mu, z)
    return tf.clip_by_value(z, tn.lower, tn.upper)


def tn_sample(tn: TruncatedNormalSpec, u) -> tf.Tensor:
    """Reparameterized truncated normal sample, differentiable in mu and sigma for a fixed u

    Args:
        tn (TruncatedNormalSpec): the distribution.
        u (tf.Tensor): uniform draws in (0, 1).

    Returns:
        tf.Tensor: samples in [lower, upper].
    """
    return tn_quantile(tn, u)


def tn_cdf(tn: TruncatedNormalSpec, x) -> tf.Tensor:
    s = _Standardized(tn)
    xi = (_as_tensor(x) - tn.mu) / tn.sigma
    cdf = tf.where(s.flip, (s.cdf_a - _ndtr(-xi)) / s.mass, (_ndtr(xi) - s.cdf_a) / s.mass)
    step = tf.where(_as_tensor(x) >= s.clamped_mu, tf.ones_like(cdf), tf.zeros_like(cdf))
    return tf.clip_by_value(tf.where(s.degenerate, step, cdf), 0.0, 1.0)


def tn_moments(tn: TruncatedNormalSpec) -> Tuple[tf.Tensor, tf.Tensor]:
    """Closed-form mean and variance of a truncated normal

    Args:
        tn (TruncatedNormalSpec): the distribution.

    Returns:
        Tuple[tf.Tensor, tf.Tensor]: mean and variance.
    """
    s = _Standardized(tn)
    shift = (s.pdf_a - s.pdf_b) / s.mass
    spread = (s.a * s.pdf_a - s.b * s.pdf_b) / s.mass
    mean = tf.clip_by_value(tn.mu + tn.sigma * shift, tn.lower, tn.upper)
    variance = tf.maximum(tn.sigma ** 2 * (1.0 + spread - shift ** 2), 0.0)
    return (tf.where(s.degenerate, s.clamped_mu, mean),
            tf.where(s.degenerate, tf.zeros_like(variance), variance))


def tn_entropy(tn: TruncatedNormalSpec) -> tf.Tensor:
    """Differential entropy of a truncated normal, in nats"""
    s = _Standardized(tn)
    return (_LOG_SQRT_2PI_E + tf.math.log(tn.sigma) + tf.math.log(s.mass)
            + (s.a * s.pdf_a - s.b * s.pdf_b) / (2.0 * s.mass))


def kl_tn_uniform(tn: TruncatedNormalSpec, lower=None, upper=None) -> tf.Tensor:
    """KL divergence from a uniform prior to a truncated normal posterior

    Args:
        tn (TruncatedNormalSpec): the posterior.
        lower (tf.Tensor, optional): lower bound of the uniform prior. Defaults to tn.lower.
        upper (tf.Tensor, optional): upper bound of the uniform prior. Defaults to tn.upper.

    Raises:
        DomainError: if the posterior support is not contained in the prior support.

    Returns:
        tf.Tensor: KL[q || p] >= 0, with the shape of tn.
    """
    lower = tn.lower if lower is None else _as_tensor(lower)
    upper = tn.upper if upper is None else _as_tensor(upper)
    check_domain(tf.logical_and(tn.lower >= lower, tn.upper <= upper),
                 'truncated normal support must be inside the uniform prior support')
    return tf.math.log(upper - lower) - tn_entropy(tn)
