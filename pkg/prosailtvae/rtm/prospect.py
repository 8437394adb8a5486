from dataclasses import dataclass

import numpy as np
import tensorflow as tf

from ..types import LeafParams, LeafCoefficientTables
from ..autodiff import check_domain
from ._expint import plate_transmission

# incidence cone of the leaf top surface, degrees
LEAF_SURFACE_ANGLE = 40.0
_ZERO_ABSORPTION_TOLERANCE = 1e-9


@dataclass(frozen=True)
class LeafOptics:
    """Hemispherical leaf reflectance and transmittance, shape [B, W]"""
    reflectance: tf.Tensor
    transmittance: tf.Tensor


def tav(alpha_deg, n) -> tf.Tensor:
    """Average transmissivity of a dielectric plane surface for isotropic light

    Closed form of the Fresnel transmissivity averaged over incidence angles in
    [0, alpha], weighted by sin(2 theta).

    Args:
        alpha_deg (float): maximum incidence angle in degrees, in (0, 90].
        n (tf.Tensor): refractive index, > 1.

    Returns:
        tf.Tensor: transmissivity in (0, 1], with the shape of n.
    """
    n = tf.convert_to_tensor(n, dtype=tf.dtypes.float64)
    n2 = n * n
    n_plus = n2 + 1.0
    n_minus = n2 - 1.0
    a = (n + 1.0) ** 2 / 2.0
    k = -(n2 - 1.0) ** 2 / 4.0
    sa2 = np.sin(np.deg2rad(alpha_deg)) ** 2

    # at 90 degrees the discriminant is exactly zero, rounding can make it negative
    b1 = tf.math.sqrt(tf.maximum((sa2 - n_plus / 2.0) ** 2 + k, 0.0)) if alpha_deg != 90 else tf.zeros_like(n)
    b2 = sa2 - n_plus / 2.0
    b = b1 - b2

    ts = (k ** 2 / (6.0 * b ** 3) + k / b - b / 2.0) - (k ** 2 / (6.0 * a ** 3) + k / a - a / 2.0)
    tp1 = -2.0 * n2 * (b - a) / n_plus ** 2
    tp2 = -2.0 * n2 * n_plus * tf.math.log(b / a) / n_minus ** 2
    tp3 = n2 * (1.0 / b - 1.0 / a) / 2.0
    tp4 = (16.0 * n2 ** 2 * (n2 ** 2 + 1.0)
           * tf.math.log((2.0 * n_plus * b - n_minus ** 2) / (2.0 * n_plus * a - n_minus ** 2))
           / (n_plus ** 3 * n_minus ** 2))
    tp5 = 16.0 * n2 ** 3 * (1.0 / (2.0 * n_plus * b - n_minus ** 2) - 1.0 / (2.0 * n_plus * a - n_minus ** 2)) / n_plus ** 3
    return (ts + tp1 + tp2 + tp3 + tp4 + tp5) / (2.0 * sa2)


def _stokes_layers(r, t, n_layers):
    d = tf.math.sqrt((1.0 + r + t) * (1.0 + r - t) * (1.0 - r + t) * (1.0 - r - t))
    a = (1.0 + r * r - t * t + d) / (2.0 * r)
    b = (1.0 - r * r + t * t + d) / (2.0 * t)
    b_nm1 = tf.math.pow(b, n_layers - 1.0)
    b_n2 = b_nm1 * b_nm1
    denom = a * a * b_n2 - 1.0
    return a * (b_n2 - 1.0) / denom, b_nm1 * (a * a - 1.0) / denom


def _stokes_layers_lossless(r, t, n_layers):
    t_sub = t / tf.maximum(t + (1.0 - t) * (n_layers - 1.0), np.finfo(np.float64).tiny)
    return 1.0 - t_sub, t_sub


def prospect5(params: LeafParams, tables: LeafCoefficientTables, surface=None) -> LeafOptics:
    """PROSPECT-5 generalized plate model

    Args:
        params (LeafParams): leaf parameters, each of shape [B].
        tables (LeafCoefficientTables): the spectral constants.
        surface (Tuple[tf.Tensor, ...], optional): precomputed (refractive_index, absorption, tav_40, tav_90)
            restricted to a sub-grid, used by the decoder. Defaults to the full tables.

    Raises:
        DomainError: if N < 1 or any content is negative.

    Returns:
        LeafOptics: reflectance and transmittance, shape [B, W].
    """
    if surface is None:
        surface = leaf_surface_constants(tables)
    nr, absorption, t_alpha, t12 = surface

    n_struct = tf.convert_to_tensor(params.n, dtype=tf.dtypes.float64)
    contents = tf.stack([params.cab, params.car, params.cbrown, params.cw, params.cm], axis=-1)
    contents = tf.convert_to_tensor(contents, dtype=tf.dtypes.float64)
    check_domain(n_struct >= 1.0, 'leaf structure parameter N must be >= 1')
    check_domain(contents >= 0.0, 'leaf contents must be non-negative')

    n_struct = n_struct[:, tf.newaxis]
    k = tf.linalg.matmul(contents, absorption) / n_struct
    tau = plate_transmission(k)

    # single elementary layer
    r_alpha = 1.0 - t_alpha
    r12 = 1.0 - t12
    t21 = t12 / (nr * nr)
    r21 = 1.0 - t21
    denom = 1.0 - r21 * r21 * tau * tau
    t_a = t_alpha * tau * t21 / denom
    r_a = r_alpha + r21 * tau * t_a
    t = t12 * tau * t21 / denom
    r = r12 + r21 * tau * t

    # the remaining N-1 layers, with the limit for lossless plates
    absorbing = r + t < 1.0 - _ZERO_ABSORPTION_TOLERANCE
    n_layers = tf.broadcast_to(n_struct, tf.shape(r))
    r_sub, t_sub = _stokes_layers(*[tf.where(absorbing, x, tf.constant(0.25, dtype=x.dtype)) for x in (r, t, n_layers)])
    r_sub_lossless, t_sub_lossless = _stokes_layers_lossless(r, t, n_layers)
    r_sub = tf.where(absorbing, r_sub, r_sub_lossless)
    t_sub = tf.where(absorbing, t_sub, t_sub_lossless)

    denom = 1.0 - r_sub * r
    return LeafOptics(reflectance=r_a + t_a * r_sub * t / denom,
                      transmittance=t_a * t_sub / denom)


def leaf_surface_constants(tables: LeafCoefficientTables, start: int = 0, stop: int = None):
    """Parameter independent PROSPECT terms on the grid slice [start, stop)

    Returns:
        Tuple[tf.Tensor, tf.Tensor, tf.Tensor, tf.Tensor]: refractive index [W],
            absorption coefficients [5, W], tav(40, n) [W] and tav(90, n) [W].
    """
    nr = tf.constant(tables.refractive_index.values[start:stop], dtype=tf.dtypes.float64)
    absorption = tf.constant(tables.absorption[:, start:stop], dtype=tf.dtypes.float64)
    return nr, absorption, tav(LEAF_SURFACE_ANGLE, nr), tav(90.0, nr)
