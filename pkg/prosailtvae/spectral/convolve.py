from typing import Union

import numpy as np
import tensorflow as tf

from ..types import SpectralGrid, SpectrumCurve, SensorResponse


def convolve_to_bands(spectrum: Union[SpectrumCurve, tf.Tensor], srf: SensorResponse,
                      grid: SpectralGrid = None) -> tf.Tensor:
    """Averages a spectrum with the band response functions

    b = sum_l w_b(l) * rho(l) / sum_l w_b(l), linear and differentiable in the spectrum.

    Args:
        spectrum (Union[SpectrumCurve, tf.Tensor]): a curve, or a tensor of shape [..., W].
        srf (SensorResponse): the band response functions.
        grid (SpectralGrid, optional): the grid of a tensor spectrum. Defaults to the srf grid.

    Raises:
        ValueError: if the spectrum and the response functions are on different grids.

    Returns:
        tf.Tensor: band values, shape [..., bands].
    """
    if isinstance(spectrum, SpectrumCurve):
        grid, spectrum = spectrum.grid, spectrum.values
    if grid is not None and grid != srf.grid:
        raise ValueError(f'grid mismatch: spectrum on {grid}, response functions on {srf.grid}')

    spectrum = tf.convert_to_tensor(spectrum, dtype=tf.dtypes.float64)
    if spectrum.shape[-1] != srf.grid.count:
        raise ValueError(f'grid mismatch: spectrum has {spectrum.shape[-1]} values, '
                         f'response functions have {srf.grid.count}')

    weights = tf.constant(srf.weight_matrix, dtype=tf.dtypes.float64)
    return tf.tensordot(spectrum, weights, axes=[[-1], [0]])


def band_centers(srf: SensorResponse) -> np.ndarray:
    """Response-weighted mean wavelength of each band"""
    return srf.grid.wavelengths @ srf.weight_matrix
