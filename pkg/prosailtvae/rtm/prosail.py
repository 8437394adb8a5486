from typing import Union

import tensorflow as tf

from ..types import ParameterVector, LeafParams, CanopyParams, ViewGeometry
from .prospect import prospect5, leaf_surface_constants
from .sail import sail4, soil_spectrum


class ProsailDecoder(tf.Module):
    def __init__(self, assets, crop_to_bands: bool = True, n_classes: int = 13, name: str = 'prosail_decoder'):
        """PROSPECT-5 + 4SAIL + band averaging, as a fixed differentiable module

        Args:
            assets (AssetBundle): coefficient tables, soil basis and response functions.
            crop_to_bands (bool, optional): only evaluate wavelengths where any band has
                nonzero response. The band values are unchanged. Defaults to True.
            n_classes (int, optional): leaf inclination classes. Defaults to 13.
        """
        super().__init__(name=name)
        self.assets = assets
        self.n_classes = n_classes
        self.start, self.stop = assets.srf.support() if crop_to_bands else (0, assets.grid.count)
        self.band_ids = assets.srf.band_ids

        with self.name_scope:
            self._surface = leaf_surface_constants(assets.tables, self.start, self.stop)
            self._weights = tf.constant(assets.srf.weight_matrix[self.start:self.stop], dtype=tf.dtypes.float64)

    @property
    def num_bands(self) -> int:
        return len(self.band_ids)

    def spectrum(self, pv: ParameterVector) -> tf.Tensor:
        """Canopy bidirectional reflectance on the evaluated sub-grid, [B, W]"""
        leaf = prospect5(pv.leaf, self.assets.tables, surface=self._surface)
        soil = soil_spectrum(pv.canopy.soil_wet, pv.canopy.soil_bright, self.assets.soil, self.start, self.stop)
        return sail4(leaf, pv.canopy, pv.geometry, soil, self.n_classes)

    def __call__(self, params: Union[ParameterVector, tf.Tensor]) -> tf.Tensor:
        """Band reflectance of a batch of parameter vectors

        Args:
            params (Union[ParameterVector, tf.Tensor]): parameters, or a [B, 14] tensor in PARAMETER_NAMES order.

        Returns:
            tf.Tensor: band reflectance, [B, bands].
        """
        if not isinstance(params, ParameterVector):
            params = ParameterVector.from_tensor(params)
        return tf.linalg.matmul(self.spectrum(params), self._weights)

    def decode(self, latents: tf.Tensor, geometry: tf.Tensor) -> tf.Tensor:
        """Band reflectance from physical latents [B, 11] and geometry [B, 3]"""
        return self(tf.concat([latents, geometry], axis=-1))


def prosail_forward(pv: Union[ParameterVector, tf.Tensor], assets) -> tf.Tensor:
    """Band reflectance of the full PROSAIL pipeline, evaluated on the whole grid

    Args:
        pv (Union[ParameterVector, tf.Tensor]): parameters, or a [B, 14] tensor in PARAMETER_NAMES order.
        assets (AssetBundle): coefficient tables, soil basis and response functions.

    Returns:
        tf.Tensor: band reflectance, [B, bands].
    """
    return ProsailDecoder(assets, crop_to_bands=False)(pv)

