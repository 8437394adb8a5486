
__all__ = ['exp1', 'plate_transmission', 'tav', 'prospect5', 'LeafOptics', 'leaf_surface_constants',
           'soil_spectrum', 'lidf_classes', 'lidf_weights', 'volume_scattering', 'canopy_reflectance_factors',
           'CanopyReflectance', 'sail4', 'ProsailDecoder', 'prosail_forward']

from ._expint import exp1, plate_transmission
from .prospect import tav, prospect5, LeafOptics, leaf_surface_constants
from .sail import soil_spectrum, lidf_classes, lidf_weights, volume_scattering, canopy_reflectance_factors, \
    CanopyReflectance, sail4
from .prosail import ProsailDecoder, prosail_forward
