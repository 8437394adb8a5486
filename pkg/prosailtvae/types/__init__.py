
__all__ = ['BAND_IDS', 'SpectralGrid', 'SpectrumCurve', 'LeafCoefficientTables', 'SoilBasis', 'SensorResponse',
           'LEAF_NAMES', 'CANOPY_NAMES', 'GEOMETRY_NAMES', 'LATENT_NAMES', 'PARAMETER_NAMES',
           'PARAMETER_BOUNDS', 'PARAMETER_UNITS', 'latent_bounds',
           'LeafParams', 'CanopyParams', 'ViewGeometry', 'ParameterVector',
           'TruncatedNormalSpec', 'LatentPosterior', 'IntervalEstimate', 'ParameterEstimate']

from .spectral import BAND_IDS, SpectralGrid, SpectrumCurve, LeafCoefficientTables, SoilBasis, SensorResponse
from .params import LEAF_NAMES, CANOPY_NAMES, GEOMETRY_NAMES, LATENT_NAMES, PARAMETER_NAMES, \
    PARAMETER_BOUNDS, PARAMETER_UNITS, latent_bounds, LeafParams, CanopyParams, ViewGeometry, ParameterVector
from .posterior import TruncatedNormalSpec, LatentPosterior, IntervalEstimate, ParameterEstimate
