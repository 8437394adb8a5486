
__all__ = ['compile_configs', 'CompileConfig', 'write_synthetic_assets', 'synthetic_assets', 'S2_BAND_CENTERS',
           'reference_prospect', 'reference_sail', 'reference_prosail']

from .compile_configs import compile_configs, CompileConfig
from .assets import write_synthetic_assets, synthetic_assets, S2_BAND_CENTERS
from .reference import reference_prospect, reference_sail, reference_prosail
