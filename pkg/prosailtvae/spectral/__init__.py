
__all__ = ['AssetBundle', 'load_assets', 'load_coefficient_tables', 'load_soil_basis', 'load_srf', 'resample',
           'verify_checksums', 'write_checksum_manifest', 'read_checksum_manifest', 'sha256_file',
           'default_assets_dir', 'convolve_to_bands', 'band_centers',
           'COEFFICIENT_FILE', 'SOIL_FILE', 'SRF_FILE', 'CHECKSUM_FILE', 'ASSETS_ENV']

from .assets import AssetBundle, load_assets, load_coefficient_tables, load_soil_basis, load_srf, resample, \
    verify_checksums, write_checksum_manifest, read_checksum_manifest, sha256_file, default_assets_dir, \
    COEFFICIENT_FILE, SOIL_FILE, SRF_FILE, CHECKSUM_FILE, ASSETS_ENV
from .convolve import convolve_to_bands, band_centers
