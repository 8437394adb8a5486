import pathlib
from typing import Dict, Tuple

import numpy as np

from ..spectral import load_assets, write_checksum_manifest, COEFFICIENT_FILE, SOIL_FILE, SRF_FILE
from ..types import BAND_IDS

# center and full width at half maximum, nm
S2_BAND_CENTERS: Dict[str, Tuple[float, float]] = {
    'B2': (490.0, 65.0),
    'B3': (560.0, 35.0),
    'B4': (665.0, 30.0),
    'B5': (705.0, 15.0),
    'B6': (740.0, 15.0),
    'B7': (783.0, 20.0),
    'B8': (842.0, 115.0),
    'B8A': (865.0, 20.0),
    'B11': (1610.0, 90.0),
    'B12': (2190.0, 180.0),
}


def _gauss(w, center, width):
    return np.exp(-((w - center) / width) ** 2)


def coefficient_table(wavelengths: np.ndarray) -> np.ndarray:
    """Smooth, physically plausible PROSPECT-5 constants, columns as in the coefficient file"""
    w = wavelengths
    refractive_index = 1.42 + 0.1 * np.exp(-(w - 400.0) / 400.0)
    k_cab = 0.04 * _gauss(w, 430.0, 30.0) + 0.03 * _gauss(w, 665.0, 25.0) + 0.002 * _gauss(w, 550.0, 60.0)
    k_car = 0.15 * _gauss(w, 470.0, 35.0)
    k_brown = 0.5 * np.exp(-(w - 400.0) / 150.0)
    k_cw = 0.5 * (w / 1000.0) ** 4 + 30.0 * _gauss(w, 1450.0, 60.0) + 110.0 * _gauss(w, 1940.0, 70.0) \
        + 50.0 * _gauss(w, 2500.0, 150.0)
    k_cm = 5.0 + 40.0 * (w - 400.0) / 2100.0
    return np.stack([w, refractive_index, k_cab, k_car, k_brown, k_cw, k_cm], axis=1)


def soil_table(wavelengths: np.ndarray) -> np.ndarray:
    dry = 0.05 + 0.3 * (1.0 - np.exp(-(wavelengths - 400.0) / 600.0))
    return np.stack([wavelengths, dry, 0.6 * dry], axis=1)


def srf_table(wavelengths: np.ndarray, shape: str = 'gaussian') -> np.ndarray:
    columns = [wavelengths]
    for band in BAND_IDS:
        center, fwhm = S2_BAND_CENTERS[band]
        if shape == 'gaussian':
            sigma = fwhm / 2.3548
            weights = np.exp(-0.5 * ((wavelengths - center) / sigma) ** 2)
            weights[np.abs(wavelengths - center) > 3 * sigma] = 0.0
        elif shape == 'rectangular':
            weights = (np.abs(wavelengths - center) <= fwhm / 2).astype(np.float64)
        else:
            raise ValueError(f'unknown response shape "{shape}"')
        columns.append(weights)
    return np.stack(columns, axis=1)


def write_synthetic_assets(directory: pathlib.Path, start_nm: float = 400.0, stop_nm: float = 2500.0,
                           srf_shape: str = 'gaussian', checksums: bool = True) -> pathlib.Path:
    """Writes synthetic coefficient, soil and response function files in the asset formats

    Args:
        directory (pathlib.Path): created if missing.
        start_nm (float, optional): first wavelength. Defaults to 400.
        stop_nm (float, optional): last wavelength. Defaults to 2500.
        srf_shape (str, optional): "gaussian" or "rectangular". Defaults to 'gaussian'.
        checksums (bool, optional): also write SHA256SUMS. Defaults to True.

    Returns:
        pathlib.Path: the directory.
    """
    directory = pathlib.Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    coarse = np.arange(start_nm, stop_nm + 0.5, 5.0)
    fine = np.arange(start_nm, stop_nm + 0.5, 1.0)

    np.savetxt(directory / COEFFICIENT_FILE, coefficient_table(coarse), fmt='%.10g',
               header='wavelength n k_cab k_car k_brown k_cw k_cm')
    np.savetxt(directory / SOIL_FILE, soil_table(coarse), fmt='%.10g', header='wavelength dry wet')
    np.savetxt(directory / SRF_FILE, srf_table(fine, srf_shape), fmt='%.8g',
               header='wavelength ' + ' '.join(BAND_IDS), comments='')
    if checksums:
        write_checksum_manifest(directory)
    return directory


def synthetic_assets(directory: pathlib.Path, **kwargs):
    """Writes and loads a synthetic asset bundle"""
    return load_assets(write_synthetic_assets(directory, **kwargs))
