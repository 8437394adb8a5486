import hashlib
import logging
import math
import os
import pathlib
import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

import numpy as np

from ..errors import AssetError
from ..types import BAND_IDS, SpectralGrid, SpectrumCurve, LeafCoefficientTables, SoilBasis, SensorResponse

logger = logging.getLogger(__name__)

COEFFICIENT_FILE = 'prospect5.txt'
SOIL_FILE = 'soil.txt'
SRF_FILE = 's2_srf.txt'
CHECKSUM_FILE = 'SHA256SUMS'
ASSETS_ENV = 'PROSAILTVAE_ASSETS'

MODEL_RANGE_NM = (400.0, 2500.0)

_separator = re.compile(r'[,\s]+')


@dataclass(frozen=True)
class AssetBundle:
    tables: LeafCoefficientTables
    soil: SoilBasis
    srf: SensorResponse
    checksums: Dict[str, str]

    @property
    def grid(self) -> SpectralGrid:
        return self.tables.grid


def default_assets_dir() -> pathlib.Path:
    """The asset directory, overridable with the PROSAILTVAE_ASSETS environment variable"""
    if ASSETS_ENV in os.environ:
        return pathlib.Path(os.environ[ASSETS_ENV])
    return pathlib.Path(__file__).absolute().parent.parent / 'assets'


def _data_lines(path: pathlib.Path) -> Iterable[Tuple[int, str]]:
    if not path.is_file():
        raise AssetError(f'{path}: file not found')
    with open(path, 'r', encoding='utf-8') as fp:
        for lineno, line in enumerate(fp, start=1):
            line = line.strip()
            if line == '' or line.startswith('#'):
                continue
            yield lineno, line


def _parse_row(path, lineno, line, n_columns):
    tokens = [token for token in _separator.split(line) if token != '']
    if len(tokens) != n_columns:
        raise AssetError(f'{path}:{lineno}: expected {n_columns} columns, found {len(tokens)}')
    try:
        return [float(token) for token in tokens]
    except ValueError:
        raise AssetError(f'{path}:{lineno}: could not parse "{line}" as numbers') from None


def _read_numeric_table(path: pathlib.Path, n_columns: int, lines=None) -> Tuple[np.ndarray, np.ndarray]:
    """Reads a numeric text table, returns the rows and their line numbers"""
    rows, linenos = [], []
    for lineno, line in (_data_lines(path) if lines is None else lines):
        rows.append(_parse_row(path, lineno, line, n_columns))
        linenos.append(lineno)
    if len(rows) < 2:
        raise AssetError(f'{path}: at least two data rows are required')

    table = np.asarray(rows, dtype=np.float64)
    linenos = np.asarray(linenos)
    steps = np.diff(table[:, 0])
    if np.any(steps <= 0):
        offending = linenos[1:][steps <= 0][0]
        raise AssetError(f'{path}:{offending}: non-monotonic grid, wavelengths must be strictly ascending')
    return table, linenos


def resample(wavelengths: np.ndarray, values: np.ndarray, grid: SpectralGrid,
             zero_outside: bool = False) -> SpectrumCurve:
    """Linearly interpolates a sampled curve onto the model grid

    Args:
        wavelengths (np.ndarray): ascending source wavelengths in nm.
        values (np.ndarray): source values.
        grid (SpectralGrid): target grid.
        zero_outside (bool, optional): pad with zeros outside the source coverage, otherwise
            the source must cover the grid. Defaults to False.

    Returns:
        SpectrumCurve: the curve on the model grid.
    """
    if not zero_outside and (wavelengths[0] > grid.start_nm or wavelengths[-1] < grid.stop_nm):
        raise AssetError(f'curve covers [{wavelengths[0]}, {wavelengths[-1]}] nm, '
                         f'which does not include the model grid [{grid.start_nm}, {grid.stop_nm}] nm')
    resampled = np.interp(grid.wavelengths, wavelengths, values,
                          left=0.0 if zero_outside else None, right=0.0 if zero_outside else None)
    return SpectrumCurve(grid, resampled)


def load_coefficient_tables(path: pathlib.Path) -> LeafCoefficientTables:
    """Loads the PROSPECT-5 constants

    The file has the columns (wavelength, n, k_cab, k_car, k_brown, k_cw, k_cm). The model grid is
    1 nm, clamped to the intersection of the file coverage and 400-2500 nm.

    Args:
        path (pathlib.Path): the coefficient file.

    Raises:
        AssetError: if the file is missing, malformed, non-monotonic or has negative absorption.

    Returns:
        LeafCoefficientTables: the resampled coefficients.
    """
    path = pathlib.Path(path)
    table, linenos = _read_numeric_table(path, 7)

    negative = np.any(table[:, 2:] < 0, axis=1)
    if np.any(negative):
        raise AssetError(f'{path}:{linenos[negative][0]}: negative absorption coefficient')
    not_refractive = table[:, 1] <= 1
    if np.any(not_refractive):
        raise AssetError(f'{path}:{linenos[not_refractive][0]}: refractive index must be > 1')

    start = math.ceil(max(MODEL_RANGE_NM[0], table[0, 0]))
    stop = math.floor(min(MODEL_RANGE_NM[1], table[-1, 0]))
    if stop <= start:
        raise AssetError(f'{path}: no coverage within {MODEL_RANGE_NM[0]}-{MODEL_RANGE_NM[1]} nm')
    grid = SpectralGrid(float(start), 1.0, stop - start + 1)

    curves = [resample(table[:, 0], table[:, column], grid) for column in range(1, 7)]
    logger.info('loaded coefficient tables from %s on %d-%d nm', path, start, stop)
    return LeafCoefficientTables(*curves)


def load_soil_basis(path: pathlib.Path, grid: SpectralGrid) -> SoilBasis:
    """Loads dry and wet soil reflectance, columns (wavelength, dry, wet)

    Raises:
        AssetError: if the file is malformed, does not cover the grid, or has values outside [0, 1].
    """
    path = pathlib.Path(path)
    table, linenos = _read_numeric_table(path, 3)
    outside = np.any((table[:, 1:] < 0) | (table[:, 1:] > 1), axis=1)
    if np.any(outside):
        raise AssetError(f'{path}:{linenos[outside][0]}: soil reflectance must be in [0, 1]')
    return SoilBasis(resample(table[:, 0], table[:, 1], grid),
                     resample(table[:, 0], table[:, 2], grid))


def load_srf(path: pathlib.Path, grid: SpectralGrid, expected_bands: Tuple[str, ...] = BAND_IDS) -> SensorResponse:
    """Loads sensor spectral response functions

    The first data line is a header `wavelength <band id> ...`, followed by one row per
    wavelength with one weight per band. Weights are zero-padded outside their support.

    Args:
        path (pathlib.Path): the response function file.
        grid (SpectralGrid): the model grid.
        expected_bands (Tuple[str, ...], optional): the required band ids, in column order.
            Defaults to `BAND_IDS`.

    Raises:
        AssetError: if the band ids or their order differ, or weights are negative or malformed.

    Returns:
        SensorResponse: band weights on the model grid.
    """
    path = pathlib.Path(path)
    lines = iter(list(_data_lines(path)))
    try:
        header_lineno, header = next(lines)
    except StopIteration:
        raise AssetError(f'{path}: file is empty') from None
    columns = [token for token in _separator.split(header) if token != '']
    if columns[0].lower() != 'wavelength':
        raise AssetError(f'{path}:{header_lineno}: header must start with "wavelength"')
    band_ids = columns[1:]
    if len(band_ids) != len(expected_bands):
        raise AssetError(f'{path}: expected {len(expected_bands)} bands, found {len(band_ids)} ({", ".join(band_ids)})')
    if tuple(band_ids) != tuple(expected_bands):
        raise AssetError(f'{path}:{header_lineno}: expected bands {" ".join(expected_bands)} in that order, '
                         f'found {" ".join(band_ids)}')

    table, linenos = _read_numeric_table(path, len(columns), lines=lines)
    negative = np.any(table[:, 1:] < 0, axis=1)
    if np.any(negative):
        raise AssetError(f'{path}:{linenos[negative][0]}: negative response weight')

    bands = []
    for column, band_id in enumerate(band_ids, start=1):
        curve = resample(table[:, 0], table[:, column], grid, zero_outside=True)
        if not np.sum(curve.values) > 0:
            raise AssetError(f'{path}: band {band_id} has no weight on the model grid')
        bands.append((band_id, curve))
    return SensorResponse(tuple(bands))


def sha256_file(path: pathlib.Path) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as fp:
        for chunk in iter(lambda: fp.read(1 << 20), b''):
            digest.update(chunk)
    return digest.hexdigest()


def read_checksum_manifest(directory: pathlib.Path) -> Dict[str, str]:
    manifest_path = pathlib.Path(directory) / CHECKSUM_FILE
    checksums = {}
    for lineno, line in _data_lines(manifest_path):
        parts = line.split()
        if len(parts) != 2:
            raise AssetError(f'{manifest_path}:{lineno}: expected "name  sha256"')
        name, digest = parts
        checksums[name] = digest.lower()
    return checksums


def verify_checksums(directory: pathlib.Path) -> Dict[str, str]:
    """Verifies every file listed in the checksum manifest

    Raises:
        AssetError: if the manifest or a listed file is missing, or a checksum differs.

    Returns:
        Dict[str, str]: the verified name to sha256 mapping.
    """
    directory = pathlib.Path(directory)
    checksums = read_checksum_manifest(directory)
    for name, expected in checksums.items():
        if not (directory / name).is_file():
            raise AssetError(f'{directory / name}: file listed in {CHECKSUM_FILE} not found')
        actual = sha256_file(directory / name)
        if actual != expected:
            raise AssetError(f'{directory / name}: checksum mismatch, expected {expected}, got {actual}')
    return checksums


def write_checksum_manifest(directory: pathlib.Path,
                            names: List[str] = (COEFFICIENT_FILE, SOIL_FILE, SRF_FILE)) -> pathlib.Path:
    directory = pathlib.Path(directory)
    manifest_path = directory / CHECKSUM_FILE
    with open(manifest_path, 'w', encoding='utf-8') as fp:
        for name in names:
            fp.write(f'{name}  {sha256_file(directory / name)}\n')
    return manifest_path


def load_assets(directory: pathlib.Path = None, verify: bool = True) -> AssetBundle:
    """Verifies and loads the coefficient tables, soil basis and sensor response

    Args:
        directory (pathlib.Path, optional): the asset directory. Defaults to `default_assets_dir()`.
        verify (bool, optional): check the files against the checksum manifest. Defaults to True.

    Returns:
        AssetBundle: all assets on the coefficient grid.
    """
    directory = default_assets_dir() if directory is None else pathlib.Path(directory)
    if verify:
        checksums = verify_checksums(directory)
        missing = {COEFFICIENT_FILE, SOIL_FILE, SRF_FILE} - checksums.keys()
        if missing:
            raise AssetError(f'{directory / CHECKSUM_FILE}: no checksum for {", ".join(sorted(missing))}')

    tables = load_coefficient_tables(directory / COEFFICIENT_FILE)
    soil = load_soil_basis(directory / SOIL_FILE, tables.grid)
    srf = load_srf(directory / SRF_FILE, tables.grid)
    if not verify:
        checksums = {name: sha256_file(directory / name) for name in (COEFFICIENT_FILE, SOIL_FILE, SRF_FILE)}
    return AssetBundle(tables, soil, srf, checksums)
