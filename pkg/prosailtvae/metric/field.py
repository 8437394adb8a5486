import logging
import math
import pathlib
import warnings
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from ..errors import DatasetError

logger = logging.getLogger(__name__)

FIELD_BAND_COLUMNS = ('b02', 'b03', 'b04', 'b05', 'b06', 'b07', 'b08', 'b8a', 'b11', 'b12')
FIELD_GEOMETRY_COLUMNS = ('sun_zen', 'view_zen', 'rel_az')
FIELD_COLUMNS = ('site', 'date') + FIELD_BAND_COLUMNS + FIELD_GEOMETRY_COLUMNS + ('lai', 'ccc', 'ccc_unit', 'lai_sd')

# multiply a CCC prediction in ug/cm2 of ground by these to express it in the declared unit
CCC_UNITS = {
    'ug/cm2': 1.0,
    'mg/m2': 10.0,
    'g/m2': 0.01,
}


def _optional(value) -> Optional[float]:
    return None if value is None or (isinstance(value, float) and math.isnan(value)) else float(value)


@dataclass(frozen=True)
class FieldRecord:
    """One in-situ measurement with its matching Sentinel-2 observation

    Args:
        site (str): campaign site.
        date (str): acquisition date.
        bands (np.ndarray): band reflectance [10].
        geometry (np.ndarray): sun zenith, view zenith and relative azimuth in degrees [3].
        lai (float, optional): measured LAI.
        ccc (float, optional): measured CCC, in `ccc_unit`.
        ccc_unit (str, optional): one of CCC_UNITS.
        lai_sd (float, optional): reported LAI measurement uncertainty.
    """
    site: str
    date: str
    bands: np.ndarray
    geometry: np.ndarray
    lai: Optional[float] = None
    ccc: Optional[float] = None
    ccc_unit: Optional[str] = None
    lai_sd: Optional[float] = None

    def __post_init__(self):
        if self.ccc is not None and self.ccc_unit not in CCC_UNITS:
            raise DatasetError(f'record {self.site}/{self.date}: unknown ccc_unit "{self.ccc_unit}", '
                               f'expected one of {", ".join(CCC_UNITS)}')

    @property
    def has_truth(self) -> bool:
        return self.lai is not None or self.ccc is not None

    @property
    def ccc_factor(self) -> float:
        return CCC_UNITS[self.ccc_unit] if self.ccc_unit in CCC_UNITS else 1.0


def read_field_records(path: pathlib.Path) -> List[FieldRecord]:
    """Reads field records from the documented CSV layout

    Rows with missing or out-of-range reflectance or angles are skipped with a warning.
    Missing lai, ccc and lai_sd values are allowed.

    Raises:
        DatasetError: if the file is missing or empty, the header lacks required columns,
            or a row declares an unknown CCC unit.

    Returns:
        List[FieldRecord]: the valid records, in file order.
    """
    path = pathlib.Path(path)
    if not path.is_file():
        raise DatasetError(f'{path}: field record file not found')
    try:
        df = pd.read_csv(path, dtype={'site': str, 'date': str, 'ccc_unit': str}, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise DatasetError(f'{path}: file is empty') from None

    missing = [column for column in FIELD_COLUMNS if column not in df.columns]
    if missing:
        raise DatasetError(f'{path}: header is missing column(s) {", ".join(missing)}')
    if len(df) == 0:
        raise DatasetError(f'{path}: no records')

    numeric = list(FIELD_BAND_COLUMNS + FIELD_GEOMETRY_COLUMNS + ('lai', 'ccc', 'lai_sd'))
    df[numeric] = df[numeric].apply(pd.to_numeric, errors='coerce')

    records, skipped = [], []
    for row_index, row in df.iterrows():
        # header is line 1
        lineno = row_index + 2
        bands = row[list(FIELD_BAND_COLUMNS)].to_numpy(dtype=np.float64)
        geometry = row[list(FIELD_GEOMETRY_COLUMNS)].to_numpy(dtype=np.float64)
        if not (np.all(np.isfinite(bands)) and np.all(np.isfinite(geometry))) \
                or np.any(bands < 0) or np.any(bands > 1):
            skipped.append(lineno)
            continue
        ccc = _optional(row['ccc'])
        unit = row['ccc_unit'] if isinstance(row['ccc_unit'], str) else None
        if ccc is not None and unit not in CCC_UNITS:
            raise DatasetError(f'{path}:{lineno}: unknown ccc_unit "{unit}", expected one of {", ".join(CCC_UNITS)}')
        records.append(FieldRecord(str(row['site']), str(row['date']), bands, geometry,
                                   lai=_optional(row['lai']), ccc=ccc, ccc_unit=unit, lai_sd=_optional(row['lai_sd'])))

    if skipped:
        warnings.warn(f'{path}: skipped {len(skipped)} malformed record(s) on line(s) '
                      f'{", ".join(map(str, skipped))}', UserWarning)
    logger.info('read %d field records from %s', len(records), path)
    return records


def read_observations(path: pathlib.Path) -> Tuple[pd.DataFrame, np.ndarray, np.ndarray]:
    """Reads observations to invert, columns b02..b12, sun_zen, view_zen and rel_az

    Other columns, e.g. an identifier, are passed through. Malformed rows are skipped with
    a warning naming their lines.

    Raises:
        DatasetError: if the file is missing or empty, or the header lacks required columns.

    Returns:
        Tuple[pd.DataFrame, np.ndarray, np.ndarray]: the passed-through columns of the kept rows,
            band reflectance [n, 10] and angles in degrees [n, 3].
    """
    path = pathlib.Path(path)
    if not path.is_file():
        raise DatasetError(f'{path}: input file not found')
    try:
        df = pd.read_csv(path, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise DatasetError(f'{path}: file is empty') from None

    required = list(FIELD_BAND_COLUMNS + FIELD_GEOMETRY_COLUMNS)
    missing = [column for column in required if column not in df.columns]
    if missing:
        raise DatasetError(f'{path}: header is missing column(s) {", ".join(missing)}')

    values = df[required].apply(pd.to_numeric, errors='coerce').to_numpy(dtype=np.float64)
    bands, geometry = values[:, :len(FIELD_BAND_COLUMNS)], values[:, len(FIELD_BAND_COLUMNS):]
    valid = np.all(np.isfinite(values), axis=1) & np.all((bands >= 0) & (bands <= 1), axis=1)
    if not np.all(valid):
        lines = np.flatnonzero(~valid) + 2
        warnings.warn(f'{path}: skipped {lines.size} malformed row(s) on line(s) {", ".join(map(str, lines))}',
                      UserWarning)
    if not np.any(valid):
        raise DatasetError(f'{path}: no valid rows')

    passthrough = df.loc[valid, [column for column in df.columns if column not in required]].reset_index(drop=True)
    return passthrough, bands[valid], geometry[valid]
