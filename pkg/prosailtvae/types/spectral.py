from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

BAND_IDS = ('B2', 'B3', 'B4', 'B5', 'B6', 'B7', 'B8', 'B8A', 'B11', 'B12')


@dataclass(frozen=True)
class SpectralGrid:
    """Regular wavelength grid in nm"""
    start_nm: float
    step_nm: float
    count: int

    def __post_init__(self):
        if not self.step_nm > 0:
            raise ValueError(f'step_nm must be positive, got {self.step_nm}')
        if self.count < 2:
            raise ValueError(f'count must be at least 2, got {self.count}')

    @property
    def stop_nm(self) -> float:
        return self.start_nm + self.step_nm * (self.count - 1)

    @property
    def wavelengths(self) -> np.ndarray:
        return self.start_nm + self.step_nm * np.arange(self.count, dtype=np.float64)

    def index_of(self, wavelength_nm: float) -> int:
        """Index of the grid point closest to a wavelength

        Raises:
            ValueError: if the wavelength is outside the grid.
        """
        if not self.start_nm <= wavelength_nm <= self.stop_nm:
            raise ValueError(f'{wavelength_nm} nm is outside the grid [{self.start_nm}, {self.stop_nm}]')
        return int(round((wavelength_nm - self.start_nm) / self.step_nm))


@dataclass(frozen=True)
class SpectrumCurve:
    grid: SpectralGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.grid.count, ):
            raise ValueError(f'expected {self.grid.count} values, got shape {values.shape}')
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)


@dataclass(frozen=True)
class LeafCoefficientTables:
    """Specific absorption coefficients and refractive index for PROSPECT-5"""
    refractive_index: SpectrumCurve
    k_cab: SpectrumCurve
    k_car: SpectrumCurve
    k_brown: SpectrumCurve
    k_cw: SpectrumCurve
    k_cm: SpectrumCurve

    def __post_init__(self):
        for name in ('k_cab', 'k_car', 'k_brown', 'k_cw', 'k_cm'):
            curve = getattr(self, name)
            if curve.grid != self.grid:
                raise ValueError(f'{name} is not on the refractive index grid')
            if np.any(curve.values < 0):
                raise ValueError(f'{name} has negative absorption values')
        if np.any(self.refractive_index.values <= 1):
            raise ValueError('refractive index must be > 1 everywhere')

    @property
    def grid(self) -> SpectralGrid:
        return self.refractive_index.grid

    @property
    def absorption(self) -> np.ndarray:
        """Absorption coefficients stacked as [5, W] in (cab, car, cbrown, cw, cm) order"""
        return np.stack([self.k_cab.values, self.k_car.values, self.k_brown.values,
                         self.k_cw.values, self.k_cm.values])


@dataclass(frozen=True)
class SoilBasis:
    dry: SpectrumCurve
    wet: SpectrumCurve

    def __post_init__(self):
        if self.dry.grid != self.wet.grid:
            raise ValueError('dry and wet soil curves are on different grids')
        for name in ('dry', 'wet'):
            values = getattr(self, name).values
            if np.any(values < 0) or np.any(values > 1):
                raise ValueError(f'{name} soil reflectance must be in [0, 1]')

    @property
    def grid(self) -> SpectralGrid:
        return self.dry.grid


@dataclass(frozen=True)
class SensorResponse:
    """Per-band spectral response functions on the model grid"""
    bands: Tuple[Tuple[str, SpectrumCurve], ...]
    normalizers: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if len(self.bands) == 0:
            raise ValueError('a sensor response needs at least one band')
        grid = self.bands[0][1].grid
        normalizers = []
        for band_id, weights in self.bands:
            if weights.grid != grid:
                raise ValueError(f'band {band_id} is not on the model grid')
            if np.any(weights.values < 0):
                raise ValueError(f'band {band_id} has negative weights')
            normalizer = np.sum(weights.values) * grid.step_nm
            if not normalizer > 0:
                raise ValueError(f'band {band_id} has a zero normalizer')
            normalizers.append(normalizer)
        object.__setattr__(self, 'normalizers', np.asarray(normalizers))

    @property
    def grid(self) -> SpectralGrid:
        return self.bands[0][1].grid

    @property
    def band_ids(self) -> Tuple[str, ...]:
        return tuple(band_id for band_id, _ in self.bands)

    @property
    def weight_matrix(self) -> np.ndarray:
        """Normalized weights [W, bands]; each column sums to one"""
        weights = np.stack([curve.values for _, curve in self.bands], axis=1)
        return weights / np.sum(weights, axis=0, keepdims=True)

    def support(self) -> Tuple[int, int]:
        """Smallest [start, stop) index range containing every nonzero weight"""
        nonzero = np.flatnonzero(np.any(np.stack([curve.values for _, curve in self.bands]) > 0, axis=0))
        return int(nonzero[0]), int(nonzero[-1]) + 1
