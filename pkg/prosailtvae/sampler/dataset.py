import json
import logging
import pathlib
from dataclasses import dataclass, asdict, field
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd
import scipy.stats
from tqdm import tqdm

from ..errors import DatasetError
from ..types import PARAMETER_NAMES, LATENT_NAMES, BAND_IDS, ParameterVector
from ..util.manifest import code_version
from .config import SamplerConfig
from .sampling import parameters_from_uniforms, apply_noise, sample_streams

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
CLEAN_COLUMNS = tuple(f'clean_{band}' for band in BAND_IDS)
NOISY_COLUMNS = tuple(f'noisy_{band}' for band in BAND_IDS)
DATASET_COLUMNS = PARAMETER_NAMES + CLEAN_COLUMNS + NOISY_COLUMNS
_record_dtype = np.dtype('<f4')


@dataclass(frozen=True)
class SimulatedSample:
    params: ParameterVector
    clean_bands: np.ndarray
    noisy_bands: np.ndarray

    @property
    def geometry(self):
        return self.params.geometry


@dataclass(frozen=True)
class DatasetManifest:
    n: int
    seed: int
    config_hash: str
    config: Dict
    asset_checksums: Dict[str, str]
    chunk_size: int
    code_version: str = '0+unknown'
    columns: Tuple[str, ...] = DATASET_COLUMNS
    format_version: int = FORMAT_VERSION

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> 'DatasetManifest':
        content = json.loads(text)
        content['columns'] = tuple(content['columns'])
        return cls(**content)


@dataclass(frozen=True)
class SimulatedDataset:
    """A dataset in memory, columns as in DATASET_COLUMNS

    Args:
        params (np.ndarray): parameters [n, 14] in PARAMETER_NAMES order.
        clean (np.ndarray): noise free band reflectance [n, 10].
        noisy (np.ndarray): observed band reflectance [n, 10].
        manifest (DatasetManifest, optional): generation record, if available.
    """
    params: np.ndarray
    clean: np.ndarray
    noisy: np.ndarray
    manifest: Optional[DatasetManifest] = field(default=None, compare=False)

    def __len__(self):
        return self.params.shape[0]

    def __getitem__(self, index) -> SimulatedSample:
        return SimulatedSample(ParameterVector.from_tensor(self.params[index]), self.clean[index], self.noisy[index])

    @property
    def latents(self) -> np.ndarray:
        return self.params[:, :len(LATENT_NAMES)]

    @property
    def geometry(self) -> np.ndarray:
        return self.params[:, len(LATENT_NAMES):]

    def to_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame(np.concatenate([self.params, self.clean, self.noisy], axis=1), columns=DATASET_COLUMNS)


def manifest_path(path: pathlib.Path) -> pathlib.Path:
    path = pathlib.Path(path)
    return path.with_name(path.name + '.manifest.json')


class DatasetWriter:
    def __init__(self, path: pathlib.Path):
        """Streams simulated records to the binary dataset format

        The file starts with one text line naming the columns, followed by
        little-endian float32 records of len(DATASET_COLUMNS) values.

        Args:
            path (pathlib.Path): the dataset file, the manifest is written next to it.
        """
        self.path = pathlib.Path(path)
        self.n_written = 0
        self._fp = None

    def __enter__(self) -> 'DatasetWriter':
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fp = open(self.path, 'wb')
        self._fp.write((' '.join(DATASET_COLUMNS) + '\n').encode('ascii'))
        return self

    def __exit__(self, *exc_info):
        self._fp.close()
        self._fp = None

    def write(self, params: np.ndarray, clean: np.ndarray, noisy: np.ndarray):
        records = np.concatenate([params, clean, noisy], axis=1).astype(_record_dtype)
        self._fp.write(records.tobytes())
        self.n_written += records.shape[0]

    def write_manifest(self, manifest: DatasetManifest) -> pathlib.Path:
        if manifest.n != self.n_written:
            raise DatasetError(f'{self.path}: manifest declares {manifest.n} samples, {self.n_written} were written')
        path = manifest_path(self.path)
        path.write_text(manifest.to_json(), encoding='utf-8')
        return path


def generate_dataset(n: int, cfg: SamplerConfig, seed: int, sink: DatasetWriter, decoder,
                     asset_checksums: Dict[str, str] = None, chunk_size: int = None,
                     progress: bool = True) -> DatasetManifest:
    """Simulates n samples and streams them to the sink

    Every sample draws from its own (seed, index) stream, so the output only depends on
    (n, seed, cfg, assets) and the decoder batch size.

    Args:
        n (int): number of samples.
        cfg (SamplerConfig): simulation distribution and noise model.
        seed (int): random seed.
        sink (DatasetWriter): an opened writer.
        decoder (ProsailDecoder): maps parameters [B, 14] to band reflectance.
        asset_checksums (Dict[str, str], optional): recorded in the manifest. Defaults to decoder.assets.checksums.
        chunk_size (int, optional): samples per decoder call. Defaults to cfg.chunk_size.
        progress (bool, optional): show a progress bar. Defaults to True.

    Returns:
        DatasetManifest: generation record, also written next to the dataset.
    """
    chunk_size = cfg.chunk_size if chunk_size is None else chunk_size
    if asset_checksums is None:
        asset_checksums = dict(decoder.assets.checksums)

    logger.info('simulating %d samples in chunks of %d, seed %d', n, chunk_size, seed)
    for start in tqdm(range(0, n, chunk_size), desc='Simulating', unit='chunk', disable=not progress):
        stop = min(start + chunk_size, n)
        uniforms, normals = sample_streams(seed, start, stop)
        params = parameters_from_uniforms(cfg, uniforms)
        clean = np.clip(decoder(params).numpy(), 0.0, 1.0)
        noisy = apply_noise(clean, normals, cfg.noise_level, cfg.noise_mode)
        sink.write(params, clean, noisy)

    manifest = DatasetManifest(n=n, seed=seed, config_hash=cfg.hash, config=cfg.to_dict(),
                               asset_checksums=asset_checksums, chunk_size=chunk_size,
                               code_version=code_version())
    sink.write_manifest(manifest)
    return manifest


def read_dataset(path: pathlib.Path) -> SimulatedDataset:
    """Reads a dataset written by DatasetWriter

    Raises:
        DatasetError: if the file is missing, has unexpected columns, or a truncated body.
    """
    path = pathlib.Path(path)
    if not path.is_file():
        raise DatasetError(f'{path}: dataset file not found')

    with open(path, 'rb') as fp:
        columns = tuple(fp.readline().decode('ascii', errors='replace').split())
        if columns != DATASET_COLUMNS:
            raise DatasetError(f'{path}: unexpected columns, expected {len(DATASET_COLUMNS)} '
                               f'columns starting with {DATASET_COLUMNS[0]}')
        body = fp.read()

    record_size = len(DATASET_COLUMNS) * _record_dtype.itemsize
    if len(body) % record_size != 0:
        raise DatasetError(f'{path}: truncated body, {len(body)} bytes is not a multiple of {record_size}')
    if len(body) == 0:
        raise DatasetError(f'{path}: dataset is empty')
    records = np.frombuffer(body, dtype=_record_dtype).reshape(-1, len(DATASET_COLUMNS)).astype(np.float64)

    manifest = None
    if manifest_path(path).is_file():
        manifest = DatasetManifest.from_json(manifest_path(path).read_text(encoding='utf-8'))

    n_params, n_bands = len(PARAMETER_NAMES), len(BAND_IDS)
    return SimulatedDataset(records[:, :n_params],
                            records[:, n_params:n_params + n_bands],
                            records[:, n_params + n_bands:],
                            manifest)


def export_csv(dataset: SimulatedDataset, path: pathlib.Path) -> pathlib.Path:
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dataset.to_dataframe().to_csv(path, index=False)
    return path


def _bound_row(variable, condition, values, lower, upper):
    # stored values are float32, rounding is monotone so compare in float32
    lower32, upper32 = np.float32(lower), np.float32(upper)
    return {
        'variable': variable,
        'condition': condition,
        'lower': lower,
        'upper': upper,
        'min': np.min(values) if values.size else np.nan,
        'max': np.max(values) if values.size else np.nan,
        'count': values.size,
        'violations': int(np.sum((values.astype(np.float32) < lower32) | (values.astype(np.float32) > upper32)))
    }


def check_bounds(dataset: SimulatedDataset, cfg: SamplerConfig) -> pd.DataFrame:
    """Summarizes the empirical range of every variable against its configured bounds

    Conditional rows check the overridden variables on the samples where each rule fired.

    Returns:
        pd.DataFrame: one row per check, with columns
            variable, condition, lower, upper, min, max, count, violations.
    """
    rows = []
    for column, spec in enumerate(cfg.variables):
        rows.append(_bound_row(spec.name, 'all', dataset.params[:, column], spec.lower, spec.upper))

    for rule in cfg.rules:
        driver = dataset.params[:, PARAMETER_NAMES.index(rule.variable)]
        # the trigger was evaluated in float64, so re-evaluate it away from the threshold
        fired = rule.fires(driver) & (np.abs(driver - rule.threshold) > 1e-5 * max(1.0, abs(rule.threshold)))
        for name, lower, upper in rule.overrides:
            values = dataset.params[fired, PARAMETER_NAMES.index(name)]
            rows.append(_bound_row(name, f'{rule.name}: {rule.trigger}', values, lower, upper))

    for band_column, band in enumerate(NOISY_COLUMNS):
        rows.append(_bound_row(band, 'all', dataset.noisy[:, band_column], 0.0, 1.0))
    return pd.DataFrame(rows)


def prior_mean(cfg: SamplerConfig) -> np.ndarray:
    """Mean of each configured latent marginal, the prior-mean baseline predictor

    Returns:
        np.ndarray: means [11] in LATENT_NAMES order.
    """
    means = []
    for name in LATENT_NAMES:
        spec = cfg.spec(name)
        if spec.family == 'uniform':
            means.append((spec.lower + spec.upper) / 2)
        else:
            a, b = (spec.lower - spec.mean) / spec.sd, (spec.upper - spec.mean) / spec.sd
            means.append(scipy.stats.truncnorm.mean(a, b, loc=spec.mean, scale=spec.sd))
    return np.asarray(means, dtype=np.float64)
