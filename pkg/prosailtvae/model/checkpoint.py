import json
import logging
import pathlib
import warnings
from dataclasses import dataclass, field
from typing import Dict

import h5py
import numpy as np

from ..errors import DatasetError
from .encoder import EncoderConfig
from .normalization import InputNormalization
from .tvae import TransformerVAE

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT = 'prosailtvae-checkpoint'
CHECKPOINT_VERSION = 1


@dataclass
class TrainedModel:
    """A trained model together with its training record

    Args:
        model (TransformerVAE): the model, including its decoder noise.
        manifest (Dict): seed, dataset hashes, schedule, epochs completed and asset checksums.
        history (Dict): per-epoch logs.
    """
    model: TransformerVAE
    manifest: Dict = field(default_factory=dict)
    history: Dict = field(default_factory=dict)

    @property
    def encoder_config(self) -> EncoderConfig:
        return self.model.config

    @property
    def normalization(self) -> InputNormalization:
        return self.model.normalization

    @property
    def parameter_count(self) -> int:
        return self.model.parameter_count

    @property
    def noise_sd(self) -> np.ndarray:
        return np.exp(self.model.log_noise_sd.numpy())


def summary_path(path: pathlib.Path) -> pathlib.Path:
    path = pathlib.Path(path)
    return path.with_name(path.stem + '.summary.json')


def save_checkpoint(trained: TrainedModel, path: pathlib.Path) -> pathlib.Path:
    """Writes the model to an HDF5 checkpoint and a readable summary next to it

    Args:
        trained (TrainedModel): the model and its manifest.
        path (pathlib.Path): the checkpoint file, e.g. model.h5.

    Returns:
        pathlib.Path: the checkpoint path.
    """
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    model = trained.model

    with h5py.File(path, 'w') as fp:
        fp.attrs['format'] = CHECKPOINT_FORMAT
        fp.attrs['version'] = CHECKPOINT_VERSION
        fp.attrs['encoder_config'] = json.dumps(model.config.to_dict())
        fp.attrs['normalization'] = json.dumps(model.normalization.to_dict())
        fp.attrs['latent_samples'] = model.latent_samples
        fp.attrs['manifest'] = json.dumps(trained.manifest, sort_keys=True)
        weights = fp.create_group('weights')
        for index, variable in enumerate(model.trainable_variables):
            dataset = weights.create_dataset(f'{index:04d}', data=variable.numpy())
            dataset.attrs['name'] = variable.name

    summary = {
        'checkpoint': path.name,
        'format_version': CHECKPOINT_VERSION,
        'parameter_count': model.parameter_count,
        'encoder_config': model.config.to_dict(),
        'normalization': model.normalization.to_dict(),
        'noise_sd': trained.noise_sd.tolist(),
        'manifest': trained.manifest,
    }
    summary_path(path).write_text(json.dumps(summary, indent=2, sort_keys=True), encoding='utf-8')
    logger.info('saved checkpoint %s (%d parameters)', path, model.parameter_count)
    return path


def load_checkpoint(path: pathlib.Path, decoder) -> TrainedModel:
    """Restores a model written by `save_checkpoint`

    Args:
        path (pathlib.Path): the checkpoint file.
        decoder (ProsailDecoder): the decoder, its asset checksums are compared with the manifest.

    Raises:
        DatasetError: if the file is missing, is not a checkpoint, or the weights do not match.

    Returns:
        TrainedModel: the model and its manifest.
    """
    path = pathlib.Path(path)
    if not path.is_file():
        raise DatasetError(f'{path}: checkpoint not found')

    with h5py.File(path, 'r') as fp:
        if fp.attrs.get('format') != CHECKPOINT_FORMAT:
            raise DatasetError(f'{path}: not a {CHECKPOINT_FORMAT} file')
        if int(fp.attrs['version']) > CHECKPOINT_VERSION:
            raise DatasetError(f'{path}: checkpoint version {fp.attrs["version"]} is newer than {CHECKPOINT_VERSION}')
        config = EncoderConfig(**json.loads(fp.attrs['encoder_config']))
        normalization = InputNormalization.from_dict(json.loads(fp.attrs['normalization']))
        manifest = json.loads(fp.attrs['manifest'])
        latent_samples = int(fp.attrs['latent_samples'])
        values = [fp['weights'][name][()] for name in sorted(fp['weights'].keys())]

    model = TransformerVAE(config, decoder, normalization, latent_samples=latent_samples).build_for_inputs()
    if len(values) != len(model.trainable_variables):
        raise DatasetError(f'{path}: {len(values)} weight arrays, the model has {len(model.trainable_variables)}')
    for variable, value in zip(model.trainable_variables, values):
        if tuple(variable.shape) != value.shape:
            raise DatasetError(f'{path}: weight {variable.name} has shape {value.shape}, expected {variable.shape}')
        variable.assign(value)

    expected = manifest.get('asset_checksums', {})
    actual = dict(getattr(decoder.assets, 'checksums', {}))
    if expected and expected != actual:
        warnings.warn(f'{path}: the spectral assets differ from those the model was trained with', UserWarning)
    return TrainedModel(model, manifest)
