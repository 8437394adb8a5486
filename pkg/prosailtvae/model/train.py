import hashlib
import logging
import pathlib
from dataclasses import dataclass, asdict, field
from typing import Dict, Optional

import numpy as np
import tensorflow as tf

from ..callback import BetaWarmup, EpochLogger, BestWeights
from ..errors import ConfigError, TrainingDivergedError
from ..optimizer import Adam
from ..scheduler import LinearSchedule, BetaSchedule
from ..util.manifest import code_version, config_digest
from .checkpoint import TrainedModel, save_checkpoint
from .encoder import EncoderConfig
from .normalization import InputNormalization
from .tvae import TransformerVAE

logger = logging.getLogger(__name__)

LR_SCHEDULES = ('constant', 'linear')


@dataclass(frozen=True)
class TrainConfig:
    """Optimization settings, none of these values are reported for the reference model"""
    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    epochs: int = 100
    batch_size: int = 512
    learning_rate: float = 1e-3
    lr_schedule: str = 'constant'
    warm_up_until: float = 0.06
    beta_1: float = 0.9
    beta_2: float = 0.999
    epsilon: float = 1e-8
    clipnorm: Optional[float] = 1.0
    beta_start: float = 1e-4
    beta_end: float = 1.0
    beta_warmup_fraction: float = 0.5
    latent_samples: int = 1
    angle_mode: str = 'range'
    seed: int = 0
    deterministic: bool = True
    run_eagerly: bool = False
    jit_compile: bool = False

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigError(f'epochs and batch_size must be positive, got {self.epochs} and {self.batch_size}')
        if self.lr_schedule not in LR_SCHEDULES:
            raise ConfigError(f'unknown lr_schedule "{self.lr_schedule}", expected one of {LR_SCHEDULES}')
        if self.run_eagerly and self.jit_compile:
            raise ConfigError('run_eagerly must be false when jit_compile is true')
        if not 0 <= self.beta_warmup_fraction <= 1:
            raise ConfigError(f'beta_warmup_fraction must be in [0, 1], got {self.beta_warmup_fraction}')

    @property
    def beta_schedule(self) -> BetaSchedule:
        return BetaSchedule.for_training(self.epochs, self.beta_start, self.beta_end, self.beta_warmup_fraction)

    def to_dict(self) -> Dict:
        return asdict(self)


def dataset_hash(dataset) -> str:
    """sha256 of the parameters and observed bands of a SimulatedDataset"""
    digest = hashlib.sha256()
    digest.update(np.ascontiguousarray(dataset.params, dtype=np.float64).tobytes())
    digest.update(np.ascontiguousarray(dataset.noisy, dtype=np.float64).tobytes())
    return digest.hexdigest()


def as_tf_dataset(dataset, batch_size: int, shuffle_seed: Optional[int] = None) -> tf.data.Dataset:
    """(noisy bands, geometry) batches of a SimulatedDataset"""
    ds = tf.data.Dataset.from_tensor_slices((dataset.noisy.astype(np.float64), dataset.geometry.astype(np.float64)))
    if shuffle_seed is not None:
        ds = ds.shuffle(len(dataset), seed=shuffle_seed, reshuffle_each_iteration=True)
    return ds.batch(batch_size).prefetch(tf.data.AUTOTUNE)


def _optimizer(cfg: TrainConfig, steps_per_epoch: int) -> Adam:
    learning_rate = cfg.learning_rate
    if cfg.lr_schedule == 'linear':
        learning_rate = LinearSchedule(cfg.learning_rate, cfg.epochs * steps_per_epoch, cfg.warm_up_until)
    return Adam(learning_rate=learning_rate, beta_1=cfg.beta_1, beta_2=cfg.beta_2, epsilon=cfg.epsilon,
                clipnorm=cfg.clipnorm)


def train(train_set, val_set, cfg: TrainConfig, decoder,
          csv_log: pathlib.Path = None, checkpoint_path: pathlib.Path = None,
          resume: TrainedModel = None, verbose: int = 2) -> TrainedModel:
    """Trains the encoder by minimizing L = L_rec + beta * L_KL

    The KL weight follows the configured linear warm-up. The weights of the epoch with the
    lowest validation loss are kept. If a checkpoint path is given, the kept model is written
    there, also when training diverges.

    Args:
        train_set (SimulatedDataset): training samples, the noisy bands are the input and target.
        val_set (SimulatedDataset): validation samples.
        cfg (TrainConfig): optimization settings.
        decoder (ProsailDecoder): the fixed decoder.
        csv_log (pathlib.Path, optional): one row per epoch. Defaults to None.
        checkpoint_path (pathlib.Path, optional): where to write the best model. Defaults to None.
        resume (TrainedModel, optional): continue training this model from its completed epochs.
        verbose (int, optional): keras verbosity. Defaults to 2.

    Raises:
        TrainingDivergedError: if the loss becomes non-finite.

    Returns:
        TrainedModel: the best-validation model with its manifest and history.
    """
    if cfg.deterministic:
        tf.config.experimental.enable_op_determinism()
    tf.keras.utils.set_random_seed(cfg.seed)

    if resume is None:
        initial_epoch = 0
        history = {}
        normalization = InputNormalization.from_bands(train_set.noisy, cfg.angle_mode)
        model = TransformerVAE(cfg.encoder, decoder, normalization, latent_samples=cfg.latent_samples,
                               beta=cfg.beta_schedule(0)).build_for_inputs()
    else:
        model = resume.model
        initial_epoch = int(resume.manifest.get('epochs_completed', 0))
        history = {key: list(values) for key, values in resume.history.items()}
        if initial_epoch >= cfg.epochs:
            raise ConfigError(f'the model already completed {initial_epoch} of {cfg.epochs} epochs')

    train_batches = as_tf_dataset(train_set, cfg.batch_size, shuffle_seed=cfg.seed)
    val_batches = as_tf_dataset(val_set, cfg.batch_size)
    model.compile(optimizer=_optimizer(cfg, len(train_batches)), run_eagerly=cfg.run_eagerly,
                  jit_compile=cfg.jit_compile)

    # val_loss is weighted by the current beta, rank epochs by the objective at the final beta
    best_weights = BestWeights(monitor={'val_rec': 1.0, 'val_kl': cfg.beta_schedule.beta_end})
    callbacks = [BetaWarmup(cfg.beta_schedule), EpochLogger(), best_weights]
    if csv_log is not None:
        pathlib.Path(csv_log).parent.mkdir(parents=True, exist_ok=True)
        callbacks.append(tf.keras.callbacks.CSVLogger(str(csv_log), append=resume is not None))

    logger.info('training %d parameters for epochs %d-%d', model.parameter_count, initial_epoch, cfg.epochs)
    fit = model.fit(train_batches, validation_data=val_batches, epochs=cfg.epochs, initial_epoch=initial_epoch,
                    callbacks=callbacks, verbose=verbose)
    for key, values in fit.history.items():
        history.setdefault(key, []).extend(float(value) for value in values)

    manifest = {
        'seed': cfg.seed,
        'train_config': cfg.to_dict(),
        'train_dataset_hash': dataset_hash(train_set),
        'val_dataset_hash': dataset_hash(val_set),
        'train_size': len(train_set),
        'val_size': len(val_set),
        'beta_schedule': asdict(cfg.beta_schedule),
        'epochs_completed': initial_epoch + len(fit.history.get('loss', [])),
        'best_epoch': best_weights.best_epoch,
        'best_val_objective': best_weights.best if best_weights.best_epoch is not None else None,
        'diverged_epoch': best_weights.diverged_epoch,
        'parameter_count': model.parameter_count,
        'asset_checksums': dict(decoder.assets.checksums),
        'config_hash': config_digest(cfg.to_dict()),
        'code_version': code_version(),
    }
    trained = TrainedModel(model, manifest, history)

    if checkpoint_path is not None and (best_weights.best_epoch is not None or not best_weights.diverged):
        save_checkpoint(trained, checkpoint_path)
    if best_weights.diverged:
        raise TrainingDivergedError(best_weights.diverged_epoch, best_weights.best_epoch)
    return trained
