import dataclasses

import numpy as np
import pandas as pd
import pytest

from prosailtvae.errors import ConfigError
from prosailtvae.metric import InversionCriteria, rmse, picp
from prosailtvae.model import EncoderConfig, TrainConfig, train, infer, as_tf_dataset, dataset_hash, load_checkpoint, \
    summary_path
from prosailtvae.rtm import ProsailDecoder
from prosailtvae.sampler import SamplerConfig, DatasetWriter, generate_dataset, read_dataset, prior_mean
from prosailtvae.spectral import load_assets, default_assets_dir, ASSETS_ENV
from prosailtvae.types import IntervalEstimate, LATENT_NAMES


def test_train_config_validation():
    with pytest.raises(ConfigError, match='lr_schedule'):
        TrainConfig(lr_schedule='cosine')
    with pytest.raises(ConfigError, match='run_eagerly'):
        TrainConfig(run_eagerly=True, jit_compile=True)
    with pytest.raises(ConfigError, match='positive'):
        TrainConfig(epochs=0)
    assert TrainConfig(epochs=10).beta_schedule.warmup_epochs == 5


def test_as_tf_dataset(simulated):
    train_set, _ = simulated
    bands, geometry = next(iter(as_tf_dataset(train_set, 10)))
    assert bands.shape == (10, 10) and geometry.shape == (10, 3)
    np.testing.assert_allclose(bands.numpy(), train_set.noisy[:10])
    assert dataset_hash(train_set) == dataset_hash(train_set)
    assert dataset_hash(train_set) != dataset_hash(simulated[1])


def test_trained_checkpoint(trained, simulated, decoder, tiny_train_config):
    restored = load_checkpoint(trained, decoder)
    manifest = restored.manifest
    assert manifest['epochs_completed'] == 2
    assert manifest['best_epoch'] in (0, 1)
    assert manifest['diverged_epoch'] is None
    assert manifest['train_dataset_hash'] == dataset_hash(simulated[0])
    assert manifest['train_size'] == 96 and manifest['val_size'] == 32
    assert manifest['asset_checksums'] == dict(decoder.assets.checksums)
    assert manifest['beta_schedule'] == {'beta_start': 1e-4, 'beta_end': 1.0, 'warmup_epochs': 1}
    assert manifest['train_config']['encoder']['d_model'] == 16
    assert np.isfinite(manifest['best_val_objective'])
    assert summary_path(trained).is_file()


@pytest.mark.slow
def test_training_is_deterministic(tmp_path, simulated, decoder, tiny_train_config):
    first = train(*simulated, tiny_train_config, decoder, verbose=0)
    second = train(*simulated, tiny_train_config, decoder, verbose=0)
    np.testing.assert_allclose(first.history['loss'], second.history['loss'])
    for a, b in zip(first.model.trainable_variables, second.model.trainable_variables):
        np.testing.assert_array_equal(a.numpy(), b.numpy())


@pytest.mark.slow
def test_training_reduces_loss(tmp_path, simulated, decoder, tiny_train_config):
    cfg = dataclasses.replace(tiny_train_config, epochs=6, beta_start=1.0, lr_schedule='linear')
    trained = train(*simulated, cfg, decoder, csv_log=tmp_path / 'log.csv', verbose=0)
    assert trained.history['loss'][-1] < trained.history['loss'][0]

    log = pd.read_csv(tmp_path / 'log.csv')
    assert list(log['epoch']) == list(range(6))
    assert {'loss', 'rec', 'kl', 'val_loss', 'beta', 'wall_time'} <= set(log.columns)
    np.testing.assert_allclose(log['beta'], 1.0)


@pytest.mark.slow
def test_resume(tmp_path, trained, simulated, decoder, tiny_train_config):
    resumed = load_checkpoint(trained, decoder)
    cfg = dataclasses.replace(tiny_train_config, epochs=3)
    result = train(*simulated, cfg, decoder, csv_log=tmp_path / 'log.csv', resume=resumed, verbose=0)
    assert result.manifest['epochs_completed'] == 3
    assert list(pd.read_csv(tmp_path / 'log.csv')['epoch']) == [2]

    with pytest.raises(ConfigError, match='already completed'):
        train(*simulated, tiny_train_config, decoder, resume=load_checkpoint(trained, decoder), verbose=0)


@pytest.mark.slow
def test_toy_inversion(tmp_path, monkeypatch):
    monkeypatch.delenv(ASSETS_ENV, raising=False)
    decoder = ProsailDecoder(load_assets(default_assets_dir()))
    sampler_cfg = SamplerConfig(noise_level=0.005)

    datasets = []
    for name, n, seed in (('train', 5000, 0), ('val', 500, 1)):
        with DatasetWriter(tmp_path / f'{name}.bin') as sink:
            generate_dataset(n, dataclasses.replace(sampler_cfg, n=n), seed, sink, decoder, progress=False)
        datasets.append(read_dataset(tmp_path / f'{name}.bin'))
    train_set, val_set = datasets

    cfg = TrainConfig(encoder=EncoderConfig(d_model=32, num_heads=4, num_layers=2, ff_dim=64),
                      epochs=30, batch_size=256, seed=0)
    trained = train(train_set, val_set, cfg, decoder, verbose=0)

    estimate = infer(trained, val_set.clean, val_set.geometry)
    lai = LATENT_NAMES.index('lai')
    truth = val_set.latents[:, lai]
    criteria = InversionCriteria().check(
        trained.history['val_rec'],
        rmse(estimate.mean[:, lai], truth),
        rmse(np.full_like(truth, prior_mean(sampler_cfg)[lai]), truth),
        picp(IntervalEstimate(estimate.mean[:, lai], estimate.lower[:, lai], estimate.upper[:, lai]), truth)
    )
    assert criteria == {'rec_reduction': True, 'rmse_improvement': True, 'picp': True}
