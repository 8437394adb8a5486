import numpy as np
import pytest

from prosailtvae.model import EncoderConfig, TrainConfig, train
from prosailtvae.rtm import ProsailDecoder
from prosailtvae.sampler import SamplerConfig, DatasetWriter, generate_dataset, read_dataset
from prosailtvae.spectral import load_assets
from prosailtvae.test import write_synthetic_assets


@pytest.fixture(scope='session')
def assets_dir(tmp_path_factory):
    return write_synthetic_assets(tmp_path_factory.mktemp('assets'))


@pytest.fixture(scope='session')
def assets(assets_dir):
    return load_assets(assets_dir)


@pytest.fixture(scope='session')
def decoder(assets):
    return ProsailDecoder(assets)


@pytest.fixture
def typical_params():
    # n, cab, car, cbrown, cw, cm, lai, ala, hotspot, soil_wet, soil_bright, tts, tto, psi
    return np.array([1.5, 40.0, 8.0, 0.0, 0.01, 0.009, 3.0, 60.0, 0.2, 0.5, 1.0, 30.0, 5.0, 90.0])


def _simulate(path, n, seed, decoder):
    cfg = SamplerConfig(n=n, chunk_size=64)
    with DatasetWriter(path) as sink:
        generate_dataset(n, cfg, seed, sink, decoder, progress=False)
    return read_dataset(path)


@pytest.fixture(scope='session')
def simulated(tmp_path_factory, decoder):
    directory = tmp_path_factory.mktemp('simulated')
    return _simulate(directory / 'train.bin', 96, 0, decoder), _simulate(directory / 'val.bin', 32, 1, decoder)


@pytest.fixture(scope='session')
def tiny_train_config():
    return TrainConfig(encoder=EncoderConfig(d_model=16, num_heads=2, num_layers=1, ff_dim=32),
                       epochs=2, batch_size=32, seed=0)


@pytest.fixture(scope='session')
def trained(tmp_path_factory, simulated, decoder, tiny_train_config):
    path = tmp_path_factory.mktemp('checkpoint') / 'model.h5'
    train(*simulated, tiny_train_config, decoder, checkpoint_path=path, verbose=0)
    return path
