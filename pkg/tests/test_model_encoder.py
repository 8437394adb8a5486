import numpy as np
import pytest
import tensorflow as tf

from prosailtvae.errors import ConfigError
from prosailtvae.model import EncoderConfig, TransformerEncoder, TokenLift, sinusoidal_encoding, InputNormalization


def _count(layer):
    return int(np.sum([np.prod(variable.shape) for variable in layer.trainable_variables]))


def test_reference_parameter_count():
    encoder = TransformerEncoder(EncoderConfig())
    raw = encoder(tf.zeros((2, 13), dtype=tf.dtypes.float64))
    assert raw.shape == (2, 22)
    assert raw.dtype == tf.dtypes.float64
    # lift 3328, four blocks of 198272 and the head 2838
    assert _count(encoder) == 799254


@pytest.mark.parametrize("kwargs,match", [
    ({'d_model': 100, 'num_heads': 8}, 'divisible'),
    ({'num_latents': 5}, 'num_latents must be 11'),
    ({'num_layers': 0}, 'positive'),
    ({'dropout': 1.0}, 'dropout')
], ids=['heads', 'latents', 'layers', 'dropout'])
def test_encoder_config_validation(kwargs, match):
    with pytest.raises(ConfigError, match=match):
        EncoderConfig(**kwargs)


def test_token_lift():
    lift = TokenLift(3, 4, dtype='float64')
    x = tf.constant([[1.0, 2.0, 3.0]], dtype=tf.dtypes.float64)
    tokens = lift(x)
    assert tokens.shape == (1, 3, 4)
    np.testing.assert_allclose(tokens.numpy()[0], x.numpy()[0, :, np.newaxis] * lift.kernel.numpy())


def test_sinusoidal_encoding():
    encoding = sinusoidal_encoding(13, 8)
    assert encoding.shape == (13, 8)
    np.testing.assert_allclose(encoding[0], [0, 1, 0, 1, 0, 1, 0, 1])
    np.testing.assert_allclose(encoding[1, 0], np.sin(1.0))
    assert np.unique(encoding, axis=0).shape[0] == 13


def test_permutation_sensitive():
    encoder = TransformerEncoder(EncoderConfig(d_model=16, num_heads=2, num_layers=1, ff_dim=32))
    x = tf.constant(np.random.default_rng(0).normal(size=(1, 13)))
    swapped = tf.gather(x, [1, 0] + list(range(2, 13)), axis=1)
    assert not np.allclose(encoder(x).numpy(), encoder(swapped).numpy())


def test_input_normalization():
    bands = np.random.default_rng(1).uniform(0, 0.5, size=(100, 10))
    normalization = InputNormalization.from_bands(bands)
    geometry = np.array([[15.0, 0.0, 0.0], [60.0, 10.0, 180.0]])
    tokens = normalization(bands[:2], geometry).numpy()
    np.testing.assert_allclose(tokens[:, 10:], [[0, 0, 0], [1, 1, 1]])

    tokens = normalization(bands, np.zeros((100, 3)) + 30).numpy()
    np.testing.assert_allclose(np.mean(tokens[:, :10], axis=0), 0, atol=1e-12)
    np.testing.assert_allclose(np.std(tokens[:, :10], axis=0), 1)

    cosine = InputNormalization.identity('cosine')(bands[:1], [[60.0, 0.0, 90.0]]).numpy()
    np.testing.assert_allclose(cosine[0, 10:], [0.5, 1.0, 0.0], atol=1e-12)
    assert InputNormalization.from_dict(normalization.to_dict()) == normalization


def test_input_normalization_validation():
    with pytest.raises(ConfigError, match='angle_mode'):
        InputNormalization.identity('degrees')
    with pytest.raises(ConfigError, match='positive'):
        InputNormalization((0.0, ) * 10, (0.0, ) * 10)
