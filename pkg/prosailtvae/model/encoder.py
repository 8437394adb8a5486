from dataclasses import dataclass, asdict

import numpy as np
import tensorflow as tf

from ..errors import ConfigError
from ..types import BAND_IDS, GEOMETRY_NAMES, LATENT_NAMES

NUM_TOKENS = len(BAND_IDS) + len(GEOMETRY_NAMES)


@dataclass(frozen=True)
class EncoderConfig:
    """Transformer encoder shape

    The defaults are the reference configuration, which has about 799k trainable
    parameters including the decoder noise model.
    """
    d_model: int = 128
    num_heads: int = 8
    num_layers: int = 4
    ff_dim: int = 512
    num_latents: int = len(LATENT_NAMES)
    dropout: float = 0.0

    def __post_init__(self):
        if self.d_model % self.num_heads != 0:
            raise ConfigError(f'd_model ({self.d_model}) must be divisible by num_heads ({self.num_heads})')
        if self.num_latents != len(LATENT_NAMES):
            raise ConfigError(f'num_latents must be {len(LATENT_NAMES)}, got {self.num_latents}')
        if min(self.d_model, self.num_heads, self.num_layers, self.ff_dim) < 1:
            raise ConfigError('encoder dimensions must be positive')
        if not 0 <= self.dropout < 1:
            raise ConfigError(f'dropout must be in [0, 1), got {self.dropout}')

    def to_dict(self):
        return asdict(self)


def sinusoidal_encoding(num_positions: int, d_model: int) -> np.ndarray:
    """Fixed positional encoding, [num_positions, d_model]"""
    position = np.arange(num_positions)[:, np.newaxis]
    rates = np.exp(-np.log(10000.0) * (2 * (np.arange(d_model) // 2)) / d_model)
    angles = position * rates[np.newaxis, :]
    return np.where(np.arange(d_model) % 2 == 0, np.sin(angles), np.cos(angles))


class TokenLift(tf.keras.layers.Layer):
    """Lifts each scalar input to a d_model token with its own affine map"""

    def __init__(self, num_tokens: int, d_model: int, **kwargs):
        super().__init__(**kwargs)
        self.num_tokens = num_tokens
        self.d_model = d_model

    def build(self, input_shape):
        self.kernel = self.add_weight('kernel', shape=(self.num_tokens, self.d_model),
                                      initializer=tf.keras.initializers.RandomNormal(stddev=1.0))
        self.bias = self.add_weight('bias', shape=(self.num_tokens, self.d_model), initializer='zeros')
        super().build(input_shape)

    def call(self, x):
        return x[..., tf.newaxis] * self.kernel + self.bias


class EncoderBlock(tf.keras.layers.Layer):
    def __init__(self, d_model: int, num_heads: int, ff_dim: int, dropout: float = 0.0, **kwargs):
        super().__init__(**kwargs)
        self._attention = tf.keras.layers.MultiHeadAttention(num_heads=num_heads, key_dim=d_model // num_heads,
                                                             dropout=dropout, dtype=self.dtype)
        self._attention_norm = tf.keras.layers.LayerNormalization(epsilon=1e-6, dtype=self.dtype)
        self._ff_inner = tf.keras.layers.Dense(ff_dim, activation='gelu', dtype=self.dtype)
        self._ff_outer = tf.keras.layers.Dense(d_model, dtype=self.dtype)
        self._ff_dropout = tf.keras.layers.Dropout(dropout, dtype=self.dtype)
        self._ff_norm = tf.keras.layers.LayerNormalization(epsilon=1e-6, dtype=self.dtype)

    def call(self, x, training=False):
        x = self._attention_norm(x + self._attention(x, x, training=training))
        ff = self._ff_dropout(self._ff_outer(self._ff_inner(x)), training=training)
        return self._ff_norm(x + ff)


class TransformerEncoder(tf.keras.layers.Layer):
    def __init__(self, config: EncoderConfig, **kwargs):
        """Maps 13 normalized scalars (10 bands, 3 angles) to the raw latent head outputs

        Each scalar becomes a token via a per-position affine lift, sinusoidal positional
        encodings are added, and the tokens pass through self-attention blocks. The
        mean-pooled representation is projected to 2 * num_latents values.

        Args:
            config (EncoderConfig): the encoder shape.
        """
        kwargs.setdefault('dtype', 'float64')
        super().__init__(**kwargs)
        self.config = config
        self._lift = TokenLift(NUM_TOKENS, config.d_model, dtype=self.dtype)
        self._positions = tf.constant(sinusoidal_encoding(NUM_TOKENS, config.d_model), dtype=self.dtype)
        self._blocks = [
            EncoderBlock(config.d_model, config.num_heads, config.ff_dim, config.dropout, dtype=self.dtype,
                         name=f'block_{layer}')
            for layer in range(config.num_layers)
        ]
        self._head = tf.keras.layers.Dense(2 * config.num_latents, dtype=self.dtype)

    def call(self, tokens, training=False):
        x = self._lift(tokens) + self._positions
        for block in self._blocks:
            x = block(x, training=training)
        return self._head(tf.math.reduce_mean(x, axis=1))
