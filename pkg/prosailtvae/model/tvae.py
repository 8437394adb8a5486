import math
from typing import Tuple

import numpy as np
import tensorflow as tf

from ..autodiff import check_domain
from ..distribution import tn_sample, kl_tn_uniform, scale_to_physical
from ..types import TruncatedNormalSpec, LatentPosterior, LATENT_NAMES, BAND_IDS
from .encoder import EncoderConfig, TransformerEncoder
from .normalization import InputNormalization

# floor of the posterior standard deviation in normalized units
SIGMA_FLOOR = 1e-4
NOISE_SD_INIT = 0.005
_LOG_2PI = math.log(2.0 * math.pi)


def reconstruction_nll(x: tf.Tensor, x_mean: tf.Tensor, log_sd: tf.Tensor) -> tf.Tensor:
    """Gaussian negative log-likelihood summed over bands

    Args:
        x (tf.Tensor): observed reflectance, [..., bands].
        x_mean (tf.Tensor): decoded reflectance, [..., bands].
        log_sd (tf.Tensor): per-band log standard deviation, [bands].

    Returns:
        tf.Tensor: 0.5 * sum(log(2 pi sd^2) + (x - x_mean)^2 / sd^2), with the band axis reduced.
    """
    residual = (x - x_mean) * tf.math.exp(-log_sd)
    return 0.5 * tf.math.reduce_sum(_LOG_2PI + 2.0 * log_sd + residual * residual, axis=-1)


def posterior_from_raw(raw: tf.Tensor, num_latents: int = len(LATENT_NAMES)) -> LatentPosterior:
    """Latent heads to truncated normals on the normalized box, mu by logistic and sigma by softplus"""
    mu = tf.math.sigmoid(raw[..., :num_latents])
    sigma = tf.math.softplus(raw[..., num_latents:]) + SIGMA_FLOOR
    return LatentPosterior(TruncatedNormalSpec.create(mu, sigma, 0.0, 1.0))


class TransformerVAE(tf.keras.Model):
    def __init__(self, config: EncoderConfig, decoder, normalization: InputNormalization,
                 latent_samples: int = 1, beta: float = 1.0, **kwargs):
        """Transformer encoder with truncated normal latents and a fixed PROSAIL decoder

        Only the encoder and the per-band decoder noise are trained. The KL weight `beta`
        is a non-trainable variable, such that callbacks can schedule it.

        Args:
            config (EncoderConfig): the encoder shape.
            decoder (ProsailDecoder): physical latents and geometry to band reflectance.
            normalization (InputNormalization): input scaling.
            latent_samples (int, optional): reparameterized samples per loss evaluation. Defaults to 1.
            beta (float, optional): initial KL weight. Defaults to 1.0.
        """
        kwargs.setdefault('dtype', 'float64')
        super().__init__(**kwargs)
        if latent_samples < 1:
            raise ValueError(f'latent_samples must be >= 1, got {latent_samples}')

        self.config = config
        self.decoder = decoder
        self.normalization = normalization
        self.latent_samples = latent_samples
        self.encoder = TransformerEncoder(config, dtype=self.dtype, name='encoder')
        self.log_noise_sd = self.add_weight(
            'log_noise_sd', shape=(len(BAND_IDS), ), dtype=tf.dtypes.float64,
            initializer=tf.keras.initializers.Constant(math.log(NOISE_SD_INIT)))
        self.beta = tf.Variable(beta, trainable=False, dtype=tf.dtypes.float64, name='beta')

        self._loss_tracker = tf.keras.metrics.Mean(name='loss', dtype=tf.dtypes.float64)
        self._rec_tracker = tf.keras.metrics.Mean(name='rec', dtype=tf.dtypes.float64)
        self._kl_tracker = tf.keras.metrics.Mean(name='kl', dtype=tf.dtypes.float64)

    @property
    def metrics(self):
        return [self._loss_tracker, self._rec_tracker, self._kl_tracker]

    def build_for_inputs(self):
        """Creates all weights by a forward pass on a dummy input"""
        self(tf.zeros((1, len(BAND_IDS)), dtype=tf.dtypes.float64), tf.zeros((1, 3), dtype=tf.dtypes.float64))
        return self

    def call(self, bands, geometry=None, training=False):
        if geometry is None:
            bands, geometry = bands
        return self.encoder(self.normalization(bands, geometry), training=training)

    def encode(self, bands: tf.Tensor, geometry: tf.Tensor, training=False) -> LatentPosterior:
        """Posterior over the normalized latents for bands [B, 10] and angles in degrees [B, 3]

        Raises:
            DomainError: if any input is non-finite.
        """
        bands = tf.convert_to_tensor(bands, dtype=tf.dtypes.float64)
        geometry = tf.convert_to_tensor(geometry, dtype=tf.dtypes.float64)
        check_domain(tf.math.reduce_all(tf.math.is_finite(bands)) & tf.math.reduce_all(tf.math.is_finite(geometry)),
                     'encoder inputs must be finite')
        return posterior_from_raw(self(bands, geometry, training=training), self.config.num_latents)

    def decode(self, z_norm: tf.Tensor, geometry: tf.Tensor) -> tf.Tensor:
        """Band reflectance from normalized latents [..., B, 11] and angles [B, 3]"""
        batch_shape = tf.shape(z_norm)[:-1]
        physical = tf.reshape(scale_to_physical(z_norm), (-1, self.config.num_latents))
        geometry = tf.reshape(tf.broadcast_to(geometry, tf.concat([batch_shape, [3]], axis=0)), (-1, 3))
        bands = self.decoder(tf.concat([physical, geometry], axis=-1))
        return tf.reshape(bands, tf.concat([batch_shape, [self.decoder.num_bands]], axis=0))

    def losses_from_posterior(self, posterior: LatentPosterior, bands, geometry, u) -> Tuple[tf.Tensor, ...]:
        """Batch-averaged (L, L_rec, L_KL) for given uniform draws u [K, B, 11]"""
        tn = posterior.tn
        shape = tf.shape(u)
        tn_k = TruncatedNormalSpec.create(tf.broadcast_to(tn.mu, shape), tf.broadcast_to(tn.sigma, shape))
        decoded = self.decode(tn_sample(tn_k, u), geometry)

        rec = tf.math.reduce_mean(reconstruction_nll(bands, decoded, self.log_noise_sd), axis=0)
        kl = tf.math.reduce_sum(kl_tn_uniform(tn), axis=-1)
        rec, kl = tf.math.reduce_mean(rec), tf.math.reduce_mean(kl)
        return rec + self.beta * kl, rec, kl

    def compute_losses(self, bands, geometry, u=None, training=False) -> Tuple[tf.Tensor, ...]:
        """Evaluates L = L_rec + beta * L_KL

        Args:
            bands (tf.Tensor): observed reflectance [B, 10], also the reconstruction target.
            geometry (tf.Tensor): angles in degrees [B, 3].
            u (tf.Tensor, optional): uniform draws [K, B, 11]. Defaults to fresh draws.
            training (bool, optional): Standard keras argument. Defaults to False.

        Returns:
            Tuple[tf.Tensor, tf.Tensor, tf.Tensor]: the batch means of L, L_rec and L_KL.
        """
        bands = tf.convert_to_tensor(bands, dtype=tf.dtypes.float64)
        geometry = tf.convert_to_tensor(geometry, dtype=tf.dtypes.float64)
        if u is None:
            u = tf.random.uniform((self.latent_samples, tf.shape(bands)[0], self.config.num_latents),
                                  dtype=tf.dtypes.float64)
        posterior = self.encode(bands, geometry, training=training)
        return self.losses_from_posterior(posterior, bands, geometry, u)

    def _update_metrics(self, loss, rec, kl):
        self._loss_tracker.update_state(loss)
        self._rec_tracker.update_state(rec)
        self._kl_tracker.update_state(kl)
        return {metric.name: metric.result() for metric in self.metrics}

    def train_step(self, data):
        bands, geometry = data
        with tf.GradientTape() as tape:
            loss, rec, kl = self.compute_losses(bands, geometry, training=True)
        gradients = tape.gradient(loss, self.trainable_variables)
        self.optimizer.apply_gradients(zip(gradients, self.trainable_variables))
        return self._update_metrics(loss, rec, kl)

    def test_step(self, data):
        bands, geometry = data
        return self._update_metrics(*self.compute_losses(bands, geometry, training=False))

    @property
    def parameter_count(self) -> int:
        return int(np.sum([np.prod(variable.shape) for variable in self.trainable_variables]))
