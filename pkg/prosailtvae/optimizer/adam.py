from typing import Union

import tensorflow as tf


class Adam(tf.keras.optimizers.Adam):
    def __init__(self, learning_rate: Union[float, tf.keras.optimizers.schedules.LearningRateSchedule] = 1e-3,
                 beta_1: float = 0.9, beta_2: float = 0.999, epsilon: float = 1e-8,
                 clipnorm: float = 1.0, **kwargs):
        """Wrapper on tf.keras.optimizers.Adam, clips by the global gradient norm

        Args:
            learning_rate (Union[float, tf.keras.optimizers.schedules.LearningRateSchedule], optional):
                Learning rate or schedule. Defaults to 1e-3.
            beta_1 (float, optional): decay of the first moment. Defaults to 0.9.
            beta_2 (float, optional): decay of the second moment. Defaults to 0.999.
            epsilon (float, optional): Adam epsilon. Defaults to 1e-8.
            clipnorm (float, optional): max global norm of the gradients, None disables clipping. Defaults to 1.0.
        """
        super().__init__(learning_rate=learning_rate, beta_1=beta_1, beta_2=beta_2, epsilon=epsilon,
                         global_clipnorm=clipnorm, **kwargs)
