import time

import tensorflow as tf


class EpochLogger(tf.keras.callbacks.Callback):
    """Adds the KL weight and the epoch wall time to the epoch logs

    Must come before loggers such as CSVLogger in the callback list.
    """

    def on_epoch_begin(self, epoch, logs=None):
        self._epoch_start = time.perf_counter()

    def on_epoch_end(self, epoch, logs=None):
        if logs is not None:
            logs['beta'] = float(self.model.beta.numpy())
            logs['wall_time'] = time.perf_counter() - self._epoch_start
