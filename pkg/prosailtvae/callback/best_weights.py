import logging
import math
from typing import Mapping, Union

import tensorflow as tf

logger = logging.getLogger(__name__)


class BestWeights(tf.keras.callbacks.Callback):
    def __init__(self, monitor: Union[str, Mapping[str, float]] = 'val_loss'):
        """Keeps the weights of the best epoch and stops on a non-finite loss

        The best weights are restored when training ends. If training diverged,
        `diverged_epoch` is set and the caller decides how to fail.

        Args:
            monitor (Union[str, Mapping[str, float]], optional): quantity to minimize, either a
                log key or a weighted sum of log keys such as `{'val_rec': 1.0, 'val_kl': 1.0}`.
                With a warm-up of the KL weight, the logged `val_loss` changes meaning between
                epochs, so a fixed weighting is needed to compare them. Defaults to 'val_loss'.
        """
        super().__init__()
        self.monitor = {monitor: 1.0} if isinstance(monitor, str) else dict(monitor)
        if len(self.monitor) == 0:
            raise ValueError('monitor must name at least one quantity')
        self.best = math.inf
        self.best_epoch = None
        self.best_weights = None
        self.diverged_epoch = None
        self._epoch = 0

    def score(self, logs) -> float:
        """The monitored quantity of an epoch, NaN if a term is missing"""
        logs = logs or {}
        return sum(weight * float(logs.get(key, math.nan)) for key, weight in self.monitor.items())

    def on_epoch_begin(self, epoch, logs=None):
        self._epoch = epoch

    def on_train_batch_end(self, batch, logs=None):
        if logs is not None and not math.isfinite(float(logs.get('loss', 0.0))):
            logger.warning('non-finite training loss in epoch %d, batch %d', self._epoch, batch)
            self.diverged_epoch = self._epoch
            self.model.stop_training = True

    def on_epoch_end(self, epoch, logs=None):
        if self.diverged_epoch is not None:
            return
        current = self.score(logs)
        if not math.isfinite(current):
            logger.warning('non-finite %s in epoch %d', ' + '.join(self.monitor), epoch)
            self.diverged_epoch = epoch
            self.model.stop_training = True
        elif current < self.best:
            self.best = current
            self.best_epoch = epoch
            self.best_weights = self.model.get_weights()

    def on_train_end(self, logs=None):
        if self.best_weights is not None:
            self.model.set_weights(self.best_weights)

    @property
    def diverged(self) -> bool:
        return self.diverged_epoch is not None
