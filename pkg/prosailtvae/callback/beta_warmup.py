import tensorflow as tf

from ..scheduler import BetaSchedule


class BetaWarmup(tf.keras.callbacks.Callback):
    def __init__(self, schedule: BetaSchedule):
        """Sets `model.beta` from the schedule at the beginning of every epoch

        Args:
            schedule (BetaSchedule): KL weight per epoch.
        """
        super().__init__()
        self.schedule = schedule

    def on_epoch_begin(self, epoch, logs=None):
        self.model.beta.assign(self.schedule(epoch))
