import tensorflow as tf


class LinearSchedule(tf.keras.optimizers.schedules.LearningRateSchedule):
    def __init__(self, learning_rate: float, num_training_steps: int, warm_up_until: float = 0.06):
        """Creates a warm-up-warm-down learning rate scheduler

        Args:
            learning_rate (float): max learning rate
            num_training_steps (int): total number of steps (i.e. epochs*mini_batches)
            warm_up_until (float, optional): For how many steps (relative) to warm up. Defaults to 6%.
        """
        if num_training_steps < 1:
            raise ValueError(f'num_training_steps must be positive, got {num_training_steps}')
        self.max_learning_rate = learning_rate
        self.num_training_steps = num_training_steps
        self.warm_up_until = warm_up_until
        self.num_warmup_steps = int(num_training_steps * warm_up_until)
        self.num_warmdown_steps = max(1, num_training_steps - self.num_warmup_steps)

    def __call__(self, step: tf.Tensor) -> tf.Tensor:
        """Computes learning-rate

        Args:
            step (tf.Tensor): The current training step out of num_training_steps

        Returns:
            tf.Tensor: learning-rate
        """
        step = tf.cast(step, tf.dtypes.float32)
        warm_up = (step + 1.0) / max(1, self.num_warmup_steps)
        warm_down = (self.num_training_steps - step) / self.num_warmdown_steps
        factor = tf.where(step < self.num_warmup_steps, warm_up, tf.math.maximum(0.0, warm_down))
        return self.max_learning_rate * tf.math.minimum(factor, 1.0)

    def get_config(self):
        return {
            'learning_rate': self.max_learning_rate,
            'num_training_steps': self.num_training_steps,
            'warm_up_until': self.warm_up_until
        }
