import re
from dataclasses import dataclass
from typing import Callable

import numpy as np
import tensorflow as tf

from ..errors import NonFiniteError
from .safe import as_domain_error

_op_pattern = re.compile(r'op "?(\w+)"?')


@dataclass(frozen=True)
class Tape:
    """A recorded forward evaluation

    Wraps a persistent `tf.GradientTape`, such that any number of outputs can be
    seeded for reverse-mode gradients after a single forward pass.
    """
    gradient_tape: tf.GradientTape
    inputs: tf.Tensor
    outputs: tf.Tensor


def _producing_op(error: tf.errors.InvalidArgumentError) -> str:
    match = _op_pattern.search(error.message)
    return match.group(1) if match else 'unknown'


def forward(f: Callable[[tf.Tensor], tf.Tensor], inputs, check_numerics: bool = True):
    """Evaluates f while recording a reverse-mode tape

    Args:
        f (Callable[[tf.Tensor], tf.Tensor]): computation built from TensorFlow primitives.
        inputs (array-like): the real input vector.
        check_numerics (bool, optional): fail on the first NaN or Inf. Defaults to True.

    Raises:
        NonFiniteError: names the primitive that produced a NaN or Inf.
        DomainError: a `check_domain` condition failed, also when f is a traced function.

    Returns:
        Tuple[tf.Tensor, Tape]: the flattened outputs, and the tape.
    """
    x = tf.convert_to_tensor(inputs, dtype=tf.dtypes.float64)

    if check_numerics:
        tf.debugging.enable_check_numerics()
    try:
        with tf.GradientTape(persistent=True, watch_accessed_variables=False) as gradient_tape:
            gradient_tape.watch(x)
            y = tf.reshape(f(x), [-1])
    except tf.errors.InvalidArgumentError as error:
        domain_error = as_domain_error(error)
        if domain_error is not None:
            raise domain_error from None
        raise NonFiniteError(_producing_op(error), error.message.splitlines()[0]) from None
    finally:
        if check_numerics:
            tf.debugging.disable_check_numerics()

    return y, Tape(gradient_tape, x, y)


def gradient(tape: Tape, output_index: int = 0) -> np.ndarray:
    """Reverse-mode gradient of one output with respect to the inputs

    Args:
        tape (Tape): tape returned by `forward`.
        output_index (int, optional): the output to seed. Defaults to 0.

    Returns:
        np.ndarray: gradient with the shape of the inputs. Inputs not reached are zero.
    """
    seed = tf.one_hot(output_index, tf.size(tape.outputs), dtype=tape.outputs.dtype)
    grad = tape.gradient_tape.gradient(tape.outputs, tape.inputs, output_gradients=seed,
                                       unconnected_gradients=tf.UnconnectedGradients.ZERO)
    return grad.numpy()
