import re
from typing import Callable, Optional

import tensorflow as tf

from ..errors import DomainError

DOMAIN_ASSERTION_PREFIX = 'domain error: '

_domain_pattern = re.compile(re.escape(DOMAIN_ASSERTION_PREFIX) + r'([^\]\n]*)')


def safe_where(condition: tf.Tensor, true_fn: Callable[..., tf.Tensor], false_fn: Callable[..., tf.Tensor],
               *args: tf.Tensor, safe_value: float = 1.0) -> tf.Tensor:
    """Selects between two branches without leaking NaN gradients from the unselected one

    `tf.where` alone still differentiates through both branches, such that a singular
    unselected branch poisons the gradient. The arguments to `true_fn` are therefore
    replaced by `safe_value` where `condition` is False. `false_fn` receives the
    arguments unchanged and must be finite everywhere.

    Args:
        condition (tf.Tensor): boolean mask, broadcastable against args.
        true_fn (Callable[..., tf.Tensor]): the general branch.
        false_fn (Callable[..., tf.Tensor]): the limit branch.
        *args (tf.Tensor): arguments for both branches.
        safe_value (float, optional): value on which `true_fn` is finite. Defaults to 1.0.

    Returns:
        tf.Tensor: true_fn(*args) where condition, else false_fn(*args).
    """
    safe_args = [tf.where(condition, arg, tf.cast(safe_value, arg.dtype)) for arg in args]
    return tf.where(condition, true_fn(*safe_args), false_fn(*args))


def safe_divide(numerator: tf.Tensor, denominator: tf.Tensor, fallback: float = 0.0) -> tf.Tensor:
    """numerator / denominator, with `fallback` and zero gradient where the denominator is zero"""
    nonzero = tf.not_equal(denominator, 0)
    ratio = numerator / tf.where(nonzero, denominator, tf.ones_like(denominator))
    return tf.where(nonzero, ratio, tf.cast(fallback, ratio.dtype))


def check_domain(condition: tf.Tensor, message: str):
    """Raises DomainError if any element of condition is False

    Inside a traced function, e.g. under `tf.function` or a compiled keras step, the check
    is a graph assertion. It then fails with `tf.errors.InvalidArgumentError` when the graph
    runs, and its message carries `DOMAIN_ASSERTION_PREFIX`. `forward` and `as_domain_error`
    map such errors back to DomainError.
    """
    if tf.executing_eagerly():
        if not bool(tf.reduce_all(condition)):
            raise DomainError(message)
    else:
        tf.debugging.Assert(tf.reduce_all(condition), [DOMAIN_ASSERTION_PREFIX + message])


def as_domain_error(error: tf.errors.InvalidArgumentError) -> Optional[DomainError]:
    """The DomainError behind a failed graph assertion of `check_domain`, None for other errors"""
    match = _domain_pattern.search(error.message)
    return DomainError(match.group(1).strip()) if match else None
