from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
import pandas as pd
import tensorflow as tf

from .tape import forward, gradient


@dataclass(frozen=True)
class GradCheckReport:
    table: pd.DataFrame
    max_error: float
    worst_coordinate: int
    passed: bool
    tol: float

    def __str__(self):
        status = 'passed' if self.passed else 'FAILED'
        return (f'gradient check {status}: max relative error {self.max_error:.3e} '
                f'at coordinate {self.worst_coordinate} (tol {self.tol:.1e})\n'
                f'{self.table.to_string(index=False)}')


def grad_check(f: Callable[[tf.Tensor], tf.Tensor], x, step: Union[float, np.ndarray] = 1e-5,
               tol: float = 1e-4, output_index: int = 0, eps: float = 1e-6) -> GradCheckReport:
    """Compares reverse-mode gradients against central finite differences

    The error of coordinate i is |g_i - h_i| / max(|g_i|, |h_i|, eps), where g is the
    analytic and h the finite-difference gradient.

    Args:
        f (Callable[[tf.Tensor], tf.Tensor]): the function to check.
        x (array-like): the point to check at.
        step (Union[float, np.ndarray], optional): finite-difference step, scalar or per coordinate.
            Defaults to 1e-5.
        tol (float, optional): the pass threshold. Defaults to 1e-4.
        output_index (int, optional): which output of f to differentiate. Defaults to 0.
        eps (float, optional): floor of the relative error denominator. Defaults to 1e-6.

    Raises:
        ValueError: if a step is not positive.

    Returns:
        GradCheckReport: per-coordinate comparison and pass/fail.
    """
    x = np.asarray(x, dtype=np.float64)
    steps = np.broadcast_to(np.asarray(step, dtype=np.float64), x.shape)
    if np.any(steps <= 0):
        raise ValueError(f'step must be positive, got {step}')

    _, tape = forward(f, x)
    analytic = gradient(tape, output_index).reshape(-1)

    def evaluate(point):
        return tf.reshape(f(tf.constant(point, dtype=tf.dtypes.float64)), [-1])[output_index].numpy()

    numeric = np.zeros(x.size)
    for i in range(x.size):
        delta = np.zeros(x.size)
        delta[i] = steps.flat[i]
        delta = delta.reshape(x.shape)
        numeric[i] = (evaluate(x + delta) - evaluate(x - delta)) / (2 * steps.flat[i])

    abs_error = np.abs(analytic - numeric)
    rel_error = abs_error / np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), eps)
    table = pd.DataFrame({
        'coordinate': np.arange(x.size),
        'analytic': analytic,
        'numeric': numeric,
        'abs_error': abs_error,
        'rel_error': rel_error,
        'passed': rel_error < tol
    })
    worst = int(np.argmax(rel_error))
    return GradCheckReport(table, float(rel_error[worst]), worst, bool(np.all(rel_error < tol)), tol)
