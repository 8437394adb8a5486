import numpy as np


def _paired(pred, truth, min_length=1):
    pred = np.asarray(pred, dtype=np.float64).ravel()
    truth = np.asarray(truth, dtype=np.float64).ravel()
    if pred.shape != truth.shape:
        raise ValueError(f'length mismatch: {pred.size} predictions and {truth.size} ground truth values')
    if pred.size < min_length:
        raise ValueError(f'at least {min_length} values are required, got {pred.size}')
    return pred, truth


def rmse(pred, truth) -> float:
    """Root mean square error"""
    pred, truth = _paired(pred, truth)
    return float(np.sqrt(np.mean((pred - truth) ** 2)))


def r2(pred, truth) -> float:
    """Coefficient of determination, 1 - SS_res / SS_tot

    Raises:
        ValueError: if lengths differ, fewer than two values are given, or the truth is constant.
    """
    pred, truth = _paired(pred, truth, min_length=2)
    ss_tot = np.sum((truth - np.mean(truth)) ** 2)
    if ss_tot == 0:
        raise ValueError('r2 is undefined when the ground truth has zero variance')
    return float(1.0 - np.sum((truth - pred) ** 2) / ss_tot)
