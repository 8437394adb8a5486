import numpy as np

from ..types import IntervalEstimate


def mpiw(intervals: IntervalEstimate) -> float:
    """Mean prediction interval width"""
    if len(intervals) == 0:
        raise ValueError('mpiw needs at least one interval')
    return float(np.mean(intervals.upper - intervals.lower))


def picp(intervals: IntervalEstimate, truth) -> float:
    """Prediction interval coverage probability, with closed intervals"""
    truth = np.asarray(truth, dtype=np.float64).ravel()
    if truth.shape != intervals.lower.shape:
        raise ValueError(f'length mismatch: {len(intervals)} intervals and {truth.size} ground truth values')
    if truth.size == 0:
        raise ValueError('picp needs at least one interval')
    return float(np.mean((intervals.lower <= truth) & (truth <= intervals.upper)))
