import numpy as np
import tensorflow as tf

from ..distribution import tn_quantile
from ..types import LatentPosterior, IntervalEstimate, PARAMETER_BOUNDS

MIN_SAMPLES = 100


def _physical_draws(posterior: LatentPosterior, name: str, u: np.ndarray) -> np.ndarray:
    tn = posterior.marginal(name)
    lower, upper = PARAMETER_BOUNDS[name]
    z = tn_quantile(tn, tf.constant(u, dtype=tf.dtypes.float64)).numpy()
    return lower + z * (upper - lower)


def ccc_posterior(posterior: LatentPosterior, m: int, rng: np.random.Generator,
                  level: float = 0.95) -> IntervalEstimate:
    """Canopy chlorophyll content, LAI x Cab, from joint posterior samples

    LAI and Cab are drawn independently from their truncated normal marginals. Every record
    uses the same m uniform draws, so identical records get identical estimates.

    Args:
        posterior (LatentPosterior): posterior over B records, must contain lai and cab.
        m (int): samples per record, >= 100.
        rng (np.random.Generator): random stream.
        level (float, optional): central interval coverage. Defaults to 0.95.

    Returns:
        IntervalEstimate: sample mean and empirical central interval per record, in ug/cm2 of ground.
    """
    if m < MIN_SAMPLES:
        raise ValueError(f'm must be at least {MIN_SAMPLES}, got {m}')
    batch_rank = len(posterior.tn.mu.shape) - 1
    u = rng.random((2, m) + (1,) * batch_rank)
    ccc = _physical_draws(posterior, 'lai', u[0]) * _physical_draws(posterior, 'cab', u[1])

    alpha = (1.0 - level) / 2.0
    mean = np.mean(ccc, axis=0)
    lower, upper = np.quantile(ccc, [alpha, 1.0 - alpha], axis=0)
    return IntervalEstimate(mean, np.minimum(lower, mean), np.maximum(upper, mean))
