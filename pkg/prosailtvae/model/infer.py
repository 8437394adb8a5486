import numpy as np
import tensorflow as tf
from tqdm import tqdm

from ..distribution import tn_moments, tn_quantile
from ..errors import DatasetError
from ..types import ParameterEstimate, LATENT_NAMES, latent_bounds


def infer(model, bands: np.ndarray, geometry: np.ndarray, level: float = 0.95,
          batch_size: int = 4096, progress: bool = False) -> ParameterEstimate:
    """Physical-space posterior summaries from the encoder alone

    The point estimate is the truncated normal mean, the interval the central `level`
    quantile range, both mapped from the normalized box to physical units.

    Args:
        model (TransformerVAE | TrainedModel): the trained model.
        bands (np.ndarray): band reflectance [n, 10].
        geometry (np.ndarray): sun zenith, view zenith and relative azimuth in degrees [n, 3].
        level (float, optional): interval coverage. Defaults to 0.95.
        batch_size (int, optional): encoder batch size. Defaults to 4096.
        progress (bool, optional): show a progress bar. Defaults to False.

    Raises:
        DatasetError: if inputs are empty, misshaped or non-finite.

    Returns:
        ParameterEstimate: mean, sd, lower and upper per latent variable, each [n, 11].
    """
    model = getattr(model, 'model', model)
    bands = np.asarray(bands, dtype=np.float64)
    geometry = np.asarray(geometry, dtype=np.float64)
    if bands.ndim != 2 or geometry.ndim != 2 or bands.shape[0] != geometry.shape[0] or bands.shape[0] == 0:
        raise DatasetError(f'expected bands [n, 10] and geometry [n, 3], got {bands.shape} and {geometry.shape}')
    if not (np.all(np.isfinite(bands)) and np.all(np.isfinite(geometry))):
        raise DatasetError('inputs must be finite')
    if not 0 < level < 1:
        raise ValueError(f'level must be in (0, 1), got {level}')

    lower, upper = latent_bounds(LATENT_NAMES)
    width = upper - lower
    alpha = (1.0 - level) / 2.0
    outputs = {'mean': [], 'sd': [], 'lower': [], 'upper': []}
    for start in tqdm(range(0, bands.shape[0], batch_size), desc='Inferring', unit='batch', disable=not progress):
        tn = model.encode(tf.constant(bands[start:start + batch_size]),
                          tf.constant(geometry[start:start + batch_size])).tn
        mean, variance = tn_moments(tn)
        outputs['mean'].append(lower + mean.numpy() * width)
        outputs['sd'].append(np.sqrt(variance.numpy()) * width)
        outputs['lower'].append(lower + tn_quantile(tn, alpha).numpy() * width)
        outputs['upper'].append(lower + tn_quantile(tn, 1.0 - alpha).numpy() * width)

    mean, sd, q_lower, q_upper = (np.concatenate(outputs[key], axis=0) for key in ('mean', 'sd', 'lower', 'upper'))
    # only absorbs rounding, the mean of a truncated normal is inside its central interval
    return ParameterEstimate(mean, sd, np.minimum(q_lower, mean), np.maximum(q_upper, mean), LATENT_NAMES)
