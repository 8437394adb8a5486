
__all__ = ['tn_sample', 'tn_quantile', 'tn_cdf', 'tn_moments', 'tn_entropy', 'kl_tn_uniform',
           'scale_to_physical', 'scale_to_normalized']

from .truncated_normal import tn_sample, tn_quantile, tn_cdf, tn_moments, tn_entropy, kl_tn_uniform
from .bounds import scale_to_physical, scale_to_normalized
