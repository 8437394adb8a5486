
__all__ = ['BetaWarmup', 'EpochLogger', 'BestWeights']

from .beta_warmup import BetaWarmup
from .epoch_logger import EpochLogger
from .best_weights import BestWeights
