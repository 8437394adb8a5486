
__all__ = ['LinearSchedule', 'BetaSchedule']

from .linear_schedule import LinearSchedule
from .beta_schedule import BetaSchedule
