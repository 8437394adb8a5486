from dataclasses import dataclass


@dataclass(frozen=True)
class BetaSchedule:
    """Linear KL weight warm-up from beta_start to beta_end, then constant

    Args:
        beta_start (float): weight in the first epoch.
        beta_end (float): weight after the warm-up.
        warmup_epochs (int): number of epochs of the linear ramp, 0 starts at beta_end.
    """
    beta_start: float = 1e-4
    beta_end: float = 1.0
    warmup_epochs: int = 50

    def __post_init__(self):
        if self.beta_start < 0 or self.beta_end < 0:
            raise ValueError(f'beta must be non-negative, got {self.beta_start} and {self.beta_end}')
        if self.warmup_epochs < 0:
            raise ValueError(f'warmup_epochs must be non-negative, got {self.warmup_epochs}')

    @classmethod
    def for_training(cls, epochs: int, beta_start: float = 1e-4, beta_end: float = 1.0,
                     warmup_fraction: float = 0.5) -> 'BetaSchedule':
        return cls(beta_start, beta_end, int(round(epochs * warmup_fraction)))

    def __call__(self, epoch: int) -> float:
        """The KL weight of a zero-indexed epoch"""
        if self.warmup_epochs == 0 or epoch >= self.warmup_epochs:
            return self.beta_end
        return self.beta_start + (self.beta_end - self.beta_start) * epoch / self.warmup_epochs
