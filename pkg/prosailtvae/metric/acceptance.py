from dataclasses import dataclass
from typing import Dict, Sequence, Tuple


@dataclass(frozen=True)
class InversionCriteria:
    """Pass criteria for an end-to-end inversion on simulated data

    Args:
        min_rec_reduction (float): required relative drop of the validation reconstruction
            loss from the first to the last epoch, relative to the magnitude of the first value
            as the Gaussian negative log-likelihood can be negative.
        min_rmse_improvement (float): required relative RMSE improvement over the prior-mean predictor.
        picp_range (Tuple[float, float]): closed range for the coverage of the nominal 95% intervals.
    """
    min_rec_reduction: float = 0.5
    min_rmse_improvement: float = 0.4
    picp_range: Tuple[float, float] = (0.85, 1.0)

    def check(self, val_rec: Sequence[float], rmse: float, prior_mean_rmse: float, picp: float) -> Dict[str, bool]:
        """Evaluates each criterion

        Args:
            val_rec (Sequence[float]): validation reconstruction loss per epoch.
            rmse (float): RMSE of the inverted variable.
            prior_mean_rmse (float): RMSE of predicting the prior mean.
            picp (float): interval coverage of the inverted variable.

        Returns:
            Dict[str, bool]: criterion name to pass, in a fixed order.
        """
        if len(val_rec) < 2:
            raise ValueError(f'need at least two epochs of validation loss, got {len(val_rec)}')
        initial, final = float(val_rec[0]), float(val_rec[-1])
        return {
            'rec_reduction': final <= initial - self.min_rec_reduction * abs(initial),
            'rmse_improvement': rmse <= (1.0 - self.min_rmse_improvement) * prior_mean_rmse,
            'picp': self.picp_range[0] <= picp <= self.picp_range[1],
        }
