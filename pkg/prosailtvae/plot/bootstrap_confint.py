from typing import Callable, List

import numpy as np
import pandas as pd
import scipy.stats


def bootstrap_confint(column_names: List[str], seed: int = 0, level: float = 0.95,
                      aggregator: Callable[[np.ndarray], np.ndarray] = np.mean):
    """Bootstrap confidence interval of a per-group aggregate, for use with `groupby().apply`

    Absolute retrieval errors are skewed, so a percentile bootstrap is used instead of a
    normal approximation.

    Args:
        column_names (List[str]): the columns to aggregate.
        seed (int, optional): bootstrap seed. Defaults to 0.
        level (float, optional): confidence level. Defaults to 0.95.
        aggregator (Callable[[np.ndarray], np.ndarray], optional): maps a vector to a scalar.
            Defaults to `np.mean`.

    Returns:
        Callable[[pd.DataFrame], pd.Series]: columns `<name>_lower`, `<name>_mean`,
            `<name>_upper` and `<name>_n` per aggregated column.
    """
    def agg(partial_df):
        summary = dict()

        for column_name in column_names:
            x = partial_df[column_name].dropna().to_numpy()
            if x.size == 0:
                lower = mean = upper = np.nan
            else:
                mean = aggregator(x)
                if x.size < 2 or np.all(x[0] == x):
                    lower, upper = mean, mean
                else:
                    res = scipy.stats.bootstrap((x, ), aggregator, confidence_level=level,
                                                method='percentile', random_state=np.random.default_rng(seed))
                    lower, upper = res.confidence_interval.low, res.confidence_interval.high

            summary.update({
                f'{column_name}_lower': lower,
                f'{column_name}_mean': mean,
                f'{column_name}_upper': upper,
                f'{column_name}_n': x.size
            })

        return pd.Series(summary)
    return agg
