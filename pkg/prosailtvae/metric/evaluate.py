import logging
import pathlib
import warnings
from dataclasses import dataclass
from typing import List

import numpy as np
import pandas as pd
import tensorflow as tf
from tqdm import tqdm

from ..errors import DatasetError
from ..model import infer
from ..types import IntervalEstimate, LatentPosterior, TruncatedNormalSpec
from .ccc import ccc_posterior
from .field import FieldRecord
from .interval import mpiw, picp
from .regression import rmse, r2

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ('group', 'variable', 'metric', 'value', 'n')
SCATTER_COLUMNS = ('group', 'site', 'date', 'variable', 'truth', 'prediction', 'lower', 'upper')
ALL_GROUP = 'all'


@dataclass(frozen=True)
class MetricsReport:
    """Evaluation results

    Args:
        table (pd.DataFrame): long format metrics, columns REPORT_COLUMNS.
        scatter (pd.DataFrame): per record and variable predictions, columns SCATTER_COLUMNS.
        skipped (int): records without any ground truth.
    """
    table: pd.DataFrame
    scatter: pd.DataFrame
    skipped: int = 0

    def value(self, group: str, variable: str, metric: str) -> float:
        match = self.table[(self.table['group'] == group) & (self.table['variable'] == variable)
                           & (self.table['metric'] == metric)]
        if len(match) != 1:
            raise KeyError(f'no {metric} for {variable} in group {group}')
        return float(match['value'].iloc[0])

    @property
    def groups(self) -> List[str]:
        return list(dict.fromkeys(self.table['group']))

    def variables(self, group: str) -> List[str]:
        return list(dict.fromkeys(self.table.loc[self.table['group'] == group, 'variable']))

    def to_csv(self, path: pathlib.Path) -> pathlib.Path:
        path = pathlib.Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.table.to_csv(path, index=False)
        return path

    def scatter_to_csv(self, path: pathlib.Path) -> pathlib.Path:
        path = pathlib.Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.scatter.to_csv(path, index=False)
        return path


def metric_rows(group: str, variable: str, truth, intervals: IntervalEstimate) -> List[dict]:
    """RMSE, R2, MPIW and PICP of one group, R2 is NaN when undefined"""
    n = len(intervals)
    truth = np.asarray(truth, dtype=np.float64)
    try:
        r2_value = r2(intervals.mean, truth)
    except ValueError:
        r2_value = np.nan
    values = {
        'rmse': rmse(intervals.mean, truth),
        'r2': r2_value,
        'mpiw': mpiw(intervals),
        'picp': picp(intervals, truth)
    }
    return [{'group': group, 'variable': variable, 'metric': metric, 'value': value, 'n': n}
            for metric, value in values.items()]


def _encode_posterior(model, bands, geometry, batch_size):
    mu, sigma = [], []
    for start in range(0, bands.shape[0], batch_size):
        tn = model.encode(tf.constant(bands[start:start + batch_size]),
                          tf.constant(geometry[start:start + batch_size])).tn
        mu.append(tn.mu.numpy())
        sigma.append(tn.sigma.numpy())
    return LatentPosterior(TruncatedNormalSpec.create(np.concatenate(mu), np.concatenate(sigma)))


def predict_ccc(model, bands: np.ndarray, geometry: np.ndarray, m: int = 10000, seed: int = 0,
                level: float = 0.95, batch_size: int = 256, progress: bool = False) -> IntervalEstimate:
    """CCC estimates in ug/cm2 of ground, sampled from the encoder posterior

    Each batch restarts the random stream from `seed`, so a record's estimate does not
    depend on its position in the input.
    """
    model = getattr(model, 'model', model)
    parts = []
    for start in tqdm(range(0, bands.shape[0], batch_size), desc='CCC', unit='batch', disable=not progress):
        posterior = _encode_posterior(model, bands[start:start + batch_size], geometry[start:start + batch_size],
                                      batch_size)
        parts.append(ccc_posterior(posterior, m, np.random.default_rng(seed), level=level))
    return IntervalEstimate(*(np.concatenate([getattr(part, key) for part in parts])
                              for key in ('mean', 'lower', 'upper')))


def evaluate(model, records: List[FieldRecord], m: int = 10000, seed: int = 0, level: float = 0.95,
             batch_size: int = 256, progress: bool = False) -> MetricsReport:
    """Compares predicted LAI and CCC with in-situ measurements

    Metrics are computed per site and over all records. CCC predictions are expressed in
    each record's declared unit. The overall CCC group is only reported when all sites
    declare the same unit.

    Args:
        model (TransformerVAE | TrainedModel): the trained model.
        records (List[FieldRecord]): field records.
        m (int, optional): joint posterior samples per record for CCC. Defaults to 10000.
        seed (int, optional): seed of the CCC sampling. Defaults to 0.
        level (float, optional): interval coverage. Defaults to 0.95.
        batch_size (int, optional): records per CCC sampling batch. Defaults to 256.
        progress (bool, optional): show a progress bar. Defaults to False.

    Raises:
        DatasetError: if there are no records, none have ground truth, or a site is named
            like the overall group.

    Returns:
        MetricsReport: long format metrics and the scatter table.
    """
    model = getattr(model, 'model', model)
    if len(records) == 0:
        raise DatasetError('no field records to evaluate')
    reserved = sorted({record.date for record in records if record.site == ALL_GROUP})
    if reserved:
        raise DatasetError(f'site name "{ALL_GROUP}" is reserved for the overall group, rename the site '
                           f'(dates {", ".join(reserved)})')
    usable = [record for record in records if record.has_truth]
    skipped = len(records) - len(usable)
    if skipped:
        warnings.warn(f'skipped {skipped} record(s) with neither LAI nor CCC measurements', UserWarning)
    if not usable:
        raise DatasetError('none of the field records has LAI or CCC measurements')

    bands = np.stack([record.bands for record in usable])
    geometry = np.stack([record.geometry for record in usable])
    estimate = infer(model, bands, geometry, level=level)
    lai = estimate.interval('lai')

    ccc = predict_ccc(model, bands, geometry, m=m, seed=seed, level=level, batch_size=batch_size,
                      progress=progress)
    factor = np.array([record.ccc_factor for record in usable])
    ccc = IntervalEstimate(ccc.mean * factor, ccc.lower * factor, ccc.upper * factor)

    scatter = []
    for i, record in enumerate(usable):
        for variable, truth, intervals in (('lai', record.lai, lai), ('ccc', record.ccc, ccc)):
            if truth is not None:
                scatter.append({'group': record.site, 'site': record.site, 'date': record.date,
                                'variable': variable, 'truth': truth, 'prediction': intervals.mean[i],
                                'lower': intervals.lower[i], 'upper': intervals.upper[i]})
    scatter = pd.DataFrame(scatter, columns=SCATTER_COLUMNS)

    ccc_units = {record.ccc_unit for record in usable if record.ccc is not None}
    rows = []
    for group in list(dict.fromkeys(record.site for record in usable)) + [ALL_GROUP]:
        for variable, intervals in (('lai', lai), ('ccc', ccc)):
            if group == ALL_GROUP and variable == 'ccc' and len(ccc_units) > 1:
                warnings.warn(f'CCC is declared in several units ({", ".join(sorted(ccc_units))}), '
                              f'the "{ALL_GROUP}" group omits CCC', UserWarning)
                continue
            selected = np.array([
                (group == ALL_GROUP or record.site == group) and getattr(record, variable) is not None
                for record in usable
            ])
            if not np.any(selected):
                continue
            truth = [getattr(record, variable) for record, keep in zip(usable, selected) if keep]
            rows.extend(metric_rows(group, variable, truth, intervals[selected]))

    logger.info('evaluated %d field records (%d skipped)', len(usable), skipped)
    return MetricsReport(pd.DataFrame(rows, columns=REPORT_COLUMNS), scatter, skipped)
