
__all__ = ['rmse', 'r2', 'mpiw', 'picp', 'ccc_posterior',
           'FieldRecord', 'read_field_records', 'read_observations', 'FIELD_COLUMNS', 'CCC_UNITS',
           'MetricsReport', 'evaluate', 'predict_ccc', 'metric_rows', 'InversionCriteria']

from .regression import rmse, r2
from .interval import mpiw, picp
from .ccc import ccc_posterior
from .field import FieldRecord, read_field_records, read_observations, FIELD_COLUMNS, CCC_UNITS
from .evaluate import MetricsReport, evaluate, predict_ccc, metric_rows
from .acceptance import InversionCriteria
