
__all__ = ['VariableSpec', 'CoDistributionRule', 'SamplerConfig', 'default_sampler_config', 'config_hash',
           'parse_sampler_config', 'read_sampler_config',
           'sample_truncated_normal', 'sample_parameters', 'parameters_from_uniforms', 'add_noise', 'apply_noise',
           'sample_streams',
           'SimulatedSample', 'SimulatedDataset', 'DatasetManifest', 'DatasetWriter', 'DATASET_COLUMNS',
           'generate_dataset', 'read_dataset', 'export_csv', 'check_bounds', 'prior_mean']

from .config import VariableSpec, CoDistributionRule, SamplerConfig, default_sampler_config, config_hash, \
    parse_sampler_config, read_sampler_config
from .sampling import sample_truncated_normal, sample_parameters, parameters_from_uniforms, add_noise, apply_noise, \
    sample_streams
from .dataset import SimulatedSample, SimulatedDataset, DatasetManifest, DatasetWriter, DATASET_COLUMNS, \
    generate_dataset, read_dataset, export_csv, check_bounds, prior_mean
