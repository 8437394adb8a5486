
__all__ = ['EncoderConfig', 'TransformerEncoder', 'TokenLift', 'EncoderBlock', 'sinusoidal_encoding',
           'InputNormalization', 'TransformerVAE', 'reconstruction_nll', 'posterior_from_raw',
           'TrainedModel', 'save_checkpoint', 'load_checkpoint', 'summary_path',
           'TrainConfig', 'train', 'as_tf_dataset', 'dataset_hash', 'infer']

from .encoder import EncoderConfig, TransformerEncoder, TokenLift, EncoderBlock, sinusoidal_encoding
from .normalization import InputNormalization
from .tvae import TransformerVAE, reconstruction_nll, posterior_from_raw
from .checkpoint import TrainedModel, save_checkpoint, load_checkpoint, summary_path
from .train import TrainConfig, train, as_tf_dataset, dataset_hash
from .infer import infer
