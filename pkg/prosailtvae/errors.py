__all__ = ['ProsailTVAEError', 'AssetError', 'DatasetError', 'DomainError', 'ConfigError',
           'NonFiniteError', 'TrainingDivergedError']


class ProsailTVAEError(Exception):
    """Base class for all errors raised by prosailtvae"""


class AssetError(ProsailTVAEError):
    """Spectral asset files are missing, malformed, or fail checksum verification"""


class DatasetError(ProsailTVAEError):
    """A dataset, field record or inference input file is missing or malformed"""


class DomainError(ProsailTVAEError, ValueError):
    """A physical parameter is outside its hard physical range"""


class ConfigError(ProsailTVAEError, ValueError):
    """Configuration is invalid, e.g. an unknown key or inconsistent bounds"""


class NonFiniteError(ProsailTVAEError, FloatingPointError):
    def __init__(self, op_name: str, message: str = ''):
        """A forward evaluation produced NaN or Inf

        Args:
            op_name (str): the name of the primitive operation that produced the value, e.g. "Log".
            message (str, optional): the original diagnostic. Defaults to ''.
        """
        self.op_name = op_name
        super().__init__(f'non-finite value produced by "{op_name}" ({_domain_hint(op_name)}). {message}'.strip())


class TrainingDivergedError(ProsailTVAEError):
    def __init__(self, epoch: int, best_epoch: int | None):
        """Training produced a non-finite loss

        Args:
            epoch (int): the epoch in which the loss became non-finite.
            best_epoch (int | None): the epoch of the last-good weights, None if no epoch completed.
        """
        self.epoch = epoch
        self.best_epoch = best_epoch
        super().__init__(f'training diverged in epoch {epoch}, last-good epoch is {best_epoch}')


def _domain_hint(op_name):
    return {
        'Log': 'log domain',
        'Log1p': 'log domain',
        'Sqrt': 'sqrt domain',
        'Rsqrt': 'sqrt domain',
        'RealDiv': 'division by zero',
        'DivNoNan': 'division by zero',
        'Pow': 'power domain',
        'Acos': 'arccos domain',
        'Ndtri': 'probability domain'
    }.get(op_name, 'overflow or invalid operation')
