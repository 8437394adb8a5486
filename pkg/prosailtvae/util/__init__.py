
__all__ = ['generate_experiment_id', 'get_compiler',
           'read_config_file', 'layer_dataclass', 'RUN_SECTIONS', 'ENV_PREFIX',
           'run_manifest', 'write_manifest', 'config_digest', 'code_version']

from .experiment_id import generate_experiment_id
from .get_compiler import get_compiler
from .run_config import read_config_file, layer_dataclass, RUN_SECTIONS, ENV_PREFIX
from .manifest import run_manifest, write_manifest, config_digest, code_version
