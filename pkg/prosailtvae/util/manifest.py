import hashlib
import importlib.metadata
import json
import pathlib
import platform
from typing import Any, Dict


def code_version() -> str:
    try:
        return importlib.metadata.version('prosailtvae')
    except importlib.metadata.PackageNotFoundError:
        return '0+unknown'


def _jsonable(value):
    if isinstance(value, pathlib.Path):
        return str(value)
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    return value


def config_digest(config: Dict[str, Any]) -> str:
    canonical = json.dumps(_jsonable(config), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def run_manifest(command: str, config: Dict[str, Any], seed: int = None,
                 asset_checksums: Dict[str, str] = None, **extra) -> Dict[str, Any]:
    """The reproducibility record written next to every command output

    Args:
        command (str): the subcommand name.
        config (Dict[str, Any]): the effective configuration.
        seed (int, optional): the random seed.
        asset_checksums (Dict[str, str], optional): sha256 of the spectral assets.

    Returns:
        Dict[str, Any]: JSON serializable manifest.
    """
    return _jsonable({
        'command': command,
        'config': config,
        'config_hash': config_digest(config),
        'seed': seed,
        'asset_checksums': asset_checksums or {},
        'code_version': code_version(),
        'python_version': platform.python_version(),
        **extra
    })


def write_manifest(path: pathlib.Path, manifest: Dict[str, Any]) -> pathlib.Path:
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding='utf-8')
    return path
