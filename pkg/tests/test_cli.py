import json
import shutil

import numpy as np
import pandas as pd
import pytest

from prosailtvae.cli import main, build_parser, EXIT_OK, EXIT_FAILED, EXIT_INPUT
from prosailtvae.metric import FIELD_COLUMNS
from prosailtvae.sampler import read_dataset
from prosailtvae.spectral import ASSETS_ENV
from prosailtvae.types import LATENT_NAMES


@pytest.fixture(scope='module')
def simulated_files(tmp_path_factory, assets_dir):
    directory = tmp_path_factory.mktemp('cli')
    for name, seed, n in (('train', 1, 64), ('val', 2, 32)):
        assert main(['simulate', '--assets-dir', str(assets_dir), '--seed', str(seed), '--n', str(n),
                     '--chunk-size', '16', '--out', str(directory / f'{name}.bin'), '--quiet']) == EXIT_OK
    return directory


def test_parser_requires_seed():
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args(['simulate', '--out', 'x.bin'])
    assert info.value.code == 2
    args = build_parser().parse_args(['verify-assets'])
    assert args.seed is None and args.func.__name__ == 'cmd_verify_assets'


def test_verify_assets(assets_dir, capsys):
    assert main(['verify-assets', '--assets-dir', str(assets_dir)]) == EXIT_OK
    output = capsys.readouterr().out
    assert 'verified' in output and 'B8A' in output


def test_verify_shipped_assets(monkeypatch, capsys):
    monkeypatch.delenv(ASSETS_ENV, raising=False)
    assert main(['verify-assets']) == EXIT_OK
    output = capsys.readouterr().out
    assert 'Grid: 400-2500 nm, 2101 points' in output
    assert 'Bands: B2 B3 B4 B5 B6 B7 B8 B8A B11 B12' in output


def test_verify_assets_corrupted(tmp_path, assets_dir, capsys):
    corrupted = shutil.copytree(assets_dir, tmp_path / 'assets')
    with open(corrupted / 'soil.txt', 'a') as fp:
        fp.write('\n')
    assert main(['verify-assets', '--assets-dir', str(corrupted)]) == EXIT_INPUT
    assert 'checksum mismatch' in capsys.readouterr().err

    assert main(['verify-assets', '--assets-dir', str(corrupted), '--write-manifest']) == EXIT_OK


def test_simulate(simulated_files, tmp_path, assets_dir, capsys):
    dataset = read_dataset(simulated_files / 'train.bin')
    assert len(dataset) == 64 and dataset.manifest.seed == 1
    manifest = json.loads((simulated_files / 'train.run.json').read_text())
    assert manifest['command'] == 'simulate'
    assert manifest['bounds_violations'] == 0

    assert main(['simulate', '--assets-dir', str(assets_dir), '--seed', '1', '--n', '64', '--chunk-size', '16',
                 '--out', str(tmp_path / 'again.bin'), '--csv', str(tmp_path / 'again.csv'), '--quiet']) == EXIT_OK
    np.testing.assert_array_equal(read_dataset(tmp_path / 'again.bin').noisy, dataset.noisy)
    assert len(pd.read_csv(tmp_path / 'again.csv')) == 64
    assert 'Bounds check: passed' in capsys.readouterr().out


def test_simulate_config_errors(tmp_path, assets_dir, capsys):
    config = tmp_path / 'bad.ini'
    config.write_text('[variable.cab]\nlower = 10\n')
    assert main(['simulate', '--assets-dir', str(assets_dir), '--seed', '1', '--config', str(config),
                 '--out', str(tmp_path / 'x.bin')]) == EXIT_INPUT
    assert 'exceed the physical range' in capsys.readouterr().err

    assert main(['simulate', '--assets-dir', str(tmp_path / 'nowhere'), '--seed', '1', '--n', '4',
                 '--out', str(tmp_path / 'x.bin')]) == EXIT_INPUT


@pytest.fixture(scope='module')
def checkpoint(simulated_files, assets_dir):
    out = simulated_files / 'model.h5'
    assert main(['train', '--assets-dir', str(assets_dir), '--seed', '0',
                 '--train', str(simulated_files / 'train.bin'), '--val', str(simulated_files / 'val.bin'),
                 '--out', str(out), '--epochs', '1', '--batch-size', '32',
                 '--d-model', '16', '--num-heads', '2', '--num-layers', '1', '--ff-dim', '32', '--quiet']) == EXIT_OK
    return out


def test_train(checkpoint):
    assert checkpoint.is_file()
    assert checkpoint.with_suffix('.log.csv').is_file()
    assert (checkpoint.parent / 'model.summary.json').is_file()
    manifest = json.loads(checkpoint.with_suffix('.run.json').read_text())
    assert manifest['config']['encoder']['d_model'] == 16
    assert manifest['config']['epochs'] == 1
    assert manifest['durations']['train'] > 0


def test_train_config_file(tmp_path, simulated_files, assets_dir, monkeypatch):
    config = tmp_path / 'run.ini'
    config.write_text('[encoder]\nd_model = 8\nnum_heads = 2\nnum_layers = 1\nff_dim = 8\n'
                      '[train]\nepochs = 1\nbatch_size = 64\nlearning_rate = 0.01\n')
    monkeypatch.setenv('PROSAILTVAE_BATCH_SIZE', '16')
    out = tmp_path / 'model.h5'
    assert main(['train', '--assets-dir', str(assets_dir), '--seed', '0', '--config', str(config),
                 '--train', str(simulated_files / 'train.bin'), '--val', str(simulated_files / 'val.bin'),
                 '--out', str(out), '--quiet']) == EXIT_OK
    manifest = json.loads(out.with_suffix('.run.json').read_text())['config']
    assert manifest['encoder']['d_model'] == 8
    assert (manifest['batch_size'], manifest['learning_rate']) == (16, 0.01)

    config.write_text('[train]\nepochs = soon\n')
    assert main(['train', '--assets-dir', str(assets_dir), '--seed', '0', '--config', str(config),
                 '--train', str(simulated_files / 'train.bin'), '--val', str(simulated_files / 'val.bin'),
                 '--out', str(out), '--quiet']) == EXIT_INPUT


def test_train_resume_requires_checkpoint(tmp_path, simulated_files, assets_dir, capsys):
    assert main(['train', '--assets-dir', str(assets_dir), '--seed', '0', '--resume',
                 '--train', str(simulated_files / 'train.bin'), '--val', str(simulated_files / 'val.bin'),
                 '--out', str(tmp_path / 'missing.h5'), '--quiet']) == EXIT_INPUT
    assert 'no checkpoint to resume' in capsys.readouterr().err


def test_infer(tmp_path, checkpoint, simulated_files, assets_dir, capsys):
    val = read_dataset(simulated_files / 'val.bin')
    columns = ['b02', 'b03', 'b04', 'b05', 'b06', 'b07', 'b08', 'b8a', 'b11', 'b12', 'sun_zen', 'view_zen', 'rel_az']
    frame = pd.DataFrame(np.concatenate([val.clean[:4], val.geometry[:4]], axis=1), columns=columns)
    frame.insert(0, 'id', ['a', 'b', 'c', 'd'])
    frame.loc[2, 'b04'] = np.nan
    frame.to_csv(tmp_path / 'obs.csv', index=False)

    out = tmp_path / 'pred.csv'
    assert main(['infer', '--assets-dir', str(assets_dir), '--seed', '0', '--checkpoint', str(checkpoint),
                 '--input', str(tmp_path / 'obs.csv'), '--out', str(out), '--m', '200', '--quiet']) == EXIT_OK
    assert 'line(s) 4' in capsys.readouterr().err

    predictions = pd.read_csv(out)
    assert list(predictions['id']) == ['a', 'b', 'd']
    for name in LATENT_NAMES:
        assert {f'{name}_mean', f'{name}_sd', f'{name}_lower', f'{name}_upper'} <= set(predictions.columns)
    assert np.all(predictions['lai_lower'] <= predictions['lai_mean'])
    assert np.all(predictions['ccc_lower'] <= predictions['ccc_upper'])
    assert json.loads(out.with_suffix('.run.json').read_text())['rows'] == 3


def test_evaluate(tmp_path, checkpoint, simulated_files, assets_dir, capsys):
    val = read_dataset(simulated_files / 'val.bin')
    rows = []
    for i in range(8):
        lai, cab = val.params[i, LATENT_NAMES.index('lai')], val.params[i, LATENT_NAMES.index('cab')]
        rows.append(['S1' if i % 2 else 'S2', f'2021-06-{i + 10}'] + list(val.clean[i]) + list(val.geometry[i])
                    + [lai, lai * cab * 10, 'mg/m2', 0.2])
    pd.DataFrame(rows, columns=FIELD_COLUMNS).to_csv(tmp_path / 'field.csv', index=False)

    out = tmp_path / 'metrics.csv'
    assert main(['evaluate', '--assets-dir', str(assets_dir), '--seed', '0', '--checkpoint', str(checkpoint),
                 '--field', str(tmp_path / 'field.csv'), '--out', str(out), '--m', '200', '--quiet']) == EXIT_OK
    report = pd.read_csv(out)
    assert set(report['group']) == {'S1', 'S2', 'all'}
    assert set(report['metric']) == {'rmse', 'r2', 'mpiw', 'picp'}
    scatter = pd.read_csv(tmp_path / 'metrics.scatter.csv')
    assert len(scatter) == 16
    assert 'picp' in capsys.readouterr().out

    assert main(['evaluate', '--assets-dir', str(assets_dir), '--seed', '0', '--checkpoint', str(tmp_path / 'x.h5'),
                 '--field', str(tmp_path / 'field.csv'), '--out', str(out), '--quiet']) == EXIT_INPUT


def test_grad_check(assets_dir, capsys):
    assert main(['grad-check', '--assets-dir', str(assets_dir), '--seed', '0', '--points', '1',
                 '--band', 'B4']) == EXIT_OK
    output = capsys.readouterr().out
    assert 'gradient check passed' in output and 'cab' in output

    assert main(['grad-check', '--assets-dir', str(assets_dir), '--seed', '0', '--band', 'B1']) == EXIT_INPUT
    assert main(['grad-check', '--assets-dir', str(assets_dir), '--seed', '0', '--points', '1',
                 '--tol', '1e-30']) == EXIT_FAILED
