import json
import os
import sys
import pathlib
import argparse
from dataclasses import replace
from timeit import default_timer as timer

import numpy as np
import tensorflow as tf

from prosailtvae.util import generate_experiment_id, get_compiler
from prosailtvae.spectral import load_assets
from prosailtvae.rtm import ProsailDecoder
from prosailtvae.sampler import SamplerConfig, DatasetWriter, generate_dataset, read_dataset, prior_mean
from prosailtvae.model import EncoderConfig, TrainConfig, train, infer
from prosailtvae.metric import rmse, r2, picp, InversionCriteria
from prosailtvae.types import IntervalEstimate, LATENT_NAMES

parser = argparse.ArgumentParser(description='Simulates, trains and evaluates a small inversion model end-to-end')
parser.add_argument('--persistent-dir',
                    action='store',
                    default=pathlib.Path(__file__).absolute().parent.parent,
                    type=pathlib.Path,
                    help='Directory where all persistent data will be stored')
parser.add_argument('--assets-dir',
                    action='store',
                    default=None,
                    type=pathlib.Path,
                    help='Spectral asset directory, defaults to $PROSAILTVAE_ASSETS or the bundled prosailtvae/assets/')
parser.add_argument('--seed',
                    action='store',
                    default=0,
                    type=int,
                    help='Random seed')
parser.add_argument('--n-train',
                    action='store',
                    default=5000,
                    type=int,
                    help='Number of simulated training samples')
parser.add_argument('--n-val',
                    action='store',
                    default=500,
                    type=int,
                    help='Number of simulated validation samples')
parser.add_argument('--noise-level',
                    action='store',
                    default=0.005,
                    type=float,
                    help='Absolute band noise')
parser.add_argument('--max-epochs',
                    action='store',
                    default=30,
                    type=int,
                    help='The number of epochs to train')
parser.add_argument('--batch-size',
                    action='store',
                    default=256,
                    type=int,
                    help='The batch size to use for training and evaluation')
parser.add_argument('--d-model',
                    action='store',
                    default=32,
                    type=int,
                    help='Token width')
parser.add_argument('--num-layers',
                    action='store',
                    default=2,
                    type=int,
                    help='Encoder blocks')
parser.add_argument('--beta-end',
                    action='store',
                    default=1.0,
                    type=float,
                    help='Final KL weight')
parser.add_argument('--deterministic',
                    action='store_true',
                    help='Use deterministic computations')
parser.add_argument('--jit-compile',
                    action=argparse.BooleanOptionalAction,
                    default=False,
                    help='Use XLA JIT compilation for the simulation')


def simulate(path, n, seed, cfg, decoder, decode):
    decode_numpy = _NumpyDecoder(decoder.assets, decode)
    with DatasetWriter(path) as sink:
        generate_dataset(n, replace(cfg, n=n), seed, sink, decode_numpy)
    return read_dataset(path)


class _NumpyDecoder:
    def __init__(self, assets, decode):
        self.assets = assets
        self._decode = decode

    def __call__(self, params):
        return self._decode(tf.constant(params, dtype=tf.dtypes.float64))


if __name__ == '__main__':
    durations = {}
    setup_time_start = timer()

    args = parser.parse_args()
    experiment_id = generate_experiment_id(
        'toy',
        seed=args.seed, n=args.n_train, epochs=args.max_epochs,
        d_model=args.d_model, num_layers=args.num_layers,
        beta_end=args.beta_end, noise=args.noise_level
    )

    # Print configuration
    print(f'Configuration [{experiment_id}]:')
    print('  Seed:', args.seed)
    print('  Train samples:', args.n_train)
    print('  Validation samples:', args.n_val)
    print('  Noise level:', args.noise_level)
    print('')
    print('  Token width:', args.d_model)
    print('  Encoder blocks:', args.num_layers)
    print('  Final beta:', args.beta_end)
    print('')
    print('  Batch size:', args.batch_size)
    print('  Max epochs:', args.max_epochs)
    print('')
    print('  JIT compile:', args.jit_compile)
    print('  Deterministic:', args.deterministic)
    print('')

    # Set global configuration options
    if args.deterministic:
        tf.config.experimental.enable_op_determinism()
    tf.keras.utils.set_random_seed(args.seed)

    assets = load_assets(args.assets_dir)
    decoder = ProsailDecoder(assets)
    decode = get_compiler(False, args.jit_compile)(decoder.__call__)
    sampler_cfg = SamplerConfig(noise_level=args.noise_level, seed=args.seed)
    durations['setup'] = timer() - setup_time_start

    # Simulate, the validation set uses a disjoint seed
    simulate_time_start = timer()
    dataset_dir = args.persistent_dir / 'intermediate' / 'toy'
    os.makedirs(dataset_dir, exist_ok=True)
    train_set = simulate(dataset_dir / f'{experiment_id}.train.bin', args.n_train, args.seed,
                         sampler_cfg, decoder, decode)
    val_set = simulate(dataset_dir / f'{experiment_id}.val.bin', args.n_val, args.seed + 1,
                       sampler_cfg, decoder, decode)
    durations['simulate'] = timer() - simulate_time_start

    # Train
    train_time_start = timer()
    train_cfg = TrainConfig(
        encoder=EncoderConfig(d_model=args.d_model, num_heads=4, num_layers=args.num_layers, ff_dim=2 * args.d_model),
        epochs=args.max_epochs, batch_size=args.batch_size, beta_end=args.beta_end,
        seed=args.seed, deterministic=args.deterministic
    )
    os.makedirs(args.persistent_dir / 'checkpoints', exist_ok=True)
    trained = train(train_set, val_set, train_cfg, decoder,
                    csv_log=args.persistent_dir / 'checkpoints' / f'{experiment_id}.log.csv',
                    checkpoint_path=args.persistent_dir / 'checkpoints' / f'{experiment_id}.h5')
    durations['train'] = timer() - train_time_start

    # Round trip on noiseless validation spectra, against the prior-mean predictor
    evaluate_time_start = timer()
    estimate = infer(trained, val_set.clean, val_set.geometry, batch_size=args.batch_size)
    baseline = prior_mean(sampler_cfg)
    results = []
    for i, name in enumerate(LATENT_NAMES):
        truth = val_set.latents[:, i]
        results.append({
            'variable': name,
            'rmse': rmse(estimate.mean[:, i], truth),
            'r2': r2(estimate.mean[:, i], truth),
            'picp': picp(IntervalEstimate(estimate.mean[:, i], estimate.lower[:, i], estimate.upper[:, i]), truth),
            'prior_mean_rmse': rmse(np.full_like(truth, baseline[i]), truth)
        })
    durations['evaluate'] = timer() - evaluate_time_start

    val_rec = trained.history.get('val_rec', [])
    print('Results:')
    for row in results:
        print(f'  {row["variable"]}: RMSE {row["rmse"]:.4g} (prior mean {row["prior_mean_rmse"]:.4g}), '
              f'R2 {row["r2"]:.3f}, PICP {row["picp"]:.3f}')
    if len(val_rec) > 1:
        print(f'  Validation reconstruction loss: {val_rec[0]:.4g} -> {val_rec[-1]:.4g}')

    lai = results[LATENT_NAMES.index('lai')]
    criteria = InversionCriteria().check(val_rec, lai['rmse'], lai['prior_mean_rmse'], lai['picp']) \
        if len(val_rec) > 1 else {}
    print('Criteria:')
    for name, passed in criteria.items():
        print(f'  {name}: {"pass" if passed else "FAIL"}')

    os.makedirs(args.persistent_dir / 'results' / 'toy', exist_ok=True)
    with open(args.persistent_dir / 'results' / 'toy' / f'{experiment_id}.json', "w") as f:
        del args.persistent_dir
        del args.assets_dir
        json.dump({
            'args': vars(args),
            'history': trained.history,
            'results': results,
            'criteria': criteria,
            'durations': durations
        }, f)

    sys.exit(0 if criteria and all(criteria.values()) else 1)
