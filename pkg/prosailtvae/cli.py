import argparse
import logging
import pathlib
import sys
import warnings
from dataclasses import dataclass, asdict
from timeit import default_timer as timer

from .errors import ProsailTVAEError, AssetError, ConfigError, DatasetError, TrainingDivergedError
from .util import generate_experiment_id, get_compiler, layer_dataclass, read_config_file, RUN_SECTIONS, \
    run_manifest, write_manifest

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2


@dataclass(frozen=True)
class InferConfig:
    level: float = 0.95
    m: int = 10000
    batch_size: int = 4096
    ccc_batch_size: int = 256


@dataclass(frozen=True)
class EvaluateConfig:
    level: float = 0.95
    m: int = 10000
    batch_size: int = 256


def _add_common(parser, seed_required=False):
    parser.add_argument('--config',
                        action='store',
                        default=None,
                        type=pathlib.Path,
                        help='INI configuration file')
    parser.add_argument('--assets-dir',
                        action='store',
                        default=None,
                        type=pathlib.Path,
                        help='Spectral asset directory, defaults to $PROSAILTVAE_ASSETS or the bundled prosailtvae/assets/')
    parser.add_argument('--seed',
                        action='store',
                        required=seed_required,
                        default=None,
                        type=int,
                        help='Random seed' + (', required' if seed_required else ''))
    parser.add_argument('--threads',
                        action='store',
                        default=None,
                        type=int,
                        help='Limit the intra- and inter-op thread pools')
    parser.add_argument('--quiet',
                        action='store_true',
                        help='Hide progress bars and informational logs')


def _add_encoder_flags(parser):
    parser.add_argument('--d-model', action='store', default=None, type=int, help='Token width')
    parser.add_argument('--num-heads', action='store', default=None, type=int, help='Attention heads')
    parser.add_argument('--num-layers', action='store', default=None, type=int, help='Encoder blocks')
    parser.add_argument('--ff-dim', action='store', default=None, type=int, help='Feed-forward width')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='prosailtvae',
                                     description='PROSAIL simulation and Transformer-VAE inversion')
    commands = parser.add_subparsers(dest='command', required=True)

    simulate = commands.add_parser('simulate', help='Generate a simulated dataset')
    _add_common(simulate, seed_required=True)
    simulate.add_argument('--out', action='store', required=True, type=pathlib.Path, help='Dataset file')
    simulate.add_argument('--n', action='store', default=None, type=int, help='Number of samples')
    simulate.add_argument('--noise-level', action='store', default=None, type=float, help='Band noise level')
    simulate.add_argument('--noise-mode', action='store', default=None, choices=['absolute', 'relative'],
                          help='Noise relative to the band value or in reflectance units')
    simulate.add_argument('--chunk-size', action='store', default=None, type=int,
                          help='Samples per decoder evaluation')
    simulate.add_argument('--csv', action='store', default=None, type=pathlib.Path,
                          help='Also export the dataset as CSV')
    simulate.add_argument('--jit-compile', action=argparse.BooleanOptionalAction, default=False,
                          help='Use XLA JIT compilation for the decoder')
    simulate.set_defaults(func=cmd_simulate)

    train = commands.add_parser('train', help='Train the encoder')
    _add_common(train, seed_required=True)
    train.add_argument('--train', action='store', required=True, type=pathlib.Path, help='Training dataset')
    train.add_argument('--val', action='store', required=True, type=pathlib.Path, help='Validation dataset')
    train.add_argument('--out', action='store', required=True, type=pathlib.Path, help='Checkpoint file')
    train.add_argument('--epochs', action='store', default=None, type=int, help='Number of epochs')
    train.add_argument('--batch-size', action='store', default=None, type=int, help='Batch size')
    train.add_argument('--lr', action='store', default=None, type=float, help='Learning rate')
    train.add_argument('--beta-start', action='store', default=None, type=float, help='Initial KL weight')
    train.add_argument('--beta-end', action='store', default=None, type=float, help='Final KL weight')
    train.add_argument('--latent-samples', action='store', default=None, type=int,
                       help='Latent samples per input in the reconstruction loss')
    _add_encoder_flags(train)
    train.add_argument('--resume', action=argparse.BooleanOptionalAction, default=False,
                       help='Continue training the checkpoint at --out')
    train.add_argument('--deterministic', action=argparse.BooleanOptionalAction, default=None,
                       help='Use deterministic computations')
    train.add_argument('--jit-compile', action=argparse.BooleanOptionalAction, default=None,
                       help='Use XLA JIT compilation')
    train.add_argument('--run-eagerly', action=argparse.BooleanOptionalAction, default=None,
                       help='Disable graph compilation')
    train.set_defaults(func=cmd_train)

    infer = commands.add_parser('infer', help='Invert band observations')
    _add_common(infer, seed_required=True)
    infer.add_argument('--checkpoint', action='store', required=True, type=pathlib.Path, help='Checkpoint file')
    infer.add_argument('--input', action='store', required=True, type=pathlib.Path, help='Observation CSV')
    infer.add_argument('--out', action='store', required=True, type=pathlib.Path, help='Prediction CSV')
    infer.add_argument('--level', action='store', default=None, type=float, help='Interval coverage')
    infer.add_argument('--m', action='store', default=None, type=int, help='CCC posterior samples per row')
    infer.set_defaults(func=cmd_infer)

    evaluate = commands.add_parser('evaluate', help='Compare predictions with field measurements')
    _add_common(evaluate, seed_required=True)
    evaluate.add_argument('--checkpoint', action='store', required=True, type=pathlib.Path, help='Checkpoint file')
    evaluate.add_argument('--field', action='store', required=True, type=pathlib.Path, help='Field record CSV')
    evaluate.add_argument('--out', action='store', required=True, type=pathlib.Path, help='Metrics report CSV')
    evaluate.add_argument('--scatter', action='store', default=None, type=pathlib.Path,
                          help='Scatter CSV, defaults to <out>.scatter.csv')
    evaluate.add_argument('--level', action='store', default=None, type=float, help='Interval coverage')
    evaluate.add_argument('--m', action='store', default=None, type=int, help='CCC posterior samples per record')
    evaluate.set_defaults(func=cmd_evaluate)

    verify = commands.add_parser('verify-assets', help='Verify and load the spectral assets')
    _add_common(verify)
    verify.add_argument('--write-manifest', action='store_true',
                        help='Write SHA256SUMS from the current files before verifying')
    verify.set_defaults(func=cmd_verify_assets)

    grad = commands.add_parser('grad-check', help='Compare decoder gradients with finite differences')
    _add_common(grad, seed_required=True)
    grad.add_argument('--band', action='store', default='B5', type=str, help='Band to differentiate')
    grad.add_argument('--points', action='store', default=3, type=int, help='Number of random parameter vectors')
    grad.add_argument('--step', action='store', default=1e-6, type=float,
                      help='Finite-difference step as a fraction of each parameter range')
    grad.add_argument('--tol', action='store', default=1e-4, type=float, help='Relative error threshold')
    grad.set_defaults(func=cmd_grad_check)

    return parser


def _configure_runtime(args):
    import tensorflow as tf

    if args.threads is not None:
        tf.config.threading.set_intra_op_parallelism_threads(args.threads)
        tf.config.threading.set_inter_op_parallelism_threads(args.threads)
    if args.seed is not None:
        tf.keras.utils.set_random_seed(args.seed)


def _config_file(args):
    return None if args.config is None else read_config_file(args.config)


def _section(parser, name):
    return parser[name] if parser is not None and parser.has_section(name) else None


def _print_configuration(run_id, settings):
    print(f'Configuration [{run_id}]:')
    for key, value in settings.items():
        print(f'  {key}:', value)
    print('')


def _load_decoder(args, jit_compile=False):
    from .rtm import ProsailDecoder
    from .spectral import load_assets

    assets = load_assets(args.assets_dir)
    decoder = ProsailDecoder(assets)
    return decoder, get_compiler(False, jit_compile)(decoder.__call__)


def cmd_simulate(args) -> int:
    from .sampler import DatasetWriter, SamplerConfig, check_bounds, export_csv, generate_dataset, read_dataset, \
        read_sampler_config

    cfg = SamplerConfig() if args.config is None else read_sampler_config(args.config, ignore_sections=RUN_SECTIONS)
    cfg = layer_dataclass(cfg, flags={'n': args.n, 'seed': args.seed, 'noise_level': args.noise_level,
                                      'noise_mode': args.noise_mode, 'chunk_size': args.chunk_size},
                          where='[simulation]', exclude=('variables', 'rules'))
    run_id = generate_experiment_id('simulate', seed=cfg.seed, n=cfg.n, noise=cfg.noise_level)
    _print_configuration(run_id, {'Seed': cfg.seed, 'Samples': cfg.n, 'Noise': f'{cfg.noise_level} ({cfg.noise_mode})',
                                  'Chunk size': cfg.chunk_size, 'Rules': ', '.join(rule.trigger for rule in cfg.rules),
                                  'Config hash': cfg.hash, 'Output': args.out})
    _configure_runtime(args)

    decoder, decode = _load_decoder(args, args.jit_compile)
    decoder_fn = _CompiledDecoder(decoder, decode)
    with DatasetWriter(args.out) as sink:
        manifest = generate_dataset(cfg.n, cfg, cfg.seed, sink, decoder_fn, progress=not args.quiet)

    bounds = check_bounds(read_dataset(args.out), cfg)
    violations = int(bounds['violations'].sum())
    if args.csv is not None:
        export_csv(read_dataset(args.out), args.csv)
    write_manifest(args.out.with_suffix('.run.json'),
                   run_manifest('simulate', cfg.to_dict(), cfg.seed, manifest.asset_checksums, run_id=run_id,
                                bounds_violations=violations))

    print(f'Wrote {manifest.n} samples to {args.out}')
    print(f'Bounds check: {"passed" if violations == 0 else f"FAILED ({violations} violations)"}')
    if violations:
        print(bounds[bounds['violations'] > 0].to_string(index=False))
        return EXIT_FAILED
    return EXIT_OK


@dataclass
class _CompiledDecoder:
    """The decoder with its call replaced by a compiled version"""
    decoder: object
    call: object

    @property
    def assets(self):
        return self.decoder.assets

    def __call__(self, params):
        import tensorflow as tf

        return self.call(tf.constant(params, dtype=tf.dtypes.float64))


def _train_config(args, file_config, resume_encoder=None):
    from .model import EncoderConfig, TrainConfig

    encoder = resume_encoder
    if encoder is None:
        encoder = layer_dataclass(EncoderConfig(), _section(file_config, 'encoder'),
                                  flags={'d_model': args.d_model, 'num_heads': args.num_heads,
                                         'num_layers': args.num_layers, 'ff_dim': args.ff_dim},
                                  where='[encoder]', env_prefix='PROSAILTVAE_ENCODER_')
    flags = {'seed': args.seed, 'epochs': args.epochs, 'batch_size': args.batch_size, 'learning_rate': args.lr,
             'beta_start': args.beta_start, 'beta_end': args.beta_end, 'latent_samples': args.latent_samples,
             'deterministic': args.deterministic, 'jit_compile': args.jit_compile, 'run_eagerly': args.run_eagerly}
    return layer_dataclass(TrainConfig(encoder=encoder), _section(file_config, 'train'), flags=flags,
                           where='[train]', exclude=('encoder',))


def cmd_train(args) -> int:
    from .model import load_checkpoint, summary_path, train
    from .sampler import read_dataset

    file_config = _config_file(args)
    train_set, val_set = read_dataset(args.train), read_dataset(args.val)
    _configure_runtime(args)
    decoder, _ = _load_decoder(args)

    resume = None
    if args.resume:
        if not args.out.is_file():
            raise DatasetError(f'{args.out}: no checkpoint to resume')
        resume = load_checkpoint(args.out, decoder)
    cfg = _train_config(args, file_config, None if resume is None else resume.encoder_config)

    run_id = generate_experiment_id('train', seed=cfg.seed, n=len(train_set), epochs=cfg.epochs,
                                    d_model=cfg.encoder.d_model, num_layers=cfg.encoder.num_layers,
                                    beta_end=cfg.beta_end)
    _print_configuration(run_id, {'Seed': cfg.seed, 'Train': f'{args.train} ({len(train_set)})',
                                  'Validation': f'{args.val} ({len(val_set)})', 'Encoder': asdict(cfg.encoder),
                                  'Epochs': cfg.epochs, 'Batch size': cfg.batch_size,
                                  'Learning rate': cfg.learning_rate, 'Beta': f'{cfg.beta_start} -> {cfg.beta_end}',
                                  'Resume': args.resume, 'JIT compile': cfg.jit_compile,
                                  'Deterministic': cfg.deterministic, 'Output': args.out})

    durations = {}
    start = timer()
    try:
        trained = train(train_set, val_set, cfg, decoder, csv_log=args.out.with_suffix('.log.csv'),
                        checkpoint_path=args.out, resume=resume, verbose=0 if args.quiet else 2)
    finally:
        durations['train'] = timer() - start
        write_manifest(args.out.with_suffix('.run.json'),
                       run_manifest('train', cfg.to_dict(), cfg.seed, dict(decoder.assets.checksums),
                                    run_id=run_id, durations=durations))

    print(f'Wrote checkpoint to {args.out} (summary {summary_path(args.out)})')
    print(f'  Best epoch: {trained.manifest["best_epoch"]}, validation objective {trained.manifest["best_val_objective"]}')
    return EXIT_OK


def _prediction_frame(passthrough, estimate, ccc):
    import pandas as pd

    columns = {}
    for i, name in enumerate(estimate.names):
        columns[f'{name}_mean'] = estimate.mean[:, i]
        columns[f'{name}_sd'] = estimate.sd[:, i]
        columns[f'{name}_lower'] = estimate.lower[:, i]
        columns[f'{name}_upper'] = estimate.upper[:, i]
    columns['ccc_mean'] = ccc.mean
    columns['ccc_lower'] = ccc.lower
    columns['ccc_upper'] = ccc.upper
    return pd.concat([passthrough, pd.DataFrame(columns)], axis=1)


def cmd_infer(args) -> int:
    from .metric import predict_ccc, read_observations
    from .model import infer, load_checkpoint

    cfg = layer_dataclass(InferConfig(), _section(_config_file(args), 'infer'),
                          flags={'level': args.level, 'm': args.m}, where='[infer]', env_prefix='PROSAILTVAE_INFER_')
    run_id = generate_experiment_id('infer', seed=args.seed)
    _print_configuration(run_id, {'Seed': args.seed, 'Checkpoint': args.checkpoint, 'Input': args.input,
                                  'Level': cfg.level, 'CCC samples': cfg.m, 'Output': args.out})
    _configure_runtime(args)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        passthrough, bands, geometry = read_observations(args.input)
    for warning in caught:
        print(f'Warning: {warning.message}', file=sys.stderr)

    decoder, _ = _load_decoder(args)
    trained = load_checkpoint(args.checkpoint, decoder)
    estimate = infer(trained, bands, geometry, level=cfg.level, batch_size=cfg.batch_size, progress=not args.quiet)
    ccc = predict_ccc(trained, bands, geometry, m=cfg.m, seed=args.seed, level=cfg.level,
                      batch_size=cfg.ccc_batch_size, progress=not args.quiet)

    args.out.parent.mkdir(parents=True, exist_ok=True)
    _prediction_frame(passthrough, estimate, ccc).to_csv(args.out, index=False)
    write_manifest(args.out.with_suffix('.run.json'),
                   run_manifest('infer', asdict(cfg), args.seed, dict(decoder.assets.checksums), run_id=run_id,
                                checkpoint=args.checkpoint, rows=len(bands), skipped_warnings=len(caught)))
    print(f'Wrote {len(bands)} predictions to {args.out}')
    return EXIT_OK


def cmd_evaluate(args) -> int:
    from .metric import evaluate, read_field_records
    from .model import load_checkpoint

    cfg = layer_dataclass(EvaluateConfig(), _section(_config_file(args), 'evaluate'),
                          flags={'level': args.level, 'm': args.m}, where='[evaluate]',
                          env_prefix='PROSAILTVAE_EVALUATE_')
    scatter_path = args.scatter if args.scatter is not None else args.out.with_suffix('.scatter.csv')
    run_id = generate_experiment_id('evaluate', seed=args.seed)
    _print_configuration(run_id, {'Seed': args.seed, 'Checkpoint': args.checkpoint, 'Field records': args.field,
                                  'Level': cfg.level, 'CCC samples': cfg.m, 'Report': args.out,
                                  'Scatter': scatter_path})
    _configure_runtime(args)

    records = read_field_records(args.field)
    decoder, _ = _load_decoder(args)
    trained = load_checkpoint(args.checkpoint, decoder)
    report = evaluate(trained, records, m=cfg.m, seed=args.seed, level=cfg.level, batch_size=cfg.batch_size,
                      progress=not args.quiet)

    report.to_csv(args.out)
    report.scatter_to_csv(scatter_path)
    write_manifest(args.out.with_suffix('.run.json'),
                   run_manifest('evaluate', asdict(cfg), args.seed, dict(decoder.assets.checksums), run_id=run_id,
                                checkpoint=args.checkpoint, records=len(records), skipped=report.skipped))
    print(report.table.pivot_table(index=['group', 'variable'], columns='metric', values='value',
                                   sort=False).to_string())
    return EXIT_OK


def cmd_verify_assets(args) -> int:
    from .spectral import default_assets_dir, load_assets, write_checksum_manifest

    directory = default_assets_dir() if args.assets_dir is None else args.assets_dir
    if args.write_manifest:
        print(f'Wrote {write_checksum_manifest(directory)}')
    assets = load_assets(directory)
    grid = assets.grid
    print(f'Assets in {directory} verified:')
    for name, digest in sorted(assets.checksums.items()):
        print(f'  {name}: {digest}')
    print(f'  Grid: {grid.start_nm:g}-{grid.stop_nm:g} nm, {grid.count} points')
    print(f'  Bands: {" ".join(assets.srf.band_ids)}')
    return EXIT_OK


def cmd_grad_check(args) -> int:
    import numpy as np

    from .autodiff import grad_check
    from .sampler import SamplerConfig, sample_parameters
    from .types import PARAMETER_BOUNDS, PARAMETER_NAMES

    _print_configuration(generate_experiment_id('grad-check', seed=args.seed),
                         {'Seed': args.seed, 'Band': args.band, 'Points': args.points, 'Step': args.step,
                          'Tolerance': args.tol})
    _configure_runtime(args)
    decoder, _ = _load_decoder(args)
    if args.band not in decoder.band_ids:
        raise ConfigError(f'unknown band "{args.band}", expected one of {", ".join(decoder.band_ids)}')
    band = decoder.band_ids.index(args.band)

    lower, upper = np.array([PARAMETER_BOUNDS[name] for name in PARAMETER_NAMES]).T
    width = upper - lower
    points = sample_parameters(SamplerConfig(), np.random.default_rng(args.seed), size=args.points).to_tensor().numpy()
    # central differences must stay inside the physical domain
    points = np.clip(points, lower + 2 * args.step * width, upper - 2 * args.step * width)
    passed = True
    for point in points:
        report = grad_check(lambda x: decoder(x[None, :])[0], point, step=args.step * width, tol=args.tol,
                            output_index=band)
        report.table.insert(0, 'parameter', PARAMETER_NAMES)
        print(report)
        print('')
        passed = passed and report.passed
    return EXIT_OK if passed else EXIT_FAILED


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format='%(levelname)s %(name)s: %(message)s')
    try:
        return args.func(args)
    except (ConfigError, AssetError, DatasetError) as error:
        print(f'error: {error}', file=sys.stderr)
        return EXIT_INPUT
    except TrainingDivergedError as error:
        print(f'error: {error}; the last-good checkpoint was kept', file=sys.stderr)
        return EXIT_FAILED
    except ProsailTVAEError as error:
        print(f'error: {error}', file=sys.stderr)
        return EXIT_FAILED


if __name__ == '__main__':
    sys.exit(main())
