import argparse
import os
import pathlib

import pandas as pd
import plotnine as p9
from mizani.palettes import brewer_pal

from prosailtvae.plot import bootstrap_confint, annotation
from prosailtvae.util import generate_experiment_id

parser = argparse.ArgumentParser(
    description='Plots predicted versus measured values with their posterior intervals'
)
parser.add_argument('--persistent-dir',
                    action='store',
                    default=pathlib.Path(__file__).absolute().parent.parent,
                    type=pathlib.Path,
                    help='Directory where all persistent data will be stored')
parser.add_argument('--scatter',
                    action='store',
                    required=True,
                    type=pathlib.Path,
                    help='Scatter CSV written by `prosailtvae evaluate`')
parser.add_argument('--name',
                    action='store',
                    default=None,
                    type=str,
                    help='Name of the plot, defaults to the scatter file name')
parser.add_argument('--variables',
                    action='store',
                    nargs='+',
                    default=['lai', 'ccc'],
                    choices=['lai', 'ccc'],
                    type=str,
                    help='The variables to plot')
parser.add_argument('--seed',
                    action='store',
                    default=0,
                    type=int,
                    help='Bootstrap seed')
parser.add_argument('--format',
                    action='store',
                    default='wide',
                    type=str,
                    choices=['half', 'wide'],
                    help='The dimensions and format of the plot.')

if __name__ == "__main__":
    args, unknown = parser.parse_known_args()
    experiment_id = generate_experiment_id(f"scatter_{args.name or args.scatter.stem.split('.')[0]}")

    df = pd.read_csv(args.scatter)
    df = df[df['variable'].isin(args.variables)].assign(**{
        'abs_error': lambda df: (df['prediction'] - df['truth']).abs(),
        'covered': lambda df: (df['lower'] <= df['truth']) & (df['truth'] <= df['upper'])
    })

    # per site mean absolute error with a bootstrap interval
    df_sites = (df
                .groupby(['variable', 'site'], group_keys=True)
                .apply(bootstrap_confint(['abs_error'], seed=args.seed))
                .reset_index())
    os.makedirs(args.persistent_dir / 'tables', exist_ok=True)
    df_sites.to_csv(args.persistent_dir / 'tables' / f'{experiment_id}.csv', index=False)
    print(df_sites.to_string(index=False))

    # a shared axis range per facet keeps the 1:1 line on the diagonal
    limits = (df
              .melt(id_vars=['variable'], value_vars=['truth', 'lower', 'upper'])
              .groupby('variable')['value'].agg(['min', 'max']))
    df_limits = pd.concat([
        pd.DataFrame({'variable': variable, 'truth': [row['min'], row['max']], 'prediction': [row['min'], row['max']]})
        for variable, row in limits.iterrows()
    ])

    if len(args.variables) == 1:
        x_label, y_label = (annotation.axis_label(args.variables[0], prefix) for prefix in ('Measured ', 'Predicted '))
    else:
        x_label, y_label = 'Measured', 'Predicted'

    p = (p9.ggplot(df, p9.aes(x='truth', y='prediction'))
         + p9.geom_blank(data=df_limits)
         + p9.geom_abline(slope=1, intercept=0, linetype='dashed', color='#666666')
         + p9.geom_errorbar(p9.aes(ymin='lower', ymax='upper', color='site'), width=0, alpha=0.5)
         + p9.geom_point(p9.aes(color='site', shape='covered'))
         + p9.facet_wrap('~ variable', scales='free', labeller=annotation.variable.labeller)
         + p9.scale_x_continuous(name=x_label)
         + p9.scale_y_continuous(name=y_label)
         + p9.scale_color_manual(values=brewer_pal(type='qual', palette=2)(8), name='Site')
         + p9.scale_shape_manual(values={True: 'o', False: 'x'}, name='Inside interval'))

    if args.format == 'half':
        size = (3.03209, 4.5)
        p += p9.guides(color=p9.guide_legend(ncol=2))
        p += p9.theme(text=p9.element_text(size=10), subplots_adjust={'bottom': 0.3}, legend_position=(.5, .05))
    else:
        size = (10, 4.5)
        p += p9.ggtitle(experiment_id)

    os.makedirs(args.persistent_dir / 'plots' / args.format, exist_ok=True)
    p.save(args.persistent_dir / 'plots' / args.format / f'{experiment_id}.pdf', width=size[0], height=size[1], units='in')
