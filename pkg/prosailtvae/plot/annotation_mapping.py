from functools import cached_property


class _AnnotationMapping(dict):
    @cached_property
    def breaks(self):
        return list(self.keys())

    @cached_property
    def labels(self):
        return list(self.values())

    def labeller(self, key):
        return self.get(key, key)


class _AllAnnotations():
    def __init__(self) -> None:
        self.variable = _AnnotationMapping({
            'lai': 'LAI',
            'ccc': 'CCC (field unit)',
            'cab': 'Chlorophyll a+b',
            'cw': 'Equivalent water thickness',
            'cm': 'Dry matter content',
        })
        self.unit = _AnnotationMapping({
            'lai': 'm²/m²',
            'cab': 'µg/cm²',
            'cw': 'cm',
            'cm': 'g/cm²',
        })
        self.metric = _AnnotationMapping({
            'rmse': 'RMSE',
            'r2': 'R²',
            'mpiw': 'MPIW',
            'picp': 'PICP',
        })

    def axis_label(self, variable, prefix=''):
        unit = self.unit.get(variable)
        name = self.variable.labeller(variable)
        return f'{prefix}{name}' if unit is None else f'{prefix}{name} [{unit}]'


annotation = _AllAnnotations()
