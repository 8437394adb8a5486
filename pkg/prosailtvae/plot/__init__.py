
__all__ = ['bootstrap_confint', 'annotation']

from .bootstrap_confint import bootstrap_confint
from .annotation_mapping import annotation
