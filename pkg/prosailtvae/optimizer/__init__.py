
__all__ = [
    'Adam'
]

from .adam import Adam
