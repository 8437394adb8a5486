from dataclasses import dataclass
from typing import Callable, Dict

from ..util import get_compiler


@dataclass(frozen=True)
class CompileConfig:
    """One way of running a differentiable function, eagerly or as a traced graph"""
    name: str
    run_eagerly: bool
    jit_compile: bool = False

    @property
    def args(self) -> Dict[str, bool]:
        return {'run_eagerly': self.run_eagerly, 'jit_compile': self.jit_compile}

    def compile(self, fn: Callable) -> Callable:
        return get_compiler(**self.args)(fn)


compile_configs = [
    CompileConfig('no_compile', run_eagerly=True),
    CompileConfig('default_compile', run_eagerly=False)
]
