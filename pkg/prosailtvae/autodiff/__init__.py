
__all__ = ['Tape', 'forward', 'gradient', 'grad_check', 'GradCheckReport', 'safe_where', 'safe_divide', 'check_domain',
           'as_domain_error', 'DOMAIN_ASSERTION_PREFIX']

from .tape import Tape, forward, gradient
from .grad_check import grad_check, GradCheckReport
from .safe import safe_where, safe_divide, check_domain, as_domain_error, DOMAIN_ASSERTION_PREFIX
