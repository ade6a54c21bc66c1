from .logger import setup_logger, RunLogger
from .constants import *
from .error_handling import *

__all__ = ['setup_logger', 'RunLogger']
