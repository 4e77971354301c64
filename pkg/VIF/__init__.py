__version__ = '0.1.0'

from .RunConfig import RunConfig
from .RunManager import RunManager
