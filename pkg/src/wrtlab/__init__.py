"""Weighted recursive trees, preferential attachment trees and their urns."""
__version__ = "0.1.0"

from .errors import (
    DegenerateCouplingError,
    DomainError,
    InsufficientDataError,
    ParameterError,
    RangeError,
)
from .sequences import *  # noqa: F401,F403
from .trees import *  # noqa: F401,F403
from .limits import *  # noqa: F401,F403
from .oracle import *  # noqa: F401,F403
from .urns import *  # noqa: F401,F403
from .stats import *  # noqa: F401,F403
from .pagraph import *  # noqa: F401,F403
