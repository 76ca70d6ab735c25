"""Rank perturbations of matrices: arithmetic distance, spectra under
low-rank changes, Weyr structure, and related constructions."""
from . import errors
from .almost import *  # noqa: F401,F403
from .interlace import *  # noqa: F401,F403
from .mats import *  # noqa: F401,F403
from .multiset import *  # noqa: F401,F403
from .normalcheck import *  # noqa: F401,F403
from .weyr import *  # noqa: F401,F403

__version__ = "0.1.0"
