"""Single particle model with electrolyte: simulation and parameter identification."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
