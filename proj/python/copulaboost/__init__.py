"""Boosted bivariate copula regression with enhanced variable selection."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
