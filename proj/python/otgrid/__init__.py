"""Exact optimal transport distances for gridded geospatial scalar fields."""

from ._otgrid import *  # noqa: F401,F403
from ._otgrid import __version__  # noqa: F401
