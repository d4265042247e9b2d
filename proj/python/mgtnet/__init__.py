"""Multi-hop graph transformer for lifting 2D pose sequences to 3D."""

from ._mgtnet import *  # noqa: F401,F403
from ._mgtnet import __doc__  # noqa: F401

__version__ = "0.1.0"
