"""Pulsed probe-based state reconstruction of dark systems."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
from ._core import fixtures  # noqa: F401
