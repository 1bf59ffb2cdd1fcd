"""Coded multibeam isolation toolkit."""

from ._core import *  # noqa: F401,F403
from ._core import __version__, Error  # noqa: F401
