"""Quantum lane-change evolutionary game simulator."""

from ._qlane import *  # noqa: F401,F403
from ._qlane import __version__  # noqa: F401
