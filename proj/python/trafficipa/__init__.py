"""Fluid-queue traffic light simulator with IPA-driven set-point regulation."""

from ._trafficipa import *  # noqa: F401,F403
from ._trafficipa import __doc__  # noqa: F401

__all__ = [name for name in dir() if not name.startswith("_")]
