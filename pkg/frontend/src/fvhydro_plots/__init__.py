"""Offline figure generation for fvhydro run directories."""

__version__ = "0.1.0"

from .reader import RunData, RunDataError, load_run
from .render import PANELS, render

__all__ = ["PANELS", "RunData", "RunDataError", "__version__", "load_run", "render"]
