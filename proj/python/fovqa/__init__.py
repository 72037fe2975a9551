"""Foveation-aware quality assessment for omnidirectional images.

Thin re-export of the compiled core. Rasters cross the boundary as numpy
arrays via Image.from_numpy / Image.to_numpy (and the Map equivalents).
"""

from fovqa._core import *  # noqa: F401,F403
from fovqa._core import __version__  # noqa: F401
