"""Klein-Gordon block operator spectra and relative perturbation bounds."""

from ._kleingordon import *  # noqa: F401,F403
from ._kleingordon import KleinGordonError, ModelSpec

__all__ = [name for name in dir() if not name.startswith("_")]
