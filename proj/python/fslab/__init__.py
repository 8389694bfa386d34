"""Fock-space lattice models: operators, spectra and open-system dynamics."""

from ._fslab import *  # noqa: F401,F403
from ._fslab import __version__
