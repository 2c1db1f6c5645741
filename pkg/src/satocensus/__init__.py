"""satocensus: exact elliptic-curve trace censuses over prime fields,
Hurwitz class numbers, local-factor distributions, and a Levy-Prokhorov
metric engine for semicircle-convergence experiments."""

from satocensus.backend import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
