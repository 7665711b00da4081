"""Multispecies stirring process toolkit.

Simulation of the (weakly asymmetric) stirring dynamics on the discrete
torus, the coupled hydrodynamic PDEs, Girsanov path weights, and the
large-deviation rate functional.
"""

from ._stirlab import *  # noqa: F401,F403
from ._stirlab import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
