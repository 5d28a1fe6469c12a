"""Exact symbolic calculus on odd symplectic supermanifolds ΠT*M.

The kernel that multiplies and differentiates Grassmann terms is compiled
with Cython when available; ``oddsymp.kernel.BACKEND`` says which one loaded.
"""

from oddsymp.grassmann import Gaussian, GeneratorSet, Kind, SuperPolynomial
from oddsymp.kernel import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "Gaussian", "GeneratorSet", "Kind", "SuperPolynomial", "__version__"]
