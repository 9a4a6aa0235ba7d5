"""Anti-plane waves in a square mass-spring lattice under a step point load.

Submodules: ``model`` (parameters, dispersion), ``specfun`` (Bessel J_n, Airy Ai),
``asymptotics`` (large-time closed forms), ``fdm`` (explicit solver),
``analysis`` (fits, front width, short-wave arrival), ``config``,
``experiments`` and ``cli``.
"""

from .asymptotics import AsymptoticEval, Formula
from .fdm import FdmConfig, FdmResult, InstabilityError, ProbeSeries, WaveField, run
from .model import LatticeParams

__all__ = [
    "LatticeParams",
    "Formula",
    "AsymptoticEval",
    "FdmConfig",
    "FdmResult",
    "InstabilityError",
    "ProbeSeries",
    "WaveField",
    "run",
]

__version__ = "0.1.0"
