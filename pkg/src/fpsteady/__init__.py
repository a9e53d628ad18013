"""Exact steady states of driven dissipative nonlinear oscillators.

Analytic Fokker-Planck steady-state solutions for two circuit-QED models —
the adiabatically eliminated cavity-transmon system and the coherently +
parametrically driven Duffing oscillator with one- and two-photon loss —
together with an independent truncated-Fock Lindblad steady-state oracle,
parameter sweeps, and figure rendering.
"""

from . import errors, kerr, oracle, paramp, phasespace, specfn, sweep, transmon
from .errors import FpsteadyError
from .oracle import FockOperatorSpec, SteadyDensityMatrix
from .paramp import CatMetrics, FixedPointSet, ParampParams, Phase
from .phasespace import GridSpec, QGrid
from .specfn import SeriesControl
from .transmon import EffectiveDuffingParams, MomentTable, TransmonCavityParams

__version__ = "0.1.0"

__all__ = [
    "CatMetrics",
    "EffectiveDuffingParams",
    "FixedPointSet",
    "FockOperatorSpec",
    "FpsteadyError",
    "GridSpec",
    "MomentTable",
    "ParampParams",
    "Phase",
    "QGrid",
    "SeriesControl",
    "SteadyDensityMatrix",
    "TransmonCavityParams",
    "errors",
    "kerr",
    "oracle",
    "paramp",
    "phasespace",
    "specfn",
    "sweep",
    "transmon",
    "__version__",
]
