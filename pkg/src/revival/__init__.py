"""Desk-scale simulations of wave packet revivals: 1D/2D bound-state
spectra, autocorrelation functions, fractional-revival amplitude algebra,
phase-space and carpet rasters, and the cavity-QED / condensate analogs.
"""

from .analogs import CoherentState, JCParams
from .dynamics import TimeSeries
from .fractional import GaussSumTable
from .packets import CoefficientSet, CoefficientSet2D, PacketParams1D
from .spectra import Spectrum1D, TimeScales, UnitSystem
from .wavefields import AxisSpec, FieldGrid, ObservableSeries

__version__ = "0.1.0"

__all__ = [
    "AxisSpec",
    "CoefficientSet",
    "CoefficientSet2D",
    "CoherentState",
    "FieldGrid",
    "GaussSumTable",
    "JCParams",
    "ObservableSeries",
    "PacketParams1D",
    "Spectrum1D",
    "TimeScales",
    "TimeSeries",
    "UnitSystem",
    "__version__",
]
