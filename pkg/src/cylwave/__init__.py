"""cylwave: line-source scattering by 2-D dielectric cylinders.

A workbench for the transmission problem of an electric line source and a
penetrable cylinder, built around three mutually checking solution routes:

* an exact Fourier-series solution for the circular cylinder (the oracle),
* a null-field solver with equivalent surface currents on the boundary and
  collocation on displaced auxiliary surfaces,
* an auxiliary-source solver with discrete sources on the displaced surfaces
  and collocation on the boundary.

The point of the package is not just to compute fields but to expose where
each route converges, diverges, or oscillates, and to make those regimes
reproducible from the command line (see ``cylwave --help``).
"""

__version__ = "0.1.0"

from .exact import Medium, SeriesResult, critical_radius
from .geometry import AuxiliarySurface, BoundaryCurve, Excitation

__all__ = [
    "AuxiliarySurface",
    "BoundaryCurve",
    "Excitation",
    "Medium",
    "SeriesResult",
    "critical_radius",
    "__version__",
]
