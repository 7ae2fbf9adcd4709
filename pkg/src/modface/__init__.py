"""Face lattices of PSD cones over R, C, H and O, and related constructions."""

from . import albert_plane, algebra, cone_faces, lattice_core, polynomials, rp5_model, sections
from .harness import Report, RunConfig, run

__version__ = "0.1.0"

__all__ = [
    "Report",
    "RunConfig",
    "albert_plane",
    "algebra",
    "cone_faces",
    "lattice_core",
    "polynomials",
    "rp5_model",
    "run",
    "sections",
]
