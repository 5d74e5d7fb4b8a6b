"""emlab: desk-scale laboratory for vacuum field-equation experiments.

Two time-stepped solvers (the standard system and a mean-velocity-coupled
variant) on a periodic collocated grid, closed-form point-charge kernels,
Galilean-boost residual harnesses, a vector-identity verification suite,
and a two-charge force comparison, behind one scenario-driven CLI.
"""

__version__ = "0.1.0"

from .constants import PhysicalConstants
from .grid import GridSpec, ScalarField, VectorField
from .solver import EMState, SolverConfig, SourceModel, Trajectory
from .frames import FrameBoost
from .reporting import ResidualEntry, ResidualReport

__all__ = [
    "__version__",
    "PhysicalConstants",
    "GridSpec",
    "ScalarField",
    "VectorField",
    "EMState",
    "SolverConfig",
    "SourceModel",
    "Trajectory",
    "FrameBoost",
    "ResidualEntry",
    "ResidualReport",
]
