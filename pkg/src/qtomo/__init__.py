"""Optical tomograms and normally ordered moments of q-deformed bosonic states."""

__version__ = "0.1.0"

from .qmath import DeformationParam
from .fock import DensityMatrix, FockState, MomentTable
from .states import Kind, StateSpec, build_state
from .tomography import Tomogram, TomogramGrid, make_grid

__all__ = [
    "DeformationParam",
    "DensityMatrix",
    "FockState",
    "Kind",
    "MomentTable",
    "StateSpec",
    "Tomogram",
    "TomogramGrid",
    "build_state",
    "make_grid",
]
