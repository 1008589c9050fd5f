"""Thermodynamics of correlated system-bath states."""
from .linalg import BipartiteLayout, DimensionError, LinalgError
from .states import DensityMatrix, Hamiltonian, StateError, gibbs
from .thermo import EntropyValue

__version__ = "0.1.0"
