"""Exact fan and fanifold combinatorics, dual spaces, tropical complexes and
numerical amoebas."""

__version__ = "0.1.0"

from .lattice import IntMatrix, Sublattice, snf, saturate, quotient_lattice, cokernel
from .fan import Cone, Fan, LatticePolytope, StackyFan, quotient_fan, validate_fan, normal_fan
from .fanifold import FanifoldData, Stratum, Arrow, validate_fanifold, filtration, handle_schedule, is_closed, \
    sphere_fanifold
from .fltz import fltz_skeleton, local_factorization
from .fibration import RetractionContext, retract, nearest_point, poisson_check
from .dual import algebraic_moment, condition_vi_check, dual_space
from .tropical import Triangulation, adapted_check, dual_complex, complement_components, psi_embedding_check
from .amoeba import LaurentFamily, sample_curve, convergence_report
