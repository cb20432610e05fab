"""rhosolve: sparse steady-state solvers for open quantum optical systems.

Builds Lindblad superoperators from sparse operator algebra, reorders them
(reverse Cuthill-McKee, weighted bipartite matching, column minimum degree),
factorizes them (complete LU or threshold-and-budget incomplete LU with
partial pivoting), and solves for the steady-state density matrix by a
direct solve on the trace-modified system, preconditioned Krylov iteration,
or shifted inverse-power eigeniteration.
"""

from .sparse import (SparseComplexMatrix, Permutation, kron, transpose,
                     conjugate, adjoint, add, matvec, permute, vec, unvec,
                     identity, read_matrix_market, write_matrix_market)
from .operators import (QuantumOperator, destroy, spin_ops, embed,
                        identity_operator)
from .liouville import (LiouvillianSystem, build_liouvillian, shift,
                        build_modified, default_weight, DEFAULT_SIGMA)
from .ordering import (BandProfile, band_profile, rcm, weighted_mbm,
                       col_min_degree, StructurallySingularError)
from .factor import (LUFactors, lu, ilutp, solve_lu, condest, export_factors,
                     SingularMatrixError, PreconditionerBreakdownError)
from .krylov import IterOptions, IterResult, gmres, bicgstab
from .steady import (SteadyStateResult, solve_direct, solve_iterative,
                     inverse_power, dense_oracle, validate)
from .models import ModelSpec, build_model, build_jc, build_spin_chain, build_optomech
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
