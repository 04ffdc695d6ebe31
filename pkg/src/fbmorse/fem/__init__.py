"""P1 finite-element oracle for the n = 2 models."""

from .assemble import assemble, dump_matrix_market, local_matrices
from .eigen import EigenResult, solve_lowest
from .mesh import Mesh, MetricMode, mesh_flat_half_torus, mesh_hemisphere
from .oracle import compare_with_engine, convergence_study, fem_index, flat_torus_modes, mesh_for
