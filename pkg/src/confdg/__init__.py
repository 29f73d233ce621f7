"""Conforming DG solver for the 2D Poisson problem.

A finite element library built around element-local weak gradients in
Raviart-Thomas spaces: discontinuous piecewise-P_k approximation with the
simple conforming-style bilinear form (grad_w u, grad_w v) and strong
enforcement of Dirichlet boundary conditions.
"""
from .analysis import (ErrorRecord, convergence_rates, energy_error,
                       energy_norm, h1h_norm, l2_error, l2_interp_error,
                       norm_equivalence_probe)
from .assembly import SparseSPDSystem, assemble, export_matrix, stencil_check
from .basis import DGSpace, LagrangeBasis, RTBasis, build_rt_basis, dg_space, interpolate
from .mesh import Mesh, base_mesh, dump_mesh, edge_patch, refine
from .problems import Problem, get_problem, list_problems
from .quadrature import EdgeRule, TriangleRule, edge_rule, triangle_rule
from .solver import (IndefiniteSystemError, NonConvergenceError, SolveReport,
                     SolverError, pcg, solve_spd)
from .study import StudyConfig, StudyError, run_study
from .weakgrad import (LocalWeakGradient, WeakGradientFactory,
                       apply_weak_gradient, build_local_weak_gradient,
                       rt_mass_matrix)

__version__ = "0.1.0"
