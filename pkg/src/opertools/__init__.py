"""Opers on four corners: twisted Wronskians, QQ-systems, many-body Lax
matrices and the dualities between them."""

__version__ = "0.1.0"

from .corners import Corner, CornerKind, parse_corner
from .poly import Poly
from .wronskian import Frame, minor_matrix, full_determinant, twisted_wronskian
from .qqbethe import QQ_ORIENTATION, QQData, extract_Q, qq_residual, bethe_residual
from .lax import LaxModel, lax_trs, lax_tcm, lax_rrs, lax_rcm, wronskian_lax, hamiltonians
from .cmspace import CMPoint, rank_one_residual, mirror_map, limit_check
from .opersolve import SolveConfig, solve_momenta, quantum_classical_check, mirror_check, weyl_check
