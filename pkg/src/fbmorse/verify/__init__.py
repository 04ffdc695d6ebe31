"""Verification suites: identities, inequalities and eigenvalue bounds."""

from .bounds import (
    CharPolyResult,
    alpha_H,
    char_poly,
    dichotomy_scan,
    lambda1_bound_cmc,
    lambda1_bound_minimal,
    p_H,
)
from .identities import check_boundary_identities, check_position_identities, simons_residual
from .inequalities import alencar_inequality, kato_inequality_check
from .suite import SUITES, run_suites
