"""Regularized metric and similarity learning with matrix-norm regularizers,
block Rademacher complexities and the resulting generalization bounds."""
from .bounds import BoundReport, b_lambda, example_bound, theorem_bound
from .norms import NormKind, dual_norm, matrix_norm, norm_subgradient, project_norm_ball, sym
from .oracles import CheckResult, khinchin_check, margin_check, ustat_permutation_check
from .pairwise import (Dataset, Model, Task, block_risk, empirical_risk, pair_loss, relation,
                       risk_estimate, score)
from .rademacher import (BlockSet, Empirical, RademacherEstimate, UnitBox, build_blocks,
                         empirical_rademacher, exact_rademacher, rademacher_upper_bound, x_star)
from .solver import FitResult, SolverConfig, fit, objective

__version__ = "0.1.0"
