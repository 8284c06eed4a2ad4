"""Multi-label class balancing by optimizing augmentation counts per unique label combination."""
from .errors import (
    BalancingError,
    ConsistencyError,
    DimensionError,
    DomainError,
    FormatError,
    InfeasibleError,
    InputError,
    SearchSpaceTooLarge,
)
from .kernels import BACKEND
from .model import BalancingProblem, BalancingSolution, ObjectiveConfig, RecordTable, feasible_box, group_records
from .objective import class_totals, growth_variance_term, imbalance_term, objective
from .plan import AugmentationPlan, AugmentationRecipe, expand_plan, verify_plan
from .solver import SolverSettings, annealing_solve, brute_force_solve, local_search_solve, solve

__version__ = "0.1.0"
