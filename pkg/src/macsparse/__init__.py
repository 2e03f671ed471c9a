"""Edge selection maximizing algebraic connectivity, with duality-gap certificates."""

from ._accel import HAS_NUMBA
from .baselines import DisconnectedGraphError, greedy_esp, naive_topk, reduced_logdet
from .fiedler import FiedlerConvergenceError, FiedlerPair, find_fiedler
from .g2o import G2OFormatError, PoseGraphFile, parse_g2o, to_problem, write_g2o
from .graph import (
    SparseLaplacian,
    SparsificationProblem,
    WeightedEdge,
    build_laplacian,
    count_components,
    edge_quadratic_form,
    laplacian_at,
)
from .rounding import best_of_madow, evaluate_selection, round_madow, round_nearest
from .solver import (
    IterationRecord,
    SolveResult,
    dual_bound,
    frank_wolfe,
    mac,
    solve_direction,
    supergradient,
)

__version__ = "0.1.0"
