"""Recovery-robust solution sets for uncertain bi-objective knapsacks."""

from .model import (
    KnapsackInstance,
    ObjectiveVector,
    ScenarioCosts,
    ScenarioSet,
    Solution,
    StructuralError,
    dominates,
    evaluate,
    hamming,
    is_feasible,
    read_scenario_set,
    write_scenario_set,
)
from .frontier import (
    LambdaVector,
    NondominatedFront,
    OptimalValueTable,
    PreconditionError,
    ReferencePoint,
    UnsupportedDimensionError,
    efficient_sample,
    pareto_front,
    reference_point,
    solve_chebyshev,
    solve_weighted_sum,
)
from .milp import (
    Constraint,
    MilpModel,
    MilpSolution,
    SolverConfig,
    SolverLimitError,
    brute_force,
    export_lp,
    parse_lp,
    solve_exact,
)
from .recovery import (
    RecEffConfig,
    RobustPoint,
    RobustSet,
    generate_robust_set,
    solve_center_fixed,
    solve_center_opt,
    solve_median_fixed,
    solve_median_opt,
    total_recovery_cost,
    write_robust_csv,
)
from .bench import (
    GenSpec,
    compare_couplings,
    epsilon_sweep,
    generate,
    lambda_grid,
    nominal_projection,
    percent_deviation,
)

__version__ = "0.1.0"
