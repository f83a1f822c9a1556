"""Threshold algorithms for online k-max / k-min search.

Library layout:

- ``core``       domain types and the online threshold algorithm itself
- ``worstcase``  optimal worst-case schedules and competitive ratios
- ``pareto``     consistency-robustness trade-off curves and lambda targets
- ``augmented``  prediction-aware threshold designs (cases I-VI)
- ``instances``  adversarial/synthetic instance generators and data ingestion
- ``learner``    multiplicative-weights selection of the confidence lambda
- ``harness``    windowed experiment pipeline shared by the CLI and scripts
- ``cli``        the ``ksearch`` command-line entry point
"""

from .core import (
    Decision,
    ParetoPoint,
    PriceBounds,
    ProblemKind,
    RunTrace,
    SearchInstance,
    ThresholdSchedule,
    empirical_ratio,
    offline_opt,
    ota_total,
    run_ota,
)
from .errors import (
    ConstructionError,
    DataFormatError,
    DomainError,
    InvalidInputError,
    KSearchError,
)
from .worstcase import (
    WorstCaseSolution,
    solve_alpha_star,
    solve_cr,
    solve_phi_star,
    worst_case_thresholds,
)
from .pareto import (
    FrontierSpec,
    frontier_curve,
    lower_bound,
    lower_bound_max,
    lower_bound_min,
    target_point,
    xi_star,
    zeta_star,
)
from .augmented import (
    AugmentedDesign,
    design,
    design_max,
    design_max_for_target,
    design_min,
    design_min_for_target,
    interval_ratios,
    prediction_ratio,
    ratio_alpha,
    ratio_beta,
)
from .instances import (
    FIVE_YEAR_SAMPLES,
    STRIDE_SAMPLES,
    WINDOW_SAMPLES,
    ExperimentWindow,
    PInstanceSpec,
    PriceSeries,
    adjust_error,
    apply_rho_hard,
    gen_p_instance,
    gen_synthetic_series,
    gen_worst_case_sequence,
    ingest_csv,
    scale_theta,
    sliding_windows,
)
from .learner import (
    LambdaLearner,
    RegretRecord,
    make_learner,
    observe_round,
    regret_curve,
    round_ratios,
    run_learning,
    select_lambda,
)
from .harness import (
    ALGORITHMS,
    CellSummary,
    SweepCell,
    WindowResult,
    build_cells,
    evaluate_windows,
    run_cell,
    run_sweep,
    stress_windows,
    summarize,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "AugmentedDesign",
    "CellSummary",
    "ConstructionError",
    "DataFormatError",
    "Decision",
    "DomainError",
    "ExperimentWindow",
    "FIVE_YEAR_SAMPLES",
    "FrontierSpec",
    "InvalidInputError",
    "KSearchError",
    "LambdaLearner",
    "PInstanceSpec",
    "ParetoPoint",
    "PriceBounds",
    "PriceSeries",
    "ProblemKind",
    "RegretRecord",
    "RunTrace",
    "STRIDE_SAMPLES",
    "SearchInstance",
    "SweepCell",
    "ThresholdSchedule",
    "WINDOW_SAMPLES",
    "WindowResult",
    "WorstCaseSolution",
    "adjust_error",
    "apply_rho_hard",
    "build_cells",
    "design",
    "design_max",
    "design_max_for_target",
    "design_min",
    "design_min_for_target",
    "empirical_ratio",
    "evaluate_windows",
    "frontier_curve",
    "gen_p_instance",
    "gen_synthetic_series",
    "gen_worst_case_sequence",
    "ingest_csv",
    "interval_ratios",
    "lower_bound",
    "lower_bound_max",
    "lower_bound_min",
    "make_learner",
    "observe_round",
    "offline_opt",
    "ota_total",
    "prediction_ratio",
    "ratio_alpha",
    "ratio_beta",
    "regret_curve",
    "round_ratios",
    "run_cell",
    "run_learning",
    "run_ota",
    "run_sweep",
    "scale_theta",
    "select_lambda",
    "sliding_windows",
    "solve_alpha_star",
    "solve_cr",
    "solve_phi_star",
    "stress_windows",
    "summarize",
    "target_point",
    "worst_case_thresholds",
    "xi_star",
    "zeta_star",
    "__version__",
]
