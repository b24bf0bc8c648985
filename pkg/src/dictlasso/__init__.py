"""Dictionary-penalized least squares: solvers, theory, and experiments.

The package solves min 0.5 * ||phi theta - c||^2 + lam * ||d theta||_1,
reduces it to an equivalent problem on the sparse part of theta, evaluates
the deterministic error bound for the estimate, generates the standard
penalty dictionaries, and runs reproducible simulation studies.
"""

__version__ = "0.1.0"

from .dictionaries import (
    DictionarySpec,
    complete_graph_dictionary,
    conditioned_random_dictionary,
    difference_matrix_1d,
    fused_lasso_dictionary,
    grid_tv_dictionary,
    identity_dictionary,
    make_dictionary,
    random_graph_dictionary,
)
from .estimator import DictionaryLasso
from .exceptions import (
    AllZeroMatrix,
    BudgetExceeded,
    DictLassoError,
    NotOrthonormal,
    SchemaError,
    SingularGram,
    SingularSubproblem,
    ZeroWeight,
)
from .experiments import (
    GraphConfig,
    GraphRow,
    RecoveryConfig,
    RecoveryRow,
    SweepConfig,
    SweepRow,
    default_kappa_grid,
    emit_outputs,
    paper_scale_config,
    plot_rows,
    read_table,
    run_condition_sweep,
    run_experiment,
    run_graph_kappa_sweep,
    run_recovery_sweep,
    write_table,
)
from .io import load_bundle, save_bundle
from .linalg import CompactSvd, compact_svd, condition_number, least_squares, orthonormal_complement
from .simplify import (
    DictionaryProblem,
    GroundTruth,
    SimplifiedForm,
    assemble_theta,
    recover_alpha,
    simplify,
)
from .solver import (
    SolveOptions,
    SolveResult,
    objective,
    oracle_lambda,
    soft_threshold,
    solve_full,
    solve_simplified,
)
from .theory import (
    RestrictedExtremes,
    TheoryReport,
    cone_check,
    default_chunk_size,
    drip_constant,
    energy_check,
    restricted_extremes,
    support_partition,
    tail_chunk_check,
    theorem1_report,
)

__all__ = [
    "__version__",
    "AllZeroMatrix",
    "BudgetExceeded",
    "CompactSvd",
    "DictLassoError",
    "DictionaryLasso",
    "DictionaryProblem",
    "DictionarySpec",
    "GraphConfig",
    "GraphRow",
    "GroundTruth",
    "NotOrthonormal",
    "RecoveryConfig",
    "RecoveryRow",
    "RestrictedExtremes",
    "SchemaError",
    "SimplifiedForm",
    "SingularGram",
    "SingularSubproblem",
    "SolveOptions",
    "SolveResult",
    "SweepConfig",
    "SweepRow",
    "TheoryReport",
    "ZeroWeight",
    "assemble_theta",
    "compact_svd",
    "complete_graph_dictionary",
    "condition_number",
    "conditioned_random_dictionary",
    "cone_check",
    "default_chunk_size",
    "default_kappa_grid",
    "difference_matrix_1d",
    "drip_constant",
    "emit_outputs",
    "energy_check",
    "fused_lasso_dictionary",
    "grid_tv_dictionary",
    "identity_dictionary",
    "least_squares",
    "load_bundle",
    "make_dictionary",
    "objective",
    "oracle_lambda",
    "orthonormal_complement",
    "paper_scale_config",
    "plot_rows",
    "random_graph_dictionary",
    "read_table",
    "recover_alpha",
    "restricted_extremes",
    "run_condition_sweep",
    "run_experiment",
    "run_graph_kappa_sweep",
    "run_recovery_sweep",
    "save_bundle",
    "simplify",
    "soft_threshold",
    "solve_full",
    "solve_simplified",
    "support_partition",
    "tail_chunk_check",
    "theorem1_report",
    "write_table",
]
