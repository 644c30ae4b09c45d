"""perflaw: data quality and scaling analysis for sequential interaction data.

The toolkit quantifies how repetitive an interaction corpus is via
Approximate Entropy, fits loss-law and performance-law curves to experiment
run records, and searches layer-count x embedding-width grids for optimal
model configurations, globally or under a parameter budget.
"""

from .apen import (
    ApEnConfig,
    ApEnResult,
    EncodingBoundReport,
    MarkovChain,
    apen_prime,
    compute_apen,
    data_parameter,
    generate_markov,
    markov_apen,
    stationary_distribution,
    verify_encoding_bound,
)
from .dataset import (
    DatasetStats,
    InteractionSequence,
    compute_stats,
    load_sequences,
    sequence_distribution_entropy,
    truncate,
)
from .errors import (
    DataFormatError,
    DataIOError,
    DegenerateSequenceError,
    InfeasibleBudgetError,
    InsufficientDataError,
    NumericError,
    PerflawError,
    ValidationError,
)
from .fitting import (
    FitResult,
    LinearFit,
    RunRecord,
    fit_k,
    fit_loss_law,
    fit_perf_law,
    least_squares,
    linear_fit,
    r_squared,
)
from .laws import (
    LossLawParams,
    MetricKind,
    PerfLawParams,
    eval_loss_law,
    eval_perf_law,
    grad_loss_law,
    grad_perf_law,
    loss_to_performance,
)
from .optimize import (
    OptResult,
    PotentialEntry,
    PotentialReport,
    SearchSpace,
    constrained_optimum,
    global_optimum,
    scaling_potential,
)
from .runstore import RunArchive, append_runs, load_runs

__version__ = "0.1.0"

__all__ = [
    "ApEnConfig",
    "ApEnResult",
    "DatasetStats",
    "DataFormatError",
    "DataIOError",
    "DegenerateSequenceError",
    "EncodingBoundReport",
    "FitResult",
    "InfeasibleBudgetError",
    "InsufficientDataError",
    "InteractionSequence",
    "LinearFit",
    "LossLawParams",
    "MarkovChain",
    "MetricKind",
    "NumericError",
    "OptResult",
    "PerfLawParams",
    "PerflawError",
    "PotentialEntry",
    "PotentialReport",
    "RunArchive",
    "RunRecord",
    "SearchSpace",
    "ValidationError",
    "apen_prime",
    "append_runs",
    "compute_apen",
    "compute_stats",
    "constrained_optimum",
    "data_parameter",
    "eval_loss_law",
    "eval_perf_law",
    "fit_k",
    "fit_loss_law",
    "fit_perf_law",
    "generate_markov",
    "global_optimum",
    "grad_loss_law",
    "grad_perf_law",
    "least_squares",
    "linear_fit",
    "load_runs",
    "load_sequences",
    "loss_to_performance",
    "markov_apen",
    "r_squared",
    "scaling_potential",
    "sequence_distribution_entropy",
    "stationary_distribution",
    "truncate",
    "verify_encoding_bound",
]
