"""Volatility-model estimation and entropy analysis for financial returns.

The package fits GARCH(1,1), IGARCH(1,1) and FIGARCH(1,d,1) models to
log-return series by constrained maximum likelihood, simulates those
processes, and measures Shannon/Renyi/Tsallis entropies of return
distributions over equidistant-cell histograms.
"""

from .errors import (
    AutocorrUndefinedError,
    BoundaryError,
    DataQualityError,
    DegenerateSupportError,
    DomainError,
    DuplicateDateError,
    EstimationError,
    InfeasibleParamsError,
    InsufficientDataError,
    ParseError,
    VolentropyError,
)
from .series import PricePoint, ReturnSeries, load_prices, load_returns, to_log_returns
from .models import (
    DEFAULT_TRUNCATION,
    FracWeights,
    ModelFamily,
    ParamVector,
    VariancePath,
    frac_weights,
    log_likelihood,
    student_logpdf,
    validate_params,
    variance_path,
)
from .estimation import (
    FitConfig,
    FitResult,
    PersistenceCheck,
    StdErrReport,
    fit,
    param_names,
    persistence_check,
    standard_errors,
    transform_from_unconstrained,
    transform_to_unconstrained,
)
from .simulation import SimConfig, simulate_path, squared_autocorr
from .entropy import (
    DEFAULT_ORDER_GRID,
    EntropyReport,
    FiniteVarianceWarning,
    Histogram,
    build_histogram,
    entropy_report,
    renyi,
    shannon,
    tsallis,
)

__version__ = "0.1.0"
