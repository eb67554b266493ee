"""Early-stopped gradient descent, the nu-method and Nesterov acceleration for kernel least squares."""

from .errors import DataError, DomainError, FilterOverflowError, NumericError, StepSizeError
from .filters import GradientDescent, Nesterov, NuMethod, default_method, filter_trace
from .solvers import predict, run, run_gd, run_heavy_ball, run_nesterov, spectral_solution
from .spectral import EigenDecomposition, apply_filter, sym_eig

__all__ = [
    "DataError", "DomainError", "FilterOverflowError", "NumericError", "StepSizeError",
    "GradientDescent", "Nesterov", "NuMethod", "default_method", "filter_trace",
    "predict", "run", "run_gd", "run_heavy_ball", "run_nesterov", "spectral_solution",
    "EigenDecomposition", "apply_filter", "sym_eig",
]
