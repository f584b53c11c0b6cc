"""Wavelet mean-curve estimation for replicate curves.

Thin re-export of the compiled core: transforms, shrinkage, threshold
selection, the average-then-shrink estimators, test functions, panel
simulation and MISE.
"""

from ._core import (
    CoefficientTree,
    denoise,
    forward,
    inverse,
    mise,
    pointwise_average,
    shrink,
    shrink_then_average,
    simulate_panel,
    sure_criterion,
    sure_threshold,
    test_function,
)

__all__ = [
    "CoefficientTree",
    "denoise",
    "forward",
    "inverse",
    "mise",
    "pointwise_average",
    "shrink",
    "shrink_then_average",
    "simulate_panel",
    "sure_criterion",
    "sure_threshold",
    "test_function",
]

__version__ = "0.1.0"
