"""Panel regression with unobserved factor structures.

Panels are ``T x n`` float64 arrays (rows are periods, columns are units).
"""

from ._core import (
    PanelFactorError,
    factor_existence_test,
    fit_eup,
    fit_kss,
    opt_dim,
    within_transform,
)

__all__ = [
    "PanelFactorError",
    "factor_existence_test",
    "fit_eup",
    "fit_kss",
    "opt_dim",
    "within_transform",
]
__version__ = "0.1.0"
