"""Curvature, duality and Osserman classification of four-dimensional Walker metrics."""

__version__ = "0.1.0"

from .curvature import (  # noqa: E402
    connection,
    einstein_residuals,
    ricci_scalar,
    riemann,
    weyl,
)
from .duality import classify_wplus, frame, selfdual_residuals, wpm_matrix  # noqa: E402
from .expr import ScalarField, diff, evaluate, parse  # noqa: E402
from .jacobi import jacobi_operator, jordan_classify, osserman_scan  # noqa: E402
from .metric import WalkerMetric  # noqa: E402

__all__ = [
    "ScalarField", "parse", "diff", "evaluate",
    "WalkerMetric",
    "connection", "riemann", "ricci_scalar", "weyl", "einstein_residuals",
    "frame", "wpm_matrix", "selfdual_residuals", "classify_wplus",
    "jacobi_operator", "jordan_classify", "osserman_scan",
]
