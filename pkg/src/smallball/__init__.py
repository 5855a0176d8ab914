"""Small-ball probability bounds for infinite-dimensional stable measures."""

__version__ = "0.1.0"

from ._validation import DomainError, QuadratureError  # noqa: E402
from .results import BoundResult, BoundUnavailable  # noqa: E402
from . import closed_forms, lower, montecarlo, regression, sandwich, spectra, subgauss, univariate, upper_diag  # noqa: E402

__all__ = [
    "BoundResult", "BoundUnavailable", "DomainError", "QuadratureError",
    "closed_forms", "lower", "montecarlo", "regression", "sandwich", "spectra",
    "subgauss", "univariate", "upper_diag",
]
