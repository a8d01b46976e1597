"""Polynomial least-squares baselines (linear and quadratic in practice)."""

from dataclasses import dataclass

import numpy as np

from .errors import RankDeficient

__all__ = ["PolyModel", "fit_poly", "predict_poly"]


@dataclass
class PolyModel:
    """Least-squares polynomial: coefficients in ascending powers."""

    degree: int
    coefficients: np.ndarray
    residual_sum_squares: float


def fit_poly(x, y, degree):
    """Least-squares fit of a degree-``degree`` polynomial to (x, y) pairs.

    Solved through an orthogonal decomposition of the Vandermonde system
    rather than the normal equations, which keeps the residual-orthogonality
    certificate tight.  Raises RankDeficient when there are not more than
    ``degree`` distinct abscissae.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise ValueError("x and y must have the same length")
    degree = int(degree)
    if degree < 0:
        raise ValueError("degree must be >= 0")
    if np.unique(x).size <= degree:
        raise RankDeficient(
            f"degree {degree} needs more than {degree} distinct x values"
        )
    vander = np.vander(x, degree + 1, increasing=True)
    coeffs, _, rank, _ = np.linalg.lstsq(vander, y, rcond=None)
    if rank < degree + 1:
        raise RankDeficient("Vandermonde system is rank deficient")
    residuals = y - vander @ coeffs
    return PolyModel(
        degree=degree,
        coefficients=coeffs,
        residual_sum_squares=float(residuals @ residuals),
    )


def predict_poly(model, x):
    """Evaluate the polynomial by Horner's scheme; scalar in, scalar out."""
    x = np.asarray(x, dtype=np.float64)
    scalar = x.ndim == 0
    acc = np.zeros_like(x, dtype=np.float64)
    for c in model.coefficients[::-1]:
        acc = acc * x + c
    return float(acc) if scalar else acc
