"""The logistic model: probabilities, likelihood, score, and the two
matrices every pivot is built from.

For a coefficient vector beta and design row x, the success probability is
``p = e^{x'b} / (1 + e^{x'b})``. The estimating function (score) is
``sum_i (y_i - p_i) x_i``; the (mean) information matrix is
``n^{-1} sum_i p_i (1 - p_i) x_i x_i'`` and the sandwich middle matrix is
``n^{-1} sum_i (y_i - p_i)^2 x_i x_i'``.

The numerical kernels accept raw arrays so they can also be evaluated on
hypothetical inputs (e.g. a continuous pseudo-response); :class:`Dataset`
is the validated carrier used by the solver and CLI layers. Coefficient
vectors are plain float arrays throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .errors import DegenerateResponseError, InvalidDataError
from .linalg import symmetrize


@dataclass(frozen=True)
class Dataset:
    """Design matrix plus binary response.

    Invariants enforced at construction: n >= p + 1, finite design entries,
    responses exactly 0 or 1, and a non-constant response vector.
    """

    x: np.ndarray
    y: np.ndarray
    columns: tuple[str, ...] | None = field(default=None)

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.x, dtype=float))
        y = np.asarray(self.y, dtype=float).ravel()
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        n, p = x.shape
        if y.shape[0] != n:
            raise InvalidDataError(f"design has {n} rows but response has {y.shape[0]}")
        if n < p + 1:
            raise InvalidDataError(f"need n >= p + 1 observations, got n={n}, p={p}")
        if not np.all(np.isfinite(x)):
            raise InvalidDataError("design matrix contains non-finite entries")
        if not np.all((y == 0.0) | (y == 1.0)):
            raise InvalidDataError("response entries must all be 0 or 1")
        if np.all(y == y[0]):
            raise DegenerateResponseError("response is constant; the MLE does not exist")
        if self.columns is not None and len(self.columns) != p:
            raise InvalidDataError(f"{len(self.columns)} column names for {p} columns")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]


def predict_prob(beta, x_row) -> float:
    """Success probability in (0, 1) for one design row.

    Overflow-safe for any finite linear predictor (expit evaluates the
    e^z/(1+e^z) form on the negative branch and 1/(1+e^-z) on the
    positive one).
    """
    z = float(np.dot(np.asarray(x_row, dtype=float), np.asarray(beta, dtype=float)))
    return float(expit(z))


def predict_probs(beta, x) -> np.ndarray:
    """Vector of success probabilities for all rows of x."""
    return expit(np.asarray(x, dtype=float) @ np.asarray(beta, dtype=float))


def log_likelihood(beta, x, y) -> float:
    """sum_i [y_i x_i'b - log(1 + e^{x_i'b})], always <= 0 for binary y."""
    z = np.asarray(x, dtype=float) @ np.asarray(beta, dtype=float)
    return float(np.asarray(y, dtype=float) @ z - np.logaddexp(0.0, z).sum())


def score(beta, x, y) -> np.ndarray:
    """Gradient of the log-likelihood: sum_i (y_i - p_i) x_i."""
    x = np.asarray(x, dtype=float)
    return x.T @ (np.asarray(y, dtype=float) - predict_probs(beta, x))


def info_matrix(beta, x) -> np.ndarray:
    """Mean information matrix n^{-1} sum_i w_i x_i x_i', w_i = p_i (1 - p_i).

    The weight is computed as p(1-p) rather than e^z (1+e^z)^{-2}; the two
    are algebraically identical and the former cannot overflow.
    """
    x = np.asarray(x, dtype=float)
    probs = predict_probs(beta, x)
    w = probs * (1.0 - probs)
    return symmetrize(x.T @ (x * w[:, None]) / x.shape[0])


def sandwich_mid(beta, x, y) -> np.ndarray:
    """Sandwich middle matrix n^{-1} sum_i (y_i - p_i)^2 x_i x_i'."""
    x = np.asarray(x, dtype=float)
    r = np.asarray(y, dtype=float) - predict_probs(beta, x)
    s = x * r[:, None]
    return symmetrize(s.T @ s / x.shape[0])
