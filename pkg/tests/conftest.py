"""Shared test helpers: random SPD matrices, random datasets, and the
smoothed-pivot distributional check reused by the acceptance suite."""

from __future__ import annotations

import numpy as np
import pytest

from pebble_logit import Dataset, RandomStream, SmoothingConfig, fit_mle, pivot_smoothed
from pebble_logit.errors import SeparationError
from pebble_logit.linalg import mvn_diag_sample
from pebble_logit.pivots import default_bn, default_d_var
from pebble_logit.simulation import Scenario, generate_dataset


def random_spd(rng: np.random.Generator, dim: int, cond: float = 100.0) -> np.ndarray:
    """Random symmetric positive definite matrix with given condition number."""
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    eigs = np.geomspace(1.0, cond, dim)
    return (q * eigs) @ q.T


def random_dataset(rng: np.random.Generator, n: int, p: int, scale: float = 1.0) -> Dataset:
    """Random non-degenerate logistic dataset (redraws constant responses)."""
    while True:
        x = rng.standard_normal((n, p)) * scale
        beta = rng.standard_normal(p)
        probs = 1.0 / (1.0 + np.exp(-(x @ beta)))
        y = (rng.random(n) < probs).astype(float)
        if 0.0 < y.sum() < n:
            return Dataset(x=x, y=y)


def grid_mle_1d(x: np.ndarray, y: np.ndarray, lo=-10.0, hi=10.0, step=1e-4) -> float:
    """Brute-force 1-d MLE: maximize the log-likelihood on a grid, then
    refine once around the best point."""
    grid = np.arange(lo, hi + step, step)
    z = np.outer(x.ravel(), grid)
    ll = y @ z - np.logaddexp(0.0, z).sum(axis=0)
    best = grid[np.argmax(ll)]
    fine = np.arange(best - step, best + step, step / 100)
    zf = np.outer(x.ravel(), fine)
    llf = y @ zf - np.logaddexp(0.0, zf).sum(axis=0)
    return float(fine[np.argmax(llf)])


def smoothed_pivot_sample(n=200, p=2, datasets=2000, seed=5150) -> np.ndarray:
    """Coordinate pivots at the true beta over many simulated datasets,
    one jitter draw each, with the default smoothing."""
    scn = Scenario(n=n, p=p, reps=1, boot=100, alpha=0.1, seed=seed)
    master = RandomStream(seed)
    bn = default_bn(n, p)
    d = default_d_var(p)
    pivots = []
    for e in range(datasets):
        exp = master.derive("experiment", e)
        data, beta_true, _ = generate_dataset(scn, e, exp)
        try:
            fitted = fit_mle(data)
        except SeparationError:
            continue
        z = mvn_diag_sample(exp.derive("smooth", 0), d)
        cfg = SmoothingConfig(bn=bn, d_var=d, z_original=z)
        pivots.append(pivot_smoothed(fitted, beta_true, n, cfg).coord_pivots)
    return np.array(pivots)


@pytest.fixture(scope="session")
def pivot_sanity_sample() -> np.ndarray:
    return smoothed_pivot_sample()
