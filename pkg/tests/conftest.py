"""Shared test fixtures and independent oracles.

The oracles here deliberately avoid the implementation paths they check:
brute-force dominance scans, Monte Carlo volume estimation, and the
g-integral form of the JZS Bayes factor.
"""

import math

import numpy as np
import pytest
from scipy import integrate


def oracle_front_mask(values: np.ndarray) -> np.ndarray:
    """All-pairs O(n^2) non-dominated mask; first occurrence wins on ties."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    mask = np.ones(n, dtype=bool)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if np.all(values[j] >= values[i]) and np.any(values[j] > values[i]):
                mask[i] = False
                break
            if j < i and np.all(values[j] == values[i]):
                mask[i] = False
                break
    return mask


def mc_hypervolume(
    values: np.ndarray, ref: np.ndarray, n_samples: int, seed: int
) -> tuple[float, float]:
    """Monte Carlo estimate of the dominated volume and its standard error.

    Uniform samples in the bounding box [ref, max(values)]; a sample counts
    when some front point weakly dominates it.
    """
    values = np.asarray(values, dtype=float)
    ref = np.asarray(ref, dtype=float)
    upper = values.max(axis=0)
    box = float(np.prod(upper - ref))
    if box == 0.0:
        return 0.0, 0.0
    rng = np.random.default_rng(seed)
    hits = 0
    chunk = 100_000
    remaining = n_samples
    while remaining > 0:
        m = min(chunk, remaining)
        pts = rng.uniform(ref, upper, size=(m, ref.size))
        dominated = np.zeros(m, dtype=bool)
        for v in values:
            dominated |= np.all(pts <= v, axis=1)
        hits += int(dominated.sum())
        remaining -= m
    p = hits / n_samples
    estimate = box * p
    se = box * math.sqrt(max(p * (1 - p), 1e-12) / n_samples)
    return estimate, se


def jzs_bf10_effect_size_integral(
    t: float, n1: int, n2: int, r_scale: float
) -> float:
    """JZS BF10 by quadrature of the noncentral-t likelihood over the
    Cauchy-distributed effect size.

    Independent numerical route from the implementation's scale-mixture
    integral.  Only trustworthy where scipy's noncentral-t density is
    stable (moderate df, noncentrality within float range).
    """
    from scipy import stats

    n_eff = n1 * n2 / (n1 + n2)
    nu = n1 + n2 - 2
    root_n = math.sqrt(n_eff)

    def integrand(delta):
        nc = delta * root_n
        if abs(nc - t) > 60.0:
            return 0.0  # likelihood underflows far from t
        return float(
            stats.nct.pdf(t, nu, nc) * stats.cauchy.pdf(delta, scale=r_scale)
        )

    split = t / root_n
    left, _ = integrate.quad(
        integrand, -np.inf, split, epsabs=1e-14, epsrel=1e-10, limit=300
    )
    right, _ = integrate.quad(
        integrand, split, np.inf, epsabs=1e-14, epsrel=1e-10, limit=300
    )
    denominator = float(stats.t.pdf(t, nu))
    return (left + right) / denominator


def finite_difference_gradient(fn, theta: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central finite differences of a scalar function."""
    grad = np.empty_like(theta)
    for i in range(theta.size):
        tp = theta.copy()
        tm = theta.copy()
        tp[i] += h
        tm[i] -= h
        grad[i] = (fn(tp) - fn(tm)) / (2 * h)
    return grad


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
