"""Gaussian-process surrogates over the design space.

One independent GP per objective, Matern 5/2 kernel with per-dimension
lengthscales.  Targets are standardized per objective before fitting and
predictions are mapped back.  Hyperparameters maximize the log marginal
likelihood by projected gradient ascent on log-parameters with a
backtracking line search, restarted from 8 log-uniform draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular

from .errors import InsufficientData, NumericalFailure

SQRT5 = math.sqrt(5.0)

# log-space bounds enforced during and after fitting
LENGTHSCALE_BOUNDS = (1e-3, 1e3)
SIGNAL_VARIANCE_BOUNDS = (1e-8, 1e3)
NOISE_VARIANCE_BOUNDS = (1e-8, 10.0)

JITTERS = (0.0, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4)

N_RESTARTS = 8
MAX_ASCENT_STEPS = 80
GRAD_TOL = 1e-4
MIN_TARGET_STD = 1e-6


@dataclass(frozen=True)
class GPHyperparams:
    """Kernel and noise hyperparameters of one objective's GP."""

    lengthscales: tuple[float, ...]
    signal_variance: float
    noise_variance: float

    def to_theta(self) -> np.ndarray:
        return np.log(
            np.concatenate(
                [
                    np.asarray(self.lengthscales, dtype=float),
                    [self.signal_variance, self.noise_variance],
                ]
            )
        )

    @classmethod
    def from_theta(cls, theta: np.ndarray) -> "GPHyperparams":
        values = np.exp(np.asarray(theta, dtype=float))
        return cls(
            lengthscales=tuple(values[:-2]),
            signal_variance=float(values[-2]),
            noise_variance=float(values[-1]),
        )


def matern52(X1: np.ndarray, X2: np.ndarray, lengthscales, signal_variance) -> np.ndarray:
    """Matern 5/2 kernel matrix with ARD lengthscales; k(x, x) = signal_variance."""
    ell = np.asarray(lengthscales, dtype=float)
    diff = (X1[:, None, :] - X2[None, :, :]) / ell
    r = np.sqrt(np.maximum(np.sum(diff * diff, axis=-1), 0.0))
    s = SQRT5 * r
    return signal_variance * (1.0 + s + s * s / 3.0) * np.exp(-s)


def _theta_bounds(n_dims: int) -> tuple[np.ndarray, np.ndarray]:
    lo = np.log(
        np.concatenate(
            [
                np.full(n_dims, LENGTHSCALE_BOUNDS[0]),
                [SIGNAL_VARIANCE_BOUNDS[0], NOISE_VARIANCE_BOUNDS[0]],
            ]
        )
    )
    hi = np.log(
        np.concatenate(
            [
                np.full(n_dims, LENGTHSCALE_BOUNDS[1]),
                [SIGNAL_VARIANCE_BOUNDS[1], NOISE_VARIANCE_BOUNDS[1]],
            ]
        )
    )
    return lo, hi


def log_marginal_likelihood(
    theta: np.ndarray, X: np.ndarray, y: np.ndarray, with_grad: bool = True
):
    """Log marginal likelihood of the data under theta, plus its gradient.

    ``theta`` stacks the log lengthscales (one per design dimension), the
    log signal variance and the log noise variance.  Returns ``(lml, grad)``
    or ``(lml, None)`` when ``with_grad`` is false.  No jitter is applied:
    a non-factorizable kernel matrix raises :class:`NumericalFailure`.
    """
    X = np.asarray(X, dtype=float)
    diff = X[:, None, :] - X[None, :, :]
    return _lml(theta, diff * diff, np.asarray(y, dtype=float), with_grad)


def _lml(theta: np.ndarray, diffsq: np.ndarray, y: np.ndarray, with_grad: bool):
    """Core LML on a precomputed (n, n, d) squared-difference tensor."""
    n, _, d = diffsq.shape
    ell2 = np.exp(2.0 * theta[:d])
    sf2 = math.exp(theta[d])
    sn2 = math.exp(theta[d + 1])

    r2 = diffsq @ (1.0 / ell2)
    s = SQRT5 * np.sqrt(np.maximum(r2, 0.0))
    expn = np.exp(-s)
    Kf = sf2 * (1.0 + s + s * s / 3.0) * expn
    K = Kf + sn2 * np.eye(n)

    try:
        factor = cho_factor(K, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("kernel matrix not positive definite") from exc
    alpha = cho_solve(factor, y)
    lml = (
        -0.5 * float(y @ alpha)
        - float(np.sum(np.log(np.diag(factor[0]))))
        - 0.5 * n * math.log(2.0 * math.pi)
    )
    if not with_grad:
        return lml, None

    Kinv = cho_solve(factor, np.eye(n))
    A = np.outer(alpha, alpha) - Kinv
    # shared factor of the lengthscale derivatives of the Matern 5/2 kernel
    AE = A * (sf2 * expn * (1.0 + s) * (5.0 / 3.0))
    grad = np.empty(d + 2)
    grad[:d] = 0.5 * np.einsum("ij,ijk->k", AE, diffsq) / ell2
    grad[d] = 0.5 * float(np.sum(A * Kf))
    grad[d + 1] = 0.5 * float(np.trace(A)) * sn2
    return lml, grad


def _ascend(
    theta0: np.ndarray, diffsq: np.ndarray, y: np.ndarray
) -> tuple[float, np.ndarray]:
    """Projected gradient ascent with a backtracking line search."""
    lo, hi = _theta_bounds(diffsq.shape[2])
    theta = np.clip(theta0, lo, hi)
    try:
        f, g = _lml(theta, diffsq, y, True)
    except NumericalFailure:
        return -np.inf, theta
    step = 0.1
    for _ in range(MAX_ASCENT_STEPS):
        if np.max(np.abs(g)) < GRAD_TOL:
            break
        accepted = False
        while step >= 1e-10:
            cand = np.clip(theta + step * g, lo, hi)
            direction = cand - theta
            if not np.any(direction):
                break
            try:
                f_cand, _ = _lml(cand, diffsq, y, False)
            except NumericalFailure:
                step *= 0.5
                continue
            if f_cand > f + 1e-4 * float(g @ direction):
                theta = cand
                f, g = _lml(theta, diffsq, y, True)
                step *= 2.0
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
    return f, theta


@dataclass(frozen=True)
class _FittedGP:
    """Per-objective fitted state, in standardized target space."""

    hyperparams: GPHyperparams
    chol: np.ndarray  # lower Cholesky factor of K + noise + jitter
    alpha: np.ndarray
    target_mean: float
    target_std: float
    jitter: float


@dataclass(frozen=True)
class SurrogateModel:
    """Independent per-objective GPs sharing the training inputs."""

    X: np.ndarray  # (n, d)
    Y: np.ndarray  # (n, k) normalized objectives
    gps: tuple[_FittedGP, ...]

    @property
    def n_objectives(self) -> int:
        return len(self.gps)

    def hyperparams(self) -> list[GPHyperparams]:
        return [gp.hyperparams for gp in self.gps]

    def export_record(self) -> dict:
        """Fitted hyperparameters for session export, one entry per objective."""
        return {
            "objectives": [
                {
                    "lengthscales": list(gp.hyperparams.lengthscales),
                    "signal_variance": gp.hyperparams.signal_variance,
                    "noise_variance": gp.hyperparams.noise_variance,
                    "target_mean": gp.target_mean,
                    "target_std": gp.target_std,
                    "jitter": gp.jitter,
                }
                for gp in self.gps
            ]
        }

    @classmethod
    def from_hyperparams(
        cls, X, Y, hyperparams: Sequence[GPHyperparams]
    ) -> "SurrogateModel":
        """Build a model with fixed hyperparameters in raw target space."""
        X = np.asarray(X, dtype=float)
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        if Y.shape[0] != X.shape[0]:
            Y = Y.T
        gps = [
            _finalize_gp(X, Y[:, j], hp, mean=0.0, std=1.0)
            for j, hp in enumerate(hyperparams)
        ]
        return cls(X=X, Y=Y, gps=tuple(gps))


def _chol_with_jitter(K: np.ndarray) -> tuple[np.ndarray, float]:
    for jitter in JITTERS:
        try:
            L = np.linalg.cholesky(K + jitter * np.eye(K.shape[0]))
            return L, jitter
        except np.linalg.LinAlgError:
            continue
    raise NumericalFailure(
        f"kernel factorization failed even at jitter {JITTERS[-1]}"
    )


def _finalize_gp(
    X: np.ndarray, y_raw: np.ndarray, hp: GPHyperparams, mean: float, std: float
) -> _FittedGP:
    y = (y_raw - mean) / std
    K = matern52(X, X, hp.lengthscales, hp.signal_variance)
    K[np.diag_indices_from(K)] += hp.noise_variance
    L, jitter = _chol_with_jitter(K)
    alpha = solve_triangular(
        L.T, solve_triangular(L, y, lower=True), lower=False
    )
    return _FittedGP(
        hyperparams=hp,
        chol=L,
        alpha=alpha,
        target_mean=mean,
        target_std=std,
        jitter=jitter,
    )


def fit(history, seed: int = 0) -> SurrogateModel:
    """Fit one GP per objective on (design, objectives) history.

    ``history`` is a list of pairs whose elements expose ``as_tuple`` (or
    are plain sequences), or a pair of arrays (X, Y).

    Raises:
        InsufficientData: fewer than 2 observations.
        NumericalFailure: factorization fails even at maximum jitter.
    """
    X, Y = _history_arrays(history)
    n, d = X.shape
    if n < 2:
        raise InsufficientData(f"need at least 2 observations, got {n}")

    rng = np.random.default_rng(seed)
    diff = X[:, None, :] - X[None, :, :]
    diffsq = diff * diff
    gps = []
    for j in range(Y.shape[1]):
        y_raw = Y[:, j]
        mean = float(np.mean(y_raw))
        std = max(float(np.std(y_raw)), MIN_TARGET_STD)
        y = (y_raw - mean) / std

        best_f, best_theta = -np.inf, None
        for _ in range(N_RESTARTS):
            ell0 = np.exp(rng.uniform(np.log(0.1), np.log(3.0), size=d))
            sf0 = float(np.exp(rng.uniform(np.log(0.2), np.log(5.0))))
            sn0 = float(np.exp(rng.uniform(np.log(1e-4), np.log(0.3))))
            theta0 = GPHyperparams(tuple(ell0), sf0, sn0).to_theta()
            f, theta = _ascend(theta0, diffsq, y)
            if f > best_f:
                best_f, best_theta = f, theta
        if best_theta is None:
            raise NumericalFailure("all hyperparameter restarts failed")
        hp = GPHyperparams.from_theta(best_theta)
        gps.append(_finalize_gp(X, y_raw, hp, mean, std))
    return SurrogateModel(X=X, Y=Y, gps=tuple(gps))


def _history_arrays(history) -> tuple[np.ndarray, np.ndarray]:
    """Accepts a list of (design, objectives) pairs or an (X, Y) array pair."""
    if (
        isinstance(history, tuple)
        and len(history) == 2
        and isinstance(history[0], np.ndarray)
    ):
        X, Y = history
        return np.asarray(X, dtype=float), np.atleast_2d(np.asarray(Y, dtype=float))
    xs, ys = [], []
    for design, obj in history:
        xs.append(
            design.as_tuple() if hasattr(design, "as_tuple") else tuple(design)
        )
        ys.append(obj.as_tuple() if hasattr(obj, "as_tuple") else tuple(obj))
    return np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)


def posterior(model: SurrogateModel, X):
    """Exact GP posterior of the latent function at the query points.

    Returns ``(mean, variance, covariances)`` with mean and variance of
    shape (m, n_objectives) and one m-by-m covariance per objective, all in
    the normalized objective units.  Variances are clipped at 0 from below.
    """
    Xq = np.atleast_2d(np.asarray(X, dtype=float))
    m = Xq.shape[0]
    k = model.n_objectives
    mean = np.empty((m, k))
    var = np.empty((m, k))
    covs = []
    for j, gp in enumerate(model.gps):
        hp = gp.hyperparams
        Ks = matern52(Xq, model.X, hp.lengthscales, hp.signal_variance)
        Kss = matern52(Xq, Xq, hp.lengthscales, hp.signal_variance)
        v = solve_triangular(gp.chol, Ks.T, lower=True)
        cov = Kss - v.T @ v
        cov = 0.5 * (cov + cov.T)
        mu = Ks @ gp.alpha
        mean[:, j] = mu * gp.target_std + gp.target_mean
        var[:, j] = np.clip(np.diag(cov), 0.0, None) * gp.target_std**2
        covs.append(cov * gp.target_std**2)
    return mean, var, covs


def posterior_mean_var(model: SurrogateModel, X) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and variance only; cheap for large candidate batches."""
    Xq = np.atleast_2d(np.asarray(X, dtype=float))
    m = Xq.shape[0]
    k = model.n_objectives
    mean = np.empty((m, k))
    var = np.empty((m, k))
    for j, gp in enumerate(model.gps):
        hp = gp.hyperparams
        Ks = matern52(Xq, model.X, hp.lengthscales, hp.signal_variance)
        v = solve_triangular(gp.chol, Ks.T, lower=True)
        mu = Ks @ gp.alpha
        mean[:, j] = mu * gp.target_std + gp.target_mean
        var[:, j] = (
            np.clip(hp.signal_variance - np.sum(v * v, axis=0), 0.0, None)
            * gp.target_std**2
        )
    return mean, var


def sample_posterior(
    model: SurrogateModel, X, n_samples: int, seed
) -> np.ndarray:
    """Joint posterior draws, shape (n_samples, m, n_objectives).

    Per objective the draw is jointly Gaussian over the m query points via
    an eigendecomposition of the posterior covariance; deterministic for a
    given seed.
    """
    mean, _, covs = posterior(model, X)
    m, k = mean.shape
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n_samples, m, k))
    draws = np.empty((n_samples, m, k))
    for j, cov in enumerate(covs):
        w, U = np.linalg.eigh(cov)
        if np.min(w) < -1e-6 * max(1.0, float(np.max(np.abs(w)))):
            raise NumericalFailure("posterior covariance strongly indefinite")
        factor = U * np.sqrt(np.clip(w, 0.0, None))
        draws[:, :, j] = mean[None, :, j] + z[:, :, j] @ factor.T
    return draws
