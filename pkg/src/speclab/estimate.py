"""Autocovariance and series estimators, class projection, likelihoods, schedules."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import nnls

from .covariance import toeplitz
from .errors import ArgumentError, ConditioningError, DomainError, NumericError
from .simulate import PeriodogramData, SamplePath
from .spectra import (
    TWO_PI,
    SmoothnessClassSpec,
    SpectralModel,
    class_membership,
    combine,
    density_grid,
    eval_density,
    sobolev_norm,
    sup_distance,
)


# --- schedules -------------------------------------------------------------------

def _floor_root(n: int, power: float) -> int:
    """Largest integer t with t**power <= n, robust to rounding in n**(1/power)."""
    t = int(math.floor(n ** (1.0 / power)))
    while (t + 1) ** power <= n * (1 + 1e-12):
        t += 1
    while t > 0 and t ** power > n * (1 + 1e-12):
        t -= 1
    return t


@dataclass(frozen=True)
class ScheduleConfig:
    alpha: float
    beta: float

    def __post_init__(self):
        if not 0.5 < self.beta < self.alpha:
            raise ArgumentError(f"need 1/2 < beta < alpha, got beta={self.beta}, alpha={self.alpha}")

    @property
    def gamma_rate(self) -> float:
        return (self.alpha - 0.5) / (2.0 * (2.0 * self.alpha + 1.0))

    def kappa(self, n: int) -> float:
        return n ** -self.gamma_rate

    @staticmethod
    def r_split(n: int) -> int:
        return 2 * int(math.floor(math.log(n) / 2.0)) + 1

    @staticmethod
    def r_upper(n: int) -> int:
        return 2 * int(math.floor(math.log(n / 2.0)))

    def m_split(self, n: int) -> int:
        return (n - self.r_split(n)) // 2

    def n_trunc(self, n: int) -> int:
        return _floor_root(n, 2.0 * self.alpha + 1.0)


@dataclass(frozen=True)
class ScheduleValues:
    n: int
    alpha: float
    beta: float
    gamma_rate: float
    kappa: float
    r_split: int
    r_upper: int
    m_split: int
    n_trunc: int
    upper_size: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def compute_schedule(n: int, alpha: float, beta: float) -> ScheduleValues:
    if int(n) != n or n < 3 or n % 2 == 0:
        raise ArgumentError(f"schedule needs odd n >= 3, got {n}")
    cfg = ScheduleConfig(alpha, beta)
    r_split, r_upper = cfg.r_split(n), cfg.r_upper(n)
    return ScheduleValues(int(n), alpha, beta, cfg.gamma_rate, cfg.kappa(n), r_split, r_upper,
                          (n - r_split) // 2, cfg.n_trunc(n), n + r_upper)


@dataclass(frozen=True)
class NeighborhoodSpec:
    center: SpectralModel
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ArgumentError("neighborhood radius must be positive")

    def distance(self, f: SpectralModel, grid_points: int = 4096) -> float:
        diff = combine([f, self.center], [1.0, -1.0])
        return sup_distance(f, self.center, grid_points) + math.sqrt(sobolev_norm(diff, 0.5)[1])

    def contains(self, f: SpectralModel, grid_points: int = 4096) -> bool:
        return self.distance(f, grid_points) <= self.radius


# --- estimators -----------------------------------------------------------------

def empirical_autocov(path: SamplePath, max_lag: int) -> np.ndarray:
    y = path.values
    n = y.size
    if max_lag >= n or max_lag < 0:
        raise ArgumentError(f"max_lag must lie in [0, n-1], got {max_lag} for n={n}")
    return np.array([y[:n - k] @ y[k:] / (n - k) for k in range(max_lag + 1)])


def autocov_batch(Y: np.ndarray, max_lag: int) -> np.ndarray:
    """Row-wise unbiased autocovariances, shape (trials, max_lag + 1)."""
    n = Y.shape[1]
    if max_lag >= n:
        raise ArgumentError("max_lag must be below n")
    return np.stack([np.einsum("ij,ij->i", Y[:, :n - k], Y[:, k:]) / (n - k)
                     for k in range(max_lag + 1)], axis=1)


def series_estimator(path: SamplePath, schedule: ScheduleConfig, bigM: float | None = None) -> SpectralModel:
    n = path.n
    if n < 3:
        raise ArgumentError("series estimator needs n >= 3")
    K = min(schedule.n_trunc(n), n - 1)
    return SpectralModel(empirical_autocov(path, K), schedule.alpha, bigM,
                         f"series(n={n},K={K})")


def sobolev_distance_sq(a, b, s: float) -> float:
    """||f_a - f_b||^2_{2,s} from two coefficient sequences."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    size = max(a.size, b.size)
    d = np.zeros(size)
    d[:a.size] += a
    d[:b.size] -= b
    k = np.arange(1, size, dtype=float)
    return float(d[0] ** 2 + 2.0 * np.sum(k ** (2.0 * s) * d[1:] ** 2))


# --- projection onto the class ---------------------------------------------------------

def _weights(d: int, s: float) -> np.ndarray:
    k = np.arange(d, dtype=float)
    w = 2.0 * k ** (2.0 * s)
    w[0] = 1.0
    return w


def ellipsoid_projection(x, bigM, alpha, beta, tol=1e-10):
    """Nearest point (W^beta metric) of {sum w_alpha g^2 <= M}: g_k = x_k / (1 + mu r_k)."""
    x = np.asarray(x, dtype=float)
    wa = _weights(x.size, alpha)
    ratio = wa / _weights(x.size, beta)

    def norm_at(mu):
        return float(np.sum(wa * (x / (1.0 + mu * ratio)) ** 2))

    if norm_at(0.0) <= bigM:
        return x.copy(), 0.0
    lo, hi = 0.0, 1.0
    while norm_at(hi) > bigM:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise NumericError("ellipsoid multiplier diverged", {"norm": norm_at(0.0), "M": bigM})
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if norm_at(mid) > bigM:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * tol * max(hi, 1e-300) or abs(norm_at(hi) - bigM) <= tol * tol * bigM:
            break
    return x / (1.0 + hi * ratio), hi


def _positivity_rows(d: int, grid_points: int) -> np.ndarray:
    omega = np.abs(-math.pi + TWO_PI * np.arange(grid_points) / grid_points)
    omega = np.unique(omega)
    C = 2.0 * np.cos(np.multiply.outer(omega, np.arange(d)))
    C[:, 0] = 1.0
    return C / TWO_PI


def polytope_projection(x, C, b, w):
    """Nearest point in metric diag(w) of {g : C g >= b}, by least-distance programming.

    With h = sqrt(w) g the problem is min ||u|| s.t. E u >= r, E = C / sqrt(w),
    r = b - C x; solved through the Lawson-Hanson NNLS dual.
    """
    r = b - C @ x
    if np.all(r <= 0):
        return x.copy()
    sw = np.sqrt(w)
    E = C / sw[None, :]
    G = np.vstack([E.T, r[None, :]])
    e = np.zeros(G.shape[0])
    e[-1] = 1.0
    u, _ = nnls(G, e, maxiter=50 * G.shape[1])
    res = G @ u - e
    if abs(res[-1]) < 1e-300 or np.linalg.norm(res) < 1e-14:
        raise NumericError("positivity set is empty", {})
    step = -res[:-1] / res[-1]
    return x + step / sw


def project_to_class(raw: SpectralModel, spec: SmoothnessClassSpec, beta: float,
                     max_iter: int = 500, tol: float = 1e-12) -> SpectralModel:
    """Metric projection of `raw` onto the class within its own lag span (W^beta metric).

    Dykstra's alternating scheme between the Sobolev ellipsoid and the grid
    positivity polytope, both projected exactly.
    """
    if not 0.5 < beta < spec.alpha:
        raise ArgumentError(f"need 1/2 < beta < alpha, got beta={beta}, alpha={spec.alpha}")
    out_name = f"proj({raw.name})"
    if class_membership(raw, spec).member:
        return SpectralModel(raw.autocov, spec.alpha, spec.bigM, raw.name)
    x = np.array(raw.autocov, dtype=float)
    d = x.size
    C = _positivity_rows(d, spec.grid_points)
    b = np.full(C.shape[0], 1.0 / spec.bigM)
    w = _weights(d, beta)
    p = np.zeros(d)
    q = np.zeros(d)
    for it in range(1, max_iter + 1):
        y, _ = ellipsoid_projection(x + p, spec.bigM, spec.alpha, beta)
        p = x + p - y
        x_new = polytope_projection(y + q, C, b, w)
        q = y + q - x_new
        move = math.sqrt(float(np.sum(w * (x_new - x) ** 2)))
        gap = math.sqrt(float(np.sum(w * (x_new - y) ** 2)))
        x = x_new
        scale = math.sqrt(float(np.sum(w * x ** 2)))
        if move <= tol * scale and gap <= tol * scale:
            model = SpectralModel(x, spec.alpha, spec.bigM, out_name)
            if class_membership(model, spec).member:
                return model
    raise NumericError("class projection did not converge",
                       {"iterations": max_iter, "last_move": move, "set_gap": gap})


# --- likelihoods -------------------------------------------------------------------

def _whittle_grid(model: SpectralModel, n: int):
    N = 16 * n
    _, f = density_grid(model, N)
    if np.any(f <= 0):
        raise DomainError(f"spectral density of {model.name!r} is not positive on the quadrature grid")
    return N, f


def whittle_weights(model: SpectralModel, n: int):
    """(log-term, w) with (1/4pi) int I_n / f = sum_h c_h w_h on the 16n-point rule."""
    N, f = _whittle_grid(model, n)
    dw = TWO_PI / N
    log_term = float(np.sum(np.log(f))) * dw / (4.0 * math.pi)
    # sum_i cos(h w_i) / f_i with w_i = -pi + 2 pi i / N
    spec = np.fft.fft(1.0 / f).real[:n]
    sums = spec * np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    w = sums * dw / (4.0 * math.pi * TWO_PI) * np.where(np.arange(n) == 0, 1.0, 2.0)
    return log_term, w


def whittle_likelihood(model: SpectralModel, pgram: PeriodogramData, variant: str = "continuous") -> float:
    n = pgram.n
    if variant == "continuous":
        log_term, w = whittle_weights(model, n)
        return log_term + float(pgram.sample_autocov @ w)
    if variant == "discrete":
        _whittle_grid(model, n)
        half = (n - 1) // 2
        om = pgram.omega[1:half + 1]
        f = eval_density(model, om)
        return float(np.sum(np.log(f) + pgram.ordinates[1:half + 1] / f)) / n
    raise ArgumentError(f"unknown Whittle variant {variant!r}")


def whittle_batch(model: SpectralModel, Y: np.ndarray) -> np.ndarray:
    """Continuous Whittle values for each row of Y."""
    n = Y.shape[1]
    log_term, w = whittle_weights(model, n)
    F = np.fft.rfft(Y, 2 * n, axis=1)
    c = np.fft.irfft(np.abs(F) ** 2, 2 * n, axis=1)[:, :n] / n
    return log_term + c @ w


def exact_loglik(model: SpectralModel, path: SamplePath) -> float:
    y = path.values
    n = y.size
    try:
        L = scipy.linalg.cholesky(toeplitz(model, n), lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        raise ConditioningError(f"Toeplitz matrix of {model.name!r} is not positive definite") from None
    return float(loglik_batch(L, y[None, :])[0])


def loglik_batch(L: np.ndarray, Y: np.ndarray) -> np.ndarray:
    n = L.shape[0]
    logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
    Z = scipy.linalg.solve_triangular(L, Y.T, lower=True, check_finite=False)
    return -0.5 * n * math.log(TWO_PI) - 0.5 * logdet - 0.5 * np.sum(Z * Z, axis=0)


def whittle_residual(exact: float | np.ndarray, whittle: float | np.ndarray, n: int):
    """R_n = L_n + n L^W + n log(2 pi)."""
    return exact + n * whittle + n * math.log(TWO_PI)

