"""Seeded samplers for the stationary, periodic, scale and white-noise experiments."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .covariance import circulant_eigenvalues, fourier_basis, localization_kernel, toeplitz
from .errors import ArgumentError, ConditioningError, DomainError, require_odd
from .rng import normal_batch, normals
from .spectra import TWO_PI, SpectralModel, cell_averages, eval_density

EXPERIMENTS = ("stationary", "periodic", "scale", "whitenoise")


@dataclass(frozen=True, eq=False)
class SamplePath:
    values: np.ndarray
    experiment: str
    model_name: str = ""
    seed: int | None = None
    step: float | None = None   # grid spacing for white-noise increments

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if v.size < 1 or not np.all(np.isfinite(v)):
            raise ArgumentError("path values must be finite and non-empty")
        if self.experiment not in EXPERIMENTS:
            raise ArgumentError(f"unknown experiment tag {self.experiment!r}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class PeriodogramData:
    omega: np.ndarray
    dft: np.ndarray
    ordinates: np.ndarray
    n: int
    # biased sample autocovariances c(h) = n^-1 sum y(t) y(t+h); I_n(w) = (c0 + 2 sum c_h cos hw)/2pi
    sample_autocov: np.ndarray = field(repr=False)


def cholesky_factor(model: SpectralModel, n: int) -> np.ndarray:
    try:
        return scipy.linalg.cholesky(toeplitz(model, n), lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        raise ConditioningError(f"Toeplitz matrix of {model.name!r} at n={n} is not positive definite") from None


def periodic_weights(model: SpectralModel, n: int) -> np.ndarray:
    """sqrt(lambda_j) in U_n column order; raises if any eigenvalue is nonpositive."""
    lam = circulant_eigenvalues(model, n).eigenvalues
    if np.any(lam <= 0):
        raise ConditioningError(f"circulant eigenvalue {lam.min():.3e} is not positive")
    return np.sqrt(lam)


BANDED_MIN_N = 2048


def _banded_factor(model: SpectralModel, n: int) -> np.ndarray:
    """Lower banded Cholesky storage: ab[d, j] = L[j + d, j]."""
    K = model.K
    ab = np.zeros((K + 1, n))
    for d in range(K + 1):
        ab[d, :n - d] = model.autocov[d]
    try:
        return scipy.linalg.cholesky_banded(ab, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        raise ConditioningError(f"Toeplitz matrix of {model.name!r} at n={n} is not positive definite") from None


def sample_stationary(model: SpectralModel, n: int, seed: int) -> SamplePath:
    """y = L xi with L the lower Cholesky factor of Gamma_n.

    Long paths of band-limited models (n >= BANDED_MIN_N, K < n/4) use the
    banded factor, which is the same matrix computed in O(n K^2).
    """
    xi = normals(seed, n)
    if n >= BANDED_MIN_N and 4 * model.K < n:
        ab = _banded_factor(model, n)
        y = ab[0] * xi
        for d in range(1, model.K + 1):
            y[d:] += ab[d, :n - d] * xi[:n - d]
    else:
        y = cholesky_factor(model, n) @ xi
    return SamplePath(y, "stationary", model.name, seed)


def sample_periodic(model: SpectralModel, n: int, seed: int) -> SamplePath:
    """sum over j of sqrt(2 pi f~(w_j)) xi_j u_j, i.e. the finite cosine/sine representation."""
    n = require_odd(n)
    w = periodic_weights(model, n)
    return SamplePath(fourier_basis(n) @ (w * normals(seed, n)), "periodic", model.name, seed)


def sample_scale(model: SpectralModel, n: int, seed: int) -> SamplePath:
    J = cell_averages(model, n)
    if np.any(J <= 0):
        raise DomainError("cell averages must be positive")
    return SamplePath(np.sqrt(J) * normals(seed, n), "scale", model.name, seed)


def sample_whitenoise_model(model: SpectralModel, n: int, seed: int, m: int | None = None) -> SamplePath:
    """Increments log f(w_i) dw + 2 sqrt(pi/n) sqrt(dw) xi_i on m cells of [-pi, pi]."""
    m = 16 * n if m is None else int(m)
    if m < n:
        raise ArgumentError("white-noise grid must have at least n cells")
    dw = TWO_PI / m
    mid = -math.pi + dw * (np.arange(m) + 0.5)
    f = eval_density(model, mid)
    if np.any(f <= 0):
        raise DomainError("spectral density must be positive on the grid")
    incr = np.log(f) * dw + 2.0 * math.sqrt(math.pi / n) * math.sqrt(dw) * normals(seed, m)
    return SamplePath(incr, "whitenoise", model.name, seed, step=dw)


# --- batch samplers (one substream per trial) ------------------------------------

def stationary_batch(model: SpectralModel, n: int, trials: int, seed: int, factor=None) -> np.ndarray:
    L = cholesky_factor(model, n) if factor is None else factor
    return normal_batch(seed, trials, n) @ L.T


def periodic_batch(model: SpectralModel, n: int, trials: int, seed: int) -> np.ndarray:
    w = periodic_weights(model, n)
    return (normal_batch(seed, trials, n) * w) @ fourier_basis(n).T


# --- DFT and periodogram -----------------------------------------------------------

def _dft_half(Y: np.ndarray):
    """d_n(w_j) = sum_k exp(-i k w_j) y(k), k = 1..n, for j = 0..(n-1)/2 (rows of Y)."""
    n = Y.shape[-1]
    half = (n - 1) // 2
    j = np.arange(half + 1)
    k = np.arange(1, n + 1)
    phase = TWO_PI * (np.multiply.outer(j, k) % n) / n
    return Y @ np.cos(phase).T - 1j * (Y @ np.sin(phase).T)


def periodogram_ordinates(Y) -> np.ndarray:
    """I_n(w_j) for each row of Y, j = 0..(n-1)/2."""
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    require_odd(Y.shape[-1])
    d = _dft_half(Y)
    return (d.real ** 2 + d.imag ** 2) / (TWO_PI * Y.shape[-1])


def biased_autocov(y: np.ndarray) -> np.ndarray:
    n = y.size
    return np.array([y[:n - h] @ y[h:] for h in range(n)]) / n


def dft_periodogram(path: SamplePath) -> PeriodogramData:
    y = path.values
    n = require_odd(y.size)
    d = _dft_half(y[None, :])[0]
    I = (d.real ** 2 + d.imag ** 2) / (TWO_PI * n)
    omega = TWO_PI * np.arange((n - 1) // 2 + 1) / n
    return PeriodogramData(omega, d, I, n, biased_autocov(y))


def full_grid_sum(pgram: PeriodogramData) -> float:
    """Sum of I_n over all n Fourier frequencies (uses I(-w) = I(w))."""
    I = pgram.ordinates
    return float(I[0] + 2.0 * np.sum(I[1:]))


# --- equivalence maps --------------------------------------------------------------

@dataclass(frozen=True)
class MapContext:
    """Extra inputs for apply_equivalence_map.

    The localize map uses `center` when given (known f0); otherwise it needs a
    companion path from which f0 is estimated and projected into `spec`.
    """
    companion: SamplePath | None = None
    center: SpectralModel | None = None
    spec: object | None = None
    beta: float | None = None


def apply_equivalence_map(direction: str, path: SamplePath, context: MapContext | None = None) -> SamplePath:
    y = path.values
    if direction == "periodic_to_scale":
        n = require_odd(y.size)
        z = fourier_basis(n).T @ y / math.sqrt(TWO_PI)
        return SamplePath(z, "scale", path.model_name, path.seed)
    if direction == "scale_to_periodic":
        n = require_odd(y.size)
        out = math.sqrt(TWO_PI) * (fourier_basis(n) @ y)
        return SamplePath(out, "periodic", path.model_name, path.seed)
    if direction == "localize":
        ctx = context or MapContext()
        if ctx.center is not None:
            f0 = ctx.center
        elif ctx.companion is not None:
            from .estimate import ScheduleConfig, project_to_class, series_estimator

            if ctx.spec is None or ctx.beta is None:
                raise ArgumentError("localize from a companion path needs a class spec and beta")
            raw = series_estimator(ctx.companion, ScheduleConfig(ctx.spec.alpha, ctx.beta))
            f0 = project_to_class(raw, ctx.spec, ctx.beta)
        else:
            raise ArgumentError("localize needs a companion path (or a known center)")
        K = localization_kernel(f0, require_odd(y.size))
        return SamplePath(K @ y, "periodic", path.model_name, path.seed)
    raise ArgumentError(f"unknown map direction {direction!r}")


# --- CSV -----------------------------------------------------------------------------

def write_path_csv(path: SamplePath, file) -> None:
    with open(file, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "value"])
        for i, v in enumerate(path.values, start=1):
            w.writerow([i, "%.17g" % v])


def read_path_csv(file, experiment="stationary") -> SamplePath:
    with open(file, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:2] != ["index", "value"]:
        raise ArgumentError(f"{file}: expected header 'index,value'")
    try:
        vals = [float(r[1]) for r in rows[1:] if r]
    except (ValueError, IndexError) as exc:
        raise ArgumentError(f"{file}: {exc}") from None
    return SamplePath(vals, experiment)


def write_periodogram_csv(pgram: PeriodogramData, file) -> None:
    with open(file, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["omega", "I"])
        for om, val in zip(pgram.omega, pgram.ordinates):
            w.writerow(["%.17g" % om, "%.17g" % val])
