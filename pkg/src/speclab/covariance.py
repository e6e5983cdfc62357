"""Toeplitz, circulant and split covariance matrices, plus matrix helpers."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import ArgumentError, ConditioningError, ContractError, require_odd
from .spectra import TWO_PI, SpectralModel

SYM_RTOL = 1e-12
EIG_FLOOR = 1e-12


def toeplitz(model: SpectralModel, n: int) -> np.ndarray:
    """Gamma_n: entry (j, k) = gamma(k - j)."""
    if n < 1:
        raise ArgumentError("size must be positive")
    return scipy.linalg.toeplitz(model.lags(n))


def wrapped_lags(model: SpectralModel, n: int) -> np.ndarray:
    """gamma(h) for h <= (n-1)/2 and gamma(n-h) above, h = 0..n-1."""
    n = require_odd(n)
    half = (n - 1) // 2
    base = model.lags(half + 1)
    h = np.arange(n)
    return base[np.minimum(h, n - h)]


def circulant(model: SpectralModel, n: int) -> np.ndarray:
    return scipy.linalg.toeplitz(wrapped_lags(model, n))


@dataclass(frozen=True, eq=False)
class CirculantSpectrum:
    n: int
    index: np.ndarray        # j = -(n-1)/2 .. (n-1)/2
    omega: np.ndarray        # 2 pi j / n
    eigenvalues: np.ndarray  # lambda_j = 2 pi f~_n(omega_j)


def circulant_eigenvalues(model: SpectralModel, n: int) -> CirculantSpectrum:
    n = require_odd(n)
    half = (n - 1) // 2
    j = np.arange(-half, half + 1)
    omega = TWO_PI * j / n
    g = model.lags(half + 1)
    k = np.arange(1, half + 1)
    # reduce k*j mod n so the cosine argument stays in [0, 2 pi)
    phase = TWO_PI * (np.multiply.outer(np.arange(half + 1), k) % n) / n
    pos = g[0] + 2.0 * (np.cos(phase) @ g[1:]) if half else np.full(1, g[0])
    lam = np.concatenate((pos[:0:-1], pos))  # lambda_{-j} = lambda_j exactly
    return CirculantSpectrum(n, j, omega, lam)


def fourier_basis(n: int) -> np.ndarray:
    """U_n: columns ordered j = -(n-1)/2..(n-1)/2; sines for j < 0, cosines for j > 0."""
    n = require_odd(n)
    half = (n - 1) // 2
    t = np.arange(n)
    U = np.empty((n, n))
    U[:, half] = 1.0 / math.sqrt(n)
    if half:
        k = np.arange(1, half + 1)
        phase = TWO_PI * (np.multiply.outer(t, k) % n) / n
        scale = math.sqrt(2.0 / n)
        U[:, half + 1:] = scale * np.cos(phase)
        U[:, :half] = scale * np.sin(phase[:, ::-1])
    return U


def circulant_eigensystem(model: SpectralModel, n: int):
    return circulant_eigenvalues(model, n), fourier_basis(n)


def circulant_partial(model: SpectralModel, n: int, m: int) -> np.ndarray:
    """Upper-left n x n block of the m x m circulant."""
    if m <= n or m % 2 == 0:
        raise ArgumentError(f"partial circulant needs odd m > n, got n={n}, m={m}")
    return scipy.linalg.toeplitz(wrapped_lags(model, m)[:n])


class SplitCovariances(NamedTuple):
    joined: np.ndarray
    independent: np.ndarray
    corner: np.ndarray


def split_covariances(model: SpectralModel, n: int, r: int) -> SplitCovariances:
    """Covariances of the first and last m = (n - r)/2 observations, with and without coupling."""
    if n % 2 == 0 or r % 2 == 0 or r < 1 or r >= n:
        raise ArgumentError(f"split needs odd n > r >= 1, got n={n}, r={r}")
    m = (n - r) // 2
    g = model.lags(n)
    block = scipy.linalg.toeplitz(g[:m])
    # corner (i, j) = gamma(n - m + j - i), lags r+1 .. n-1
    corner = scipy.linalg.toeplitz(g[n - m:n - 2 * m:-1], g[n - m:n])
    joined = np.block([[block, corner], [corner.T, block]])
    independent = np.zeros_like(joined)
    independent[:m, :m] = block
    independent[m:, m:] = block
    return SplitCovariances(joined, independent, corner)


# --- symmetric matrix functions ---------------------------------------------------

def check_symmetric(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ContractError("matrix must be square")
    scale = np.max(np.abs(A)) if A.size else 0.0
    if np.max(np.abs(A - A.T), initial=0.0) > SYM_RTOL * max(scale, np.finfo(float).tiny):
        raise ContractError("matrix is not symmetric")
    return 0.5 * (A + A.T)


def sym_eig(A):
    return np.linalg.eigh(check_symmetric(A))


def sym_sqrt(A) -> np.ndarray:
    lam, V = sym_eig(A)
    root = np.sqrt(np.clip(lam, 0.0, None))
    S = (V * root) @ V.T
    return 0.5 * (S + S.T)


def inv_sqrt(A) -> np.ndarray:
    lam, V = sym_eig(A)
    top = lam[-1]
    if top <= 0 or lam[0] < EIG_FLOOR * top:
        raise ConditioningError(f"eigenvalue {lam[0]:.3e} below floor {EIG_FLOOR:g} x {top:.3e}")
    S = (V / np.sqrt(lam)) @ V.T
    return 0.5 * (S + S.T)


def localization_kernel(f0: SpectralModel, n: int) -> np.ndarray:
    """K_n = sqrt(circulant(f0)) @ inverse sqrt(toeplitz(f0))."""
    n = require_odd(n)
    G0 = toeplitz(f0, n)
    lam = np.linalg.eigvalsh(G0)
    if lam[0] < EIG_FLOOR:
        raise ConditioningError(f"Toeplitz matrix nearly singular (min eigenvalue {lam[0]:.3e})")
    return sym_sqrt(circulant(f0, n)) @ inv_sqrt(G0)


class MatrixNorms(NamedTuple):
    frobenius: float
    operator: float
    lambda_min: float
    lambda_max: float


def matrix_norms(A) -> MatrixNorms:
    """Frobenius and spectral norms; eigenvalue range of the symmetric part."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    fro = float(np.sqrt(np.sum(A * A)))
    op = float(math.sqrt(max(np.linalg.eigvalsh(A.T @ A)[-1], 0.0)))
    lam = np.linalg.eigvalsh(0.5 * (A + A.T)) if A.shape[0] == A.shape[1] else np.array([np.nan])
    return MatrixNorms(fro, op, float(lam[0]), float(lam[-1]))


def frobenius_sq(A) -> float:
    A = np.asarray(A)
    return float(np.sum(A * A))


# --- CSV -------------------------------------------------------------------------

def write_matrix_csv(A, path) -> None:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"c{j}" for j in range(A.shape[1])])
        for row in A:
            w.writerow(["%.17g" % x for x in row])


def read_matrix_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if rows and rows[0] and not _is_number(rows[0][0]):
        rows = rows[1:]
    try:
        A = np.array([[float(x) for x in row] for row in rows if row], dtype=float)
    except ValueError as exc:
        raise ArgumentError(f"{path}: {exc}") from None
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ArgumentError(f"{path}: expected a square matrix")
    return A


def _is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False
