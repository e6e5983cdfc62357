"""Hellinger distances for centered Gaussians and Gamma families.

Convention: h^2 = integral (sqrt p - sqrt q)^2 = 2 (1 - affinity), so h^2 lies in [0, 2].
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .covariance import check_symmetric
from .errors import ArgumentError, ConditioningError, DomainError, NumericError

SYMMETRY_TOL = 1e-9

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0 (Lanczos, g=7, nine terms; reflection below 1/2)."""
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"log_gamma needs a positive finite argument, got {x}")
    if x < 0.5:
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    if x == 1.0 or x == 2.0:
        return 0.0
    z = x - 1.0
    acc = _LANCZOS[0]
    for i in range(1, 9):
        acc += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


@dataclass(frozen=True)
class GammaLaw:
    shape: float
    scale: float

    def __post_init__(self):
        for v in (self.shape, self.scale):
            if not (v > 0 and math.isfinite(v)):
                raise DomainError("Gamma shape and scale must be positive and finite")

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        a, s = self.shape, self.scale
        return (a - 1.0) * np.log(x) - x / s - a * math.log(s) - math.lgamma(a)


@dataclass(frozen=True)
class HellingerResult:
    h_squared: float
    affinity: float
    method: str
    log_affinity: float = float("nan")

    @classmethod
    def from_log_affinity(cls, log_aff: float, method: str) -> "HellingerResult":
        log_aff = min(float(log_aff), 0.0)
        return cls(-2.0 * math.expm1(log_aff) + 0.0, math.exp(log_aff), method, log_aff)

    def tv_bounds(self):
        """Le Cam bounds 1 - aff <= TV <= sqrt(1 - aff^2)."""
        a = self.affinity
        return 1.0 - a, math.sqrt(max(0.0, 1.0 - a * a))


def _log_affinity_terms(lam):
    """Per-coordinate log affinity of N(0,1) vs N(0, lam)."""
    lam = np.asarray(lam, dtype=float)
    with np.errstate(divide="ignore"):
        return 0.5 * (math.log(2.0) + 0.5 * np.log(lam) - np.log1p(lam))


def gaussian_1d(var_p: float, var_q: float) -> HellingerResult:
    if not (var_p > 0 and var_q > 0):
        raise DomainError("variances must be positive")
    return HellingerResult.from_log_affinity(float(_log_affinity_terms(var_q / var_p)), "closed-form")


def simultaneous_diagonalization(A, B):
    """D = Lambda_1^{-1/2} C_1^T from A's eigensystem and the eigenvalues of D B D^T."""
    A = check_symmetric(A)
    B = check_symmetric(B)
    if A.shape != B.shape:
        raise ArgumentError(f"dimension mismatch {A.shape} vs {B.shape}")
    lam, C = np.linalg.eigh(A)
    if lam[-1] <= 0 or lam[0] <= 1e-12 * lam[-1]:
        raise ConditioningError(f"first matrix nearly singular (eigenvalues {lam[0]:.3e}..{lam[-1]:.3e})")
    D = C.T / np.sqrt(lam)[:, None]
    Bt = D @ B @ D.T
    return D, np.linalg.eigvalsh(0.5 * (Bt + Bt.T))


def _gaussian_log_affinity(A, B) -> float:
    _, lt = simultaneous_diagonalization(A, B)
    if np.any(lt < 0):
        lt = np.clip(lt, 0.0, None)
    return float(np.sum(_log_affinity_terms(lt)))


def hellinger_gaussian(A, B) -> HellingerResult:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape != B.shape:
        raise ArgumentError(f"dimension mismatch {A.shape} vs {B.shape}")
    forward = _gaussian_log_affinity(A, B)
    try:
        backward = _gaussian_log_affinity(B, A)
    except ConditioningError:
        # singular B: only the A-ordering is defined
        return HellingerResult.from_log_affinity(forward, "eigensystem")
    hf = -2.0 * math.expm1(min(forward, 0.0))
    hb = -2.0 * math.expm1(min(backward, 0.0))
    if abs(hf - hb) >= SYMMETRY_TOL:
        raise ConditioningError(f"orderings disagree: {hf:.3e} vs {hb:.3e}")
    return HellingerResult.from_log_affinity(0.5 * (forward + backward), "eigensystem")


def product_hellinger(log_affinities) -> HellingerResult:
    """Hellinger distance of a product experiment from its component log affinities."""
    return HellingerResult.from_log_affinity(float(np.sum(log_affinities)), "closed-form")


def _check_positive(*vals):
    for v in vals:
        if not (v > 0 and math.isfinite(v)):
            raise DomainError(f"expected a positive finite argument, got {v}")


def gamma_shape_log_affinity(a, s, t) -> float:
    _check_positive(a, s, t)
    ratio = (math.sqrt(s) - math.sqrt(t)) ** 2 / (s + t)
    return a * math.log1p(-ratio)


def hellinger_gamma_same_shape(a: float, s: float, t: float) -> HellingerResult:
    return HellingerResult.from_log_affinity(gamma_shape_log_affinity(a, s, t), "closed-form")


def gamma_scale_log_affinity(a, b) -> float:
    _check_positive(a, b)
    return log_gamma(0.5 * (a + b)) - 0.5 * (log_gamma(a) + log_gamma(b))


def hellinger_gamma_same_scale(a: float, b: float, s: float = 1.0) -> HellingerResult:
    _check_positive(s)
    return HellingerResult.from_log_affinity(gamma_scale_log_affinity(a, b), "closed-form")


def gamma_count_change(n: int, m: int) -> HellingerResult:
    """m-fold products of Gamma(1/2, s_j) against Gamma(n/2m, s_j), n >= m.

    Each factor has affinity Gamma(1/4 + n/4m) / sqrt(Gamma(1/2) Gamma(n/2m)),
    whatever the common scale s_j.
    """
    if not (m >= 1 and n >= m):
        raise ArgumentError(f"count change needs n >= m >= 1, got n={n}, m={m}")
    return product_hellinger([m * gamma_scale_log_affinity(0.5, n / (2.0 * m))])


def quadrature_hellinger(density_id: str, params_p, params_q, tol: float = 1e-11) -> HellingerResult:
    """Affinity by adaptive quadrature of sqrt(p q); an oracle for the closed forms."""
    if density_id == "gaussian0":
        (vp,), (vq,) = params_p, params_q
        _check_positive(vp, vq)

        def integrand(x):
            return math.exp(-0.25 * x * x * (1.0 / vp + 1.0 / vq)) / math.sqrt(2.0 * math.pi * math.sqrt(vp * vq))

        scale = math.sqrt(max(vp, vq))
        pieces = [(0.0, 8.0 * scale), (8.0 * scale, math.inf)]
        singular_power = None
    elif density_id == "gamma":
        P, Q = GammaLaw(*params_p), GammaLaw(*params_q)
        p_exp = 0.5 * (P.shape + Q.shape) - 1.0
        rate = 0.5 * (1.0 / P.scale + 1.0 / Q.scale)
        logc = -0.5 * (P.shape * math.log(P.scale) + math.lgamma(P.shape)
                       + Q.shape * math.log(Q.scale) + math.lgamma(Q.shape))

        def smooth(x):
            return math.exp(logc - rate * x)

        def integrand(x):
            return math.exp(logc + p_exp * math.log(x) - rate * x) if x > 0 else 0.0

        cut = 1.0 / rate
        singular_power = p_exp
        pieces = [(cut, math.inf)]
    else:
        raise ArgumentError(f"unknown density id {density_id!r}")

    total = 0.0
    with np.errstate(all="ignore"):
        try:
            if singular_power is not None:
                # x^p factored into the algebraic weight on [0, cut]
                val, err = integrate.quad(smooth, 0.0, cut, weight="alg", wvar=(singular_power, 0.0),
                                          epsabs=tol, epsrel=1e-13, limit=200)
                if err > 10 * tol:
                    raise NumericError("quadrature did not converge", {"piece": "head", "error": err})
                total += val
            for lo, hi in pieces:
                val, err = integrate.quad(integrand, lo, hi, epsabs=tol, epsrel=1e-13, limit=200)
                if err > 10 * tol:
                    raise NumericError("quadrature did not converge", {"piece": (lo, hi), "error": err})
                total += val
        except integrate.IntegrationWarning as exc:  # pragma: no cover
            raise NumericError(str(exc)) from None
    if density_id == "gaussian0":
        total *= 2.0
    aff = min(total, 1.0)
    return HellingerResult(2.0 * (1.0 - aff), aff, "quadrature", math.log(aff))
