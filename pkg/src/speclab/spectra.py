"""Spectral densities stored as finite autocovariance sequences.

A model with lags gamma(0..K) induces

    f(w) = (gamma(0) + 2 * sum_k gamma(k) cos(k w)) / (2 pi),   w in [-pi, pi].

Function-space quantities on the unit interval use g(x) = f(2 pi x - pi).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ArgumentError, DomainError, require_odd
from .rng import CounterRNG

TWO_PI = 2.0 * math.pi
POSITIVITY_TOL = 1e-10
_CHUNK = 1 << 22


@dataclass(frozen=True, eq=False)
class SpectralModel:
    autocov: np.ndarray
    alpha: float = 1.0
    bigM: float | None = None
    name: str = "model"

    def __post_init__(self):
        arr = np.array(self.autocov, dtype=float).reshape(-1)
        if arr.size == 0:
            raise ArgumentError("autocovariance sequence must contain gamma(0)")
        if not np.all(np.isfinite(arr)):
            raise ArgumentError("autocovariances must be finite")
        if not self.alpha > 0.5:
            raise ArgumentError(f"alpha must exceed 1/2, got {self.alpha}")
        if self.bigM is not None and not self.bigM > 0:
            raise ArgumentError(f"M must be positive, got {self.bigM}")
        arr.setflags(write=False)
        object.__setattr__(self, "autocov", arr)
        object.__setattr__(self, "alpha", float(self.alpha))
        if self.bigM is not None:
            object.__setattr__(self, "bigM", float(self.bigM))

    @property
    def K(self) -> int:
        return self.autocov.size - 1

    def lags(self, count: int) -> np.ndarray:
        """gamma(0..count-1), zero-padded past K."""
        out = np.zeros(count)
        k = min(count, self.autocov.size)
        out[:k] = self.autocov[:k]
        return out

    def with_autocov(self, autocov, name=None) -> "SpectralModel":
        return SpectralModel(autocov, self.alpha, self.bigM, self.name if name is None else name)

    def __repr__(self):
        return f"SpectralModel(name={self.name!r}, K={self.K}, alpha={self.alpha}, bigM={self.bigM})"


@dataclass(frozen=True)
class SmoothnessClassSpec:
    alpha: float
    bigM: float
    grid_points: int = 4096

    def __post_init__(self):
        if not self.alpha > 0.5:
            raise ArgumentError(f"alpha must exceed 1/2, got {self.alpha}")
        if not self.bigM > 0:
            raise ArgumentError(f"M must be positive, got {self.bigM}")
        if self.grid_points < 1024:
            raise ArgumentError("positivity grid needs at least 1024 points")

    @classmethod
    def of(cls, model: SpectralModel, grid_points: int = 4096) -> "SmoothnessClassSpec":
        if model.bigM is None:
            raise ArgumentError(f"model {model.name!r} carries no class constant M")
        return cls(model.alpha, model.bigM, grid_points)


@dataclass(frozen=True)
class Violation:
    condition: str
    witness: float | None
    value: float
    threshold: float


@dataclass(frozen=True)
class MembershipVerdict:
    member: bool
    norm_sq: float
    min_density: float
    violations: tuple = field(default_factory=tuple)

    def __bool__(self):
        return self.member


# --- evaluation -------------------------------------------------------------

def _cos_sum(gamma, omega):
    """(gamma0 + 2 sum gamma_k cos(k w)) / 2pi for a 1-D array of w."""
    k = np.arange(1, gamma.size)
    out = np.full(omega.shape, gamma[0])
    if k.size:
        step = max(1, _CHUNK // k.size)
        for s in range(0, omega.size, step):
            w = omega[s:s + step]
            out[s:s + step] += 2.0 * (np.cos(np.multiply.outer(w, k)) @ gamma[1:])
    return out / TWO_PI


def eval_density(model: SpectralModel, omega):
    w = np.asarray(omega, dtype=float)
    if np.any(np.abs(w) > math.pi + 1e-12) or not np.all(np.isfinite(w)):
        raise DomainError("omega must lie in [-pi, pi]")
    vals = _cos_sum(model.autocov, w.reshape(-1)).reshape(w.shape)
    return float(vals) if vals.ndim == 0 else vals


def trig_on_unit_grid(cos_coef, sin_coef, npts: int) -> np.ndarray:
    """Values of sum_k c_k cos(2 pi k x) + s_k sin(2 pi k x) at x = j/npts.

    Uses an inverse real FFT, so npts must exceed twice the top frequency.
    """
    c = np.asarray(cos_coef, dtype=float)
    s = np.zeros_like(c) if sin_coef is None else np.asarray(sin_coef, dtype=float)
    K = c.size - 1
    if npts <= 2 * K:
        raise ArgumentError("grid too coarse for the trig degree")
    X = np.zeros(npts // 2 + 1, dtype=complex)
    X[0] = npts * c[0]
    X[1:K + 1] = 0.5 * npts * (c[1:] - 1j * s[1:])
    return np.fft.irfft(X, n=npts)


def unit_cos_coef(model: SpectralModel) -> np.ndarray:
    """Cosine coefficients of g(x) = f(2 pi x - pi) in the basis cos(2 pi k x)."""
    g = model.autocov
    sign = np.where(np.arange(g.size) % 2 == 0, 1.0, -1.0)
    c = 2.0 * g * sign
    c[0] = g[0]
    return c / TWO_PI


def density_grid(model: SpectralModel, npts: int = 4096):
    """(omega, f(omega)) on the uniform grid omega_j = -pi + 2 pi j / npts."""
    omega = -math.pi + TWO_PI * np.arange(npts) / npts
    if npts > 2 * model.K:
        return omega, trig_on_unit_grid(unit_cos_coef(model), None, npts)
    return omega, _cos_sum(model.autocov, omega)


# --- norms and approximations ------------------------------------------------

def sobolev_norm(model: SpectralModel, s: float):
    """(seminorm_sq, norm_sq) with weights k^(2s)."""
    if s < 0:
        raise DomainError("Sobolev index must be nonnegative")
    g = model.autocov
    k = np.arange(1, g.size, dtype=float)
    semi = 2.0 * float(np.sum(k ** (2.0 * s) * g[1:] ** 2))
    return semi, float(g[0] ** 2 + semi)


def truncated_series(model: SpectralModel, n: int) -> SpectralModel:
    n = require_odd(n)
    keep = (n - 1) // 2
    if model.K <= keep:
        return model
    g = model.autocov[:keep + 1]
    nz = np.flatnonzero(g[1:])
    g = g[:nz[-1] + 2] if nz.size else g[:1]
    return model.with_autocov(g, name=f"{model.name}|trunc{n}")


def cell_averages(model: SpectralModel, n: int) -> np.ndarray:
    """J_j = n * integral of g over ((j-1)/n, j/n), j = 1..n.

    Each cosine integrates to cos(k * midpoint) * sin(k pi/n) / (k pi/n).
    """
    if int(n) != n or n < 1:
        raise ArgumentError("cell count must be a positive integer")
    n = int(n)
    g = model.autocov
    k = np.arange(1, g.size, dtype=float)
    mid = TWO_PI * (np.arange(1, n + 1) - 0.5) / n - math.pi
    damp = np.sinc(k / n)
    return _cos_sum(np.concatenate(([g[0]], g[1:] * damp)), mid)


def fourier_midpoints(n: int) -> np.ndarray:
    """Cell midpoints in omega units; for odd n these are the Fourier frequencies."""
    return TWO_PI * (np.arange(1, n + 1) - 0.5) / n - math.pi


def piecewise_l2_error(model: SpectralModel, n: int) -> float:
    """Squared L2[0,1] distance between g and its n-cell average."""
    g = model.autocov
    total = (g[0] ** 2 + 2.0 * float(np.sum(g[1:] ** 2))) / TWO_PI ** 2
    J = cell_averages(model, n)
    return max(total - float(np.mean(J ** 2)), 0.0)


def piecewise_sup_error(model: SpectralModel, n: int, per_cell: int = 32) -> float:
    """Grid sup of |g - gbar_n|, sampling every cell at per_cell + 1 points."""
    p = max(per_cell, -(-(2 * model.K + 2) // n))
    N = n * p
    vals = trig_on_unit_grid(unit_cos_coef(model), None, N)
    vals = np.append(vals, vals[0])
    idx = (np.arange(n) * p)[:, None] + np.arange(p + 1)[None, :]
    J = cell_averages(model, n)
    return float(np.max(np.abs(vals[idx] - J[:, None])))


def combine(models, weights, name="combination") -> SpectralModel:
    """Linear combination of autocovariance sequences; metadata from the first."""
    size = max(m.autocov.size for m in models)
    acc = np.zeros(size)
    for m, w in zip(models, weights):
        acc[:m.autocov.size] += w * m.autocov
    first = models[0]
    return SpectralModel(acc, first.alpha, first.bigM, name)


def sup_distance(a: SpectralModel, b: SpectralModel, grid_points: int = 4096) -> float:
    _, vals = density_grid(combine([a, b], [1.0, -1.0]), grid_points)
    return float(np.max(np.abs(vals)))


def _besov_pass(ccoef, alpha, n_nodes, npts):
    K = ccoef.size - 1
    k = np.arange(1, K + 1, dtype=float)
    a = ccoef[1:]
    t = np.logspace(-16.0, 0.0, n_nodes, base=2.0)
    incr = np.empty(n_nodes)
    for i, h in enumerate(t):
        theta = TWO_PI * k * h
        c = np.concatenate(([0.0], a * 2.0 * np.sin(0.5 * theta) ** 2))
        s = np.concatenate(([0.0], a * np.sin(theta)))
        d = trig_on_unit_grid(c, s, npts)
        upper = 1.0 - h
        J = min(int(math.floor(upper * npts)), npts - 1)
        dx = 1.0 / npts
        sq = d[:J + 1] ** 2
        val = dx * (np.sum(sq) - 0.5 * (sq[0] + sq[-1]))
        rest = upper - J * dx
        if rest > 0:
            x_end = upper
            tail_d = float(np.sum(c[1:] * np.cos(TWO_PI * k * x_end) + s[1:] * np.sin(TWO_PI * k * x_end)))
            val += 0.5 * rest * (sq[-1] + tail_d ** 2)
        incr[i] = max(val, 0.0)
    modulus = np.sqrt(np.maximum.accumulate(incr))
    u = np.log(t)
    F = modulus ** 2 * t ** (-2.0 * alpha)
    body = float(np.sum(0.5 * (F[1:] + F[:-1]) * np.diff(u)))
    head = modulus[0] ** 2 * t[0] ** (-2.0 * alpha) / (2.0 - 2.0 * alpha)
    tail = modulus[-1] ** 2 / (2.0 * alpha)
    return math.sqrt(body + head + tail)


def besov_seminorm_22(model: SpectralModel, alpha: float, nodes: int = 64,
                      grid: int = 8192, rtol: float = 0.005, max_doublings: int = 4) -> float:
    """B^alpha_{2,2} seminorm of g on [0,1] from its L2 modulus of smoothness."""
    if not 0.0 < alpha < 1.0:
        raise DomainError("Besov index must lie in (0, 1)")
    ccoef = unit_cos_coef(model)
    if ccoef.size == 1 or not np.any(ccoef[1:]):
        return 0.0
    npts = max(grid, 4 * ccoef.size)
    prev = _besov_pass(ccoef, alpha, nodes, npts)
    for _ in range(max_doublings):
        nodes, npts = 2 * nodes, 2 * npts
        cur = _besov_pass(ccoef, alpha, nodes, npts)
        if abs(cur - prev) <= rtol * abs(cur):
            return cur
        prev = cur
    return prev


def class_membership(model: SpectralModel, spec: SmoothnessClassSpec) -> MembershipVerdict:
    _, norm_sq = sobolev_norm(model, spec.alpha)
    omega, vals = density_grid(model, spec.grid_points)
    i = int(np.argmin(vals))
    fmin = float(vals[i])
    violations = []
    if norm_sq > spec.bigM * (1.0 + POSITIVITY_TOL):
        violations.append(Violation("sobolev-ellipsoid", None, norm_sq, spec.bigM))
    if fmin < 1.0 / spec.bigM - POSITIVITY_TOL:
        violations.append(Violation("positivity", float(omega[i]), fmin, 1.0 / spec.bigM))
    return MembershipVerdict(not violations, norm_sq, fmin, tuple(violations))


# --- construction helpers ------------------------------------------------------

def white_noise(var=1.0, alpha=1.0, bigM=None) -> SpectralModel:
    return SpectralModel([var], alpha, bigM, f"whitenoise(var={var:g})")


def ma1(theta=0.5, var=1.0, alpha=1.0, bigM=None) -> SpectralModel:
    return SpectralModel([var * (1.0 + theta ** 2), var * theta], alpha, bigM,
                         f"ma1(theta={theta:g},var={var:g})")


def ma1_in_sigma() -> SpectralModel:
    """MA(1) with theta=0.5 placed in the class alpha=1, M=30."""
    m = ma1(0.5, 1.0, alpha=1.0, bigM=30.0)
    return m.with_autocov(m.autocov, name="ma1-in-sigma")


def ar1(phi=0.6, var=1.0, tail=1e-10, alpha=1.0, bigM=None, max_lags=1 << 20) -> SpectralModel:
    """AR(1) autocovariances cut at the smallest K whose tail seminorm is below `tail`."""
    if not abs(phi) < 1:
        raise ArgumentError("AR(1) requires |phi| < 1")
    scale = var / (1.0 - phi ** 2)
    K = 0
    # tail sum 2 sum_{k>K} k^{2 alpha} gamma_k^2, evaluated blockwise
    block = 256
    while True:
        k = np.arange(K + 1, K + 1 + 64 * block, dtype=float)
        terms = 2.0 * k ** (2 * alpha) * (scale * np.abs(phi) ** k) ** 2
        tails = np.cumsum(terms[::-1])[::-1]
        hit = np.nonzero(tails < tail)[0]
        if hit.size:
            K = int(k[hit[0]]) - 1
            break
        K += 64 * block
        if K > max_lags:
            raise ArgumentError("AR(1) tail does not fall below the requested level")
    gamma = scale * phi ** np.arange(K + 1, dtype=float)
    return SpectralModel(gamma, alpha, bigM, f"ar1(phi={phi:g},var={var:g},K={K})")


def powerlaw_model(alpha=0.75, c=0.1, gamma0=1.2, K=4096, bigM=10.0) -> SpectralModel:
    """gamma_k = c k^-(alpha+1/2): the slowest decay compatible with W^alpha up to a log."""
    k = np.arange(1, K + 1, dtype=float)
    return SpectralModel(np.concatenate(([gamma0], c * k ** -(alpha + 0.5))), alpha, bigM,
                         f"powerlaw(alpha={alpha:g},c={c:g},K={K})")


def random_class_model(seed: int, alpha=1.0, bigM=10.0, K=256, grid_points=4096,
                       name=None) -> SpectralModel:
    """gamma_k = c k^-(alpha+1) u_k, u_k ~ U[-1,1], shrunk and shifted into the class."""
    spec = SmoothnessClassSpec(alpha, bigM, grid_points)
    u = 2.0 * CounterRNG(seed).uniform(K) - 1.0
    shape = np.arange(1, K + 1, dtype=float) ** -(alpha + 1.0) * u
    c, g0 = 1.0, 1.0
    label = name or f"random(seed={seed},alpha={alpha:g},M={bigM:g},K={K})"
    for _ in range(400):
        model = SpectralModel(np.concatenate(([g0], c * shape)), alpha, bigM, label)
        verdict = class_membership(model, spec)
        if verdict.member:
            return model
        if verdict.min_density < 1.0 / bigM:
            g0 += TWO_PI * (1.0 / bigM - verdict.min_density) * 1.05 + 1e-3
        if sobolev_norm(model, alpha)[1] > bigM:
            c *= 0.8
            g0 = max(1.0, 0.9 * g0)
    raise ArgumentError("could not place random model inside the class")


# --- presets and files ----------------------------------------------------------

def _parse_kv(body: str) -> dict:
    out = {}
    if not body:
        return out
    for item in body.split(","):
        if "=" not in item:
            raise ArgumentError(f"malformed preset parameter {item!r}")
        key, val = item.split("=", 1)
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise ArgumentError(f"preset parameter {key!r} is not a number: {val!r}") from None
    return out


def parse_preset(text: str) -> SpectralModel:
    """Models from strings such as 'ma1:theta=0.5,var=1' or 'ar1:phi=0.6'."""
    kind, _, body = text.strip().partition(":")
    kv = _parse_kv(body)

    def take(key, default):
        return kv.pop(key, default)

    alpha = take("alpha", None)
    bigM = take("M", None)
    if kind == "whitenoise":
        model = white_noise(take("var", 1.0))
    elif kind == "ma1":
        model = ma1(take("theta", 0.5), take("var", 1.0))
    elif kind == "ar1":
        model = ar1(take("phi", 0.6), take("var", 1.0), take("tail", 1e-10),
                    alpha=1.0 if alpha is None else alpha)
    elif kind == "ma1-in-sigma":
        model = ma1_in_sigma()
    elif kind == "powerlaw":
        model = powerlaw_model(take("alpha_decay", 0.75), take("c", 0.1), take("var", 1.2),
                               int(take("K", 4096)))
    elif kind == "random":
        model = random_class_model(int(take("seed", 0)), 1.0 if alpha is None else alpha,
                                   10.0 if bigM is None else bigM, int(take("K", 256)))
    else:
        raise ArgumentError(f"unknown preset {kind!r}")
    if kv:
        raise ArgumentError(f"unexpected preset parameters for {kind!r}: {sorted(kv)}")
    return SpectralModel(model.autocov,
                         model.alpha if alpha is None else alpha,
                         model.bigM if bigM is None else bigM,
                         model.name)


def model_to_dict(model: SpectralModel) -> dict:
    return {"name": model.name, "autocov": [float(x) for x in model.autocov],
            "alpha": model.alpha, "M": model.bigM}


def model_from_dict(data: dict) -> SpectralModel:
    try:
        return SpectralModel(data["autocov"], data.get("alpha", 1.0), data.get("M"),
                             data.get("name", "model"))
    except (KeyError, TypeError) as exc:
        raise ArgumentError(f"invalid model description: {exc}") from None


def save_model(model: SpectralModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n")


def load_model(path) -> SpectralModel:
    return model_from_dict(json.loads(Path(path).read_text()))
