"""The catalog of executable checks.

Each check fills a report with rows: rows with a bound must satisfy
measured <= bound (up to the report's relative tol); rows without a bound are
informational. Constant-free rates are checked through the spread (max/min)
of measured/rate across a doubling grid.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import stats as sstats

from .. import covariance as cov
from .. import distances as dist
from .. import estimate as est
from .. import simulate as sim
from .. import spectra as sp
from ..rng import CounterRNG, substream
from .catalog import check

RATE_BAND = 4.0
MONOTONE_SLACK = 1e-12


def _rng(key, i):
    return CounterRNG(substream(key, i))


def _random_orthogonal(rng, dim):
    q, r = np.linalg.qr(rng.normal(dim * dim).reshape(dim, dim))
    return q * np.sign(np.diag(r))


def _random_psd(rng, dim, lo, hi):
    q = _random_orthogonal(rng, dim)
    lam = lo + (hi - lo) * rng.uniform(dim)
    A = (q * lam) @ q.T
    return 0.5 * (A + A.T)


def _perturbed_pair(rng, M, dims, eps_max, fixed=False):
    """A with spectrum in [1/M, M] and B = A + eps E, ||E||_F = 1, eps in (0, eps_max]."""
    dim = int(dims[0] + math.floor(rng.uniform(1)[0] * (dims[1] - dims[0] + 1)))
    A = _random_psd(rng, dim, 1.0 / M, M)
    E = rng.normal(dim * dim).reshape(dim, dim)
    E = E + E.T
    E /= np.linalg.norm(E)
    eps = eps_max if fixed else eps_max * (1.0 - rng.uniform(1)[0])
    return A, A + eps * E, eps


def _spread(values):
    v = np.asarray(values, dtype=float)
    return float(v.max() / v.min())


def _add_band(report, label, values, grid_values):
    for g, v in zip(grid_values, values):
        report.add({"n": g, "quantity": label}, v)
    report.add({"quantity": f"{label} max/min"}, _spread(values), RATE_BAND)
    report.stats[f"{label}_spread"] = _spread(values)


def _max_increase(values):
    v = np.asarray(values, dtype=float)
    return float(np.max(np.diff(v))) if v.size > 1 else 0.0


def _slope(x, y):
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def _h2(A, B):
    return dist.hellinger_gaussian(A, B).h_squared


def _class_models(key, count, alpha=1.0, bigM=10.0, K=256):
    return [sp.random_class_model(substream(key, 1000 + i), alpha, bigM, K) for i in range(count)]


# --- distances ---------------------------------------------------------------

@check("hellinger-frobenius-bracket",
       "h^2 between nearby Gaussians is within a factor K of the squared Frobenius gap",
       "distances", "Gaussian Hellinger vs Frobenius lemma",
       pairs=200, M=2.0, dims=[2, 100], eps_max=0.05)
def _hellinger_frobenius(report, p, key):
    M = p["M"]
    worst = 0.0
    for i in range(p["pairs"]):
        A, B, eps = _perturbed_pair(_rng(key, i), M, p["dims"], p["eps_max"])
        ratio = _h2(A, B) / cov.frobenius_sq(A - B)
        K = max(ratio, 1.0 / ratio)
        worst = max(worst, K)
        report.add({"pair": i, "dim": A.shape[0], "eps": eps}, K, 10.0 * M * M)
    report.stats["measured_K"] = worst


@check("appendix-diagonalization-bounds",
       "M^-2 ||A-B||^2 <= ||I - Lambda~||^2 <= M^2 ||A-B||^2 and the small-gap expansion h^2 ~ ||I-Lambda~||^2/8",
       "distances", "simultaneous diagonalization argument",
       pairs=200, M=2.0, dims=[2, 100], eps_max=0.05, small_eps=1e-3, small_pairs=20)
def _appendix_bounds(report, p, key):
    M = p["M"]
    for i in range(p["pairs"]):
        A, B, eps = _perturbed_pair(_rng(key, i), M, p["dims"], p["eps_max"])
        _, lt = dist.simultaneous_diagonalization(A, B)
        gap = float(np.sum((1.0 - lt) ** 2))
        fro = cov.frobenius_sq(A - B)
        grid = {"pair": i, "dim": A.shape[0], "eps": eps}
        report.add({**grid, "side": "lower"}, fro / M ** 2, gap)
        report.add({**grid, "side": "upper"}, gap, M ** 2 * fro)
    for i in range(p["small_pairs"]):
        rng = _rng(key, 10_000 + i)
        A, B, _ = _perturbed_pair(rng, M, p["dims"], p["small_eps"], fixed=True)
        _, lt = dist.simultaneous_diagonalization(A, B)
        ratio = _h2(A, B) / (float(np.sum((1.0 - lt) ** 2)) / 8.0)
        report.add({"pair": i, "dim": A.shape[0], "side": "small-gap |ratio-1|"}, abs(ratio - 1.0), 0.05)


@check("gamma-closed-forms",
       "closed-form Gamma Hellinger distances agree with quadrature",
       "distances", "Gamma same-shape and same-scale lemmas",
       tol=0.0, cases=100, threshold=1e-8)
def _gamma_closed(report, p, key):
    rng = _rng(key, 0)
    for i in range(p["cases"]):
        a = 0.2 + 4.8 * rng.uniform(1)[0]
        s, t = 0.1 + 9.9 * rng.uniform(2)
        closed = dist.hellinger_gamma_same_shape(a, s, t).h_squared
        quad = dist.quadrature_hellinger("gamma", (a, s), (a, t)).h_squared
        report.add({"family": "same-shape", "a": a, "s": s, "t": t}, abs(closed - quad), p["threshold"])
    for i in range(p["cases"]):
        a, b = 0.2 + 4.8 * rng.uniform(2)
        s = 0.1 + 9.9 * rng.uniform(1)[0]
        closed = dist.hellinger_gamma_same_scale(a, b, s).h_squared
        quad = dist.quadrature_hellinger("gamma", (a, s), (b, s)).h_squared
        report.add({"family": "same-scale", "a": a, "b": b, "s": s}, abs(closed - quad), p["threshold"])


@check("gamma-gaussian-sufficiency-identity",
       "H^2(N(0,s), N(0,t)) equals H^2(Gamma(1/2,2s), Gamma(1/2,2t))",
       "distances", "squared Gaussian observations are Gamma(1/2) sufficient statistics",
       tol=0.0, cases=100, threshold=1e-10)
def _sufficiency(report, p, key):
    rng = _rng(key, 0)
    for i in range(p["cases"]):
        s, t = 0.1 + 9.9 * rng.uniform(2)
        g = dist.hellinger_gaussian([[s]], [[t]]).h_squared
        gam = dist.hellinger_gamma_same_shape(0.5, 2 * s, 2 * t).h_squared
        report.add({"s": s, "t": t}, abs(g - gam), p["threshold"])


@check("log-gamma-reference",
       "Lanczos log-Gamma against exact values at integers and half-integers",
       "distances", "Gamma-function evaluation",
       tol=0.0, threshold=1e-12)
def _log_gamma(report, p, key):
    for k in range(1, 11):
        exact = math.log(math.factorial(k - 1))
        report.add({"x": float(k)}, abs(dist.log_gamma(k) - exact) / max(1.0, abs(exact)), p["threshold"])
    for k in range(10):
        x = k + 0.5
        exact = math.log(math.factorial(2 * k) * math.sqrt(math.pi) / (4 ** k * math.factorial(k)))
        report.add({"x": x}, abs(dist.log_gamma(x) - exact) / max(1.0, abs(exact)), p["threshold"])


@check("sqrt-perturbation",
       "||A^1/2 - B^1/2|| lambda_min(A^1/2 + B^1/2) <= ||A - B|| for PSD pairs",
       "covariance", "matrix square-root perturbation lemma",
       pairs=100, dims=[2, 50])
def _sqrt_perturbation(report, p, key):
    lo, hi = p["dims"]
    for i in range(p["pairs"]):
        rng = _rng(key, i)
        dim = int(lo + math.floor(rng.uniform(1)[0] * (hi - lo + 1)))
        A = _random_psd(rng, dim, 0.0, 2.0)
        B = _random_psd(rng, dim, 0.0, 2.0) if i % 2 else A + 0.1 * _random_psd(rng, dim, 0.0, 1.0)
        Ra, Rb = cov.sym_sqrt(A), cov.sym_sqrt(B)
        lam = np.linalg.eigvalsh(Ra + Rb)[0]
        lhs = math.sqrt(cov.frobenius_sq(Ra - Rb)) * lam
        report.add({"pair": i, "dim": dim}, lhs, math.sqrt(cov.frobenius_sq(A - B)))


# --- covariance ---------------------------------------------------------------

@check("circulant-gap-equality",
       "||Gamma_n - Gamma~_n||^2 = |f|^2_{2,1/2} for band-limited f with K <= (n-1)/2",
       "covariance", "circulant approximation lemma, part (i)",
       model="ma1-in-sigma", n=31, random_models=20, random_n=[31, 63, 127], random_K=15)
def _gap_equality(report, p, key):
    def row(model, n, label):
        gap = cov.frobenius_sq(cov.toeplitz(model, n) - cov.circulant(model, n))
        semi = sp.sobolev_norm(model, 0.5)[0]
        report.add({"model": label, "n": n}, abs(gap - semi), 1e-10 * max(semi, 1e-300))

    row(sp.parse_preset(p["model"]), p["n"], p["model"])
    for i, model in enumerate(_class_models(key, p["random_models"], K=p["random_K"])):
        for n in p["random_n"]:
            if model.K <= (n - 1) // 2:
                row(model, n, f"random-{i}")


@check("circulant-gap-upper",
       "||Gamma_n - Gamma~_n||^2 <= 2|f|^2_{2,1/2} in general, and the linearized version for pairs",
       "covariance", "circulant approximation lemma, parts (i)-(ii)",
       random_models=20, n_list=[31, 63, 127], K=256)
def _gap_upper(report, p, key):
    models = _class_models(key, p["random_models"], K=p["K"])
    for i, model in enumerate(models):
        partner = models[(i + 1) % len(models)]
        diff = sp.combine([model, partner], [1.0, -1.0])
        for n in p["n_list"]:
            gap = cov.frobenius_sq(cov.toeplitz(model, n) - cov.circulant(model, n))
            report.add({"model": i, "n": n, "part": "i"}, gap, 2.0 * sp.sobolev_norm(model, 0.5)[0])
            D = (cov.toeplitz(model, n) - cov.toeplitz(partner, n)) - (cov.circulant(model, n) - cov.circulant(partner, n))
            report.add({"model": i, "n": n, "part": "ii"}, cov.frobenius_sq(D), 2.0 * sp.sobolev_norm(diff, 0.5)[0])


@check("fails-negative-result",
       "h^2(Gamma_n, Gamma~_n) does not vanish for a fixed band-limited f",
       "covariance", "negative result for the direct circulant approximation",
       semi=0.3, gamma0=1.25, n_list=[31, 63, 127, 255, 511])
def _fails(report, p, key):
    model = sp.SpectralModel([p["gamma0"], math.sqrt(p["semi"] / 2.0)], 1.0, None, "band-limited")
    vals = []
    for n in p["n_list"]:
        h2 = _h2(cov.toeplitz(model, n), cov.circulant(model, n))
        vals.append(h2)
        report.add({"n": n, "quantity": "h2"}, h2)
    report.add({"quantity": "0.5 h2(first) vs h2(last)"}, 0.5 * vals[0], vals[-1])


@check("upper-bracket-bound",
       "||Gamma_n - Gamma~_{n,m}||^2 <= 4 (m-n+1)^(1-2 alpha) |f|^2_{2,alpha}; h^2 non-increasing in m-n",
       "covariance", "upper bracketing lemma",
       random_models=20, n_list=[31, 63, 127], K=256)
def _upper_bracket(report, p, key):
    for i, model in enumerate(_class_models(key, p["random_models"], K=p["K"])):
        semi = sp.sobolev_norm(model, model.alpha)[0]
        for n in p["n_list"]:
            G = cov.toeplitz(model, n)
            h2s = []
            for d in range(2, n // 2 + 1, 2):
                Gt = cov.circulant_partial(model, n, n + d)
                bound = 4.0 * (d + 1) ** (1.0 - 2.0 * model.alpha) * semi
                report.add({"model": i, "n": n, "m-n": d}, cov.frobenius_sq(G - Gt), bound)
                h2s.append(_h2(G, Gt))
            report.add({"model": i, "n": n, "quantity": "max increase of h2 in m-n"},
                       _max_increase(h2s), MONOTONE_SLACK)


@check("splitting-frobenius-bound",
       "||joined - independent||^2 <= (r+1)^(1-2 alpha) |f|^2_{2,alpha}; zero for MA(1)",
       "covariance", "sample-splitting covariance bound",
       random_models=10, n_list=[31, 63, 127], r_list=[1, 3, 5, 7, 9, 11], K=256)
def _splitting(report, p, key):
    models = _class_models(key, p["random_models"], K=p["K"])
    for i, model in enumerate(models):
        semi = sp.sobolev_norm(model, model.alpha)[0]
        for n in p["n_list"]:
            for r in p["r_list"]:
                s = cov.split_covariances(model, n, r)
                report.add({"model": i, "n": n, "r": r}, cov.frobenius_sq(s.joined - s.independent),
                           (r + 1) ** (1.0 - 2.0 * model.alpha) * semi)
    ma = sp.ma1_in_sigma()
    for n in p["n_list"]:
        for r in p["r_list"]:
            s = cov.split_covariances(ma, n, r)
            report.add({"model": "ma1-in-sigma", "n": n, "r": r}, cov.frobenius_sq(s.joined - s.independent), 0.0)


@check("toeplitz-eigenvalue-bounds",
       "2 pi min f <= lambda(Gamma_n) <= 2 pi max f, with stable extremes across n",
       "covariance", "eigenvalue bounds for Toeplitz matrices of class members",
       random_models=5, n_list=[31, 63, 127, 255, 511], K=256)
def _toeplitz_eigs(report, p, key):
    models = [sp.ma1_in_sigma()] + _class_models(key, p["random_models"], K=p["K"])
    for i, model in enumerate(models):
        _, vals = sp.density_grid(model, 8192)
        lo, hi = sp.TWO_PI * vals.min(), sp.TWO_PI * vals.max()
        mins, maxs = [], []
        for n in p["n_list"]:
            lam = np.linalg.eigvalsh(cov.toeplitz(model, n))
            mins.append(lam[0])
            maxs.append(lam[-1])
            report.add({"model": i, "n": n, "side": "lower"}, lo, lam[0])
            report.add({"model": i, "n": n, "side": "upper"}, lam[-1], hi)
        report.add({"model": i, "quantity": "lambda_min spread"}, max(mins) / min(mins), 2.0)
        report.add({"model": i, "quantity": "lambda_max spread"}, max(maxs) / min(maxs), 2.0)


@check("elementwise-covariance-convergence",
       "(2 pi)^-1 max |U'(Gamma_n - Gamma~_n)U| decreases as n doubles",
       "covariance", "approximate decorrelation of the transformed stationary data",
       model="ma1-in-sigma", n_list=[33, 65, 129, 257, 513, 1025])
def _elementwise(report, p, key):
    model = sp.parse_preset(p["model"])
    vals = []
    for n in p["n_list"]:
        U = cov.fourier_basis(n)
        v = float(np.max(np.abs(U.T @ (cov.toeplitz(model, n) - cov.circulant(model, n)) @ U))) / sp.TWO_PI
        vals.append(v)
        report.add({"n": n}, v)
    report.add({"quantity": "max increase"}, _max_increase(vals), 0.0)


@check("localization-rate",
       "h^2(K Gamma(f) K', Gamma~(f)) shrinks by >= 1.8x when the distance to f0 halves",
       "covariance", "localized likelihood-process lemma",
       model="ma1-in-sigma", perturbation=[0.3, 0.2, -0.1, 0.05], m=257,
       deltas=[0.04, 0.02, 0.01, 0.005], shrink=1.8)
def _localization(report, p, key):
    f0 = sp.parse_preset(p["model"])
    pert = sp.SpectralModel(p["perturbation"], f0.alpha, None, "perturbation")
    m = p["m"]
    K = cov.localization_kernel(f0, m)

    def h2_at(delta):
        f = sp.combine([f0, pert], [1.0, delta])
        G = K @ cov.toeplitz(f, m) @ K.T
        return _h2(0.5 * (G + G.T), cov.circulant(f, m))

    report.add({"delta": 0.0}, h2_at(0.0), 1e-10)
    vals = [h2_at(d) for d in p["deltas"]]
    for d, v in zip(p["deltas"], vals):
        report.add({"delta": d, "quantity": "h2"}, v)
    for (d1, v1), v2 in zip(zip(p["deltas"], vals), vals[1:]):
        report.add({"delta": d1, "quantity": "shrink x h2(delta/2) vs h2(delta)"}, p["shrink"] * v2, v1)


# --- spectra -------------------------------------------------------------------

@check("sobolev-sup-embedding-rate",
       "sup |f - f~_n| n^(alpha-1/2) stays within a band as n doubles",
       "spectra", "Sobolev sup-norm embedding lemma",
       model="powerlaw", n_list=[33, 65, 129, 257, 513, 1025])
def _sup_embedding(report, p, key):
    model = sp.parse_preset(p["model"])
    vals = [sp.sup_distance(model, sp.truncated_series(model, n), 16384) * n ** (model.alpha - 0.5)
            for n in p["n_list"]]
    _add_band(report, "sup gap x n^(alpha-1/2)", vals, p["n_list"])


@check("midpoints-rate",
       "sum_j (f~_n(w_j) - J_j)^2 n^(2 alpha - 1) stays within a band",
       "spectra", "midpoint approximation lemma",
       model="powerlaw", n_list=[33, 65, 129, 257, 513, 1025])
def _midpoints(report, p, key):
    model = sp.parse_preset(p["model"])
    vals = []
    for n in p["n_list"]:
        lam = cov.circulant_eigenvalues(model, n).eigenvalues / sp.TWO_PI
        vals.append(float(np.sum((lam - sp.cell_averages(model, n)) ** 2)) * n ** (2 * model.alpha - 1))
    _add_band(report, "midpoint sum x n^(2 alpha-1)", vals, p["n_list"])


@check("besov-piecewise-constant-4",
       "||g - gbar_n||^2 <= 4 n^(-2 alpha) |g|^2_B with the explicit constant 4",
       "spectra", "piecewise-constant approximation lemma",
       random_models=20, alpha=0.75, K=64, n_list=[16, 32, 64, 128, 256, 512])
def _besov4(report, p, key):
    a = p["alpha"]
    for i, model in enumerate(_class_models(key, p["random_models"], alpha=a, K=p["K"])):
        semi = sp.besov_seminorm_22(model, a)
        for n in p["n_list"]:
            report.add({"model": i, "n": n}, sp.piecewise_l2_error(model, n), 4.0 * n ** (-2 * a) * semi ** 2)


@check("besov-sup-rate",
       "sup |g - gbar_n| n^(alpha-1/2) / ||g||_B stays within a band",
       "spectra", "uniform piecewise-constant approximation lemma",
       model="powerlaw", alpha=0.75, n_list=[16, 32, 64, 128, 256, 512])
def _besov_sup(report, p, key):
    model = sp.parse_preset(p["model"])
    a = p["alpha"]
    g = model.autocov
    l2 = math.sqrt(g[0] ** 2 + 2.0 * float(np.sum(g[1:] ** 2))) / sp.TWO_PI
    norm = l2 + sp.besov_seminorm_22(model, a)
    vals = [sp.piecewise_sup_error(model, n) * n ** (a - 0.5) / norm for n in p["n_list"]]
    _add_band(report, "sup error x n^(alpha-1/2)", vals, p["n_list"])


@check("sobolev-besov-embedding-rate",
       "|g|_B / |f|_{2,alpha} stays within a band over single-frequency and random models",
       "spectra", "periodic Sobolev into Besov embedding lemma",
       alpha=0.75, frequencies=[1, 2, 4, 8, 16, 32, 64, 128, 256], random_models=5, K=64)
def _embedding(report, p, key):
    a = p["alpha"]
    ratios, labels = [], []
    for k in p["frequencies"]:
        g = np.zeros(k + 1)
        g[k] = 1.0
        model = sp.SpectralModel(g, max(a, 0.51), None, f"freq-{k}")
        ratios.append(sp.besov_seminorm_22(model, a) / math.sqrt(sp.sobolev_norm(model, a)[0]))
        labels.append(k)
    for i, model in enumerate(_class_models(key, p["random_models"], alpha=a, K=p["K"])):
        ratios.append(sp.besov_seminorm_22(model, a) / math.sqrt(sp.sobolev_norm(model, a)[0]))
        labels.append(f"random-{i}")
    _add_band(report, "Besov/Sobolev seminorm ratio", ratios, labels)


# --- simulate ------------------------------------------------------------------

@check("equivalence-map-roundtrip",
       "periodic-to-scale after scale-to-periodic is the identity",
       "simulate", "explicit equivalence maps",
       tol=0.0, n_list=[3, 31, 101, 257], vectors=3)
def _roundtrip(report, p, key):
    for n in p["n_list"]:
        for v in range(p["vectors"]):
            z = _rng(key, 100 * n + v).normal(n)
            path = sim.SamplePath(z, "scale")
            back = sim.apply_equivalence_map("periodic_to_scale",
                                             sim.apply_equivalence_map("scale_to_periodic", path))
            report.add({"n": n, "vector": v}, float(np.max(np.abs(back.values - z)) / np.max(np.abs(z))), 1e-12)


@check("periodic-law-equivalence",
       "(2 pi)^-1/2 U'y~ has covariance diag(f~_n(w_j)) under the periodic sampler",
       "simulate", "independence of the transformed periodic data",
       tol=0.0, model="ma1-in-sigma", n=101, trials=10000)
def _periodic_law(report, p, key):
    model = sp.parse_preset(p["model"])
    n, T = p["n"], p["trials"]
    Y = sim.periodic_batch(model, n, T, key)
    Z = Y @ cov.fourier_basis(n) / math.sqrt(sp.TWO_PI)
    C = Z.T @ Z / T
    target = np.diag(cov.circulant_eigenvalues(model, n).eigenvalues / sp.TWO_PI)
    err = float(np.max(np.abs(C - target)))
    report.add({"n": n, "trials": T}, err, 5.0 / math.sqrt(T) * float(target.max()))


@check("whitenoise-increments",
       "discretized white-noise increments have drift log f dw and variance 4 pi dw / n",
       "simulate", "white noise with drift model",
       tol=0.0, model="ma1-in-sigma", n=101, trials=2000)
def _whitenoise(report, p, key):
    model = sp.parse_preset(p["model"])
    n, T = p["n"], p["trials"]
    X = np.stack([sim.sample_whitenoise_model(model, n, substream(key, t)).values for t in range(T)])
    m = X.shape[1]
    dw = sp.TWO_PI / m
    mid = -math.pi + dw * (np.arange(m) + 0.5)
    drift = np.log(sp.eval_density(model, mid)) * dw
    var = 4.0 * math.pi * dw / n
    resid = X - drift
    mc_var = float(np.mean(resid ** 2))
    report.add({"quantity": "|var ratio - 1|"}, abs(mc_var / var - 1.0), 0.05)
    se = math.sqrt(var / T)
    report.add({"quantity": "max |mean drift error| / se"},
               float(np.max(np.abs(resid.mean(axis=0)))) / se, 5.5)


@check("periodogram-independence",
       "periodogram ordinates are nearly uncorrelated and I/f is nearly Exp(1)",
       "simulate", "asymptotic independence of periodogram ordinates",
       tol=0.0, model="ma1-in-sigma", n=4097, trials=2000, pairs=10, corr_max=0.05, ks_max=0.05)
def _periodogram(report, p, key):
    model = sp.parse_preset(p["model"])
    n, T = p["n"], p["trials"]
    half = (n - 1) // 2
    picks = 1 + np.floor(_rng(key, 0).uniform(2 * p["pairs"]) * half).astype(int)
    js, ks = picks[:p["pairs"]], picks[p["pairs"]:]
    ks = np.where(ks == js, 1 + ks % half, ks)
    idx = np.unique(np.concatenate([js, ks]))
    Y = sim.stationary_batch(model, n, T, substream(key, 1))
    t = np.arange(1, n + 1)
    phase = sp.TWO_PI * (np.multiply.outer(idx, t) % n) / n
    d_re, d_im = Y @ np.cos(phase).T, Y @ np.sin(phase).T
    I = (d_re ** 2 + d_im ** 2) / (sp.TWO_PI * n)
    f = sp.eval_density(model, sp.TWO_PI * idx / n)
    R = I / f
    col = {j: c for c, j in enumerate(idx)}
    for j, k in zip(js, ks):
        r = float(np.corrcoef(R[:, col[j]], R[:, col[k]])[0, 1])
        report.add({"j": int(j), "k": int(k), "quantity": "|corr|"}, abs(r), p["corr_max"])
    for j in js:
        ks_stat = float(sstats.kstest(R[:, col[j]], "expon").statistic)
        report.add({"j": int(j), "quantity": "KS vs Exp(1)"}, ks_stat, p["ks_max"])
        report.add({"j": int(j), "quantity": "mean I/f"}, float(R[:, col[j]].mean()))


# --- estimate ------------------------------------------------------------------

@check("estimator-variance-bound",
       "Var gamma^(k) <= 5/(n-k) sum gamma^2 (x1.05) and gamma^(k) is unbiased",
       "estimate", "variance bound for empirical autocovariances",
       tol=0.0, model="ma1-in-sigma", trials=10000, n_list=[101, 401], lags=[0, 1, 5], slack=1.05)
def _variance_bound(report, p, key):
    model = sp.parse_preset(p["model"])
    T = p["trials"]
    for n in p["n_list"]:
        Y = sim.stationary_batch(model, n, T, substream(key, n))
        G = est.autocov_batch(Y, max(p["lags"]))
        total = float(np.sum(model.lags(n) ** 2))
        for k in p["lags"]:
            var = float(np.var(G[:, k], ddof=1))
            report.add({"n": n, "k": k, "quantity": "variance"}, var, p["slack"] * 5.0 / (n - k) * total)
            se = math.sqrt(var / T)
            report.add({"n": n, "k": k, "quantity": "|bias|"}, abs(float(G[:, k].mean()) - model.lags(k + 1)[k]), 4.0 * se)


def _risk_slope(report, p, key, sampler):
    alpha, beta = p["alpha"], p["beta"]
    model = sp.random_class_model(substream(key, 7), alpha, p["M"], p["K"])
    cfg = est.ScheduleConfig(alpha, beta)
    risks = []
    for n in p["n_list"]:
        Kt = cfg.n_trunc(n)
        Y = sampler(model, n, p["trials"], substream(key, n))
        G = est.autocov_batch(Y, Kt)
        del Y
        r = float(np.mean([est.sobolev_distance_sq(g, model.autocov, beta) for g in G]))
        risks.append(r)
        report.add({"n": n, "n_trunc": Kt, "quantity": "risk"}, r)
    slope = _slope(p["n_list"], risks)
    report.stats["slope"] = slope
    report.add({"quantity": "log-log slope"}, slope, 2.0 * (beta - alpha) / (2.0 * alpha + 1.0) + 0.15)


_RATE_N = [2 ** k + 1 for k in range(7, 14)]


@check("estimator-rate-slope",
       "risk of the truncated series estimator decays at least at the stated rate (stationary data)",
       "estimate", "estimator rate lemma, stationary experiment",
       tol=0.0, alpha=1.0, beta=0.75, M=10.0, K=64, trials=200, n_list=_RATE_N)
def _rate_stationary(report, p, key):
    _risk_slope(report, p, key, sim.stationary_batch)


@check("estimator-rate-slope-periodic",
       "same rate check on periodic (circulant) data",
       "estimate", "estimator rate lemma, periodic experiment",
       tol=0.0, alpha=1.0, beta=0.75, M=10.0, K=64, trials=200, n_list=_RATE_N)
def _rate_periodic(report, p, key):
    _risk_slope(report, p, key, sim.periodic_batch)


@check("projection-contraction",
       "projecting the estimate into the class never moves it away from a class member",
       "estimate", "projection step of the estimator",
       models=10, paths=10, n=65, alpha=1.0, beta=0.75, M=10.0)
def _projection(report, p, key):
    spec = sp.SmoothnessClassSpec(p["alpha"], p["M"])
    cfg = est.ScheduleConfig(p["alpha"], p["beta"])
    Kt = cfg.n_trunc(p["n"])
    active = 0
    for i, model in enumerate(_class_models(key, p["models"], p["alpha"], p["M"], K=Kt)):
        Y = sim.stationary_batch(model, p["n"], p["paths"], substream(key, 50 + i))
        for t, y in enumerate(Y):
            raw = est.series_estimator(sim.SamplePath(y, "stationary"), cfg)
            proj = est.project_to_class(raw, spec, p["beta"])
            active += int(not np.array_equal(proj.autocov, raw.autocov))
            before = math.sqrt(est.sobolev_distance_sq(raw.autocov, model.autocov, p["beta"]))
            after = math.sqrt(est.sobolev_distance_sq(proj.autocov, model.autocov, p["beta"]))
            report.add({"model": i, "path": t}, after, before + 1e-8)
    report.stats["projection_active"] = active


@check("whittle-residual-bounded",
       "median |L_n + n L^W + n log 2pi| does not grow with n",
       "estimate", "accuracy of the Whittle approximation",
       tol=0.0, model="ma1-in-sigma", trials=200, n_small=129, n_large=1025, factor=10.0)
def _whittle(report, p, key):
    model = sp.parse_preset(p["model"])
    med = {}
    for n in (p["n_small"], p["n_large"]):
        L = sim.cholesky_factor(model, n)
        Y = sim.stationary_batch(model, n, p["trials"], substream(key, n), factor=L)
        R = est.whittle_residual(est.loglik_batch(L, Y), est.whittle_batch(model, Y), n)
        med[n] = float(np.median(np.abs(R)))
        report.add({"n": n, "quantity": "median |R_n|"}, med[n])
    report.add({"quantity": "median ratio large/small"}, med[p["n_large"]], p["factor"] * med[p["n_small"]])


# --- scale and Gamma experiments ----------------------------------------------------

def scale_merge_log_affinity(model, m):
    """Pairs N(0, J_{j,m}) twice against N(0, J_{2j-1,2m}), N(0, J_{2j,2m})."""
    coarse = sp.cell_averages(model, m)
    fine = sp.cell_averages(model, 2 * m)
    rep = np.repeat(coarse, 2)
    terms = dist._log_affinity_terms(fine / rep)
    return float(np.sum(terms)), terms


def scale_merge_strasser(terms):
    h2_each = -2.0 * np.expm1(terms)
    return 2.0 * float(np.sum(h2_each))


@check("scale-merge-hellinger",
       "exact product Hellinger between the m-cell (doubled) and 2m-cell scale models decreases in n",
       "distances", "scale-model bracketing via cell refinement",
       model="ma1-in-sigma", n_list=[63, 127, 255, 511])
def _scale_merge(report, p, key):
    model = sp.parse_preset(p["model"])
    vals = []
    for n in p["n_list"]:
        m = (n - est.ScheduleConfig.r_split(n)) // 2
        log_aff, terms = scale_merge_log_affinity(model, m)
        h2 = dist.product_hellinger([log_aff]).h_squared
        vals.append(h2)
        report.add({"n": n, "m": m, "quantity": "product h2 vs 2 sum h2_i"}, h2, scale_merge_strasser(terms))
    report.add({"quantity": "max increase"}, _max_increase(vals), 0.0)


@check("gamma-count-change-bound",
       "h^2 between Gamma(1/2) and Gamma(n/2m) products scales like r^2/m",
       "distances", "Gamma count-change lemma",
       n_list=[63, 127, 255, 511])
def _count_change(report, p, key):
    vals = []
    for n in p["n_list"]:
        r = est.ScheduleConfig.r_split(n)
        m = n - r
        res = dist.gamma_count_change(n, m)
        component = dist.hellinger_gamma_same_scale(0.5, n / (2.0 * m)).h_squared
        report.add({"n": n, "m": m, "r": r, "quantity": "h2 vs 2 m h2_component"}, res.h_squared, 2.0 * m * component)
        vals.append(res.h_squared * m / r ** 2)
    _add_band(report, "h2 m / r^2", vals, p["n_list"])
