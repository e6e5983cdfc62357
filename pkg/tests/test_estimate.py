import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, stats

from speclab import estimate as est
from speclab import simulate as sim
from speclab import spectra as sp
from speclab.errors import ArgumentError, DomainError, NumericError

import oracles

SIGMA = sp.ma1_in_sigma()
SPEC = sp.SmoothnessClassSpec(1.0, 10.0)


def path(values, kind="stationary"):
    return sim.SamplePath(np.asarray(values, dtype=float), kind)


# --- schedules ---------------------------------------------------------------------------

def test_schedule_examples():
    s = est.compute_schedule(1001, 1.0, 0.75)
    assert s.gamma_rate == pytest.approx(1 / 12)
    assert (s.r_split, s.m_split, s.r_upper, s.upper_size) == (7, 497, 12, 1013)
    assert s.kappa == pytest.approx(1001 ** (-1 / 12))
    assert est.ScheduleConfig(1.0, 0.75).n_trunc(1000) == 10


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 20000).map(lambda k: 2 * k + 1))
def test_schedule_parities(n):
    s = est.compute_schedule(n, 1.0, 0.75)
    assert s.r_split % 2 == 1 and (n - s.r_split) % 2 == 0
    assert (n + s.r_upper) % 2 == 1
    assert s.n_trunc ** 3 <= n < (s.n_trunc + 1) ** 3


@pytest.mark.parametrize("n,a,b", [(1000, 1.0, 0.75), (1, 1.0, 0.75), (101, 1.0, 1.2), (101, 1.0, 0.4)])
def test_schedule_errors(n, a, b):
    with pytest.raises(ArgumentError):
        est.compute_schedule(n, a, b)


# --- autocovariances and the series estimator --------------------------------------------------

def test_empirical_autocov_examples():
    assert est.empirical_autocov(path([1, -1, 1]), 2).tolist() == [1.0, -1.0, 1.0]
    y = np.array([2.0, 0.5, -1.0, 3.0])
    assert est.empirical_autocov(path(y), 3)[3] == y[0] * y[3]
    with pytest.raises(ArgumentError):
        est.empirical_autocov(path(y), 4)


def test_autocov_batch_matches_single():
    Y = sim.stationary_batch(SIGMA, 31, 4, 0)
    G = est.autocov_batch(Y, 5)
    for t in range(4):
        assert np.allclose(G[t], est.empirical_autocov(path(Y[t]), 5), atol=1e-14)


def test_long_path_autocov():
    y = sim.sample_stationary(SIGMA, 100_000, 4)
    assert abs(est.empirical_autocov(y, 1)[1] - 0.5) < 0.02


def test_series_estimator():
    y = sim.sample_stationary(SIGMA, 1000, 1)
    f = est.series_estimator(y, est.ScheduleConfig(1.0, 0.75))
    assert f.K == 10
    truth = sp.random_class_model(3, 1.0, 10.0, 6)
    y = sim.sample_stationary(truth, 100_000, 5)
    fhat = est.series_estimator(y, est.ScheduleConfig(1.0, 0.75))
    assert fhat.K == 46
    assert np.max(np.abs(fhat.autocov - truth.lags(fhat.K + 1))) < 0.02


def test_sobolev_distance():
    assert est.sobolev_distance_sq([1.0, 0.5], [1.0], 1.0) == pytest.approx(0.5)
    assert est.sobolev_distance_sq([1.0], [0.0, 0.0, 1.0], 0.5) == pytest.approx(1.0 + 2 * 2)


# --- projection ------------------------------------------------------------------------------

def test_projection_fixes_members():
    m = sp.random_class_model(0, 1.0, 10.0, 8)
    assert np.array_equal(est.project_to_class(m, SPEC, 0.75).autocov, m.autocov)


def test_projection_norm_violation_lands_on_boundary():
    raw = sp.SpectralModel([3.0, 1.0, 0.5, 0.2], 1.0)
    out = est.project_to_class(raw, SPEC, 0.75)
    assert sp.sobolev_norm(out, 1.0)[1] == pytest.approx(10.0, abs=1e-8)
    assert sp.class_membership(out, SPEC).member


def test_projection_positivity_violation():
    raw = sp.SpectralModel([0.5, 0.45, 0.1], 1.0)
    out = est.project_to_class(raw, SPEC, 0.75)
    _, f = sp.density_grid(out, SPEC.grid_points)
    assert f.min() >= 0.1 - 1e-10


@pytest.mark.parametrize("x", [[3.0, 1.0, 0.5, 0.2], [1.0, 0.9, 0.3, 0.1, 0.05], [0.5, 0.45, 0.1]])
def test_projection_matches_convex_solver(x):
    x = np.array(x)
    out = est.project_to_class(sp.SpectralModel(x, 1.0), SPEC, 0.75).autocov
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ref = oracles.projection_oracle(x, 10.0, 1.0, 0.75, SPEC.grid_points)
    assert np.max(np.abs(out - ref)) < 1e-6
    assert est.sobolev_distance_sq(out, x, 0.75) <= est.sobolev_distance_sq(ref, x, 0.75) * (1 + 1e-6)


def test_ellipsoid_step_is_exact():
    x = np.array([3.0, 1.0, 0.5, 0.2])
    g, mu = est.ellipsoid_projection(x, 10.0, 1.0, 0.75)
    k = np.arange(4.0)
    r = np.concatenate(([1.0], k[1:] ** 0.5))
    assert np.allclose(g, x / (1 + mu * r), rtol=1e-12)
    assert sp.sobolev_norm(sp.SpectralModel(g, 1.0), 1.0)[1] == pytest.approx(10.0, abs=1e-9)


def test_projection_iteration_cap():
    raw = sp.SpectralModel([0.2, 0.6, 0.5, 0.4], 1.0)
    with pytest.raises(NumericError) as info:
        est.project_to_class(raw, SPEC, 0.75, max_iter=1)
    assert info.value.diagnostics["iterations"] == 1


def test_projection_beta_range():
    with pytest.raises(ArgumentError):
        est.project_to_class(SIGMA, SPEC, 1.5)


# --- Whittle and exact likelihood ----------------------------------------------------------------

def test_whittle_zero_path():
    pg = sim.dft_periodogram(path(np.zeros(9)))
    assert est.whittle_likelihood(sp.white_noise(), pg) == pytest.approx(0.5 * math.log(1 / (2 * math.pi)), abs=1e-12)
    assert 0.5 * math.log(1 / (2 * math.pi)) == pytest.approx(-0.9189385, abs=1e-7)


def test_whittle_discrete_n3():
    y = [0.3, -1.2, 0.8]
    pg = sim.dft_periodogram(path(y))
    w = 2 * math.pi / 3
    d = sum(math.e ** 0 * v * complex(math.cos(k * w), -math.sin(k * w)) for k, v in enumerate(y, 1))
    I1 = abs(d) ** 2 / (2 * math.pi * 3)
    f1 = (1.25 + 2 * 0.5 * math.cos(w)) / (2 * math.pi)
    assert est.whittle_likelihood(SIGMA, pg, "discrete") == pytest.approx((math.log(f1) + I1 / f1) / 3, rel=1e-12)


def test_whittle_continuous_against_quadrature():
    y = sim.sample_stationary(SIGMA, 21, 3)
    pg = sim.dft_periodogram(y)
    c = pg.sample_autocov
    h = np.arange(1, c.size)

    def integrand(w):
        I = (c[0] + 2 * np.sum(c[1:] * np.cos(h * w))) / (2 * math.pi)
        f = sp.eval_density(SIGMA, w)
        return math.log(f) + I / f

    ref = integrate.quad(integrand, -math.pi, math.pi, limit=400, epsabs=1e-13)[0] / (4 * math.pi)
    assert est.whittle_likelihood(SIGMA, pg) == pytest.approx(ref, rel=1e-10)


def test_whittle_batch_matches_single():
    Y = sim.stationary_batch(SIGMA, 31, 3, 1)
    batch = est.whittle_batch(SIGMA, Y)
    for t in range(3):
        assert batch[t] == pytest.approx(est.whittle_likelihood(SIGMA, sim.dft_periodogram(path(Y[t]))), rel=1e-12)


def test_whittle_rejects_nonpositive_density():
    pg = sim.dft_periodogram(path(np.ones(5)))
    with pytest.raises(DomainError):
        est.whittle_likelihood(sp.SpectralModel([1.0, 0.5], 1.0), pg)
    with pytest.raises(ArgumentError):
        est.whittle_likelihood(SIGMA, pg, "fancy")


def test_exact_loglik():
    y = np.array([0.3, -1.0, 2.0, 0.1])
    assert est.exact_loglik(sp.white_noise(), path(y)) == pytest.approx(-2 * math.log(2 * math.pi) - y @ y / 2)
    assert est.exact_loglik(sp.white_noise(), path([0.0])) == pytest.approx(-0.9189385, abs=1e-7)
    from speclab.covariance import toeplitz
    ref = stats.multivariate_normal(np.zeros(4), toeplitz(SIGMA, 4)).logpdf(y)
    assert est.exact_loglik(SIGMA, path(y)) == pytest.approx(ref, rel=1e-12)


def test_whittle_residual_reproducible():
    y = sim.sample_stationary(SIGMA, 129, 8)
    r1 = est.whittle_residual(est.exact_loglik(SIGMA, y), est.whittle_likelihood(SIGMA, sim.dft_periodogram(y)), 129)
    y2 = sim.sample_stationary(SIGMA, 129, 8)
    r2 = est.whittle_residual(est.exact_loglik(SIGMA, y2), est.whittle_likelihood(SIGMA, sim.dft_periodogram(y2)), 129)
    assert math.isfinite(r1) and r1 == r2


# --- neighbourhoods ---------------------------------------------------------------------------------

def test_neighborhood():
    nb = est.NeighborhoodSpec(SIGMA, 0.1)
    assert nb.contains(SIGMA)
    shifted = SIGMA.with_autocov(SIGMA.autocov + np.array([0.0, 0.05]))
    d = 0.1 / (2 * math.pi) + math.sqrt(2 * 0.05 ** 2)
    assert nb.distance(shifted) == pytest.approx(d, rel=1e-9)
    assert est.NeighborhoodSpec(SIGMA, 0.08).contains(shifted) is False
    with pytest.raises(ArgumentError):
        est.NeighborhoodSpec(SIGMA, 0.0)
