import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from speclab import spectra as sp
from speclab.errors import ArgumentError, DomainError, ParityError

import oracles

MA1 = sp.SpectralModel([1.25, 0.5], 1.0, None, "ma1")
TWO_PI = 2 * math.pi

coef_lists = st.lists(st.floats(-1.0, 1.0, allow_nan=False), min_size=1, max_size=12).map(
    lambda xs: [abs(xs[0]) + 2.0] + xs[1:])


# --- SpectralModel ------------------------------------------------------------------

def test_model_is_read_only():
    with pytest.raises(ValueError):
        MA1.autocov[0] = 3.0


@pytest.mark.parametrize("bad", [dict(autocov=[]), dict(autocov=[1.0, float("nan")]), dict(alpha=0.5)])
def test_model_validation(bad):
    args = dict(autocov=[1.0], alpha=1.0)
    args.update(bad)
    with pytest.raises((ArgumentError, DomainError)):
        sp.SpectralModel(args["autocov"], args["alpha"])


def test_class_spec_validation():
    with pytest.raises((ArgumentError, DomainError)):
        sp.SmoothnessClassSpec(1.0, 10.0, grid_points=512)
    with pytest.raises((ArgumentError, DomainError)):
        sp.SmoothnessClassSpec(1.0, -1.0)


# --- eval_density --------------------------------------------------------------------

def test_white_noise_density():
    assert sp.eval_density(sp.white_noise(), 1.3) == pytest.approx(0.1591549, abs=1e-7)


def test_ma1_density_values():
    assert sp.eval_density(MA1, 0.0) == pytest.approx(0.3580986, abs=1e-7)
    assert sp.eval_density(MA1, math.pi) == pytest.approx(0.0397887, abs=1e-7)


def test_density_domain():
    with pytest.raises(DomainError):
        sp.eval_density(MA1, 3.2)


@settings(max_examples=50, deadline=None)
@given(coef_lists)
def test_evenness(coefs):
    m = sp.SpectralModel(coefs, 1.0)
    om, _ = sp.density_grid(m, 1024)
    assert np.array_equal(sp.eval_density(m, om), sp.eval_density(m, -om))


@settings(max_examples=30, deadline=None)
@given(coefs=coef_lists, npts=st.sampled_from([32, 64, 1024, 4096]))
def test_density_grid_matches_direct_sum(coefs, npts):
    m = sp.SpectralModel(coefs, 1.0)
    om, vals = sp.density_grid(m, npts)
    k = np.arange(1, len(coefs))
    direct = (coefs[0] + 2 * np.cos(np.outer(om, k)) @ np.asarray(coefs[1:])) / TWO_PI
    assert np.max(np.abs(vals - direct)) < 1e-12


# --- norms -----------------------------------------------------------------------------

def test_sobolev_norm_examples():
    assert sp.sobolev_norm(sp.white_noise(), 1.0) == (0.0, 1.0)
    assert sp.sobolev_norm(MA1, 1.0) == pytest.approx((0.5, 2.0625), abs=1e-15)
    assert sp.sobolev_norm(MA1, 0.5) == pytest.approx((0.5, 2.0625), abs=1e-15)


def test_truncated_series():
    assert sp.truncated_series(MA1, 5) is MA1
    m = sp.SpectralModel([1.0, 0.0, 0.3], 1.0)
    t = sp.truncated_series(m, 3)
    assert t.autocov.tolist() == [1.0]
    assert sp.sup_distance(m, t, 4096) == pytest.approx(0.6 / TWO_PI, abs=1e-12)
    assert 0.6 / TWO_PI == pytest.approx(0.0954930, abs=1e-7)
    with pytest.raises(ParityError):
        sp.truncated_series(m, 4)


@settings(max_examples=40, deadline=None)
@given(coefs=coef_lists, n=st.sampled_from([1, 3, 5, 9, 21]))
def test_truncation_monotone(coefs, n):
    m = sp.SpectralModel(coefs, 1.0)
    assert sp.sobolev_norm(sp.truncated_series(m, n), 1.0)[1] <= sp.sobolev_norm(m, 1.0)[1]


# --- cell averages ---------------------------------------------------------------------

def test_cell_average_examples():
    assert np.allclose(sp.cell_averages(sp.white_noise(2.0), 7), 2.0 / TWO_PI, atol=1e-15)
    assert sp.cell_averages(MA1, 1)[0] == pytest.approx(1.25 / TWO_PI, abs=1e-15)
    assert sp.cell_averages(MA1, 2) == pytest.approx([0.1989437, 0.1989437], abs=1e-7)


def test_cell_averages_against_quadrature():
    from scipy.integrate import quad
    m = sp.SpectralModel([1.0, 0.3, -0.2, 0.05], 1.0)
    g = oracles.unit_interval_density(m.autocov)
    n = 7
    ref = [n * quad(g, (j - 1) / n, j / n, epsabs=1e-14)[0] for j in range(1, n + 1)]
    assert np.max(np.abs(sp.cell_averages(m, n) - ref)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(coefs=coef_lists, n=st.integers(1, 512))
def test_cell_average_mean_and_refinement(coefs, n):
    m = sp.SpectralModel(coefs, 1.0)
    J = sp.cell_averages(m, n)
    assert abs(J.mean() - coefs[0] / TWO_PI) < 1e-12
    J2 = sp.cell_averages(m, 2 * n)
    assert np.max(np.abs(J - 0.5 * (J2[0::2] + J2[1::2]))) < 1e-12


def test_piecewise_l2_error_against_quadrature():
    from scipy.integrate import quad
    m = sp.SpectralModel([1.0, 0.3, -0.2, 0.05], 1.0)
    g = oracles.unit_interval_density(m.autocov)
    n = 5
    J = sp.cell_averages(m, n)
    ref = sum(quad(lambda x: (g(x) - J[j]) ** 2, j / n, (j + 1) / n, epsabs=1e-14)[0] for j in range(n))
    assert sp.piecewise_l2_error(m, n) == pytest.approx(ref, rel=1e-9)


# --- Besov ---------------------------------------------------------------------------------

def test_besov_constant_is_zero():
    assert sp.besov_seminorm_22(sp.white_noise(), 0.7) == 0.0


def test_besov_homogeneity():
    three = MA1.with_autocov(3 * MA1.autocov)
    assert sp.besov_seminorm_22(three, 0.7) == pytest.approx(3 * sp.besov_seminorm_22(MA1, 0.7), rel=1e-12)


# frozen from oracles.besov_quadrature([1.25, 0.5], 0.7): adaptive quad for every increment norm
BESOV_MA1_07 = 0.7009791320201733


def test_besov_matches_quadrature_oracle():
    assert sp.besov_seminorm_22(MA1, 0.7) == pytest.approx(BESOV_MA1_07, rel=0.01)


@pytest.mark.slow
def test_besov_oracle_recomputed():
    m = sp.SpectralModel([1.0, 0.2, -0.1], 1.0)
    assert sp.besov_seminorm_22(m, 0.6) == pytest.approx(oracles.besov_quadrature(m.autocov, 0.6), rel=0.01)


def test_besov_domain():
    with pytest.raises(DomainError):
        sp.besov_seminorm_22(MA1, 1.0)


# --- class membership ----------------------------------------------------------------

def test_membership_examples():
    wn = sp.white_noise()
    v = sp.class_membership(wn, sp.SmoothnessClassSpec(1.0, 10.0))
    assert v.member and v.norm_sq == 1.0 and v.min_density == pytest.approx(0.159, abs=1e-3)
    v = sp.class_membership(wn, sp.SmoothnessClassSpec(1.0, 2.0))
    assert not v.member and [x.condition for x in v.violations] == ["positivity"]
    v = sp.class_membership(MA1, sp.SmoothnessClassSpec(1.0, 10.0))
    assert not v.member and v.min_density == pytest.approx(0.0397887, abs=1e-7)
    assert sp.class_membership(MA1, sp.SmoothnessClassSpec(1.0, 30.0)).member


def test_norm_violation_is_named():
    m = sp.SpectralModel([3.0, 1.0], 1.0)
    v = sp.class_membership(m, sp.SmoothnessClassSpec(1.0, 5.0))
    assert "sobolev-ellipsoid" in [x.condition for x in v.violations]


@pytest.mark.parametrize("seed", range(5))
def test_random_class_model_is_member(seed):
    m = sp.random_class_model(seed, 1.0, 10.0, 64)
    assert sp.class_membership(m, sp.SmoothnessClassSpec(1.0, 10.0)).member
    assert m.autocov.size == 65


# --- presets and files -------------------------------------------------------------------

def test_presets():
    assert sp.parse_preset("ma1:theta=0.5,var=1").autocov.tolist() == [1.25, 0.5]
    assert sp.parse_preset("whitenoise:var=2").autocov.tolist() == [2.0]
    ar = sp.parse_preset("ar1:phi=0.6,var=1,tail=1e-10")
    assert ar.autocov[1] / ar.autocov[0] == pytest.approx(0.6)
    assert "K=" in ar.name
    assert sp.parse_preset("ma1-in-sigma").bigM == 30.0


def test_ar1_tail_rule():
    ar = sp.ar1(0.6)
    k = np.arange(ar.K + 1, ar.K + 2000, dtype=float)
    tail = 2 * np.sum(k ** 2 * (ar.autocov[0] * 0.6 ** k) ** 2)
    assert tail < 1e-10
    k = np.arange(ar.K, ar.K + 2000, dtype=float)
    assert 2 * np.sum(k ** 2 * (ar.autocov[0] * 0.6 ** k) ** 2) >= 1e-10


@pytest.mark.parametrize("text", ["nope", "ma1:theta", "ma1:theta=x", "ma1:phi=0.3"])
def test_bad_presets(text):
    with pytest.raises(ArgumentError):
        sp.parse_preset(text)


def test_model_file_round_trip(tmp_path):
    m = sp.random_class_model(3, 1.0, 10.0, 16)
    sp.save_model(m, tmp_path / "m.json")
    back = sp.load_model(tmp_path / "m.json")
    assert np.array_equal(back.autocov, m.autocov)
    assert (back.alpha, back.bigM, back.name) == (m.alpha, m.bigM, m.name)
