"""End-to-end bracket chain: the five approximation links, per odd n."""
from __future__ import annotations

import numpy as np

from .. import covariance as cov
from .. import distances as dist
from .. import spectra as sp
from ..errors import ParityError
from ..estimate import ScheduleConfig
from .checks import MONOTONE_SLACK, scale_merge_log_affinity, scale_merge_strasser
from .report import VerificationReport

LINKS = ("a-upper", "b-grid", "c-split", "d-scale-merge", "e-count-change")


def _h2(A, B):
    return dist.hellinger_gaussian(A, B).h_squared


def bracket_chain_report(model: sp.SpectralModel, n_list, seed: int = 0) -> VerificationReport:
    """Every link value as an info row, explicit-constant inequalities as bound rows.

    stats["decreasing"][link] records whether the link's sequence is
    non-increasing in n (within MONOTONE_SLACK).
    """
    n_list = [int(n) for n in n_list]
    for n in n_list:
        if n % 2 == 0:
            raise ParityError(f"bracket chain needs odd n, got {n}")
    alpha = model.alpha
    semi = sp.sobolev_norm(model, alpha)[0]
    report = VerificationReport("bracket-chain", {"model": model.name, "n_list": n_list, "seed": int(seed)})
    series = {name: [] for name in LINKS}
    direct = []

    for n in n_list:
        G = cov.toeplitz(model, n)

        r_up = ScheduleConfig.r_upper(n)
        Gu = cov.circulant_partial(model, n, n + r_up)
        h2 = _h2(G, Gu)
        series["a-upper"].append(h2)
        report.add({"n": n, "link": "a-upper", "quantity": "h2", "m": n + r_up}, h2)
        report.add({"n": n, "link": "a-upper", "quantity": "frobenius"},
                   cov.frobenius_sq(G - Gu), 4.0 * (r_up + 1) ** (1.0 - 2.0 * alpha) * semi)

        lam = cov.circulant_eigenvalues(model, n).eigenvalues / sp.TWO_PI
        grid = float(np.sum((sp.cell_averages(model, n) - lam) ** 2))
        series["b-grid"].append(grid)
        report.add({"n": n, "link": "b-grid", "quantity": "sum (J - f~)^2"}, grid)

        r = ScheduleConfig.r_split(n)
        s = cov.split_covariances(model, n, r)
        h2 = _h2(s.joined, s.independent)
        series["c-split"].append(h2)
        report.add({"n": n, "link": "c-split", "quantity": "h2", "r": r}, h2)
        report.add({"n": n, "link": "c-split", "quantity": "frobenius"},
                   cov.frobenius_sq(s.joined - s.independent), (r + 1) ** (1.0 - 2.0 * alpha) * semi)

        m = (n - r) // 2
        log_aff, terms = scale_merge_log_affinity(model, m)
        h2 = dist.product_hellinger([log_aff]).h_squared
        series["d-scale-merge"].append(h2)
        report.add({"n": n, "link": "d-scale-merge", "quantity": "h2", "m": m}, h2)
        report.add({"n": n, "link": "d-scale-merge", "quantity": "h2 vs 2 sum h2_j"}, h2, scale_merge_strasser(terms))

        m2 = n - r
        res = dist.gamma_count_change(n, m2)
        component = dist.hellinger_gamma_same_scale(0.5, n / (2.0 * m2)).h_squared
        series["e-count-change"].append(res.h_squared)
        report.add({"n": n, "link": "e-count-change", "quantity": "h2", "m": m2}, res.h_squared)
        report.add({"n": n, "link": "e-count-change", "quantity": "h2 m / r^2"}, res.h_squared * m2 / r ** 2)
        report.add({"n": n, "link": "e-count-change", "quantity": "h2 vs 2 m h2_j"}, res.h_squared, 2.0 * m2 * component)

        h2 = _h2(G, cov.circulant(model, n))
        direct.append(h2)
        report.add({"n": n, "link": "direct", "quantity": "h2(Gamma_n, Gamma~_n)"}, h2)

    decreasing = {}
    for name, vals in series.items():
        inc = float(np.max(np.diff(vals))) if len(vals) > 1 else 0.0
        decreasing[name] = inc <= MONOTONE_SLACK
        report.add({"link": name, "quantity": "max increase in n"}, inc)
    report.stats["decreasing"] = decreasing
    report.stats["direct_h2"] = direct
    return report
