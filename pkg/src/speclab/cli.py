"""speclab command-line front end.

Exit status: 0 success, 1 a check failed, 2 usage error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import covariance as cov
from . import distances as dist
from . import estimate as est
from . import simulate as sim
from . import spectra as sp
from .errors import ArgumentError, ConditioningError, DomainError, NumericError, SpeclabError
from .verify import bracket_chain_report, get_check, list_checks, reports_to_csv, run_all, run_check

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

# CLI flag -> check parameter name
CHECK_FLAGS = {"n": "n", "m": "m", "alpha": "alpha", "M": "M", "beta": "beta",
               "trials": "trials", "n_list": "n_list", "preset": "model"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *a, **kw):
        kw.setdefault("allow_abbrev", False)
        super().__init__(*a, **kw)

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _fmt(x) -> str:
    return "%.17g" % x


def _int_list(text: str):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _default_seed():
    env = os.environ.get("SPECLAB_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"SPECLAB_SEED must be an integer, got {env!r}") from None


# --- parser -----------------------------------------------------------------------

def _add_model(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--preset", help="model preset, e.g. ma1:theta=0.5 or ma1-in-sigma")
    g.add_argument("--model", help="model JSON file")


def _add_out(p, formats=("json", "csv"), default=None):
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=formats, default=default or formats[0])


def build_parser() -> argparse.ArgumentParser:
    root = _Parser(prog="speclab", description=__doc__.splitlines()[0])
    top = root.add_subparsers(dest="group", required=True, parser_class=_Parser)

    # spec
    grp = top.add_parser("spec", help="spectral densities and class membership")
    sub = grp.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("eval", help="evaluate f at points or on a uniform grid")
    _add_model(p)
    p.add_argument("--omega", type=_float_list, help="comma-separated frequencies in [-pi, pi]")
    p.add_argument("--grid", type=int, default=None, help="number of uniform grid points")
    _add_out(p, ("csv", "json"))
    p = sub.add_parser("norms", help="Sobolev (and optionally Besov) norms")
    _add_model(p)
    p.add_argument("--s", type=float, help="Sobolev index (default: model alpha)")
    p.add_argument("--besov", type=float, help="also report the B^alpha_{2,2} seminorm at this alpha")
    _add_out(p)
    p = sub.add_parser("member", help="membership in the class W^alpha(M)")
    _add_model(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--M", type=float)
    _add_out(p)

    # cov
    grp = top.add_parser("cov", help="covariance matrices")
    sub = grp.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in (("toeplitz", "stationary covariance Gamma_n"),
                       ("circulant", "circulant approximation Gamma~_n")):
        p = sub.add_parser(name, help=text)
        _add_model(p)
        p.add_argument("--n", type=int, required=True)
        _add_out(p, ("csv",))
    p = sub.add_parser("partial", help="upper-left n x n block of the m x m circulant")
    _add_model(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    _add_out(p, ("csv",))
    p = sub.add_parser("split", help="covariance of the two halves left after deleting r central points")
    _add_model(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, help="deleted block length (default: schedule r_split)")
    p.add_argument("--part", choices=("joined", "independent", "corner"), default="joined")
    _add_out(p, ("csv",))

    # dist
    grp = top.add_parser("dist", help="Hellinger distances")
    sub = grp.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("gaussian", help="centred Gaussians with covariance matrices from CSV")
    p.add_argument("--a-file", required=True)
    p.add_argument("--b-file", required=True)
    _add_out(p, ("json", "csv"))
    p = sub.add_parser("gamma-shape", help="Gamma(a, s) vs Gamma(a, t)")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    _add_out(p)
    p = sub.add_parser("gamma-scale", help="Gamma(a, s) vs Gamma(b, s)")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--s", type=float, default=1.0)
    _add_out(p)

    # sim
    grp = top.add_parser("sim", help="seeded samplers")
    sub = grp.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("stationary", "periodic", "scale", "whitenoise"):
        p = sub.add_parser(name, help=f"sample the {name} experiment")
        _add_model(p)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--seed", type=int)
        if name == "whitenoise":
            p.add_argument("--m", type=int, help="grid cells (default 16 n)")
        _add_out(p, ("csv",))
    p = sub.add_parser("periodogram", help="periodogram at the Fourier frequencies")
    p.add_argument("--path", required=True, help="path CSV (index,value)")
    _add_out(p, ("csv",))

    # est
    grp = top.add_parser("est", help="estimators and likelihoods")
    sub = grp.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("autocov", help="empirical autocovariances")
    p.add_argument("--path", required=True)
    p.add_argument("--max-lag", type=int, required=True)
    _add_out(p, ("csv", "json"))
    p = sub.add_parser("series", help="truncated series estimator, optionally projected")
    p.add_argument("--path", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--M", type=float, help="project into W^alpha(M)")
    _add_out(p, ("json",))
    for name in ("whittle", "loglik"):
        p = sub.add_parser(name, help="Whittle likelihood" if name == "whittle" else "exact Gaussian log-likelihood")
        _add_model(p)
        p.add_argument("--path", required=True)
        _add_out(p)
    p = sub.add_parser("schedule", help="n-dependent tuning quantities")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    _add_out(p)

    # verify
    grp = top.add_parser("verify", help="executable checks")
    sub = grp.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("run", help="run one check")
    p.add_argument("--check", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--preset", help="model preset for checks with a 'model' parameter")
    for flag, typ in (("--n", int), ("--m", int), ("--alpha", float), ("--M", float),
                      ("--beta", float), ("--trials", int), ("--n-list", _int_list)):
        p.add_argument(flag, type=typ)
    p.add_argument("--param", action="append", default=[], metavar="KEY=JSON",
                   help="override any check parameter")
    _add_out(p)
    p = sub.add_parser("all", help="run the whole catalog")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    _add_out(p)
    p = sub.add_parser("list", help="list the catalog")
    _add_out(p)

    # report
    grp = top.add_parser("report", help="composite reports")
    sub = grp.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("bracket-chain", help="the five approximation links per n")
    _add_model(p)
    p.add_argument("--n-list", type=_int_list, required=True)
    p.add_argument("--seed", type=int)
    _add_out(p, ("csv", "json"))
    return root


# --- helpers ----------------------------------------------------------------------

def _model(args) -> sp.SpectralModel:
    if getattr(args, "model", None):
        try:
            return sp.load_model(args.model)
        except json.JSONDecodeError as exc:
            raise ArgumentError(f"{args.model}: not valid JSON ({exc})") from None
    return sp.parse_preset(args.preset)


def _seed(args) -> int:
    return args.seed if getattr(args, "seed", None) is not None else _default_seed()


def _emit(args, text: str):
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=1)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _record(args, data: dict):
    if args.format == "csv":
        _emit(args, _csv_text(list(data), [list(data.values())]))
    else:
        _emit(args, _json(data))


def _matrix(args, A):
    _emit(args, _csv_text([f"c{j}" for j in range(A.shape[1])], [[float(v) for v in r] for r in A]))


def _path(file) -> sim.SamplePath:
    return sim.read_path_csv(file)


# --- commands ---------------------------------------------------------------------

def _spec(args):
    model = _model(args)
    if args.command == "eval":
        if args.omega:
            om = np.asarray(args.omega)
        else:
            om, _ = sp.density_grid(model, args.grid or 1024)
        f = sp.eval_density(model, om)
        if args.format == "json":
            _emit(args, _json({"omega": om.tolist(), "f": f.tolist()}))
        else:
            _emit(args, _csv_text(["omega", "f"], zip(om.tolist(), f.tolist())))
    elif args.command == "norms":
        s = model.alpha if args.s is None else args.s
        semi, norm = sp.sobolev_norm(model, s)
        out = {"model": model.name, "s": s, "seminorm_sq": semi, "norm_sq": norm}
        if args.besov is not None:
            out["besov_seminorm"] = sp.besov_seminorm_22(model, args.besov)
        _record(args, out)
    else:
        alpha = model.alpha if args.alpha is None else args.alpha
        bigM = args.M if args.M is not None else model.bigM
        if bigM is None:
            raise ArgumentError("member needs --M (the model carries no class radius)")
        v = sp.class_membership(model, sp.SmoothnessClassSpec(alpha, bigM))
        out = {"member": v.member, "norm_sq": v.norm_sq, "min_density": v.min_density,
               "violations": [viol.condition for viol in v.violations]}
        if args.format == "csv":
            out["violations"] = ";".join(out["violations"])
        _record(args, out)
    return EXIT_OK


def _cov(args):
    model = _model(args)
    if args.command == "toeplitz":
        A = cov.toeplitz(model, args.n)
    elif args.command == "circulant":
        A = cov.circulant(model, args.n)
    elif args.command == "partial":
        A = cov.circulant_partial(model, args.n, args.m)
    else:
        r = est.ScheduleConfig.r_split(args.n) if args.r is None else args.r
        A = getattr(cov.split_covariances(model, args.n, r), args.part)
    _matrix(args, A)
    return EXIT_OK


def _dist(args):
    if args.command == "gaussian":
        res = dist.hellinger_gaussian(cov.read_matrix_csv(args.a_file), cov.read_matrix_csv(args.b_file))
    elif args.command == "gamma-shape":
        res = dist.hellinger_gamma_same_shape(args.a, args.s, args.t)
    else:
        res = dist.hellinger_gamma_same_scale(args.a, args.b, args.s)
    _record(args, {"h_squared": res.h_squared, "affinity": res.affinity, "method": res.method})
    return EXIT_OK


def _sim(args):
    if args.command == "periodogram":
        pg = sim.dft_periodogram(_path(args.path))
        _emit(args, _csv_text(["omega", "I"], zip(pg.omega.tolist(), pg.ordinates.tolist())))
        return EXIT_OK
    model = _model(args)
    seed = _seed(args)
    if args.command == "stationary":
        path = sim.sample_stationary(model, args.n, seed)
    elif args.command == "periodic":
        path = sim.sample_periodic(model, args.n, seed)
    elif args.command == "scale":
        path = sim.sample_scale(model, args.n, seed)
    else:
        path = sim.sample_whitenoise_model(model, args.n, seed, args.m)
    _emit(args, _csv_text(["index", "value"], ((i, float(v)) for i, v in enumerate(path.values, 1))))
    return EXIT_OK


def _est(args):
    if args.command == "schedule":
        _record(args, est.compute_schedule(args.n, args.alpha, args.beta).as_dict())
        return EXIT_OK
    path = _path(args.path)
    if args.command == "autocov":
        g = est.empirical_autocov(path, args.max_lag)
        if args.format == "json":
            _emit(args, _json({"autocov": g.tolist()}))
        else:
            _emit(args, _csv_text(["lag", "value"], ((k, float(v)) for k, v in enumerate(g))))
    elif args.command == "series":
        cfg = est.ScheduleConfig(args.alpha, args.beta)
        model = est.series_estimator(path, cfg, args.M)
        if args.M is not None:
            model = est.project_to_class(model, sp.SmoothnessClassSpec(args.alpha, args.M), args.beta)
        _emit(args, json.dumps(sp.model_to_dict(model), indent=2))
    elif args.command == "whittle":
        model = _model(args)
        pg = sim.dft_periodogram(path)
        _record(args, {"n": path.n, "continuous": est.whittle_likelihood(model, pg, "continuous"),
                       "discrete": est.whittle_likelihood(model, pg, "discrete")})
    else:
        model = _model(args)
        _record(args, {"n": path.n, "loglik": est.exact_loglik(model, path)})
    return EXIT_OK


def _check_overrides(args) -> dict:
    spec = get_check(args.check)
    over = {}
    for flag, pname in CHECK_FLAGS.items():
        val = getattr(args, flag, None)
        if val is None:
            continue
        if pname not in spec.defaults:
            raise ArgumentError(f"check {args.check!r} does not take --{flag.replace('_', '-')}; "
                                f"its parameters: {', '.join(sorted(spec.defaults))}")
        over[pname] = val
    for item in args.param:
        key, sep, raw = item.partition("=")
        if not sep:
            raise ArgumentError(f"--param expects KEY=VALUE, got {item!r}")
        try:
            over[key] = json.loads(raw)
        except json.JSONDecodeError:
            over[key] = raw
    over["seed"] = _seed(args)
    return over


def _reports_out(args, reports, seed=None):
    if args.format == "csv":
        _emit(args, reports_to_csv(reports))
    elif seed is None:
        _emit(args, reports[0].to_json())
    else:
        _emit(args, _json({"seed": seed, "checks": [r.to_dict() for r in reports]}))


def _verify(args):
    if args.command == "list":
        entries = [{"check_id": c.check_id, "module": c.module, "anchor": c.anchor,
                    "description": c.description} for c in list_checks().values()]
        if args.format == "csv":
            _emit(args, _csv_text(list(entries[0]), [list(e.values()) for e in entries]))
        else:
            _emit(args, _json(entries))
        return EXIT_OK
    if args.command == "run":
        report = run_check(args.check, _check_overrides(args))
        _reports_out(args, [report])
        return EXIT_OK if report.passed else EXIT_FAIL
    seed = _seed(args)
    reports = run_all(seed, args.jobs)
    _reports_out(args, reports, seed)
    for r in reports:
        if not r.passed:
            print(f"check {r.check_id} failed ({len(r.failures())} rows)", file=sys.stderr)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _report(args):
    report = bracket_chain_report(_model(args), args.n_list, _seed(args))
    if args.format == "json":
        _emit(args, report.to_json())
    else:
        rows = []
        for row in report.rows:
            if "n" not in row.grid:
                continue
            g = row.grid
            rows.append([g["n"], g["link"], g["quantity"], row.measured,
                         "" if row.bound is None else row.bound,
                         "" if row.bound is None else ("pass" if row.passes(report.tol) else "fail")])
        _emit(args, _csv_text(["n", "link", "quantity", "measured", "bound", "status"], rows))
    return EXIT_OK if report.passed else EXIT_FAIL


HANDLERS = {"spec": _spec, "cov": _cov, "dist": _dist, "sim": _sim, "est": _est,
            "verify": _verify, "report": _report}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return HANDLERS[args.group](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ArgumentError, DomainError) as exc:
        print(f"speclab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConditioningError, NumericError) as exc:
        print(f"speclab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except SpeclabError as exc:
        print(f"speclab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"speclab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
