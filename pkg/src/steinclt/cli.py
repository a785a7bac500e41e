"""Seeded experiment drivers.

Subcommands are thin: all numerics live in the library modules, the CLI only
parses configuration, derives streams from --seed, runs the driver and emits
CSV/JSON.  Exit codes: 0 success, 1 a check suite failed, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import bounds as bd
from . import convex as cv
from . import gaussian as ga
from . import semigroup as sg
from . import sources as so
from . import stein as st
from .errors import ConfigurationError, DomainError, HypothesisViolationError
from .reports import emit
from .rng import RngStream

_CHECK_COLUMNS = ("check", "value", "reference", "tolerance", "passed")


def _parse_int_list(text: str):
    return [int(v) for v in str(text).split(",") if v != ""]


def _constants_from(args) -> bd.ConstantsConfig:
    overrides = {}
    for item in args.constant or []:
        if "=" not in item:
            raise ConfigurationError(f"--constant expects name=value, got {item!r}")
        name, value = item.split("=", 1)
        overrides[name.strip()] = float(value)
    try:
        return bd.ConstantsConfig().override(**overrides)
    except TypeError as exc:
        raise ConfigurationError(f"unknown constant in --constant: {exc}") from exc


def _family_for(args, k: int) -> cv.SetFamily:
    if getattr(args, "family", None):
        fam = cv.load_family(args.family)
        if fam.dim != k:
            raise ConfigurationError(
                f"family file has dimension {fam.dim}, experiment has k={k}"
            )
        return fam
    return cv.default_family(k, seed=getattr(args, "family_seed", 0))


def _check_rows_pass(rows) -> bool:
    return all(bool(r["passed"]) for r in rows)


def _row(check, value, reference, tol, passed) -> dict:
    return {
        "check": check,
        "value": float(value),
        "reference": float(reference),
        "tolerance": float(tol),
        "passed": bool(passed),
    }


# ---------------------------------------------------------------------------
# check suites


def run_check_inequalities(args) -> tuple[list, dict, bool]:
    rows = []
    oracles = {
        "distinct": (2.0 / math.pi) ** 1.5,
        "pair": 4.0 * float(ga.norm_pdf(1.0)) * math.sqrt(2.0 / math.pi),
        "triple": 2.0 * float(ga.norm_pdf(0.0)) + 8.0 * float(ga.norm_pdf(math.sqrt(3.0))),
    }
    caps = {"distinct": 1.0, "pair": 1.0, "triple": math.sqrt(6.0)}
    k = max(args.k, 3)
    for pattern, oracle in oracles.items():
        val = ga.abs_d3_integral(pattern, k)
        rows.append(_row(f"abs-d3-{pattern}", val, oracle, 1e-10, abs(val - oracle) <= 1e-10))
        rows.append(_row(f"abs-d3-{pattern}-cap", val, caps[pattern], 0.0, val <= caps[pattern]))
    gen = RngStream(args.seed, stream_id=11).generator()
    s = np.exp(gen.uniform(math.log(1e-6), math.log(20.0), size=10_000))
    gap = float(np.max(st.smoothing_weight(s) - st.weight_bound(s)))
    rows.append(_row("weight-pointwise", gap, 0.0, 0.0, gap <= 0.0))
    for t in (0.01, 0.1, 0.5, 1.0):
        val = st.weight3_integral(t)
        cap = (2.0 * t) ** -0.5
        rows.append(_row(f"weight3-integral-t={t}", val, cap, 1e-8, val <= cap + 1e-8))
    rows.append(
        _row("weight1-total", st.weight1_integral_total(), math.pi / 2.0, 1e-9, True)
    )
    # vanishing moments of the derivative kernels, exact under Gauss-Hermite
    from .quadrature import gauss_hermite_tensor

    kk = min(args.k, 3)
    nodes, wts = gauss_hermite_tensor(kk, 32)
    for idx in {(0,) * 3, tuple(range(min(kk, 3))) + (0,) * (3 - min(kk, 3))}:
        kern = wts.copy()
        mult = {}
        for i in idx:
            mult[i] = mult.get(i, 0) + 1
        for j, m in mult.items():
            kern = kern * ga.hermite_he(m, nodes[:, j])
        rows.append(_row(f"kernel-mean-{idx}", abs(kern.sum()), 0.0, 1e-8, abs(kern.sum()) <= 1e-8))
        moment = abs(float(kern @ nodes[:, 0]))
        rows.append(_row(f"kernel-first-moment-{idx}", moment, 0.0, 1e-8, moment <= 1e-8))
    return rows, {"k": args.k, "seed": args.seed}, _check_rows_pass(rows)


def _grid_points(k: int, count: int, seed: int) -> np.ndarray:
    gen = RngStream(seed, stream_id=23).generator()
    return np.clip(gen.standard_normal((count, k)), -2.5, 2.5)


def _catalog_sets(k: int):
    yield "half-space", cv.HalfSpace(np.eye(k)[0], 0.3)
    yield "ball", cv.Ball(np.zeros(k), ga.quantile_a(k).a_k)


def run_check_semigroup(args) -> tuple[list, dict, bool]:
    rows = []
    k = args.k
    pts = _grid_points(k, 5, args.seed)
    g = sg.hermite_product_function((1,) + (0,) * (k - 1))
    worst = max(
        abs(sg.generator_apply(g, x) + float(x[0])) for x in pts
    )
    rows.append(_row("eigenvalue-1", worst, 0.0, 1e-12, worst <= 1e-12))
    if k >= 2:
        g2 = sg.hermite_product_function((1, 1) + (0,) * (k - 2))
        worst2 = max(
            abs(sg.generator_apply(g2, x) + 2.0 * float(x[0] * x[1])) for x in pts
        )
        rows.append(_row("eigenvalue-2", worst2, 0.0, 1e-12, worst2 <= 1e-12))
    for name, C in _catalog_sets(k):
        h = sg.IndicatorFunction(C)
        res = max(abs(sg.backward_residual(h, t, x)) for t in (0.5, 1.0) for x in pts[:3])
        rows.append(_row(f"backward-{name}", res, 0.0, 1e-3, res <= 1e-3))
        mass = cv.gaussian_measure(C)
        stat = max(abs(sg.semigroup_apply(h, 20.0, x) - mass) for x in pts[:3])
        rows.append(_row(f"stationarity-{name}", stat, 0.0, 1e-6, stat <= 1e-6))
        law = _semigroup_law_gap(h, k, pts[:3])
        rows.append(_row(f"semigroup-law-{name}", law, 0.0, 1e-5, law <= 1e-5))
    # Monte Carlo invariance of the generator
    gen = RngStream(args.seed, stream_id=37).generator()
    Z = gen.standard_normal((1 << 14, k))
    he2 = sg.hermite_product_function((2,) + (0,) * (k - 1))
    vals = -2.0 * np.asarray(he2(Z), dtype=float)  # L He_2 = -2 He_2
    se = float(np.std(vals) / math.sqrt(len(vals)))
    mean = abs(float(np.mean(vals)))
    rows.append(_row("invariance-mc", mean, 0.0, 4.0 * se, mean <= 4.0 * se))
    return rows, {"k": k, "seed": args.seed}, _check_rows_pass(rows)


def _semigroup_law_gap(h, k, pts) -> float:
    worst = 0.0
    for t, s in ((0.5, 0.5), (0.1, 1.0)):
        inner = sg.SmoothFunction(lambda X, s=s: sg.semigroup_apply(h, s, X))
        for x in pts:
            lhs = sg.semigroup_apply(h, t + s, x)
            rhs = sg.semigroup_apply(inner, t, x)
            worst = max(worst, abs(lhs - rhs))
    return worst


def run_check_stein(args) -> tuple[list, dict, bool]:
    rows = []
    k = args.k
    pts = _grid_points(k, 10, args.seed)
    for name, C in _catalog_sets(k):
        for t in (0.5, 1.0):
            sol = st.SteinSolution(t, sg.IndicatorFunction(C))
            res = float(np.max(np.abs(st.stein_residual(sol, pts))))
            rows.append(_row(f"stein-identity-{name}-t={t}", res, 0.0, 1e-3, res <= 1e-3))
    sol = st.SteinSolution(0.5, sg.IndicatorFunction(dict(_catalog_sets(k))["half-space"]))
    x0 = pts[0]
    dstep = 1e-4
    for i in range(min(k, 2)):
        e = np.zeros(k)
        e[i] = dstep
        fd = (st.psi(sol, x0 + e) - st.psi(sol, x0 - e)) / (2.0 * dstep)
        an = st.psi_d1(sol, x0, i)
        err = abs(fd - an) / max(abs(an), 1e-12)
        rows.append(_row(f"psi-d1-vs-fd-i={i}", err, 0.0, 1e-3, err <= 1e-3))
    for t in (0.01, 0.1, 0.5, 1.0):
        val = st.weight3_integral(t)
        cap = (2.0 * t) ** -0.5
        rows.append(_row(f"weight3-t={t}", val, cap, 1e-8, val <= cap + 1e-8))
    report = st.double_integral_kernel_report(
        sg.IndicatorFunction(cv.HalfSpace(np.eye(k)[0], 0.0)),
        n=10,
        s=2.0,
        idx=(0, 0, 0),
        shift_grid=_grid_points(k, 5, args.seed + 1),
    )
    cap = math.sqrt(6.0)
    rows.append(_row("kernel-double-integral", report.max_abs, cap, 0.0, report.max_abs <= cap))
    return rows, {"k": k, "seed": args.seed}, _check_rows_pass(rows)


# ---------------------------------------------------------------------------
# experiment drivers


def _resolve_source(args, k: int, n: int):
    """The iid catalog law, or its non-iid scaled variant when requested."""
    if getattr(args, "noniid_profile", None):
        return so.noniid_catalog(args.source, k, n, profile=args.noniid_profile)
    return so.make_source(args.source, k)


def run_delta(args) -> tuple[list, dict]:
    rows = []
    for k in _parse_int_list(args.k):
        family = _family_for(args, k)
        for n in _parse_int_list(args.n):
            src = _resolve_source(args, k, n)
            stream = RngStream(args.seed).child(7 * k + n)
            est = so.delta_hat(src, n, family, args.M, stream, workers=args.threads)
            rows.append(
                {
                    "k": k,
                    "n": n,
                    "source": args.source if not args.noniid_profile
                    else f"noniid-{args.source}",
                    "family": family.description or "custom",
                    "M": args.M,
                    "seed": args.seed,
                    "delta_hat": est.value,
                    "std_error": est.std_error,
                }
            )
    config = {
        "source": args.source,
        "noniid_profile": args.noniid_profile,
        "k": args.k,
        "n": args.n,
        "M": args.M,
        "seed": args.seed,
    }
    return rows, config


def run_discrepancy(args) -> tuple[list, dict]:
    rows = []
    for k in _parse_int_list(args.k):
        src = so.make_source(args.source, k)
        C = cv.HalfSpace(np.eye(k)[0], args.offset)
        for n in _parse_int_list(args.n):
            stream = RngStream(args.seed).child(13 * k + n)
            result = so.stein_discrepancy_hat(src, n, args.t, C, args.M, stream=stream)
            agree = result.gap <= 4.0 * max(result.combined_std_error, 1e-12)
            rows.append(
                {
                    "k": k,
                    "n": n,
                    "source": args.source,
                    "t": args.t,
                    "M": args.M,
                    "seed": args.seed,
                    "direct": result.direct.value,
                    "direct_se": result.direct.std_error,
                    "generator_form": result.generator_form.value,
                    "generator_se": result.generator_form.std_error,
                    "gap": result.gap,
                    "agree": agree,
                }
            )
    config = {
        "source": args.source,
        "k": args.k,
        "n": args.n,
        "t": args.t,
        "M": args.M,
        "seed": args.seed,
    }
    return rows, config


_BOUND_COLUMNS = (
    "k",
    "n",
    "source",
    "t",
    "rho3",
    "beta3",
    "gamma3",
    "delta_hat",
    "std_error",
    "smoothed_bound",
    "recursion_at_t",
    "optimal_t",
    "recursion_step",
    "main_bound",
    "noniid_bound",
    "gamma3_bound",
    "within_main",
    "implied_c",
    "seed",
)


def run_bounds(args) -> tuple[list, dict]:
    consts = _constants_from(args)
    rows = []
    for k in _parse_int_list(args.k):
        family = _family_for(args, k)
        for n in _parse_int_list(args.n):
            src = _resolve_source(args, k, n)
            stream = RngStream(args.seed).child(17 * k + n)
            report = bd.bound_report(
                src,
                n,
                family,
                args.M,
                stream,
                consts=consts,
                t=args.t,
                workers=args.threads,
            )
            rows.append(
                {
                    "k": report.k,
                    "n": report.n,
                    "source": report.source,
                    "t": report.t,
                    "rho3": report.rho3,
                    "beta3": report.beta3,
                    "gamma3": report.gamma3,
                    "delta_hat": report.delta_hat,
                    "std_error": report.delta_se,
                    "smoothed_bound": report.smoothed_bound,
                    "recursion_at_t": report.recursion_at_t,
                    "optimal_t": report.optimal_t,
                    "recursion_step": report.recursion_step,
                    "main_bound": report.main_bound,
                    "noniid_bound": report.noniid,
                    "gamma3_bound": report.gamma3_based,
                    "within_main": report.empirical_within_main,
                    "implied_c": report.implied_constant,
                    "seed": report.seed,
                }
            )
    config = {
        "source": args.source,
        "noniid_profile": args.noniid_profile,
        "k": args.k,
        "n": args.n,
        "M": args.M,
        "seed": args.seed,
        "t": args.t,
    }
    return rows, config


def run_dim_scan(args) -> tuple[list, dict, dict]:
    k_list = _parse_int_list(args.k_list)
    n_list = _parse_int_list(args.n_list)
    stream = RngStream(args.seed)
    report = bd.dim_scan(
        args.source.split(","),
        k_list,
        n_list,
        lambda k: _family_for(args, k),
        args.M,
        stream,
        workers=args.threads,
    )
    rows = [
        {
            "source": c.source,
            "k": c.k,
            "n": c.n,
            "M": args.M,
            "seed": args.seed,
            "delta_hat": c.delta,
            "std_error": c.std_error,
        }
        for c in report.cells
    ]
    fits = {
        "k_exponents": {
            f"{name}|n={n}": {
                "slope": fit.slope,
                "std_error": fit.std_error,
                "ci_half_width": fit.ci_half_width,
                "defined": fit.defined,
            }
            for (name, n), fit in report.k_exponents.items()
        },
        "n_exponents": {
            f"{name}|k={k}": {
                "slope": fit.slope,
                "std_error": fit.std_error,
                "ci_half_width": fit.ci_half_width,
                "defined": fit.defined,
            }
            for (name, k), fit in report.n_exponents.items()
        },
    }
    config = {
        "source": args.source,
        "k_list": args.k_list,
        "n_list": args.n_list,
        "M": args.M,
        "seed": args.seed,
    }
    return rows, config, fits


# ---------------------------------------------------------------------------
# wiring


def _add_common(p, with_family=True):
    p.add_argument("--seed", type=int, required=True, help="master seed (no wall clock)")
    p.add_argument("--out", default=None, help="output path prefix (stdout if omitted)")
    p.add_argument("--format", choices=("csv", "json", "both"), default="csv")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--config", default=None, help="JSON config file; flags override it")
    if with_family:
        p.add_argument("--family", default=None, help="set-family JSON file")
        p.add_argument("--family-seed", dest="family_seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="steinclt", description=__doc__)
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("check-inequalities", help="derivative-integral and weight checks")
    p.add_argument("--k", type=int, default=3)
    _add_common(p, with_family=False)

    p = sub.add_parser("check-semigroup", help="backward equation, law, invariance")
    p.add_argument("--k", type=int, default=2)
    _add_common(p, with_family=False)

    p = sub.add_parser("check-stein", help="Stein identity and solution derivatives")
    p.add_argument("--k", type=int, default=2)
    _add_common(p, with_family=False)

    p = sub.add_parser("delta", help="empirical convex-set discrepancy")
    p.add_argument("--source", required=True, choices=sorted(so.SOURCES))
    p.add_argument("--k", required=True, help="dimension or comma list")
    p.add_argument("--n", required=True, help="summand count or comma list")
    p.add_argument("--M", type=int, default=100_000)
    p.add_argument("--noniid-profile", dest="noniid_profile", default=None,
                   choices=("linear", "flat"),
                   help="scale the source into a non-iid triangular array")
    _add_common(p)

    p = sub.add_parser("discrepancy", help="smoothed discrepancy, direct vs generator form")
    p.add_argument("--source", required=True, choices=sorted(so.SOURCES))
    p.add_argument("--k", required=True)
    p.add_argument("--n", required=True)
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--offset", type=float, default=0.0, help="half-space offset")
    p.add_argument("--M", type=int, default=4096)
    _add_common(p, with_family=False)

    p = sub.add_parser("bounds", help="empirical discrepancy next to every bound")
    p.add_argument("--source", required=True, choices=sorted(so.SOURCES))
    p.add_argument("--k", required=True)
    p.add_argument("--n", required=True)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--M", type=int, default=100_000)
    p.add_argument("--constant", action="append", help="override, e.g. c1=2.0")
    p.add_argument("--noniid-profile", dest="noniid_profile", default=None,
                   choices=("linear", "flat"),
                   help="scale the source into a non-iid triangular array")
    _add_common(p)

    p = sub.add_parser("dim-scan", help="discrepancy scan with exponent fits")
    p.add_argument("--source", required=True, help="name or comma list")
    p.add_argument("--k-list", dest="k_list", required=True)
    p.add_argument("--n-list", dest="n_list", required=True)
    p.add_argument("--M", type=int, default=100_000)
    _add_common(p)
    return ap


def _apply_config_file(args: argparse.Namespace, argv) -> argparse.Namespace:
    if not getattr(args, "config", None):
        return args
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    explicit = {a.split("=")[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    for key, value in cfg.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ConfigurationError(f"config key {key!r} is not a flag of this subcommand")
        if attr not in explicit:
            setattr(args, attr, value)
    return args


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args = _apply_config_file(args, argv)
        name = args.subcommand
        if name == "check-inequalities":
            rows, config, ok = run_check_inequalities(args)
            emit(name, _CHECK_COLUMNS, rows, config, args.out, args.format)
            return 0 if ok else 1
        if name == "check-semigroup":
            rows, config, ok = run_check_semigroup(args)
            emit(name, _CHECK_COLUMNS, rows, config, args.out, args.format)
            return 0 if ok else 1
        if name == "check-stein":
            rows, config, ok = run_check_stein(args)
            emit(name, _CHECK_COLUMNS, rows, config, args.out, args.format)
            return 0 if ok else 1
        if name == "delta":
            rows, config = run_delta(args)
            cols = ("k", "n", "source", "family", "M", "seed", "delta_hat", "std_error")
            emit(name, cols, rows, config, args.out, args.format)
            return 0
        if name == "discrepancy":
            rows, config = run_discrepancy(args)
            cols = (
                "k", "n", "source", "t", "M", "seed",
                "direct", "direct_se", "generator_form", "generator_se", "gap", "agree",
            )
            emit(name, cols, rows, config, args.out, args.format)
            return 0
        if name == "bounds":
            rows, config = run_bounds(args)
            emit(name, _BOUND_COLUMNS, rows, config, args.out, args.format)
            return 0
        if name == "dim-scan":
            rows, config, fits = run_dim_scan(args)
            cols = ("source", "k", "n", "M", "seed", "delta_hat", "std_error")
            emit(name, cols, rows, config, args.out, args.format, extras=fits)
            return 0
        raise ConfigurationError(f"unknown subcommand {name!r}")
    except (ConfigurationError, DomainError, HypothesisViolationError, OSError) as exc:
        print(f"steinclt: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
