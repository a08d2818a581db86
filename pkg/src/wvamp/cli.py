"""Command-line front end.

Exit codes: 0 success, 2 usage, 3 domain error, 4 numerical/statistics failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from collections import defaultdict
from pathlib import Path

from . import experiments, fock_oracle, quantum, stochastic, svg
from .errors import DomainError, NumericalError, StatisticsError
from .montecarlo import Estimator, estimate_shift
from .quantum import BSMode, InterferometerParams
from .stochastic import NoisePrior

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_NUMERICAL = 0, 2, 3, 4
DEFAULT_SEED = 12345


class UsageError(Exception):
    pass


def _emit(report: dict, args) -> None:
    p = args.precision
    if args.format == "json":
        out = {k: experiments._json_value(v, p) for k, v in report.items()}
        sys.stdout.write(json.dumps(out, indent=1) + "\n")
    else:
        for k, v in report.items():
            sys.stdout.write(f"{k}: {experiments.fmt(v, p)}\n")


def cmd_weak_value(args) -> int:
    d = args.delta
    mode = BSMode.parse(args.mode)
    if args.input == "fock":
        wv = quantum.weak_value_fock(d)
        arm2 = quantum.arm2_weak_value_fock(d)
        all_orders = fock_oracle.weak_value_single_photon(d, mode)
        anomalous = quantum.is_anomalous(0.0, d)
        alpha = 0.0
    else:
        if args.alpha is None:
            raise UsageError("--alpha is required for --input coherent")
        alpha = args.alpha
        wv = quantum.weak_value_coherent(alpha, d)
        # photon-addition sum rule <n1>_w + <n2>_w = |alpha|^2 + 1
        arm2 = alpha * alpha + 1.0 - wv
        t, r = quantum.bs_coefficients(d, mode)
        all_orders = quantum.mean_photons_arm1(alpha) + t / (t - r)
        anomalous = quantum.is_anomalous(alpha, d)
    _emit({
        "input": args.input, "alpha": alpha, "delta": d, "bs_mode": mode.value,
        "weak_value": wv, "weak_value_all_orders": all_orders, "arm2_weak_value": arm2,
        "anomalous": anomalous, "first_order_valid": quantum.first_order_valid(d),
    }, args)
    return EXIT_OK


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + m.replace("_", "-") for m in missing))


def cmd_shift(args) -> int:
    m = args.method
    report = {"method": m, "delta": args.delta}
    if m == "quantum":
        value = quantum.quantum_shift(args.delta)
    elif m == "vacuum":
        value = stochastic.intensity_shift_vacuum(args.delta)
    else:
        _need(args, "e0", "sigma")
        params = InterferometerParams(args.delta, args.bs)
        prior = NoisePrior(args.e0, args.sigma, args.sigma2 or 0.0)
        fn = {"exact": stochastic.intensity_shift_two_arm,
              "approx": stochastic.intensity_shift_approx,
              "quadrature": stochastic.intensity_shift_quadrature}[m]
        value = fn(params, prior)
        rep = stochastic.validity(params, prior)
        report.update(E0=args.e0, sigma=args.sigma, sigma2=prior.sigma2, bs_mode=params.bs_mode.value,
                      validity_ratio=rep.ratio, regime=rep.regime.value)
    report["shift"] = value
    report["first_order_valid"] = quantum.first_order_valid(args.delta)
    _emit(report, args)
    return EXIT_OK


def cmd_mc(args) -> int:
    params = InterferometerParams(args.delta, args.bs)
    prior = NoisePrior(args.e0, args.sigma, 0.0)
    est = estimate_shift(params, prior, args.trials, args.seed, Estimator(args.estimator),
                         eta=args.eta, workers=args.workers)
    ref = stochastic.intensity_shift_quadrature(params, prior)
    report = {"delta": args.delta, "E0": args.e0, "sigma": args.sigma, "bs_mode": params.bs_mode.value,
              "estimator": est.method.value, "seed": est.seed, "n_trials": est.n_trials,
              "n_accepted": est.n_accepted, "eta": est.eta, "shift": est.value, "stderr": est.stderr,
              "degenerate": est.degenerate, "quadrature_reference": ref,
              "z_score": (est.value - ref) / est.stderr if est.stderr > 0 else float("nan")}
    _emit(report, args)
    return EXIT_OK


# -- figures ----------------------------------------------------------------

def _curve_plot(result, which) -> svg.Plot:
    rows = result.rows
    if which == "fig4b":
        xkey, xlabel, logx = "darkport_intensity", "dark-port mean intensity (delta alpha)^2", True
    else:
        xkey, xlabel, logx = "delta", "imbalance delta", which == "fig4a"
    titles = {"fig2": "Post-selected intensity shift vs imbalance",
              "fig4a": "Intensity shift vs imbalance at fixed |alpha|^2",
              "fig4b": "Intensity shift vs dark-port intensity at fixed delta"}
    plot = svg.Plot(titles[which], xlabel, "intensity shift D_I (photons)", logx=logx, logy=which != "fig2")
    curves = defaultdict(list)
    for r in rows:
        curves[r.curve].append(r)
    for i, (name, rs) in enumerate(curves.items()):
        color = svg.PALETTE[i % len(svg.PALETTE)]
        xs = [getattr(r, xkey) for r in rs]
        if which == "fig2" and name == "reconstructed":
            continue
        if which != "fig2":
            plot.series.append(svg.Series(f"{name} stochastic", xs, [r.D_quadrature for r in rs], color=color))
        plot.series.append(svg.Series(f"{name} weak value", xs, [r.D_quantum_exact for r in rs],
                                      dashed=True, color=color))
    if which == "fig2":
        rs = curves["theory"]
        plot.series.append(svg.Series("first-order weak value", [r.delta for r in rs],
                                      [r.D_quantum for r in rs], dashed=True, color="black"))
    plot.hlines.append((experiments.BASE_SHIFT, "base shift 1/2"))
    return plot


def _density_plot(result) -> str:
    plots = []
    by_delta = defaultdict(list)
    for d in result.density_rows:
        by_delta[d["delta"]].append(d)
    marks = {m["delta"]: m for m in result.marker_rows}
    for delta, ds in by_delta.items():
        x = [d["E1"] for d in ds]
        p = svg.Plot(f"Posterior of E1 at delta={delta:g}", "E1", "density", height=300)
        p.series = [svg.Series("prior", x, [d["prior"] for d in ds], dashed=True, color="#1f77b4"),
                    svg.Series("likelihood (scaled)", x, [d["likelihood_scaled"] for d in ds], dashed=True,
                               color="#2ca02c"),
                    svg.Series("posterior", x, [d["posterior"] for d in ds], color="#d62728"),
                    svg.Series("shifted Gaussian", x, [d["posterior_gaussian"] for d in ds], dashed=True,
                               color="#7f7f7f")]
        m = marks[delta]
        p.vlines = [(m["prior_mean"], "prior mean", "#1f77b4"),
                    (m["posterior_mean"], "posterior mean", "#d62728"),
                    (m["likelihood_zero"], "likelihood zero", "#2ca02c")]
        plots.append(p)
    return svg.render_stack(plots)


def cmd_figures(args) -> int:
    which = args.which
    spec = experiments.SCENARIOS[which]()
    return _write_result(experiments.run_scenario(spec), which, args)


def cmd_scenario(args) -> int:
    spec = experiments.load_scenario(args.config)
    return _write_result(experiments.run_scenario(spec), spec.name, args)


def _write_result(result, name, args) -> int:
    p, fmt_ = args.precision, args.format
    files = {}
    meta = dict(result.spec.metadata, scenario=result.spec.name)
    if fmt_ == "csv":
        files[f"{name}.csv"] = experiments.rows_to_csv(result.rows, p)
        if result.density_rows:
            files[f"{name}_density.csv"] = experiments.records_to_csv(result.density_rows,
                                                                      experiments.DENSITY_COLUMNS, p)
            files[f"{name}_markers.csv"] = experiments.records_to_csv(result.marker_rows,
                                                                      experiments.MARKER_COLUMNS, p)
    elif fmt_ == "json":
        files[f"{name}.json"] = experiments.rows_to_json(result.rows, p, meta)
        if result.density_rows:
            files[f"{name}_density.json"] = experiments.records_to_json(result.density_rows,
                                                                        experiments.DENSITY_COLUMNS, p)
            files[f"{name}_markers.json"] = experiments.records_to_json(result.marker_rows,
                                                                        experiments.MARKER_COLUMNS, p)
    else:
        if result.density_rows:
            files[f"{name}.svg"] = _density_plot(result)
        elif name in ("fig2", "fig4a", "fig4b"):
            files[f"{name}.svg"] = svg.render(_curve_plot(result, name))
        else:
            raise DomainError("svg output is only available for the figure scenarios")
    if args.out is None:
        for text in files.values():
            sys.stdout.write(text)
    else:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for fname, text in files.items():
            (out / fname).write_text(text)
            sys.stderr.write(f"wrote {out / fname}\n")
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wvamp", description="Weak-value amplification: quantum vs stochastic optics")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, formats=("text", "json")):
        p.add_argument("--format", choices=formats, default=formats[0])
        p.add_argument("--precision", type=_positive_int, default=9, help="significant digits (default 9)")

    p = sub.add_parser("weak-value", help="photon-number weak value in arm 1")
    p.add_argument("--input", choices=("fock", "coherent"), default="fock")
    p.add_argument("--alpha", type=float)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--mode", choices=("first", "exact"), default="first",
                   help="beamsplitter coefficients for the all-orders value")
    common(p)
    p.set_defaults(func=cmd_weak_value)

    p = sub.add_parser("shift", help="post-selected intensity shift")
    p.add_argument("--method", choices=("quantum", "exact", "approx", "quadrature", "vacuum"), required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--e0", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--sigma2", type=float)
    p.add_argument("--bs", choices=("first", "exact"), default="first")
    common(p)
    p.set_defaults(func=cmd_shift)

    p = sub.add_parser("mc", help="Monte Carlo estimate of the intensity shift")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--e0", type=float, default=10.0)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--bs", choices=("first", "exact"), default="first")
    p.add_argument("--trials", type=_positive_int, default=1_000_000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--estimator", choices=[e.value for e in Estimator], default="rejection")
    p.add_argument("--eta", type=float, help="detector efficiency (default: clamp-free 25%% ceiling)")
    p.add_argument("--workers", type=_positive_int, help="threads (default: $WVAMP_WORKERS or 1)")
    common(p)
    p.set_defaults(func=cmd_mc)

    for name, helptext in (("figures", "regenerate a figure's data"), ("scenario", "run a scenario config")):
        p = sub.add_parser(name, help=helptext)
        if name == "figures":
            p.add_argument("--which", choices=tuple(experiments.SCENARIOS), required=True)
            p.set_defaults(func=cmd_figures)
        else:
            p.add_argument("--config", required=True, help="key = value scenario file")
            p.set_defaults(func=cmd_scenario)
        p.add_argument("--out", help="output directory (default: stdout)")
        common(p, ("csv", "json", "svg"))
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse: --help (0) or bad flags (2)
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", quantum.FirstOrderWarning)
            return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"wvamp: usage error: {exc}\n")
        return EXIT_USAGE
    except DomainError as exc:
        sys.stderr.write(f"wvamp: domain error: {exc}\n")
        return EXIT_DOMAIN
    except (NumericalError, StatisticsError) as exc:
        sys.stderr.write(f"wvamp: numerical error: {exc}\n")
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"wvamp: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
