#!/usr/bin/env python3
"""Coverage study: how often the nominal 1.96-sigma Monte Carlo interval
contains the quadrature value, over consecutive seeds."""

import argparse
import time

from wvamp import montecarlo, stochastic
from wvamp.quantum import InterferometerParams
from wvamp.stochastic import NoisePrior


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--delta", type=float, default=0.1)
    ap.add_argument("--e0", type=float, default=10.0)
    ap.add_argument("--sigma", type=float, default=0.5)
    ap.add_argument("--bs", default="first", choices=["first", "exact"])
    ap.add_argument("--trials", type=int, default=1_000_000)
    ap.add_argument("--seeds", type=int, default=200)
    ap.add_argument("--eta", type=float, default=None, help="override the clamp-free default efficiency")
    args = ap.parse_args()

    params, prior = InterferometerParams(args.delta, args.bs), NoisePrior(args.e0, args.sigma)
    ref = stochastic.intensity_shift_quadrature(params, prior)
    eta = montecarlo.resolve_eta(params, prior, args.eta)
    print(f"reference {ref:.6f}  eta {eta:.4g}  clamp inactive: "
          f"{stochastic.clamp_inactive(params.with_eta(eta), prior)}")
    for est in montecarlo.Estimator:
        t0 = time.perf_counter()
        hits, bias, se = 0, 0.0, 0.0
        for seed in range(args.seeds):
            e = montecarlo.estimate_shift(params, prior, args.trials, seed, est, eta=args.eta)
            hits += abs(e.value - ref) <= 1.96 * e.stderr
            bias += (e.value - ref) / args.seeds
            se += e.stderr / args.seeds
        print(f"{est.value:>10}: coverage {hits / args.seeds:.3f}  mean bias {bias:+.5f}  "
              f"mean stderr {se:.5f}  ({time.perf_counter() - t0:.1f} s)")


if __name__ == "__main__":
    main()
