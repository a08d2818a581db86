#!/usr/bin/env python3
"""Print the validity ratio, regime and the four shift estimates for the
reconstructed experimental settings, plus a dark-port intensity sweep."""

import argparse
import warnings

import numpy as np

from wvamp import experiments, quantum, stochastic
from wvamp.quantum import InterferometerParams
from wvamp.stochastic import NoisePrior


def row(delta, E0, sigma, mode):
    p, prior = InterferometerParams(delta, mode), NoisePrior(E0, sigma)
    rep = stochastic.validity(p, prior)
    return (delta, E0, (delta * E0) ** 2, rep.ratio, rep.regime.value, quantum.quantum_shift(delta),
            stochastic.intensity_shift_exact(p, prior), stochastic.intensity_shift_approx(p, prior),
            stochastic.intensity_shift_quadrature(p, prior))


def show(rows):
    head = ("delta", "alpha", "(d a)^2", "ratio", "regime", "D_quantum", "D_exact", "D_approx", "D_quad")
    print("  ".join(f"{h:>10}" for h in head))
    for r in rows:
        print("  ".join(f"{v:>10}" if isinstance(v, str) else f"{v:10.4g}" for v in r))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma", type=float, default=0.5)
    ap.add_argument("--delta", type=float, default=0.1, help="imbalance for the intensity sweep")
    ap.add_argument("--mode", default="first", choices=["first", "exact"])
    args = ap.parse_args()
    warnings.simplefilter("ignore", quantum.FirstOrderWarning)

    print("reconstructed experimental settings (not measured values)")
    show([row(d, a, args.sigma, args.mode) for d, a in experiments.reconstructed_settings(args.sigma)])
    print(f"\ndark-port intensity sweep at delta={args.delta}")
    show([row(args.delta, np.sqrt(i) / args.delta, args.sigma, args.mode) for i in np.geomspace(0.01, 100, 9)])


if __name__ == "__main__":
    main()
