#!/usr/bin/env python3
"""Measure the antisymmetric-state instability against the linear theory.

Propagates noise-seeded uniform states of both parities at eps=2,
kappa=1.5 and compares the measured m=1 growth rate with the analytic
branch frequency. The symmetric twin is expected to show no growth at all;
the antisymmetric state develops counter-rotating angular momentum in the
two rings once the unstable mode saturates.

Usage: python scripts/run_instability_experiment.py [--seed N]
"""

import argparse

import numpy as np

from ringbdg.ring_model import Parity, RingParams
from ringbdg.ring_dynamics import (
    NoGrowthWindowError,
    RingGrid,
    evolve,
    measure_growth_rate,
    prepare_uniform,
    seed_noise,
)
from ringbdg.spectra import omega2


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--eps", type=float, default=2.0)
    parser.add_argument("--kappa", type=float, default=1.5)
    parser.add_argument("--tau", type=float, default=8.0)
    args = parser.parse_args()

    params = RingParams.from_epsilon(args.eps, args.kappa, -1)
    grid = RingGrid(128)
    dt = 1e-4
    n_steps = round(args.tau / dt)

    predicted = omega2(1, args.eps, args.kappa, Parity.ANTISYMMETRIC, -1).imag
    print(f"eps={args.eps}, kappa={args.kappa}: predicted m=1 rate {predicted:.6f}")

    for parity in (Parity.ANTISYMMETRIC, Parity.SYMMETRIC):
        fields = seed_noise(prepare_uniform(params, parity, grid), 1e-4, args.seed)
        record = evolve(fields, dt, n_steps, params, record_every=100)
        try:
            fit = measure_growth_rate(record, 1)
            rel = abs(fit.rate - predicted) / predicted if predicted else float("nan")
            print(
                f"{parity.value:>14}: measured rate {fit.rate:.4f} "
                f"({100 * rel:.2f}% off), fit window tau = "
                f"{fit.window[0]:.2f}..{fit.window[1]:.2f}, residual {fit.residual:.1e}"
            )
        except NoGrowthWindowError as exc:
            print(f"{parity.value:>14}: no growth window ({exc})")
        l_u, l_d = record.l_u, record.l_d
        opposite = np.any((l_u * l_d < 0) & (np.abs(l_u) > 1e-3))
        print(
            f"{'':>14}  final angular momenta L_u={l_u[-1]:+.4f}, L_d={l_d[-1]:+.4f}, "
            f"counter-rotating episodes: {'yes' if opposite else 'no'}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
