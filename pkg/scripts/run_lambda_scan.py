#!/usr/bin/env python3
"""Scan the best worst-case scale factor |lambda_N| against chain length.

For each N in the requested range the script optimizes the extended-receiver
unitary over a tau grid and reports the largest achievable min_n |lambda_n^(1)|
together with the optimal registration time tau_N.  Results go to a CSV.
"""

import argparse
import pathlib

from spinrestore.protocols import ScanConfig, lambda_scan, write_lambda_curve_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-min", type=int, default=5)
    ap.add_argument("--n-max", type=int, default=12)
    ap.add_argument("--NS", type=int, default=2)
    ap.add_argument("--NER", type=int, default=3)
    ap.add_argument("--tau-max-factor", type=float, default=1.5)
    ap.add_argument("--tau-step", type=float, default=0.25)
    ap.add_argument("--starts", type=int, default=50)
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", type=pathlib.Path, default=pathlib.Path("lambda_curve.csv"))
    args = ap.parse_args()

    cfg = ScanConfig(
        N_range=list(range(args.n_min, args.n_max + 1)),
        N_S=args.NS,
        N_ER=args.NER,
        tau_max_factor=args.tau_max_factor,
        tau_step=args.tau_step,
        starts=args.starts,
        seed=args.seed,
    )
    points = lambda_scan(cfg, threads=args.threads)
    write_lambda_curve_csv(args.out, points)
    for p in points:
        print(f"N={p.N:3d}  lambda_N={p.lambda_N:.6f}  tau_N={p.tau_N:.4g}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
