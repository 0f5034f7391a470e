"""Command-line entry point for the restoring experiments.

Subcommands: scan-lambda, solve, restore-demo, ratio-table, negativity-profile.
Every experiment command requires --seed; outputs are reproducible byte for
byte from (config, seed).  Each run writes a manifest.json echoing the config
and a plot script next to the CSVs it reads.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .chain import ConfigurationError, Layout
from .control import SolveResult, solve_restoring
from .protocols import (
    ScanConfig,
    best_solution,
    lambda_scan,
    negativity_profile,
    ratio_optimize,
    tau_grid,
    write_lambda_curve_csv,
    write_negativity_csv,
    write_ratio_table_csv,
)

EXIT_IO = 2
EXIT_NO_SOLUTION = 3


def _fmt17(x: float) -> str:
    return format(float(x), ".17g")


def solve_result_jsonl(r: SolveResult) -> str:
    phi = ", ".join(_fmt17(v) for v in r.phi)
    l_re = ", ".join(_fmt17(v) for v in r.scale.lambda1.real)
    l_im = ", ".join(_fmt17(v) for v in r.scale.lambda1.imag)
    return (
        '{"tau": %s, "start_index": %d, "seed": %d, "residual_norm": %s, '
        '"phi": [%s], "lambda1_re": [%s], "lambda1_im": [%s]}'
        % (_fmt17(r.tau), r.start_index, r.seed, _fmt17(r.residual_norm),
           phi, l_re, l_im)
    )


def _parse_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="spinrestore",
        description="Remote restoring of (0,1)-excitation states on an XX spin chain",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, tau_single=False, tau_range=False):
        p.add_argument("--config", type=Path, help="JSON config file; flags override")
        p.add_argument("--N", type=str, help="chain length (or range a..b for scan-lambda)")
        p.add_argument("--NS", type=int, help="sender size")
        p.add_argument("--NR", type=int, help="receiver size (default: NS)")
        p.add_argument("--NER", type=int, help="extended-receiver size")
        if tau_single:
            p.add_argument("--tau", type=float, help="registration time")
        if tau_range:
            p.add_argument("--tau-max", type=float, help="upper end of the tau grid")
            p.add_argument("--tau-step", type=float, default=0.25)
        p.add_argument("--starts", type=int, default=50)
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out", type=Path,
                       default=Path(os.environ.get("SPINRESTORE_OUT", ".")))

    p = sub.add_parser("scan-lambda", help="lambda(N)/tau(N) scan over chain lengths")
    common(p, tau_range=True)
    p.add_argument("--tau-max-factor", type=float, default=1.5,
                   help="tau grid upper end as a multiple of N")

    p = sub.add_parser("solve", help="multi-start restoring solve at one tau")
    common(p, tau_single=True)

    p = sub.add_parser("restore-demo", help="print the solved control unitary, "
                       "scale factors and symbolic receiver matrix")
    common(p, tau_single=True)

    p = sub.add_parser("ratio-table", help="maximized concurrence ratios per sender pair")
    common(p, tau_range=True)

    p = sub.add_parser("negativity-profile", help="mean S-R negativity over a tau grid")
    common(p, tau_range=True)
    p.add_argument("--n-states", type=int, default=50)

    return ap


def _load_config_file(path: Path) -> dict:
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise SystemExit(f"malformed JSON in config file {path}: {e}")
    if not isinstance(obj, dict):
        raise SystemExit(f"config file {path} must hold a JSON object")
    return obj


def _merged(args, key, file_cfg, default=None):
    v = getattr(args, key.replace("-", "_"), None)
    if v is not None:
        return v
    if file_cfg and key in file_cfg:
        return file_cfg[key]
    return default


def _layout_from(args, file_cfg, N: int) -> Layout:
    # flags first, then file keys N_S / N_R / N_ER
    ns = args.NS if args.NS is not None else (file_cfg or {}).get("N_S")
    nr = args.NR if args.NR is not None else (file_cfg or {}).get("N_R", ns)
    ner = args.NER if args.NER is not None else (file_cfg or {}).get("N_ER")
    if ns is None or ner is None:
        raise SystemExit("layout incomplete: --NS and --NER (or N_S/N_ER in the "
                         "config file) are required")
    return Layout(N=N, N_S=int(ns), N_R=int(nr), N_ER=int(ner))


class _OutputSet:
    """Tracks files created by a run so failures leave no partial output."""

    def __init__(self, out_dir: Path):
        self.dir = out_dir
        self.paths: list[Path] = []

    def path(self, name: str) -> Path:
        p = self.dir / name
        self.paths.append(p)
        return p

    def discard(self):
        for p in self.paths:
            try:
                p.unlink(missing_ok=True)
            except OSError:
                pass


_PLOT_TEMPLATE = """\
#!/usr/bin/env python3
# Generated plot script: reads {csv} and renders {png}.
import csv
import matplotlib.pyplot as plt

xs, ys = [], []
with open({csv!r}) as f:
    for row in csv.DictReader(f):
        xs.append(float(row[{xcol!r}]))
        ys.append(float(row[{ycol!r}]))
plt.plot(xs, ys, marker="o")
plt.xlabel({xcol!r})
plt.ylabel({ycol!r})
plt.savefig({png!r}, dpi=150)
"""


def _emit_plot_script(outs: _OutputSet, name: str, csv_name: str, xcol: str, ycol: str):
    p = outs.path(name)
    p.write_text(_PLOT_TEMPLATE.format(csv=csv_name, png=csv_name.replace(".csv", ".png"),
                                       xcol=xcol, ycol=ycol))


def _write_manifest(outs: _OutputSet, args, wall: float):
    cfg = {k: (str(v) if isinstance(v, Path) else v)
           for k, v in vars(args).items() if k != "func"}
    manifest = {"config": cfg, "version": __version__, "wall_time_s": wall}
    outs.path("manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def cmd_scan_lambda(args, file_cfg, outs: _OutputSet) -> int:
    n_range = _parse_range(_merged(args, "N", file_cfg))
    ns = args.NS if args.NS is not None else (file_cfg or {}).get("N_S")
    ner = args.NER if args.NER is not None else (file_cfg or {}).get("N_ER")
    cfg = ScanConfig(N_range=n_range, N_S=int(ns), N_ER=int(ner),
                     tau_max_factor=args.tau_max_factor, tau_step=args.tau_step,
                     starts=args.starts, seed=args.seed)
    points = lambda_scan(cfg, threads=args.threads)
    if all(p.missing for p in points):
        return EXIT_NO_SOLUTION
    write_lambda_curve_csv(outs.path("lambda_curve.csv"),
                           [p for p in points if not p.missing])
    _emit_plot_script(outs, "plot_lambda_curve.py", "lambda_curve.csv", "N", "lambda_N")
    return 0


def cmd_solve(args, file_cfg, outs: _OutputSet) -> int:
    layout = _layout_from(args, file_cfg, int(args.N))
    results = solve_restoring(args.tau, layout, args.starts, args.seed)
    with open(outs.path("solutions.jsonl"), "w", newline="\n") as f:
        for r in results:
            f.write(solve_result_jsonl(r) + "\n")
    if not any(r.converged for r in results):
        return EXIT_NO_SOLUTION
    return 0


def cmd_restore_demo(args, file_cfg, outs: _OutputSet) -> int:
    layout = _layout_from(args, file_cfg, int(args.N))
    results = solve_restoring(args.tau, layout, args.starts, args.seed)
    sol = best_solution(results)
    if sol is None:
        print("no converged solution", file=sys.stderr)
        return EXIT_NO_SOLUTION
    from .control import control_unitary
    U1 = control_unitary(sol.phi, layout.N_ER)
    lam = sol.scale.lambda1

    def polar(z):
        return f"{abs(z):.3f} e^{{i{np.angle(z):+.3f}}}"

    lines = []
    lines.append(f"solved control unitary at tau={args.tau} "
                 f"(residual {sol.residual_norm:.3e}, start {sol.start_index}):")
    for row in U1:
        lines.append("  [" + "  ".join(polar(z) for z in row) + "]")
    lines.append("scale factors:")
    for n, z in enumerate(lam, start=1):
        lines.append(f"  lambda1_{n} = {polar(z)}")
    lines.append("receiver matrix in terms of the sender entries:")
    ns = layout.N_S
    coeffs = " + ".join([f"s_00"] + [f"{1 - abs(lam[n])**2:.3f} s_{n+1}{n+1}"
                                     for n in range(ns)])
    lines.append(f"  r_00 = {coeffs}")
    for n in range(1, ns + 1):
        lines.append(f"  r_0{n} = {polar(np.conj(lam[n-1]))} s_0{n}")
    for n in range(1, ns + 1):
        for m in range(1, ns + 1):
            z = lam[n - 1] * np.conj(lam[m - 1])
            lines.append(f"  r_{n}{m} = {polar(z)} s_{n}{m}")
    text = "\n".join(lines) + "\n"
    print(text, end="")
    outs.path("restore_demo.txt").write_text(text)
    return 0


def cmd_ratio_table(args, file_cfg, outs: _OutputSet) -> int:
    layout = _layout_from(args, file_cfg, int(args.N))
    taus = tau_grid(args.tau_max, args.tau_step)
    rows = ratio_optimize(layout, taus, args.starts, args.seed, threads=args.threads)
    if not rows:
        return EXIT_NO_SOLUTION
    write_ratio_table_csv(outs.path("ratio_table.csv"), rows)
    _emit_plot_script(outs, "plot_ratio_table.py", "ratio_table.csv", "tau", "ratio")
    return 0


def cmd_negativity_profile(args, file_cfg, outs: _OutputSet) -> int:
    layout = _layout_from(args, file_cfg, int(args.N))
    taus = tau_grid(args.tau_max, args.tau_step)
    rows = negativity_profile(layout, taus, args.starts, args.n_states,
                              args.seed, threads=args.threads)
    if not rows:
        return EXIT_NO_SOLUTION
    write_negativity_csv(outs.path("negativity_profile.csv"), rows)
    _emit_plot_script(outs, "plot_negativity_profile.py", "negativity_profile.csv",
                      "tau", "mean_nsr")
    return 0


_COMMANDS = {
    "scan-lambda": cmd_scan_lambda,
    "solve": cmd_solve,
    "restore-demo": cmd_restore_demo,
    "ratio-table": cmd_ratio_table,
    "negativity-profile": cmd_negativity_profile,
}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    file_cfg = _load_config_file(args.config) if args.config else None
    if args.N is None and file_cfg and "N" in file_cfg:
        args.N = str(file_cfg["N"])
    if args.N is None:
        ap.error("--N is required (flag or config file)")
    out_dir = args.out
    t0 = time.monotonic()
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        print(f"cannot create output directory {out_dir}: {e}", file=sys.stderr)
        return EXIT_IO
    outs = _OutputSet(out_dir)
    try:
        code = _COMMANDS[args.command](args, file_cfg, outs)
        if code == 0:
            _write_manifest(outs, args, time.monotonic() - t0)
        else:
            outs.discard()
        return code
    except ConfigurationError as e:
        outs.discard()
        print(f"configuration error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        outs.discard()
        print(f"I/O failure: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
