"""Command line entry points.

Subcommands:
  run <config>   execute an experiment from a TOML config (with overrides)
  sample         emit one regular digraph as an edge list
  verify-broad   run the broad-connectivity verifier on a sampled digraph
  count          exact count of regular 0-1 matrices at tiny sizes

Exit codes: 0 success, 1 numerical failure budget exceeded, 2 config error.
"""

from __future__ import annotations

import argparse
import sys

from . import connectivity
from .harness import ConfigError, RunFailure, load_config, run
from .sampler import (
    PermutationSum,
    SwitchChain,
    count_regular_matrices,
    sample_rrd,
    to_edge_list,
)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rdlab")
    sub = ap.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment from a config file")
    run_p.add_argument("config")
    run_p.add_argument("--experiment")
    run_p.add_argument("--n", type=int)
    run_p.add_argument("--p", type=float)
    run_p.add_argument("--d", type=int)
    run_p.add_argument("--z-re", type=float, dest="z_re")
    run_p.add_argument("--z-im", type=float, dest="z_im")
    run_p.add_argument("--trials", type=int)
    run_p.add_argument("--seed", type=int)
    run_p.add_argument("--out")
    run_p.add_argument("--workers", type=int)

    s = sub.add_parser("sample", help="emit one digraph edge list to stdout")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--method", choices=("switch", "perm"), default="switch")
    s.add_argument("--burn-in", type=int, default=None)

    v = sub.add_parser("verify-broad", help="broad-connectivity verdict")
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--d", type=int, required=True)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--h-cut", type=float, default=1.0)
    v.add_argument("--delta", type=float, default=None)
    v.add_argument("--nu", type=float, default=None)
    v.add_argument("--subset-trials", type=int, default=200)

    c = sub.add_parser("count", help="exact |M_n(d)| for n <= 8")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--d", type=int, required=True)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            overrides = {
                k: getattr(args, k)
                for k in (
                    "experiment",
                    "n",
                    "p",
                    "d",
                    "z_re",
                    "z_im",
                    "trials",
                    "seed",
                    "out",
                    "workers",
                )
            }
            record = run(load_config(args.config, overrides))
            print(record.to_json())
            return 0

        if args.command == "sample":
            method = (
                SwitchChain(args.burn_in)
                if args.method == "switch"
                else PermutationSum()
            )
            g = sample_rrd(args.n, args.d, method, args.seed)
            sys.stdout.write(to_edge_list(g))
            return 0

        if args.command == "verify-broad":
            p = args.d / args.n
            params = connectivity.BroadConnectivityParams(
                args.h_cut,
                args.delta if args.delta is not None else p / 2.0,
                args.nu if args.nu is not None else p / 8.0,
            )
            g = sample_rrd(args.n, args.d, SwitchChain(), args.seed)
            verdict = connectivity.verify_broad(
                g.adjacency,
                params,
                connectivity.Randomized(args.subset_trials, args.seed),
            )
            print(verdict.to_json())
            return 0

        if args.command == "count":
            print(count_regular_matrices(args.n, args.d))
            return 0
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RunFailure as exc:
        print(f"run failure: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
