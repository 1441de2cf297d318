"""Command-line interface.

    chaosrom <command> --config experiment.json --out results/

Commands run one pipeline stage each, reading and writing files under
the output directory: generate | reduce | train | forecast | evaluate |
restart-check | plot. Exit codes: 0 success, 1 configuration error,
2 numerical failure.

Thread pinning happens before numpy is imported, so --threads actually
reaches the BLAS; the default of 1 makes runs reproducible bit for bit.
"""

import argparse
import os
import sys


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chaosrom",
        description="Learn and evaluate quadratic reduced models of "
                    "chaotic systems.")
    sub = parser.add_subparsers(dest="command", required=True)
    commands = ("generate", "reduce", "train", "forecast", "evaluate",
                "restart-check", "plot")
    helps = {
        "generate": "simulate the configured system and store snapshots",
        "reduce": "fit the basis on the training split and project",
        "train": "estimate derivatives and fit the operators",
        "forecast": "integrate the learned model from test starts",
        "evaluate": "score forecasts: NRMSE series, VPT, aggregates",
        "restart-check": "re-run the reference solver from a predicted state",
        "plot": "render SVG figures from the reports present",
    }
    for name in commands:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", default=None,
                       help="experiment config (JSON)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed list with one seed")
        p.add_argument("--out", default="out",
                       help="output directory (default: ./out)")
        p.add_argument("--threads", type=int, default=1,
                       help="BLAS thread count (default 1, reproducible)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    threads = str(max(1, args.threads))
    for var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS",
                "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        os.environ[var] = threads

    from ..errors import ChaosRomError, ConfigurationError

    try:
        config = None
        if args.config is not None:
            from .config import load_config
            config = load_config(args.config)
            if args.seed is not None:
                config.seeds = (args.seed,)
        elif args.command != "plot":
            raise ConfigurationError(
                f"--config is required for '{args.command}'")

        out_dir = args.out
        if args.command == "plot":
            from .plots import cmd_plot
            written = cmd_plot(config, out_dir)
            for path in written:
                print(f"wrote {os.path.relpath(path, out_dir)}")
            return 0

        os.makedirs(out_dir, exist_ok=True)
        from . import experiments as ex

        if args.command == "generate":
            snaps = ex.cmd_generate(config, out_dir)
            print(f"wrote {ex.SNAPSHOTS_FILE}: "
                  f"{snaps.n_states} x {snaps.n_snapshots}")
        elif args.command == "reduce":
            basis, reduced, info = ex.cmd_reduce(config, out_dir)
            print(f"wrote {ex.BASIS_FILE} (r={info['r']}) and "
                  f"{ex.REDUCED_FILE}")
        elif args.command == "train":
            model, table, info = ex.cmd_train(config, out_dir)
            lam = info["lambdas"]
            detail = "pseudoinverse" if lam is None else \
                f"lambdas={lam}"
            print(f"wrote {ex.OPERATORS_FILE}: r={info['r']}, {detail}")
        elif args.command == "forecast":
            results = ex.cmd_forecast(config, out_dir)
            failed = sum(1 for r in results if r["failure_time"] is not None)
            print(f"wrote {len(results)} forecasts ({failed} diverged)")
        elif args.command == "evaluate":
            report = ex.cmd_evaluate(config, out_dir)
            agg = report["aggregate"]
            print("VPT min %.3f max %.3f mean %.3f std %.3f" %
                  (agg["min"], agg["max"], agg["mean"], agg["std"]))
        elif args.command == "restart-check":
            report = ex.cmd_restart_check(config, out_dir)
            s = report["summary"]
            print("restart relative L2 %.3e over %g s%s" %
                  (s["relative_l2"], s["duration"],
                   " (blow-up)" if s["blow_up"] else ""))
        return 0
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except ChaosRomError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
