"""Command-line entry point ``pssmp``.

Subcommands select experiment kinds from a config file::

    pssmp verify --config configs/acceptance.cfg --out results
    pssmp lil --config configs/acceptance.cfg --seed 7
    pssmp integral-test            # built-in oracle families
    pssmp report --config configs/acceptance.cfg --out results

Exit status is 0 iff every row of every selected experiment passes.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .config import ConfigError, ExperimentConfig, load_configs
from .experiments import run_experiment

SUBCOMMANDS = {
    "simulate": {"simulate"},
    "verify": {"verify_distribution", "verify_moments", "verify_entrance", "verify_last_passage",
               "verify_scaling", "verify_closed_form", "tail_fit"},
    "lil": {"lil_sweep"},
    "integral-test": {"integral_test"},
    "report": None,
}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pssmp", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="experiment config file (documents separated by ---)")
        p.add_argument("--seed", type=int, help="override controls.seed of every experiment")
        p.add_argument("--out", help="output directory (overrides 'out' in the config)")
        p.add_argument("--threads", type=int, help="numba worker threads")
        p.add_argument("-v", "--verbose", action="store_true")
    return ap


def _set_threads(n: int) -> None:
    import numba

    numba.set_num_threads(max(1, min(n, numba.config.NUMBA_NUM_THREADS)))


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads is not None:
        _set_threads(args.threads)
    if args.config is None:
        if args.command != "integral-test":
            print(f"pssmp {args.command}: --config is required", file=sys.stderr)
            return 2
        configs = [ExperimentConfig("integral_test", "integral-test")]
    else:
        try:
            configs = load_configs(args.config)
        except (OSError, ConfigError) as exc:
            print(f"pssmp: {exc}", file=sys.stderr)
            return 2
    kinds = SUBCOMMANDS[args.command]
    selected = [c for c in configs if kinds is None or c.kind in kinds]
    for c in configs:
        if c not in selected:
            logging.info("skipping %s (kind %s) under '%s'", c.experiment_id, c.kind, args.command)
    if args.seed is not None:
        selected = [c.with_seed(args.seed) for c in selected]

    reports = []
    for cfg in selected:
        rep = run_experiment(cfg, args.out)
        reports.append(rep)
        for r in rep.rows:
            status = "PASS" if r.passed else "FAIL"
            print(f"{status} {rep.experiment_id}/{r.check_id} value={r.value} "
                  f"threshold={r.threshold}")
    if args.command == "report":
        combined = [r.to_dict() for r in reports]
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            with open(os.path.join(args.out, "report.json"), "w") as fh:
                json.dump(combined, fh, indent=2)
                fh.write("\n")
        else:
            json.dump(combined, sys.stdout, indent=2)
            sys.stdout.write("\n")
    return 0 if all(r.passed for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
