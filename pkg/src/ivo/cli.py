"""Command line entry point: ``ivo <command> [--config PATH] [--seed N] [--out PATH]``."""
from __future__ import annotations

import argparse
import sys

from . import harness


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ivo", description="Sampled checks for interval-valued optimization on manifolds.")
    ap.add_argument("command", choices=harness.COMMANDS)
    ap.add_argument("--config", help="JSON run config")
    ap.add_argument("--seed", type=int, help="overrides IVO_SEED and the config seed")
    ap.add_argument("--out", help="write the JSON report here instead of stdout")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = harness.load_config(args.config, args.command, args.seed, args.out)
        report, status = harness.run(cfg)
    except harness.ConfigError as err:
        print(f"ivo: config error: {err}", file=sys.stderr)
        return harness.EXIT_CONFIG
    text = harness.dumps(report)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    s = report["summary"]
    for rec in report["checks"]:
        if rec["verdict"] != "pass":
            print(f"  {rec['verdict']:<12} {rec['name']}  [{rec['anchor']}]", file=sys.stderr)
    print(f"ivo {cfg.command}: {s['pass']} pass, {s['fail']} fail, {s['inconclusive']} inconclusive "
          f"in {report['wall_time']:.1f}s (exit {status})", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
