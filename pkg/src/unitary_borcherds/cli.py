"""Command-line driver: `unitary-borcherds <group> <action> --config job.json --out dir`."""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import Callable, Dict, List, Optional

from . import artifacts
from .pipeline import THREADS_ENV, ConfigError, Instance, JobConfig, default_threads
from .verify import run_all, summarize

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


def _writers(order: Optional[int]) -> Dict[tuple, Callable[[Instance], Dict[str, str]]]:
    return {
        ("lattice", "theta"): lambda inst: artifacts.theta_files(inst, order or inst.order),
        ("chars", "gamma"): artifacts.gamma_files,
        ("eis", "basis"): artifacts.eis_files,
        ("weak", "admissible"): artifacts.admissible_files,
        ("lift", "vv"): artifacts.vv_files,
        ("borcherds", "fj"): lambda inst: artifacts.fj_files(inst, order or max(inst.cfg.q_order, 1)),
        ("borcherds", "divisors"): artifacts.divisor_files,
        ("green", "xi"): artifacts.green_files,
    }


COMMANDS = {
    "lattice": {"theta": "theta series of L0 and the exceptional lattices"},
    "chars": {"gamma": "local Weil indices gamma_p and products gamma_r"},
    "eis": {"basis": "Eisenstein series E_r at every cusp, with cusp constants"},
    "weak": {"admissible": "Z-basis of admissible principal parts"},
    "lift": {"vv": "coefficient table of the vector-valued lift"},
    "borcherds": {
        "fj": "leading Fourier-Jacobi factors with the mult / I report",
        "divisors": "divisor coefficient report",
    },
    "green": {"xi": "Green function samples as CSV"},
    "verify": {"all": "run the full invariant suite"},
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="job configuration (JSON)")
    p.add_argument("--order", type=int, help="q-expansion truncation order")
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker processes (default from ${THREADS_ENV}, else 1)")
    p.add_argument("--out", type=Path, help="output directory (default: current directory)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="unitary-borcherds",
                                     description="Exact computations around unitary Borcherds products.")
    groups = parser.add_subparsers(dest="group", required=True)
    for group, actions in COMMANDS.items():
        g = groups.add_parser(group)
        sub = g.add_subparsers(dest="action", required=True)
        for action, help_text in actions.items():
            _common(sub.add_parser(action, help=help_text))
    return parser


def _write(files: Dict[str, str], out: Optional[Path]) -> None:
    out = out or Path(".")
    out.mkdir(parents=True, exist_ok=True)
    for name, text in sorted(files.items()):
        (out / name).write_text(text)
        print(out / name)


def _verify(args) -> int:
    threads = args.threads if args.threads is not None else default_threads()
    configs = [args.config] if args.config else None
    t = time.perf_counter()
    checks = run_all(configs, args.order, threads)
    lines = [c.line() for c in checks]
    merged = summarize(checks)
    lines.append("")
    lines.extend(c.line() for c in merged)
    ok = all(c.ok for c in merged)
    lines.append(f"{'ALL PASS' if ok else 'FAILURES'} in {time.perf_counter() - t:.1f}s")
    report = "\n".join(lines) + "\n"
    sys.stdout.write(report)
    if args.out:
        _write({"verify.txt": report}, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        if args.order is not None and args.order < 1:
            raise ConfigError("--order must be at least 1")
        if args.group == "verify":
            return _verify(args)
        if args.config is None:
            raise ConfigError(f"'{args.group} {args.action}' needs --config")
        inst = Instance(JobConfig.load(args.config), args.order)
        files = _writers(args.order)[(args.group, args.action)](inst)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _write(files, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
