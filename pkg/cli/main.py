#!/usr/bin/env python
"""
overflowaudit command line: capacity, coding, overflow sweeps, bound checks and spectrum thresholds
"""
import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from cli.config import settings
from cli.schemas.experiment import load_experiment
from cli.services import (
    CapacityService,
    DecodeService,
    EncodeService,
    ExperimentService,
    OverflowService,
    SpectrumService,
    ThresholdService,
    VerifyBoundsService,
)
from overflow_core import __version__
from overflow_core.errors import BoundViolationError, CostBoundViolationError, OverflowCoreError

logger = logging.getLogger("overflowaudit")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_VIOLATION = 2

SERVICES = {
    "capacity": CapacityService,
    "encode": EncodeService,
    "decode": DecodeService,
    "overflow": OverflowService,
    "verify-bounds": VerifyBoundsService,
    "spectrum": SpectrumService,
    "threshold": ThresholdService,
}


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the validation status, keeping 2 for failed self-checks."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="JSON experiment config")
    common.add_argument("--n", type=int, nargs="+", default=None, help="Block lengths (threshold: n schedule)")
    common.add_argument("--epsilon", type=float, nargs="+", default=None, help="Overflow levels")
    common.add_argument("--a", type=float, default=None, help="Second-order centre a")
    common.add_argument("--rate", type=float, default=None, help="Replace the schedules with eta_n = n R")
    common.add_argument("--z", type=float, default=None, help="Replace the z rules with a constant z_n")
    common.add_argument("--trials", type=int, default=None, help="Monte Carlo draws")
    common.add_argument("--seed", type=int, default=None, help="Base seed")
    common.add_argument("--out", type=str, default=None, help="Output path (stdout when omitted)")
    method = common.add_mutually_exclusive_group()
    method.add_argument("--exact", dest="method", action="store_const", const="exact", help="Exact computation")
    method.add_argument("--mc", dest="method", action="store_const", const="mc", help="Monte Carlo estimation")
    common.add_argument("--budget", type=int, default=None, help="Enumeration budget")
    common.add_argument("--workers", type=int, default=None, help="Threads for sweeps")
    common.add_argument("--kind", choices=["first", "second"], default=None, help="Spectrum/threshold order")
    common.add_argument("--delta", type=float, default=None, help="Tail mass for the sup-entropy estimate")
    common.add_argument("--corrupt", choices=["permute", "pad"], default=None,
                        help="Check a corrupted copy of each constructed code")
    common.add_argument("--block-length", type=int, default=None, help="Block length for encode/decode")
    common.add_argument("--packed", action="store_true", default=None, help="Pack binary code streams into bytes")
    common.add_argument("--log-level", type=str, default=settings.LOG_LEVEL, help="Log level")
    common.add_argument("--quiet", action="store_true", help="Hide progress bars")

    parser = _Parser(prog="overflowaudit",
                     description="Cost-aware variable-length coding and overflow-probability verification")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("capacity", parents=[common], help="Solve the cost capacity")
    encode = commands.add_parser("encode", parents=[common], help="Encode a file of source symbols")
    encode.add_argument("input", help="Source symbol file")
    decode = commands.add_parser("decode", parents=[common], help="Decode a file written by encode")
    decode.add_argument("input", help="Encoded file")
    commands.add_parser("overflow", parents=[common], help="Overflow probability over (n, schedule)")
    commands.add_parser("verify-bounds", parents=[common], help="Check both overflow bounds")
    commands.add_parser("spectrum", parents=[common], help="Finite-n information-spectrum curves")
    commands.add_parser("threshold", parents=[common], help="Overflow threshold brackets")
    return parser


def overrides_from(args: argparse.Namespace) -> Dict[str, Any]:
    """Config fields set on the command line."""
    overrides: Dict[str, Any] = {
        "n": args.n,
        "epsilon": args.epsilon,
        "a": args.a,
        "trials": args.trials,
        "seed": args.seed,
        "output": args.out,
        "method": args.method,
        "budget": args.budget,
        "workers": args.workers,
        "kind": args.kind,
        "delta": args.delta,
        "corrupt": args.corrupt,
        "block_length": args.block_length,
        "packed": args.packed,
    }
    if args.rate is not None:
        overrides["schedule"] = [{"kind": "first", "rate": args.rate}]
    if args.z is not None:
        overrides["z_rule"] = [{"kind": "constant", "value": args.z}]
    return overrides


def make_service(args: argparse.Namespace, config) -> ExperimentService:
    service_cls = SERVICES[args.command]
    if args.command in ("encode", "decode"):
        return service_cls(config, args.input, quiet=args.quiet)
    return service_cls(config, quiet=args.quiet)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=args.log_level.upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
        force=True,
    )

    try:
        config = load_experiment(args.config, overrides_from(args))
        logger.info(f"Running {args.command}")
        return make_service(args, config).run()
    except (BoundViolationError, CostBoundViolationError) as e:
        logger.error(f"Self-check failed: {e}")
        return EXIT_VIOLATION
    except ValidationError as e:
        logger.error(f"Invalid config: {e}")
        return EXIT_INVALID
    except OverflowCoreError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
