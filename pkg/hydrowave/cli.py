"""
Command-line front end

    hydrowave verify --case 2 --k0 1 --theta1 "s^2" --theta2 "0" --domain u=1:2,v=1:2 --grid 30
    hydrowave commute --h catalog:t2,k0=1 --f "case2:k0=1,theta1=s^3,theta2=exp(s)"
    hydrowave hodograph --pressure case2:k0=1 --theta1 "s^2" --t 6 --x 2.5:3.5:101 --seed 1.8,1.1 --out field.csv
    hydrowave evolve --pressure case2:k0=1 --init sine:v0=1.5,amp=0.1 --scheme lw --tend 1 --monitor v:s
    hydrowave nutku --alpha 1 --beta 1 --F0 1 --G0 1 --n 3
    hydrowave constraint-check --speed case2:k0=1 --C "-4*s"

Every flag may also come from a key=value file given with --config; flags win.
Exit status: 0 pass, 2 tolerance failure, 1 error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from dotenv import dotenv_values
from pydantic import ValidationError

from .core.config import settings
from .core.errors import HydrowaveError, InvalidParameter
from .schemas.analysis import ErrorResponse
from .schemas.config import RunConfig
from .services.reporting import emit_report, write_csv
from .services.runs import RunOutcome, run

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_ERROR = 1
EXIT_FAIL = 2


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value file supplying defaults")
    parser.add_argument("--domain", help="rectangle u=a:b,v=c:d")
    parser.add_argument("--grid", help="grid points per axis")
    parser.add_argument("--tolerance", help="verdict threshold")
    parser.add_argument("--fd-step", dest="fd_step", help="absolute finite-difference step")
    parser.add_argument("--out", help="CSV output path")
    parser.add_argument("--report", help="report path (stdout when omitted)")
    parser.add_argument("--format", choices=["text", "json-lines"], help="report format")
    parser.add_argument("--threads", help="grid parallelism")
    parser.add_argument("--log-level", dest="log_level", default=None, help="logging level")


def _family_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--theta1", help="theta1 expression in s")
    parser.add_argument("--theta2", help="theta2 expression in s")
    parser.add_argument("--density", help="density spec")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hydrowave",
        description="Exact solutions of f_vv - a^2 f_uu = 0, commuting flows and p-system hodograph solutions",
        argument_default=argparse.SUPPRESS,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="wave residual of a solution family", argument_default=argparse.SUPPRESS)
    _common(verify)
    _family_flags(verify)
    verify.add_argument("--case", help="speed case 1, 2 or 3")
    for name in ("c0", "v0", "v1", "k0", "k1"):
        verify.add_argument(f"--{name}", help=f"constant {name}")
    verify.add_argument("--speed", help="speed spec (with --density)")

    commute = sub.add_parser("commute", help="commutation of two flows", argument_default=argparse.SUPPRESS)
    _common(commute)
    commute.add_argument("--h", help="density spec of the Hamiltonian")
    commute.add_argument("--f", help="density spec of the second flow")

    constraint = sub.add_parser(
        "constraint-check", help="compatibility of derived constraint data", argument_default=argparse.SUPPRESS
    )
    _common(constraint)
    constraint.add_argument("--speed", help="speed spec")
    constraint.add_argument("--C", help="free function C(eta)")
    constraint.add_argument("--perturb", help="shift added to lam")
    constraint.add_argument("--density", help="density checked against the semilinear constraint")

    hodograph = sub.add_parser("hodograph", help="implicit p-system solution", argument_default=argparse.SUPPRESS)
    _common(hodograph)
    _family_flags(hodograph)
    hodograph.add_argument("--pressure", help="pressure spec")
    hodograph.add_argument("--t", help="time")
    hodograph.add_argument("--x", help="x axis lo:hi:n")
    hodograph.add_argument("--seed", help="Newton seed u,v")

    evolve = sub.add_parser("evolve", help="finite-difference evolution", argument_default=argparse.SUPPRESS)
    _common(evolve)
    evolve.add_argument("--pressure", help="pressure spec")
    evolve.add_argument("--init", help="CSV path with x,u,v or preset sine:...")
    evolve.add_argument("--scheme", choices=["lxf", "lw"], help="scheme")
    evolve.add_argument("--cfl", help="Courant number in (0, 1]")
    evolve.add_argument("--tend", help="final time")
    evolve.add_argument("--cells", help="cells of preset fields")
    evolve.add_argument("--monitor", action="append", help="density spec of a monitored functional (repeatable)")
    evolve.add_argument("--sample-every", dest="sample_every", help="monitor sampling interval")
    evolve.add_argument("--monitor-out", dest="monitor_out", help="CSV path of monitored functionals")

    nutku = sub.add_parser("nutku", help="tower of separable densities", argument_default=argparse.SUPPRESS)
    _common(nutku)
    nutku.add_argument("--alpha", help="alpha(u)")
    nutku.add_argument("--beta", help="beta(v)")
    nutku.add_argument("--F0", help="linear seed F0(u)")
    nutku.add_argument("--G0", help="linear seed G0(v)")
    nutku.add_argument("--n", help="tower depth")
    nutku.add_argument("--corner", help="corner u0,v0")
    return parser


def _read_config_file(path: str) -> Dict[str, str]:
    if not Path(path).is_file():
        raise InvalidParameter(f"config file {path} does not exist")
    values = dotenv_values(path)
    return {key.replace("-", "_"): value for key, value in values.items() if value is not None}


def load_config(argv: Optional[List[str]] = None) -> RunConfig:
    """
    Parse flags, merge them over the config file and validate

    Raises:
        InvalidParameter: missing config file
        ValidationError: unknown keys or invalid values
    """
    namespace = vars(build_parser().parse_args(argv))
    namespace.pop("log_level", None)
    config_path = namespace.pop("config", None)
    merged: Dict[str, object] = _read_config_file(config_path) if config_path else {}
    merged.update(namespace)
    return RunConfig(**merged)


def _write_outputs(cfg: RunConfig, outcome: RunOutcome) -> None:
    if cfg.out and outcome.table is not None:
        write_csv(cfg.out, outcome.table.header, outcome.table.rows)
        outcome.report.outputs.append(cfg.out)
    if cfg.monitor_out and outcome.monitors is not None:
        write_csv(cfg.monitor_out, outcome.monitors.header, outcome.monitors.rows)
        outcome.report.outputs.append(cfg.monitor_out)


def _emit(cfg: RunConfig, outcome: RunOutcome) -> None:
    if cfg.report:
        with open(cfg.report, "w", encoding="utf-8") as handle:
            emit_report(outcome.report, cfg.format, handle)
    else:
        emit_report(outcome.report, cfg.format)


def _fail(message: str, code: str, json_lines: bool) -> int:
    if json_lines:
        sys.stderr.write(ErrorResponse(error=message, error_code=code).model_dump_json() + "\n")
    else:
        sys.stderr.write(f"error [{code}]: {message}\n")
    return EXIT_ERROR


def _configure_logging(argv: Optional[List[str]]) -> None:
    level = settings.LOG_LEVEL
    args = list(sys.argv[1:] if argv is None else argv)
    if "--log-level" in args and args.index("--log-level") + 1 < len(args):
        level = args[args.index("--log-level") + 1]
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


def main(argv: Optional[List[str]] = None) -> int:
    _configure_logging(argv)
    json_lines = "json-lines" in (argv if argv is not None else sys.argv[1:])
    try:
        cfg = load_config(argv)
    except ValidationError as e:
        return _fail(f"invalid configuration: {e}", "INVALID_CONFIG", json_lines)
    except HydrowaveError as e:
        return _fail(str(e), e.code, json_lines)

    try:
        outcome = run(cfg)
        _write_outputs(cfg, outcome)
        _emit(cfg, outcome)
    except HydrowaveError as e:
        logger.error(f"{cfg.command} failed: {e}")
        return _fail(str(e), e.code, cfg.format == "json-lines")
    except Exception as e:
        logger.error(f"Unexpected error in {cfg.command}: {e}", exc_info=True)
        return _fail(str(e), "INTERNAL_ERROR", cfg.format == "json-lines")

    return EXIT_PASS if outcome.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
