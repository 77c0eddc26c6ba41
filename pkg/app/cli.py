"""Command-line front end.

Every subcommand reads measures and spectra from JSON files and writes JSON
or CSV to ``--output`` (stdout by default). The fully resolved configuration
is echoed at the head of every output. Failures print a one-line JSON
diagnostic on stderr and exit with 2 (bad input), 3 (precision) or 1.
"""

import argparse
import json
import logging
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Literal, NoReturn

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app import commands
from app.asymptotics import ConvergenceReport, Method, PrefactorMode
from app.config import get_settings
from app.errors import DomainError, HCIZError
from app.measures import Placement, SpectralMeasure, Spectrum
from app.schemas import SpectrumSchema, StudySummary, measure_adapter
from app.transforms import BetaClass
from app.utils.grids import parse_float_list, parse_grid, parse_int_list
from app.utils.logging import get_logger, setup_logging

logger = get_logger(__name__)

Subcommand = Literal["measure", "transform", "exact", "mc", "bounds", "converge", "dilute"]

class RunConfig(BaseModel):
    """Everything a run depends on. Unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid")

    subcommand: Subcommand
    measure: Path | None = None
    compare: Path | None = None
    a_spectrum: Path | None = None
    b_spectrum: Path | None = None
    nu: Path | None = None
    mu: Path | None = None
    output: Path | None = None
    summary: Path | None = None

    seed: int = 0
    precision_bits: int = Field(default=256, ge=53)
    beta: Literal[1, 2, 4] = 2
    t_grid: str = "-3:3:0.1"
    t: float = 0.5
    rank: str = "cbrt"
    dims: str = "8,16,32,64"
    a_grid: str = "0.5,0.25"
    n: int | None = Field(default=None, ge=1)
    samples: int = Field(default=100_000, ge=2)
    chunks: int = Field(default=8, ge=1)
    method: Method = Method.EXACT
    prefactor: PrefactorMode = PrefactorMode.NONE
    placement: Placement = Placement.QUANTILE
    sample: int | None = Field(default=None, ge=1)
    grid_size: int | None = Field(default=None, ge=2)

    verbose: bool = False
    debug: bool = False

    def echo(self) -> dict:
        """Resolved parameters, defaults and numerical tolerances included.

        Output locations, verbosity and the worker count do not change results
        and are left out.
        """
        settings = get_settings()
        data = self.model_dump(mode="json", exclude={"output", "summary", "verbose", "debug"})
        if data["grid_size"] is None:
            data["grid_size"] = settings.bl_grid_size
        data["tolerances"] = {
            "degeneracy_rel_gap": settings.degeneracy_rel_gap,
            "det_max_dim": settings.det_max_dim,
            "verify_factor": settings.verify_factor,
            "max_precision_bits": settings.max_precision_bits,
            "quad_epsabs": settings.quad_epsabs,
            "root_xtol": settings.root_xtol,
            "edge_infinity": settings.edge_infinity,
            "lp_tolerance": settings.lp_tolerance,
            "mc_batch_size": settings.mc_batch_size,
        }
        return data

    def rank_rule(self) -> "str | int":
        return int(self.rank) if self.rank.isdigit() else self.rank


# ============== Input helpers ==============


def _read_json(path: Path | None, flag: str) -> object:
    if path is None:
        raise DomainError(f"{flag} is required for this subcommand")
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DomainError(f"cannot read {flag} file {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise DomainError(f"{flag} file {path} is not valid JSON: {exc.msg}") from exc


def read_measure(path: Path | None, flag: str = "--measure") -> SpectralMeasure:
    """A measure descriptor, bare or wrapped under a ``measure`` key as the CLI emits it."""
    data = _read_json(path, flag)
    if isinstance(data, dict) and "measure" in data and "kind" not in data:
        data = data["measure"]
    return measure_adapter.validate_python(data).to_domain()


def read_spectrum(path: Path | None, flag: str) -> Spectrum:
    """A ``{"values": [...]}`` spectrum, bare or wrapped under a ``spectrum`` key."""
    data = _read_json(path, flag)
    if isinstance(data, dict) and "spectrum" in data and "values" not in data:
        data = data["spectrum"]
    return SpectrumSchema.model_validate(data).to_domain()


# ============== Handlers ==============


def _json_output(config: RunConfig, result: BaseModel) -> str:
    payload = {"config": config.echo(), **result.model_dump(mode="json")}
    return json.dumps(payload, sort_keys=True) + "\n"


def _report_output(config: RunConfig, report: ConvergenceReport) -> str:
    text = report.to_csv(config=config.echo())
    summary = StudySummary(**report.summary()).model_dump()
    if config.summary is not None:
        config.summary.write_text(json.dumps(summary, sort_keys=True) + "\n", encoding="utf-8")
    else:
        text += "# summary: " + json.dumps(summary, sort_keys=True) + "\n"
    return text


def handle_measure(config: RunConfig) -> str:
    m = read_measure(config.measure)
    compare = read_measure(config.compare, "--compare") if config.compare is not None else None
    result = commands.run_measure(m, config.sample, config.placement, config.seed, compare, config.grid_size)
    return _json_output(config, result)


def handle_transform(config: RunConfig) -> str:
    m = read_measure(config.measure)
    rows = commands.run_transform(m, BetaClass.parse(config.beta), parse_grid(config.t_grid))
    lines = ["# " + json.dumps({"config": config.echo()}, sort_keys=True), "t,v,f_beta,branch"]
    lines += [f"{row.t!r},{row.v!r},{row.f_beta!r},{row.branch}" for row in rows]
    return "\n".join(lines) + "\n"


def handle_exact(config: RunConfig) -> str:
    a = read_spectrum(config.a_spectrum, "--a-spectrum")
    b = read_spectrum(config.b_spectrum, "--b-spectrum")
    return _json_output(config, commands.run_exact(a, b, config.precision_bits))


def handle_mc(config: RunConfig) -> str:
    a = read_spectrum(config.a_spectrum, "--a-spectrum")
    b = read_spectrum(config.b_spectrum, "--b-spectrum")
    result = commands.run_mc(a, b, BetaClass.parse(config.beta), config.samples, config.seed, config.chunks, config.n)
    return _json_output(config, result)


def handle_bounds(config: RunConfig) -> str:
    a = read_spectrum(config.a_spectrum, "--a-spectrum")
    b = read_spectrum(config.b_spectrum, "--b-spectrum")
    result = commands.run_bounds(
        a, b, BetaClass.parse(config.beta), config.samples, config.seed, config.chunks, config.precision_bits
    )
    return _json_output(config, result)


def handle_converge(config: RunConfig) -> str:
    report = commands.run_converge(
        read_measure(config.measure),
        config.rank_rule(),
        config.t,
        parse_int_list(config.dims),
        BetaClass.parse(config.beta),
        config.method,
        seed=config.seed,
        samples=config.samples,
        chunks=config.chunks,
        prefactor=config.prefactor,
        placement=config.placement,
        precision_bits=config.precision_bits,
    )
    return _report_output(config, report)


def handle_dilute(config: RunConfig) -> str:
    if config.n is None:
        raise DomainError("--n is required for this subcommand")
    report = commands.run_dilute(
        read_measure(config.nu, "--nu"),
        read_measure(config.mu, "--mu"),
        parse_float_list(config.a_grid),
        config.n,
        BetaClass.parse(config.beta),
        config.method,
        seed=config.seed,
        samples=config.samples,
        chunks=config.chunks,
        precision_bits=config.precision_bits,
    )
    return _report_output(config, report)


HANDLERS: dict[str, Callable[[RunConfig], str]] = {
    "measure": handle_measure,
    "transform": handle_transform,
    "exact": handle_exact,
    "mc": handle_mc,
    "bounds": handle_bounds,
    "converge": handle_converge,
    "dilute": handle_dilute,
}


# ============== Entry points ==============


def _diagnose(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def _validation_message(exc: ValidationError) -> str:
    return "; ".join(f"{'.'.join(str(p) for p in err['loc']) or 'input'}: {err['msg']}" for err in exc.errors())


def run(config: RunConfig) -> int:
    """Execute one subcommand; returns the process exit code."""
    try:
        text = HANDLERS[config.subcommand](config)
        if config.output is not None:
            config.output.write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return 0
    except HCIZError as exc:
        logger.debug("Run failed", subcommand=config.subcommand, error=exc.code)
        _diagnose(exc.diagnostic())
        return exc.exit_code
    except ValidationError as exc:
        _diagnose({"error": "validation_error", "message": _validation_message(exc), "exit_code": 2})
        return 2
    except Exception as exc:  # noqa: BLE001
        logger.exception("Unexpected failure", subcommand=config.subcommand)
        _diagnose({"error": "internal_error", "message": str(exc), "exit_code": 1})
        return 1


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors reported as a JSON diagnostic."""

    def error(self, message: str) -> NoReturn:
        _diagnose({"error": "usage_error", "message": f"{self.prog}: {message}", "exit_code": 2})
        self.exit(2)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", type=Path, help="output file (default: stdout)")
    common.add_argument("--seed", type=int)
    common.add_argument("--verbose", action="store_true", help="log at INFO level on stderr")
    common.add_argument("--debug", action="store_true", help="log at DEBUG level, human-readable")

    spectra = argparse.ArgumentParser(add_help=False)
    spectra.add_argument("--a-spectrum", "--a", dest="a_spectrum", type=Path, help="JSON spectrum of A")
    spectra.add_argument("--b-spectrum", "--b", dest="b_spectrum", type=Path, help="JSON spectrum of B")

    sampling = argparse.ArgumentParser(add_help=False)
    sampling.add_argument("--samples", type=int)
    sampling.add_argument("--chunks", type=int)

    parser = _Parser(prog="hcizlab", description="Numerical lab for spherical integrals.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("measure", parents=[common], help="inspect, sample or compare a measure")
    p.add_argument("--measure", type=Path)
    p.add_argument("--sample", type=int, help="realize a spectrum of this size")
    p.add_argument("--placement", choices=[x.value for x in Placement])
    p.add_argument("--compare", type=Path, help="second measure for the bounded-Lipschitz distance")
    p.add_argument("--grid-size", type=int)

    p = sub.add_parser("transform", parents=[common], help="v(t) and f(t) on a grid")
    p.add_argument("--measure", type=Path)
    p.add_argument("--beta", type=int, choices=[1, 2, 4])
    p.add_argument("--t-grid", help="lo:hi:step or a comma separated list")

    p = sub.add_parser("exact", parents=[common, spectra], help="exact beta=2 integral")
    p.add_argument("--precision-bits", type=int)

    p = sub.add_parser("mc", parents=[common, spectra, sampling], help="Monte Carlo integral")
    p.add_argument("--beta", type=int, choices=[1, 2, 4])
    p.add_argument("--n", type=int, help="expected dimension")

    p = sub.add_parser("bounds", parents=[common, spectra, sampling], help="peeling bounds")
    p.add_argument("--beta", type=int, choices=[1, 2, 4])
    p.add_argument("--precision-bits", type=int)

    p = sub.add_parser("converge", parents=[common, sampling], help="small-rank convergence study")
    p.add_argument("--measure", type=Path)
    p.add_argument("--t", type=float)
    p.add_argument("--rank", help="one, cbrt, sqrt, n_over_log or a fixed integer")
    p.add_argument("--dims", help="comma separated dimensions")
    p.add_argument("--beta", type=int, choices=[1, 2, 4])
    p.add_argument("--method", choices=[x.value for x in Method])
    p.add_argument("--prefactor", choices=[x.value for x in PrefactorMode])
    p.add_argument("--placement", choices=[x.value for x in Placement])
    p.add_argument("--precision-bits", type=int)
    p.add_argument("--summary", type=Path, help="write the JSON summary here")

    p = sub.add_parser("dilute", parents=[common, sampling], help="dilute-rank limit study")
    p.add_argument("--nu", type=Path)
    p.add_argument("--mu", type=Path)
    p.add_argument("--a-grid", help="comma separated rank fractions")
    p.add_argument("--n", type=int)
    p.add_argument("--beta", type=int, choices=[1, 2, 4])
    p.add_argument("--method", choices=[x.value for x in Method])
    p.add_argument("--precision-bits", type=int)
    p.add_argument("--summary", type=Path, help="write the JSON summary here")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.debug:
        level = logging.DEBUG
    elif args.verbose:
        level = logging.INFO
    else:
        level = logging.WARNING
    setup_logging(debug=args.debug, stream=sys.stderr, level=level)

    try:
        config = RunConfig(**{k: v for k, v in vars(args).items() if v is not None})
    except ValidationError as exc:
        _diagnose({"error": "validation_error", "message": _validation_message(exc), "exit_code": 2})
        return 2
    return run(config)
