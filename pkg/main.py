"""Main entry point: class modules, towers, length calculus, ramification and self-tests."""

import argparse
import logging
import sys
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

# Reports and logs carry θ, π, ⊕; force UTF-8 on consoles that default to a legacy code page.
if hasattr(sys.stdout, "reconfigure"):
    sys.stdout.reconfigure(encoding="utf-8")
if hasattr(sys.stderr, "reconfigure"):
    sys.stderr.reconfigure(encoding="utf-8")

current_dir = Path(__file__).parent
sys.path.insert(0, str(current_dir))

from base_algebra import FiniteField, parse_poly  # noqa: E402
from class_module import class_module_with_modulus, solve_class_module  # noqa: E402
from config import Config  # noqa: E402
from drinfeld_core import certified_exp  # noqa: E402
from exceptions import ConfigError, InconclusiveCertificate, TaelmanError  # noqa: E402
from finite_module import enumerate_primes, mass_formula  # noqa: E402
from iwasawa_tower import TowerRunner, TowerSpec  # noqa: E402
from lambda_mu_engine import (  # noqa: E402
    ElementaryModule,
    PresentationMatrix,
    SeriesT,
    elementary_invariants,
    finite_part_length,
    length_quotient,
    presentation_lengths,
    verify_alg_T,
)
from ramification_calc import BreakData, divergence_certificate  # noqa: E402
from report_io import ModuleSpecReader, ReportWriter  # noqa: E402
from selftest import SUITES, run_selftest  # noqa: E402
from unit_search import unit_group_search, unit_search_degree  # noqa: E402
from utils import PathResolver, RangeParser, ResourceGuard  # noqa: E402

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


def setup_logging(log_file: str, level: str = "INFO") -> None:
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(log_file, encoding='utf-8'),
            logging.StreamHandler()
        ],
        force=True,
    )


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    """Command-line arguments layered over the YAML configuration."""

    command: str
    action: Optional[str] = None
    settings: Dict[str, Any] = dc_field(default_factory=dict)
    module: Optional[str] = None
    constants_degree: int = 1
    modulus: Optional[str] = None
    units: bool = False
    unit_degree: int = 1
    nmax: int = 2
    prime_degree_bound: int = 3
    primes: Optional[List[str]] = None
    series: Optional[str] = None
    characteristic: int = 2
    matrix: Optional[str] = None
    N_range: List[int] = dc_field(default_factory=list)
    p: int = 2
    breaks: List[int] = dc_field(default_factory=list)
    suite: str = "all"
    seed: int = 7
    output_format: str = "json"
    out: Optional[str] = None
    csv: Optional[str] = None

    @classmethod
    def from_args(cls, args: argparse.Namespace, config: Config) -> "RunConfig":
        settings = dict(config.config)
        rc = cls(command=args.command, action=getattr(args, "action", None), settings=settings)
        rc.output_format = args.format or settings["output_format"]
        rc.out = getattr(args, "out", None)
        rc.csv = getattr(args, "csv", None)
        rc.seed = args.seed if getattr(args, "seed", None) is not None else settings["seed"]
        if args.command == "class-module":
            rc.module = args.module
            rc.constants_degree = args.constants_degree
            rc.modulus = args.modulus
            rc.units = args.units or args.modulus is not None
            rc.unit_degree = args.unit_degree if args.unit_degree is not None else settings["unit_degree_bound"]
            rc.prime_degree_bound = settings["prime_degree_bound"]
        elif args.command == "tower":
            rc.module = args.module
            rc.nmax = args.nmax if args.nmax is not None else settings["nmax"]
            rc.prime_degree_bound = (args.prime_degree_bound if args.prime_degree_bound is not None
                                     else settings["prime_degree_bound"])
            rc.primes = args.primes.split(";") if args.primes else None
        elif args.command == "iwasawa":
            rc.N_range = RangeParser.parse_range(args.N, minimum=0 if args.action == "lengths" else 1)
            rc.series = getattr(args, "f", None)
            rc.matrix = getattr(args, "matrix", None)
            rc.characteristic = getattr(args, "p", 2)
        elif args.command == "ramification":
            rc.p = args.p
            rc.breaks = RangeParser.parse_list(args.breaks, minimum=1)
            rc.nmax = args.nmax if args.nmax is not None else len(rc.breaks)
            if args.json:
                rc.output_format = "json"
            elif args.format is None:
                rc.output_format = "table"
        elif args.command == "selftest":
            rc.suite = args.suite
        return rc

    def validate(self) -> bool:
        """Check every parameter before any computation starts."""
        if self.output_format not in Config.OUTPUT_FORMATS:
            raise ConfigError(f"unknown output format {self.output_format!r}")
        for path in (self.module, self.matrix):
            if path is not None:
                PathResolver.resolve_file_path(path)
        if self.command == "class-module":
            if self.constants_degree < 1:
                raise ConfigError(f"--constants-degree must be at least 1, got {self.constants_degree}")
            if self.unit_degree < 1:
                raise ConfigError(f"--unit-degree must be at least 1, got {self.unit_degree}")
        if self.command == "tower" and self.nmax < 0:
            raise ConfigError(f"--nmax must be nonnegative, got {self.nmax}")
        if self.command == "ramification":
            if self.nmax < 1 or self.nmax > len(self.breaks):
                raise ConfigError(f"--nmax must lie in 1..{len(self.breaks)}, got {self.nmax}")
        if self.command == "iwasawa" and self.action == "lengths" and self.series is None:
            raise ConfigError("iwasawa lengths needs --f")
        if self.command == "selftest" and self.suite not in SUITES + ("all",):
            raise ConfigError(f"unknown suite {self.suite!r}")
        return True


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def run_class_module(rc: RunConfig, writer: ReportWriter) -> int:
    guard = ResourceGuard.from_config(rc.settings)
    E = ModuleSpecReader().read_module(rc.module)
    L = E.field.extension(rc.constants_degree)
    exp = certified_exp(E, guard.max_exp_terms)
    result = solve_class_module(E, L, None, exp, guard)
    H = result.module
    primes = enumerate_primes(E.field, rc.prime_degree_bound, [H])
    lengths, remainder = mass_formula(H, primes)

    report: Dict[str, Any] = {
        "command": "class-module",
        "module": E.to_spec(),
        "constants": repr(L),
        "H": H.to_dict(),
        "p_parts": {k: v for k, v in lengths.items() if v},
        "mass_remainder": remainder,
        "diagnostics": result.diagnostics(),
    }
    status = EXIT_OK
    units = None
    f = parse_poly(rc.modulus, L, "θ") if rc.modulus is not None else None
    if rc.units:
        D = unit_search_degree(rc.unit_degree, f)
        units = unit_group_search(E, L, D, exp, rc.settings.get("unit_horizon"), guard)
        report["units"] = units.to_dict()
        if not units.certified:
            status = EXIT_INCONCLUSIVE
    if f is not None:
        modulus = class_module_with_modulus(E, L, f, units.generators, exp, guard,
                                            units_complete=units.certified)
        report["modulus"] = str(f)
        report["H_f"] = modulus.to_dict()
        if modulus.failed:
            status = EXIT_ERROR
        elif not modulus.certified:
            status = EXIT_INCONCLUSIVE
    log_class_module_summary(report)
    writer.write(writer.render(report), rc.out)
    return status


def run_tower_command(rc: RunConfig, writer: ReportWriter) -> int:
    E = ModuleSpecReader().read_module(rc.module)
    primes = None
    if rc.primes:
        primes = [parse_poly(text, E.field, "t") for text in rc.primes]
    spec = TowerSpec(E, n_max=rc.nmax, prime_degree_bound=rc.prime_degree_bound, primes=primes)
    runner = TowerRunner(spec, rc.settings, ResourceGuard.from_config(rc.settings))
    table = runner.run_tower()
    report = {"command": "tower run", **table.to_dict()}
    report["descent"] = [runner.descent_check(n).to_dict() for n in range(1, rc.nmax + 1)]
    report["nakayama"] = {str(g): runner.nakayama_vanishing_check(g) for g in table.primes}
    if rc.csv:
        writer.write_csv(table.header(), table.rows(), rc.csv)
    log_tower_summary(report)
    writer.write(writer.render(report, table.header(), table.rows()), rc.out)
    failed = [d for d in report["descent"] if not d["holds"]] + [k for k, v in report["nakayama"].items() if not v]
    if failed:
        logger.error(f"Tower checks failed: {failed}")
        return EXIT_ERROR
    return EXIT_OK


def run_iwasawa_lengths(rc: RunConfig, writer: ReportWriter) -> int:
    field = FiniteField(rc.characteristic)
    f = SeriesT.parse(rc.series, field)
    if f.is_zero():
        raise ValueError("f must be nonzero")
    matrix = PresentationMatrix(field, [[f]], 1)
    header = ["N", "length", "finite_part", "oracle_rank", "oracle_length", "oracle_finite", "agree"]
    rows = []
    for N in rc.N_range:
        closed = length_quotient(f, N)
        finite = finite_part_length(f, N) if N >= f.ord_T() else None
        oracle = presentation_lengths(matrix, N) if N >= 1 else None
        agree = oracle is None or (closed == oracle.total and (finite is None or finite == oracle.finite))
        rows.append([
            N,
            "infinite" if closed is None else closed,
            "" if finite is None else finite,
            "" if oracle is None else oracle.rank,
            "" if oracle is None else ("infinite" if oracle.total is None else oracle.total),
            "" if oracle is None else oracle.finite,
            agree,
        ])
    invariants = elementary_invariants(ElementaryModule(field, 0, (f,)))
    report = {
        "command": "iwasawa lengths",
        "f": str(f),
        "field": repr(field),
        "invariants": invariants.to_dict(),
        "rows": [dict(zip(header, row)) for row in rows],
    }
    if rc.csv:
        writer.write_csv(header, rows, rc.csv)
    writer.write(writer.render(report, header, rows), rc.out)
    if not all(row[-1] for row in rows):
        logger.error("Closed forms disagree with the Smith oracle")
        return EXIT_ERROR
    return EXIT_OK


def run_iwasawa_verify(rc: RunConfig, writer: ReportWriter) -> int:
    matrix = ModuleSpecReader().read_matrix(rc.matrix)
    result = verify_alg_T(
        matrix, rc.N_range, name=Path(rc.matrix).stem,
        window_min=rc.settings["affine_window_min"],
        parallel=rc.settings["parallel_sweep"],
        max_workers=rc.settings["max_workers"],
    )
    report = {"command": "iwasawa verify", "matrix": matrix.to_dict(), **result.to_dict()}
    header = ["N", "rank", "length", "finite"]
    rows = [[N] + [("infinite" if s.values[k] is None else s.values[k]) for s in result.sequences]
            for k, N in enumerate(result.N_range)]
    if rc.csv:
        writer.write_csv(header, rows, rc.csv)
    writer.write(writer.render(report, header, rows), rc.out)
    return EXIT_OK if result.passed else EXIT_ERROR


def run_ramification(rc: RunConfig, writer: ReportWriter) -> int:
    cert = divergence_certificate(BreakData(rc.p, tuple(rc.breaks)), rc.nmax)
    report = {"command": "ramification", **cert.to_dict()}
    header = ["n", "v(D_n)", "oracle", "v(D_n)/p^n", "bound", "v(Tr)"]
    rows = [[r["n"], r["different"], r["oracle"], r["ratio"], r["bound"], r["trace"]] for r in cert.rows]
    writer.write(writer.render(report, header, rows), rc.out)
    return EXIT_OK if cert.passed else EXIT_ERROR


def run_selftest_command(rc: RunConfig, writer: ReportWriter) -> int:
    reports = run_selftest(rc.suite, rc.settings, rc.seed)
    timings = rc.settings.get("report_timings", False)
    report = {
        "command": "selftest",
        "seed": rc.seed,
        "suites": [r.to_dict(timings) for r in reports],
        "passed": all(r.passed for r in reports),
    }
    header = ["suite", "checks", "failed", "inconclusive"]
    rows = [[r.name, len(r.checks), sum(1 for c in r.checks if not c.passed), r.inconclusive] for r in reports]
    log_selftest_summary(reports)
    writer.write(writer.render(report, header, rows), rc.out)
    if not report["passed"]:
        return EXIT_ERROR
    return EXIT_INCONCLUSIVE if any(r.inconclusive for r in reports) else EXIT_OK


def dispatch(rc: RunConfig) -> int:
    writer = ReportWriter(rc.output_format)
    if rc.command == "class-module":
        return run_class_module(rc, writer)
    if rc.command == "tower":
        return run_tower_command(rc, writer)
    if rc.command == "iwasawa":
        if rc.action == "lengths":
            return run_iwasawa_lengths(rc, writer)
        return run_iwasawa_verify(rc, writer)
    if rc.command == "ramification":
        return run_ramification(rc, writer)
    if rc.command == "selftest":
        return run_selftest_command(rc, writer)
    raise ConfigError(f"unknown subcommand {rc.command!r}")


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

class CliParser(argparse.ArgumentParser):
    """Usage errors exit with 1; exit code 2 is reserved for inconclusive certificates."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML configuration file (default: $TAELMAN_CONFIG or config.yaml)")
    common.add_argument("--format", choices=Config.OUTPUT_FORMATS, help="report format")
    common.add_argument("--out", help="write the report here instead of stdout")

    parser = CliParser(description="Exact Taelman class modules, Iwasawa lengths and ramification data.")
    sub = parser.add_subparsers(dest="command", required=True)

    cm = sub.add_parser("class-module", parents=[common], help="H(E/O_K) for K = L(θ)")
    cm.add_argument("--module", required=True, help="Drinfeld module spec (JSON)")
    cm.add_argument("--constants-degree", type=int, default=1, help="[L:F_q]")
    cm.add_argument("--modulus", help="generator of f in L[θ], e.g. 'theta^2+theta'")
    cm.add_argument("--units", action="store_true", help="also run the unit search")
    cm.add_argument("--unit-degree", type=int, help="degree bound D of the unit search")

    tower = sub.add_parser("tower", help="constant-field Z_p-towers")
    tower_sub = tower.add_subparsers(dest="action", required=True)
    run = tower_sub.add_parser("run", parents=[common], help="class modules of the layers 0..nmax")
    run.add_argument("--module", required=True)
    run.add_argument("--nmax", type=int)
    run.add_argument("--prime-degree-bound", type=int)
    run.add_argument("--primes", help="explicit primes in t, separated by ';'")
    run.add_argument("--csv", help="layer table as CSV")

    iw = sub.add_parser("iwasawa", help="lengths of R[[T]]-modules modulo T^N")
    iw_sub = iw.add_subparsers(dest="action", required=True)
    lengths = iw_sub.add_parser("lengths", parents=[common], help="closed forms for R[[T]]/(f) against the oracle")
    lengths.add_argument("--f", required=True, help="element of F_p[π][T], e.g. '(pi+T)'")
    lengths.add_argument("--N", default="1..12")
    lengths.add_argument("--p", type=int, default=2, help="characteristic of the residue field of R")
    lengths.add_argument("--csv")
    verify = iw_sub.add_parser("verify", parents=[common], help="affine growth of the three length sequences")
    verify.add_argument("--matrix", required=True, help="presentation matrix JSON")
    verify.add_argument("--N", default="1..16")
    verify.add_argument("--csv")

    ram = sub.add_parser("ramification", parents=[common], help="different and trace valuations")
    ram.add_argument("--p", type=int, required=True)
    ram.add_argument("--breaks", required=True, help="i_0,i_1,...")
    ram.add_argument("--nmax", type=int)
    ram.add_argument("--json", action="store_true")

    st = sub.add_parser("selftest", parents=[common], help="seeded acceptance suites")
    st.add_argument("--suite", default="all", choices=SUITES + ("all",))
    st.add_argument("--seed", type=int)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main execution function."""
    load_dotenv()
    args = build_parser().parse_args(argv)
    try:
        # Load configuration
        config_manager = Config(args.config)
        setup_logging(config_manager["log_file"], config_manager["log_level"])
        logger.info(f"Configuration loaded: {config_manager.config}")
        config_manager.validate()

        run_config = RunConfig.from_args(args, config_manager)
        run_config.validate()
        return dispatch(run_config)

    except InconclusiveCertificate as e:
        logger.warning(f"Inconclusive: {str(e)}")
        return EXIT_INCONCLUSIVE
    except (TaelmanError, ValueError, FileNotFoundError, OSError) as e:
        logger.error(f"Run failed: {str(e)}")
        return EXIT_ERROR


# ---------------------------------------------------------------------------
# Summaries
# ---------------------------------------------------------------------------

def log_class_module_summary(report: dict):
    logger.info("=" * 50)
    logger.info("CLASS MODULE SUMMARY")
    logger.info("=" * 50)
    logger.info(f"Constants          : {report['constants']}")
    logger.info(f"Threshold M        : {report['diagnostics']['M']}")
    logger.info(f"H                  : {report['H']['structure']}")
    if "units" in report:
        logger.info(f"Unit search        : {report['units']['dim_found']} generators ({report['units']['status']})")
    if "H_f" in report:
        logger.info(f"H_f                : {report['H_f']['H_f']['structure']} ({report['H_f']['compar_certificate']})")
    logger.info("=" * 50)


def log_tower_summary(report: dict):
    logger.info("=" * 50)
    logger.info("TOWER SUMMARY")
    logger.info("=" * 50)
    for layer in report["layers"]:
        logger.info(f"n = {layer['n']:<3}            : {layer['H']['structure']}")
    for prime, fit in report["fits"].items():
        logger.info(f"fit at {prime:<12}: μ = {fit['mu']}, ν = {fit['nu']}, n₀ = {fit['n0']} "
                    f"({'consistent' if fit['consistent'] else 'inconsistent'})")
    logger.info(f"Descent            : {all(d['holds'] for d in report['descent'])}")
    logger.info("=" * 50)


def log_selftest_summary(reports):
    logger.info("=" * 50)
    logger.info("SELFTEST SUMMARY")
    logger.info("=" * 50)
    for r in reports:
        logger.info(f"{r.name:<19}: {'pass' if r.passed else 'FAIL'} "
                    f"({len(r.checks)} checks, {r.inconclusive} inconclusive)")
    logger.info("=" * 50)


if __name__ == "__main__":
    sys.exit(main())
