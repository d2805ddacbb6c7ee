"""Command-line front end: ``rts <command> [options]``.

Every command prints one report (JSON by default, CSV for tabular output or
with ``--format csv``) and exits 0 when all verdicts hold, 1 when one fails and
2 on usage or domain errors.
"""

import argparse
import logging
import math
import sys
from collections.abc import Callable

import numpy as np

from rts_lab import __version__
from rts_lab.config import SearchConfig, configure_logging, search_config, simulation_config
from rts_lab.schemas.bccks import ErrorMode, PauliSumHamiltonian, SegmentPlan, SimulationMode
from rts_lab.schemas.mixing import DenseOperator
from rts_lab.schemas.ode import OdeProblem
from rts_lab.schemas.optimizer import TotalMode
from rts_lab.schemas.qsp import JacobiAngerSpec, UsaCertificate, UsaSpec
from rts_lab.schemas.report import RunReport, Verdict
from rts_lab.services import bccks, ode, optimizer, qsp
from rts_lab.utils.file_storage import save_file
from rts_lab.utils.hamiltonian_file import load_hamiltonian

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERDICT_FAILED = 1
EXIT_USAGE = 2

DEFAULT_TABLE_ERRORS = "1e-4,1e-8,1e-12"
DEFAULT_G_GRID = "5:35:0.5"
DEFAULT_L_GRID = "1e1,1e2,1e3,1e4,1e5,1e6"


def parse_float_list(text: str) -> list[float]:
    """Parse ``a,b,c`` or an inclusive ``start:stop:step`` range of floats."""
    try:
        if ":" in text:
            start, stop, step = (float(part) for part in text.split(":"))
            if step <= 0.0 or stop < start:
                raise ValueError
            count = math.floor((stop - start) / step + 1e-9) + 1
            return [start + i * step for i in range(count)]
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid number list: {text!r}") from exc


def parse_int_list(text: str) -> list[int]:
    """Parse ``a,b,c`` or an inclusive ``start:stop`` range of integers."""
    try:
        if ":" in text:
            start, stop = (int(part) for part in text.split(":"))
            if stop < start:
                raise ValueError
            return list(range(start, stop + 1))
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid integer list: {text!r}") from exc


# ---------------------------------------------------------------------------
# Argument groups
# ---------------------------------------------------------------------------


def _add_output(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=["json", "csv"], default=None,
                        help="Report format (default: json, csv for tabular commands).")
    parser.add_argument("--output", default=None, help="Also write the report to this path.")


def _add_orders(parser: argparse.ArgumentParser, k1: int, k2: int, p: float) -> None:
    parser.add_argument("--k1", type=int, default=k1, help=f"Truncation order K1 (default: {k1}).")
    parser.add_argument("--k2", type=int, default=k2, help=f"Truncation order K2 (default: {k2}).")
    parser.add_argument("--p", type=float, default=p, help=f"Probability of the K1 branch (default: {p}).")


def _add_plan(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--l", type=int, default=200, help="Number of Pauli terms L (default: 200).")
    parser.add_argument("--t", type=float, default=100.0, help="Evolution time (default: 100).")
    parser.add_argument("--alpha-sum", type=float, default=None, dest="alpha_sum",
                        help="Sum of term weights (default: L, i.e. unit weights).")


def _add_search(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--error-mode", choices=[m.value for m in ErrorMode], default=None,
                        dest="error_mode", help="Segment error packaging.")
    parser.add_argument("--total-mode", choices=[m.value for m in TotalMode], default=None,
                        dest="total_mode", help="Per-segment or r-multiplied error.")
    parser.add_argument("--k-min", type=int, default=None, dest="k_min", help="Smallest K1 searched.")
    parser.add_argument("--k-max", type=int, default=None, dest="k_max", help="Largest K2 searched.")
    parser.add_argument("--p-cap", type=float, default=None, dest="p_cap", help="Largest p searched.")


def _add_ode_problem(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dim", type=int, default=2, help="State dimension (default: 2).")
    parser.add_argument("--h", type=float, default=0.5, help="Time step (default: 0.5).")
    parser.add_argument("--m", type=int, default=4, help="Number of steps (default: 4).")
    parser.add_argument("--pad", type=int, default=1, help="Padding blocks (default: 1).")
    parser.add_argument("--norm", type=float, default=0.5, help="||A h|| of the random problem (default: 0.5).")
    parser.add_argument("--j", type=int, default=None, help="Step to check (default: m).")
    parser.add_argument("--seed", type=int, default=None, help="Seed of the random problem.")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with every subcommand."""
    parser = argparse.ArgumentParser(
        prog="rts",
        description="Randomized truncated series laboratory: bounds, costs and certification.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    bounds = commands.add_parser("bounds", help="Closed-form bound sets.")
    bounds_apps = bounds.add_subparsers(dest="application", required=True)

    bounds_bccks = bounds_apps.add_parser("bccks", help="Truncated-Taylor Hamiltonian simulation.")
    _add_orders(bounds_bccks, 7, 10, 0.5)
    _add_plan(bounds_bccks)
    bounds_bccks.add_argument("--error-mode", choices=[m.value for m in ErrorMode],
                              default=None, dest="error_mode", help="Segment error packaging.")
    _add_output(bounds_bccks)

    bounds_qsp = bounds_apps.add_parser("qsp-hs", help="QSP Hamiltonian simulation.")
    bounds_qsp.add_argument("--t", type=float, default=1.0, help="Evolution time (default: 1).")
    _add_orders(bounds_qsp, 6, 10, 0.5)
    _add_output(bounds_qsp)

    bounds_usa = bounds_apps.add_parser("usa", help="Uniform spectral amplification.")
    bounds_usa.add_argument("--gamma", type=float, default=0.25, help="Linear-region half width (default: 0.25).")
    bounds_usa.add_argument("--delta", type=float, default=1e-3, help="Tolerance delta (default: 1e-3).")
    _add_orders(bounds_usa, 11, 21, 0.5)
    _add_output(bounds_usa)

    bounds_ode = bounds_apps.add_parser("ode", help="Linear ODE solver.")
    _add_orders(bounds_ode, 3, 6, 0.6)
    _add_ode_problem(bounds_ode)
    _add_output(bounds_ode)

    optimize = commands.add_parser("optimize", help="Best (K1, K2, p) for a budget or an error target.")
    target = optimize.add_mutually_exclusive_group(required=True)
    target.add_argument("--budget", type=float, help="Cost budget G.")
    target.add_argument("--target", type=float, help="Total error target.")
    _add_plan(optimize)
    _add_search(optimize)
    _add_output(optimize)

    table = commands.add_parser("table", help="Framework against original cost per error threshold.")
    table.add_argument("--errors", type=parse_float_list, default=parse_float_list(DEFAULT_TABLE_ERRORS),
                       help=f"Error thresholds (default: {DEFAULT_TABLE_ERRORS}).")
    _add_plan(table)
    _add_search(table)
    _add_output(table)

    curve = commands.add_parser("curve", help="Error-versus-cost or error-versus-K plot data.")
    curve.add_argument("--mode", choices=["error-vs-cost", "error-vs-k"], default="error-vs-cost")
    curve.add_argument("--g-grid", type=parse_float_list, default=parse_float_list(DEFAULT_G_GRID),
                       dest="g_grid", help=f"Budgets, list or start:stop:step (default: {DEFAULT_G_GRID}).")
    curve.add_argument("--k1s", type=parse_int_list, default=parse_int_list("1:20"),
                       help="K1 values for error-vs-k (default: 1:20).")
    curve.add_argument("--k2s", type=parse_int_list, default=parse_int_list("2:30"),
                       help="K2 values for error-vs-k (default: 2:30).")
    curve.add_argument("--p", type=float, default=0.8, help="Fixed p for error-vs-k (default: 0.8).")
    _add_plan(curve)
    _add_search(curve)
    _add_output(curve)

    simulate = commands.add_parser("simulate", help="Dense-operator simulations with verdicts.")
    simulate_apps = simulate.add_subparsers(dest="application", required=True)

    simulate_bccks = simulate_apps.add_parser("bccks", help="Segmented randomized evolution.")
    simulate_bccks.add_argument("--model", choices=["ising"], default="ising")
    simulate_bccks.add_argument("--n", type=int, default=3, help="Number of qubits (default: 3).")
    simulate_bccks.add_argument("--coupling", type=float, default=1.0)
    simulate_bccks.add_argument("--field", type=float, default=1.0)
    simulate_bccks.add_argument("--hamiltonian-file", default=None, dest="hamiltonian_file",
                                help="Text file with '<coefficient> <pauli word>' lines.")
    simulate_bccks.add_argument("--t", type=float, default=2.0, help="Evolution time (default: 2).")
    _add_orders(simulate_bccks, 3, 6, 0.7)
    simulate_bccks.add_argument("--mode", choices=[m.value for m in SimulationMode],
                                default=SimulationMode.EXACT_CHANNEL.value)
    simulate_bccks.add_argument("--shots", type=int, default=None, help="Sampled shots.")
    simulate_bccks.add_argument("--seed", type=int, default=None, help="Sampling seed.")
    simulate_bccks.add_argument("--state", choices=["zero", "random"], default="zero",
                                help="Initial pure state (random uses --seed).")
    simulate_bccks.add_argument("--error-mode", choices=[m.value for m in ErrorMode],
                                default=ErrorMode.SUM_FORM.value, dest="error_mode")
    _add_output(simulate_bccks)

    simulate_ode = simulate_apps.add_parser("ode", help="Mixed-truncation ODE solution check.")
    _add_orders(simulate_ode, 3, 6, 0.6)
    _add_ode_problem(simulate_ode)
    _add_output(simulate_ode)

    check = commands.add_parser("qsp-check", help="Grid scans of QSP polynomials against their bounds.")
    check_apps = check.add_subparsers(dest="application", required=True)
    check_hs = check_apps.add_parser("hs", help="Jacobi-Anger polynomials.")
    check_hs.add_argument("--t", type=float, default=1.0)
    _add_orders(check_hs, 6, 10, 0.5)
    check_hs.add_argument("--grid-points", type=int, default=None, dest="grid_points")
    _add_output(check_hs)
    check_usa = check_apps.add_parser("usa", help="Truncated linear function composites.")
    check_usa.add_argument("--gamma", type=float, default=0.25)
    check_usa.add_argument("--delta", type=float, default=1e-3, help="Tolerance delta (default: 1e-3).")
    check_usa.add_argument("--certificate", choices=[c.value for c in UsaCertificate],
                           default=UsaCertificate.TAIL.value,
                           help="Bessel-tail certificate or the closed-form erf lemma (default: tail).")
    _add_orders(check_usa, 41, 61, 0.5)
    check_usa.add_argument("--grid-points", type=int, default=None, dest="grid_points")
    _add_output(check_usa)

    asymptotics = commands.add_parser("asymptotics", help="Leading-order cost ratio.")
    asymptotics.add_argument("--tau", type=float, default=None, help="Evolution time tau > 1.")
    asymptotics.add_argument("--eps", type=float, default=None, help="Accuracy in (0, 1).")
    asymptotics.add_argument("--a", type=float, default=10.0, help="A = log tau for the L grid (default: 10).")
    asymptotics.add_argument("--l-grid", type=parse_float_list, default=parse_float_list(DEFAULT_L_GRID),
                             dest="l_grid", help=f"L = log(1/eps) values (default: {DEFAULT_L_GRID}).")
    _add_output(asymptotics)
    return parser


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _plan(args: argparse.Namespace) -> SegmentPlan:
    alpha_sum = args.alpha_sum if args.alpha_sum is not None else float(args.l)
    return bccks.plan_for_alpha_sum(alpha_sum, args.t, args.l)


def _search_config(args: argparse.Namespace) -> SearchConfig:
    overrides = {
        key: getattr(args, key)
        for key in ("error_mode", "total_mode", "k_min", "k_max", "p_cap")
        if getattr(args, key, None) is not None
    }
    if not overrides:
        return search_config
    return SearchConfig(**{**search_config.model_dump(), **overrides})


def _search_provenance(cfg: SearchConfig) -> dict:
    return {
        "error_mode": cfg.error_mode.value,
        "total_mode": cfg.total_mode.value,
        "k_min": cfg.k_min,
        "k_max": cfg.k_max,
        "p_cap": cfg.p_cap,
    }


def _ode_problem(args: argparse.Namespace) -> tuple[OdeProblem, int]:
    seed = simulation_config.seed if args.seed is None else args.seed
    return ode.random_ode_problem(args.dim, args.h, args.m, seed, args.norm, args.pad), seed


def _hamiltonian(args: argparse.Namespace) -> PauliSumHamiltonian:
    if args.hamiltonian_file:
        return load_hamiltonian(args.hamiltonian_file)
    return bccks.ising_hamiltonian(args.n, args.coupling, args.field)


def _initial_state(kind: str, dim: int, seed: int) -> DenseOperator:
    psi = np.zeros(dim, dtype=complex)
    if kind == "zero":
        psi[0] = 1.0
    else:
        rng = np.random.default_rng(seed)
        psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return DenseOperator.pure_state(psi)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def run_bounds(args: argparse.Namespace) -> RunReport:
    """bounds {bccks|qsp-hs|usa|ode}."""
    parameters = {"k1": args.k1, "k2": args.k2, "p": args.p}
    provenance: dict = {}
    if args.application == "bccks":
        mode = ErrorMode(args.error_mode or search_config.error_mode)
        plan = _plan(args)
        bound_set = bccks.bccks_bounds(args.k1, args.k2, args.p, plan.r, mode)
        report = bccks.bounds_report(bound_set)
        cost = bccks.rts_cost_point(args.k1, args.k2, args.p, plan.n_terms, plan.r)
        results = {
            **report.flat(),
            "r": plan.r,
            "tau": plan.tau,
            "g_indicator": cost.g_indicator,
            "g_cnot": cost.g_cnot,
            "k_mean": cost.k_mean,
            "average_ancilla_width": bccks.average_ancilla_width(
                args.k1, args.k2, args.p, plan.n_terms
            ),
        }
        parameters.update({"l": args.l, "t": args.t, "alpha_sum": plan.alpha_sum})
        provenance.update(report.provenance)
        provenance["select_cost_clamped"] = cost.clamped
    elif args.application == "qsp-hs":
        report = qsp.qsp_bounds_report(
            qsp.qsp_hs_bounds(JacobiAngerSpec(t=args.t, k1=args.k1, k2=args.k2, p=args.p))
        )
        results = report.flat()
        parameters["t"] = args.t
        provenance.update(report.provenance)
    elif args.application == "usa":
        spec = UsaSpec(gamma_cap=args.gamma, delta_tol=args.delta, k1=args.k1, k2=args.k2, p=args.p)
        report = qsp.usa_bounds(spec)
        results = report.flat()
        parameters.update({"gamma": args.gamma, "delta": args.delta})
        provenance.update(report.provenance)
    else:
        problem, seed = _ode_problem(args)
        j = args.j or problem.m
        encoding = ode.build_encoding(problem, args.k1)
        bound_set = ode.ode_bounds(ode.ode_constants(encoding, problem, j), args.k1, args.k2, args.p)
        results = bound_set.model_dump(exclude={"kappa_source", "defective", "j"})
        parameters.update({"dim": args.dim, "h": args.h, "m": args.m, "j": j, "seed": seed})
        provenance.update({"kappa_source": bound_set.kappa_source, "defective": bound_set.defective})
    return RunReport(
        command=f"bounds {args.application}",
        parameters=parameters,
        results=results,
        provenance=provenance,
    )


def run_optimize(args: argparse.Namespace) -> RunReport:
    """optimize --budget G | --target eps."""
    cfg = _search_config(args)
    plan = _plan(args)
    if args.budget is not None:
        result = optimizer.min_error_for_budget(args.budget, plan, cfg)
    else:
        result = optimizer.min_cost_for_error(args.target, plan, cfg)
    results = {
        "k1": result.cost.k1,
        "k2": result.cost.k2,
        "p": result.cost.p,
        "g_indicator": result.cost.g_indicator,
        "g_cnot": result.cost.g_cnot,
        "k_mean": result.cost.k_mean,
        "epsilon_segment": result.bounds.epsilon_segment,
        "epsilon_total": result.bounds.epsilon_total,
        "objective": result.objective,
        "candidates": result.candidates,
    }
    verdicts = []
    if args.target is not None:
        verdicts.append(Verdict.check("target_reached", result.objective, args.target, slack=0.0))
    return RunReport(
        command="optimize",
        parameters={"budget": args.budget, "target": args.target, "l": args.l, "t": args.t, "r": plan.r},
        results=results,
        provenance=_search_provenance(cfg),
        verdicts=verdicts,
    )


def run_table(args: argparse.Namespace) -> RunReport:
    """table --errors e1,e2,..."""
    cfg = _search_config(args)
    plan = _plan(args)
    rows = optimizer.build_table(args.errors, plan, cfg)
    verdicts = [
        Verdict.check(f"framework_below_original_{row.error:g}", row.framework_cost, row.original_cost)
        for row in rows
    ]
    return RunReport(
        command="table",
        parameters={"errors": args.errors, "l": args.l, "t": args.t, "r": plan.r},
        provenance=_search_provenance(cfg),
        verdicts=verdicts,
        rows=[row.model_dump() for row in rows],
    )


def run_curve(args: argparse.Namespace) -> RunReport:
    """curve --mode error-vs-cost | error-vs-k."""
    cfg = _search_config(args)
    plan = _plan(args)
    parameters = {"mode": args.mode, "l": args.l, "t": args.t, "r": plan.r}
    if args.mode == "error-vs-cost":
        rows = [row.model_dump() for row in optimizer.emit_curve(args.g_grid, plan, cfg)]
        parameters["g_grid"] = args.g_grid
    else:
        rows = [
            row.model_dump()
            for row in optimizer.epsilon_grid(args.k1s, args.k2s, args.p, plan, cfg)
        ]
        parameters.update({"k1s": args.k1s, "k2s": args.k2s, "p": args.p})
    return RunReport(
        command="curve", parameters=parameters, provenance=_search_provenance(cfg), rows=rows
    )


def run_simulate(args: argparse.Namespace) -> RunReport:
    """simulate {bccks|ode}."""
    parameters = {"k1": args.k1, "k2": args.k2, "p": args.p}
    if args.application == "ode":
        problem, seed = _ode_problem(args)
        j = args.j or problem.m
        check = ode.verify_mixed_solution(problem, args.k1, args.k2, args.p, j)
        parameters.update({"dim": args.dim, "h": args.h, "m": args.m, "j": j, "seed": seed})
        results = {
            **check.report.flat(),
            "measured_error": check.measured_error,
            "plain_k2_error": check.plain_k2_error,
            "cancellation_residual": check.cancellation_residual,
        }
        return RunReport(
            command="simulate ode",
            parameters=parameters,
            results=results,
            provenance={**check.report.provenance, "seed": seed},
            verdicts=[check.verdict],
        )

    hamiltonian = _hamiltonian(args)
    seed = simulation_config.seed if args.seed is None else args.seed
    plan = bccks.plan_segments(hamiltonian, args.t)
    spec = bccks.segment_mix_spec(plan, args.k1, args.k2, args.p)
    rho0 = _initial_state(args.state, 2**hamiltonian.n_qubits, seed)
    mode = SimulationMode(args.mode)
    error_mode = ErrorMode(args.error_mode)
    result = bccks.simulate_rts_evolution(
        hamiltonian, args.t, spec, rho0, mode, args.shots, seed, error_mode
    )
    bound_set = bccks.bccks_bounds(args.k1, args.k2, args.p, plan.r, error_mode)
    verdict = result.verdict
    parameters.update(
        {"n_qubits": hamiltonian.n_qubits, "n_terms": hamiltonian.n_terms, "t": args.t, "mode": mode.value}
    )
    results = {
        "r": result.r,
        "trace_distance": verdict.lhs,
        "epsilon_total": verdict.rhs,
        "a1_measured": verdict.a1,
        "a2_measured": verdict.a2,
        "b_measured": verdict.b,
        "a1_bound": bound_set.a1,
        "a2_bound": bound_set.a2,
        "b_bound": bound_set.b,
        "shots": result.shots,
        "discarded_shots": result.discarded_shots,
        "failure_rate": result.failure_rate,
        "standard_error": result.standard_error,
    }
    verdicts = [
        Verdict(name="trace_distance", lhs=verdict.lhs, rhs=verdict.rhs, holds=verdict.holds),
        Verdict.check("a1", verdict.a1, bound_set.a1),
        Verdict.check("b", verdict.b, bound_set.b),
    ]
    return RunReport(
        command="simulate bccks",
        parameters=parameters,
        results=results,
        provenance={"seed": seed, "error_mode": error_mode.value, "state": args.state},
        verdicts=verdicts,
    )


def run_qsp_check(args: argparse.Namespace) -> RunReport:
    """qsp-check {hs|usa}."""
    parameters = {"k1": args.k1, "k2": args.k2, "p": args.p, "grid_points": args.grid_points}
    if args.application == "hs":
        spec = JacobiAngerSpec(t=args.t, k1=args.k1, k2=args.k2, p=args.p)
        report, verdicts = qsp.qsp_hs_check(spec, args.grid_points)
        parameters["t"] = args.t
    else:
        spec = UsaSpec(gamma_cap=args.gamma, delta_tol=args.delta, k1=args.k1, k2=args.k2, p=args.p)
        report, verdicts = qsp.usa_check(spec, args.grid_points, UsaCertificate(args.certificate))
        parameters.update({"gamma": args.gamma, "delta": args.delta, "certificate": args.certificate})
    results = report.flat()
    results.update({f"scan.{verdict.name}": verdict.lhs for verdict in verdicts})
    return RunReport(
        command=f"qsp-check {args.application}",
        parameters=parameters,
        results=results,
        provenance=report.provenance,
        verdicts=verdicts,
    )


def run_asymptotics(args: argparse.Namespace) -> RunReport:
    """asymptotics --tau T --eps E | --a A --l-grid ..."""
    if (args.tau is None) != (args.eps is None):
        raise ValueError("--tau and --eps must be given together")
    if args.tau is not None:
        point = optimizer.asymptotic_ratio(args.tau, args.eps)
        return RunReport(
            command="asymptotics",
            parameters={"tau": args.tau, "eps": args.eps},
            results=point.model_dump(),
        )
    rows = [optimizer.asymptotic_point(args.a, l_var).model_dump() for l_var in args.l_grid]
    return RunReport(command="asymptotics", parameters={"a": args.a, "l_grid": args.l_grid}, rows=rows)


COMMANDS: dict[str, Callable[[argparse.Namespace], RunReport]] = {
    "bounds": run_bounds,
    "optimize": run_optimize,
    "table": run_table,
    "curve": run_curve,
    "simulate": run_simulate,
    "qsp-check": run_qsp_check,
    "asymptotics": run_asymptotics,
}


def render(report: RunReport, fmt: str | None) -> str:
    """Serialize a report; tabular reports default to CSV."""
    fmt = fmt or ("csv" if report.rows else "json")
    return report.to_csv() if fmt == "csv" else report.to_json()


def dispatch(argv: list[str] | None = None) -> int:
    """
    Parse arguments, run one command and print its report.

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])

    Returns:
        0 when every verdict holds, 1 when a verdict fails, 2 on usage or domain errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    try:
        configure_logging()
        report = COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"rts: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report.provenance.setdefault("version", __version__)

    text = render(report, args.format)
    if args.output:
        path = save_file(text, args.output)
        logger.info("report written to %s", path)
    sys.stdout.write(text)
    if not report.all_hold:
        failed = [verdict.name for verdict in report.verdicts if not verdict.holds]
        logger.error("verdicts failed: %s", ", ".join(failed))
        return EXIT_VERDICT_FAILED
    return EXIT_OK


def main() -> None:
    """Console entry point."""
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
