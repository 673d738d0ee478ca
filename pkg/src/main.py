"""switchstab command line: generate, detect, synthesize, simulate, certify, experiment, bound."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
from loguru import logger
from pydantic import ValidationError

from src.config import SwitchSettings
from src.errors import ConfigError, GraphFileError, InvalidParamsError, SwitchStabError
from src.experiment.export import csv_text, export_csv
from src.experiment.harness import ExperimentConfig, run_experiment
from src.generators.instances import GenConfig, PhiSqrt, generate
from src.graph.core import best_delta_params, gamma, is_delta_contractive, validate_cycle
from src.graph.detection import detect_cycle, success_probability_bound
from src.graph.io import dump_graph, load_graph
from src.schemas.graph import Cycle, NiceWeightParams, WeightedDigraph
from src.signals.synthesis import check_admissibility, synthesize, write_signal_csv
from src.simulators.library import load_system
from src.simulators.lyapunov import check_certificate, graph_from_certificate, verify_period_contraction
from src.simulators.switched import (
    InputFunction,
    constant_input,
    recorded_input,
    simulate,
    write_trajectory_csv,
    zero_input,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

_CONFIG_ERRORS = (ConfigError, InvalidParamsError, GraphFileError)


# --- Argument parsing ---


def _add_instance_arguments(parser: argparse.ArgumentParser, settings: SwitchSettings) -> None:
    parser.add_argument("--n-stable", type=int, default=settings.n_stable)
    parser.add_argument("--n-unstable", type=int, default=settings.n_unstable)
    parser.add_argument("--phi-coeff", type=float, default=settings.phi_coeff)
    parser.add_argument(
        "--dwell", type=int, nargs=2, metavar=("MIN", "MAX"), default=[settings.dwell_min, settings.dwell_max]
    )
    parser.add_argument("--delta", type=int, default=None, help="nominal Delta (default: dwell MIN)")
    parser.add_argument("--A", dest="weight_a", type=float, default=settings.weight_a)
    parser.add_argument("--B", dest="weight_b", type=float, default=settings.weight_b)
    parser.add_argument("--alpha", type=float, default=settings.alpha)
    parser.add_argument("--beta", type=float, default=settings.beta)
    parser.add_argument("--extra-edges", type=int, default=settings.extra_edges)
    parser.add_argument("--strict", action="store_true", default=settings.strict_edges)
    parser.add_argument("--seed", type=int, default=settings.master_seed)


def build_parser(settings: SwitchSettings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="switchstab", description="Stabilizing switching signals via random cycles")
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("generate", help="draw a random instance and write it as a graph file")
    _add_instance_arguments(gen, settings)
    gen.add_argument("--out", type=Path, required=True)

    det = commands.add_parser("detect", help="run the randomized cycle detection on a graph file")
    det.add_argument("--graph", type=Path, required=True)
    det.add_argument("--seed", type=int, default=settings.master_seed)
    det.add_argument("--start", type=int, default=None)
    det.add_argument("--delta", type=int, default=None, help="uniform Delta (default: Gamma-minimizing)")
    det.add_argument("--out", type=Path, default=None, help="write the cycle as JSON")
    det.add_argument("--json", action="store_true", help="print the full detection result as JSON")

    syn = commands.add_parser("synthesize", help="write the periodic switching signal of a cycle")
    syn.add_argument("--graph", type=Path, required=True)
    syn.add_argument("--cycle", required=True, help="cycle JSON file, or inline 0,1,2 or 0:2,1:4")
    syn.add_argument("--horizon", type=int, required=True)
    syn.add_argument("--out", type=Path, required=True)

    sim = commands.add_parser("simulate", help="simulate a system file under a cycle's signal")
    sim.add_argument("--system", type=Path, required=True)
    sim.add_argument("--graph", type=Path, required=True)
    sim.add_argument("--cycle", required=True, help="cycle JSON file, or inline 0,1,2 or 0:2,1:4")
    sim.add_argument("--x0", required=True, help="comma separated initial state")
    sim.add_argument("--input", default="zero", help="zero | const:v1,v2,... | path to a CSV of inputs")
    sim.add_argument("--horizon", type=int, required=True)
    sim.add_argument("--out", type=Path, required=True)

    cert = commands.add_parser("certify", help="spot-check the certificate of a system file")
    cert.add_argument("--system", type=Path, required=True)
    cert.add_argument("--graph", type=Path, default=None, help="default: built from the certificate")
    cert.add_argument("--dwell", type=int, nargs=2, metavar=("MIN", "MAX"), default=[1, 1])
    cert.add_argument("--samples", type=int, default=settings.certificate_samples)
    cert.add_argument("--radius", type=float, default=settings.certificate_radius)
    cert.add_argument("--input-radius", type=float, default=None)
    cert.add_argument("--rel-tol", type=float, default=settings.rel_tol, help="relative slack of sampled inequalities")
    cert.add_argument("--cycle", default=None, help="also check one-period contraction along this cycle")
    cert.add_argument("--x0", default=None, help="initial state of the contraction check (default: all ones)")
    cert.add_argument("--closed-form-tol", type=float, default=settings.rel_tol_closed_form)
    cert.add_argument("--seed", type=int, default=settings.master_seed)
    cert.add_argument("--json", action="store_true")

    exp = commands.add_parser("experiment", help="Monte Carlo contractivity experiment")
    _add_instance_arguments(exp, settings)
    exp.add_argument("--trials", type=int, default=settings.trials_per_length)
    exp.add_argument("--lengths", type=int, nargs="+", default=None)
    exp.add_argument("--statistic", choices=["gamma", "xn"], default="gamma")
    exp.add_argument("--sweep", type=int, default=settings.sweep_detections)
    exp.add_argument("--retry-factor", type=int, default=settings.retry_factor)
    exp.add_argument("--timing", action="store_true", help="fill the seconds column")
    exp.add_argument("--out", type=Path, default=None)

    bnd = commands.add_parser("bound", help="print the success probability lower bound")
    bnd.add_argument("--alpha", type=float, default=settings.alpha)
    bnd.add_argument("--beta", type=float, default=settings.beta)
    bnd.add_argument("--A", dest="weight_a", type=float, default=settings.weight_a)
    bnd.add_argument("--B", dest="weight_b", type=float, default=settings.weight_b)
    bnd.add_argument("--phi-floor", type=int, required=True)
    return parser


# --- Commands ---


def _gen_config(args: argparse.Namespace) -> GenConfig:
    dwell_min, dwell_max = args.dwell
    params = NiceWeightParams(
        delta=args.delta if args.delta is not None else dwell_min,
        alpha=args.alpha,
        beta=args.beta,
        edge_bound=args.weight_a,
        vertex_bound=args.weight_b,
    )
    return GenConfig(
        n_stable=args.n_stable,
        n_unstable=args.n_unstable,
        phi=PhiSqrt(coeff=args.phi_coeff),
        params=params,
        dwell_window=(dwell_min, dwell_max),
        seed=args.seed,
        strict=args.strict,
        extra_edges=args.extra_edges,
    )


def _load_cycle(spec: str, g: WeightedDigraph) -> Cycle:
    """Cycle from a JSON file or an inline ``0,1,2`` / ``0:2,1:4`` list.

    Missing Delta-parameters get the Gamma-minimizing choice.
    """
    path = Path(spec)
    if path.is_file():
        try:
            cycle = Cycle.model_validate_json(path.read_text(encoding="utf-8"))
        except ValidationError as exc:
            raise GraphFileError(str(exc.errors()[0]["msg"]), path=str(path), line=1) from exc
    else:
        cycle = _parse_inline_cycle(spec)
    if cycle.delta_params is None:
        cycle = best_delta_params(g, cycle.vertices)
    validate_cycle(g, cycle)
    return cycle


def _parse_inline_cycle(spec: str) -> Cycle:
    entries = [entry.strip() for entry in spec.split(",")]
    try:
        pairs = [tuple(int(part) for part in entry.split(":")) for entry in entries]
    except ValueError as exc:
        raise ConfigError(f"Cycle {spec!r} is neither a file nor an inline list like 0,1,2 or 0:2,1:4") from exc
    if any(len(pair) not in (1, 2) for pair in pairs) or len({len(pair) for pair in pairs}) != 1:
        raise ConfigError(f"Inline cycle {spec!r} must give a Delta for every vertex or for none")
    vertices = tuple(pair[0] for pair in pairs)
    deltas = tuple(pair[1] for pair in pairs) if len(pairs[0]) == 2 else None
    try:
        return Cycle(vertices=vertices, delta_params=deltas)
    except ValidationError as exc:
        raise ConfigError(f"Inline cycle {spec!r}: {exc.errors()[0]['msg']}") from exc


def _input_function(spec: str, input_dim: int) -> InputFunction:
    if spec == "zero":
        return zero_input(input_dim)
    if spec.startswith("const:"):
        return constant_input([float(part) for part in spec.removeprefix("const:").split(",")])
    return recorded_input(np.loadtxt(spec, delimiter=",", ndmin=2))


def cmd_generate(args: argparse.Namespace) -> int:
    dump_graph(generate(_gen_config(args)), args.out)
    return EXIT_OK


def cmd_detect(args: argparse.Namespace) -> int:
    g = load_graph(args.graph)
    result = detect_cycle(g, args.seed, start=args.start)
    if args.delta is None:
        cycle = best_delta_params(g, result.cycle.vertices)
    else:
        cycle = result.cycle.with_uniform_delta(args.delta)
    value = gamma(g, cycle)
    if args.out is not None:
        args.out.write_text(cycle.model_dump_json() + "\n", encoding="utf-8")
    if args.json:
        document = {
            "vertices": list(cycle.vertices),
            "length": cycle.length,
            "delta_params": list(cycle.delta_params or ()),
            "gamma": value,
            "walk_trace": list(result.walk_trace),
            "closing_index": result.closing_index,
        }
        print(json.dumps(document))
    else:
        print(f"cycle {list(cycle.vertices)} length {cycle.length} deltas {list(cycle.delta_params or ())}")
        print(f"gamma {value!r} contractive {is_delta_contractive(g, cycle)}")
    return EXIT_OK


def cmd_synthesize(args: argparse.Namespace) -> int:
    g = load_graph(args.graph)
    signal = synthesize(_load_cycle(args.cycle, g), dwell_window=g.dwell_window)
    report = check_admissibility(signal, g, args.horizon)
    if not report.ok:
        logger.warning("Signal is not admissible: {}", report.model_dump())
    write_signal_csv(signal, args.horizon, args.out)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    g = load_graph(args.graph)
    system, _ = load_system(args.system)
    system.require_matches(g)
    signal = synthesize(_load_cycle(args.cycle, g), dwell_window=g.dwell_window)
    x0 = [float(part) for part in args.x0.split(",")]
    traj = simulate(system, signal, x0, _input_function(args.input, system.input_dim), args.horizon)
    write_trajectory_csv(traj, args.out)
    return EXIT_OK


def cmd_certify(args: argparse.Namespace) -> int:
    system, cert = load_system(args.system)
    if cert is None:
        raise ConfigError(f"System file {args.system} has no certificate section")
    g = load_graph(args.graph) if args.graph is not None else graph_from_certificate(cert, tuple(args.dwell))
    report = check_certificate(
        system,
        cert,
        g,
        args.samples,
        args.seed,
        args.radius,
        input_radius=args.input_radius,
        rel_tol=args.rel_tol,
    )
    contraction = None
    if args.cycle is not None:
        x0 = [1.0] * system.state_dim if args.x0 is None else [float(part) for part in args.x0.split(",")]
        cycle = _load_cycle(args.cycle, g)
        contraction = verify_period_contraction(system, cert, g, cycle, x0, rel_tol=args.closed_form_tol)
    ok = report.ok and (contraction is None or contraction.ok)

    if args.json:
        document = report.model_dump(mode="json")
        if contraction is not None:
            document["contraction"] = contraction.model_dump(mode="json")
            document["ok"] = ok
        print(json.dumps(document))
    else:
        for check in report.checks:
            print(f"{check.inequality:<8} {check.subject:<16} {check.worst_margin!r:>24} {check.violations}")
        if contraction is not None:
            print(f"period   {contraction.ratio!r} vs exp(gamma) {contraction.expected_ratio!r}")
        if ok:
            print("ok")
        elif not report.ok:
            print(f"FAILED ({report.violations} violating samples)")
        else:
            print(f"FAILED (period ratio off by {contraction.relative_error!r})")
    return EXIT_OK if ok else EXIT_RUNTIME


def cmd_experiment(args: argparse.Namespace) -> int:
    cfg = ExperimentConfig(
        gen=_gen_config(args),
        lengths=args.lengths,
        trials_per_length=args.trials,
        master_seed=args.seed,
        statistic=args.statistic,
        sweep_detections=args.sweep,
        retry_factor=args.retry_factor,
    )
    result = run_experiment(cfg)
    if args.out is None:
        sys.stdout.write(csv_text(result, include_timing=args.timing))
    else:
        export_csv(result, args.out, include_timing=args.timing)
    return EXIT_OK


def cmd_bound(args: argparse.Namespace) -> int:
    params = NiceWeightParams(
        delta=1, alpha=args.alpha, beta=args.beta, edge_bound=args.weight_a, vertex_bound=args.weight_b
    )
    print(repr(success_probability_bound(params, args.phi_floor)))
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "detect": cmd_detect,
    "synthesize": cmd_synthesize,
    "simulate": cmd_simulate,
    "certify": cmd_certify,
    "experiment": cmd_experiment,
    "bound": cmd_bound,
}


def main(argv: list[str] | None = None) -> int:
    """Parse arguments, configure logging and dispatch; returns the process exit code."""
    settings = SwitchSettings()
    try:
        args = build_parser(settings).parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    # Configure loguru
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if args.verbose else settings.log_level)

    try:
        return COMMANDS[args.command](args)
    except (*_CONFIG_ERRORS, ValueError) as exc:
        logger.error("Configuration error: {}", exc)
        return EXIT_CONFIG
    except (SwitchStabError, OSError) as exc:
        logger.error("{}: {}", type(exc).__name__, exc)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
