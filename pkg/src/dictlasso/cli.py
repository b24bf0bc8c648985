"""Command-line interface: generate, solve, simplify, bounds, rho, experiment, plot.

Every subcommand prints a JSON payload to stdout that embeds the exact
invocation config, its sha256 hash, and the seed, so any artifact can be
reproduced from its own metadata. Exit codes: 0 success, 1 usage or
schema error, 2 numerical error, 3 solver non-convergence.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dictionaries import KINDS, DictionarySpec
from .exceptions import DictLassoError, SchemaError
from .experiments import (
    DEFAULT_NOISE_SIGMA,
    GraphConfig,
    RecoveryConfig,
    SweepConfig,
    emit_outputs,
    paper_scale_config,
    plot_rows,
    read_table,
    run_experiment,
)
from .io import (
    config_hash,
    dump_json,
    json_ready,
    load_bundle,
    read_matrix_csv,
    save_bundle,
    write_matrix_csv,
    write_vector_csv,
)
from .simplify import DictionaryProblem, GroundTruth, simplify
from .solver import SolveOptions, oracle_lambda, solve_full, solve_simplified
from .theory import DEFAULT_BUDGET, restricted_extremes, theorem1_report

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_NOT_CONVERGED = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; the contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(payload):
    print(json.dumps(json_ready(payload), indent=2, sort_keys=True))


def _payload(config, seed, body):
    config = json_ready(config)
    return {
        "config": config,
        "config_sha256": config_hash(config),
        "seed": seed,
        "version": __version__,
        **body,
    }


def _solve_options(args):
    return SolveOptions(
        abs_tol=args.tol * 1e-2, rel_tol=args.tol, max_iters=args.max_iters
    )


def _dims(text):
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        ) from None


def _dictionary_spec(args):
    data = {"kind": args.kind}
    for name in ("p", "m", "kappa", "lam1", "lam2", "dims"):
        value = getattr(args, name)
        if value is not None:
            data[name] = value
    if args.kind in ("random_graph", "conditioned"):
        data["seed"] = args.seed
    return DictionarySpec.from_dict(data)


def cmd_generate(args):
    spec = _dictionary_spec(args)
    d = spec.build()
    m, p = d.shape
    rng = np.random.default_rng(np.random.SeedSequence([args.seed, 1]))
    theta_star = None
    if m == p:
        # Square invertible dictionaries get the planted s-sparse transform
        # used by the simulation studies: theta* = D^-1 x with sparse x.
        s = math.ceil(args.sparsity_fraction * p)
        x = np.zeros(p)
        x[:s] = rng.standard_normal(s)
        try:
            theta_star = np.linalg.solve(d, x)
        except np.linalg.LinAlgError:
            theta_star = None
    if theta_star is None:
        theta_star = rng.standard_normal(p)
    epsilon = args.noise_sigma * rng.standard_normal(args.n)
    phi = rng.standard_normal((args.n, p))
    c = phi @ theta_star + epsilon
    problem = DictionaryProblem(
        phi=phi, c=c, d=d, lam=args.lam,
        ground_truth=GroundTruth(theta_star, epsilon, args.noise_sigma),
    )
    out = save_bundle(args.out, problem, dictionary_spec=spec, seed=args.seed)
    config = {
        "command": "generate", "dictionary_spec": spec.to_dict(), "n": args.n,
        "lam": args.lam, "noise_sigma": args.noise_sigma,
        "sparsity_fraction": args.sparsity_fraction,
    }
    _emit(_payload(config, args.seed, {
        "bundle": str(out), "n": args.n, "p": p, "m": m,
    }))
    return EXIT_OK


def _solve_bundle(problem, opts):
    """Prefer the reduced problem; fall back to the direct splitting."""
    try:
        return solve_simplified(simplify(problem), problem.lam, opts)
    except SchemaError:
        raise
    except DictLassoError:
        return solve_full(problem, opts)


def cmd_solve(args):
    problem, manifest = load_bundle(args.bundle)
    if args.lam is not None:
        problem = dataclasses.replace(problem, lam=args.lam)
    opts = _solve_options(args)
    result = _solve_bundle(problem, opts)
    out = Path(args.out) if args.out else Path(args.bundle)
    out.mkdir(parents=True, exist_ok=True)
    write_vector_csv(out / "theta_hat.csv", result.theta_hat)
    config = {
        "command": "solve", "bundle": str(args.bundle), "lam": problem.lam,
        "tol": args.tol, "max_iters": args.max_iters,
    }
    payload = _payload(config, manifest.get("seed"), {
        "theta_hat_path": str(out / "theta_hat.csv"),
        "objective": result.objective,
        "iterations": result.iterations,
        "converged": result.converged,
        "certificate": result.certificate,
        "primal_residual": result.primal_residual,
        "dual_residual": result.dual_residual,
    })
    dump_json(out / "result.json", payload)
    _emit(payload)
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_simplify(args):
    problem, manifest = load_bundle(args.bundle)
    sf = simplify(problem)
    config = {"command": "simplify", "bundle": str(args.bundle), "dump": args.dump}
    body = {
        "n": sf.n, "p": sf.p, "m": sf.m,
        "rank_r": sf.rank_r, "free_dim": sf.free_dim,
        "x_shape": list(sf.x.shape), "y_length": int(sf.y.shape[0]),
    }
    if args.dump:
        out = Path(args.out) if args.out else Path(args.bundle) / "simplified"
        out.mkdir(parents=True, exist_ok=True)
        write_matrix_csv(out / "x.csv", sf.x)
        write_vector_csv(out / "y.csv", sf.y)
        write_matrix_csv(out / "z.csv", sf.z)
        write_matrix_csv(out / "z_pinv.csv", sf.z_pinv)
        write_matrix_csv(out / "v_alpha.csv", sf.v_alpha)
        write_matrix_csv(out / "v_beta.csv", sf.v_beta)
        write_matrix_csv(out / "a.csv", sf.a)
        write_matrix_csv(out / "b.csv", sf.b)
        payload = _payload(config, manifest.get("seed"), {**body, "out": str(out)})
        dump_json(out / "simplified.json", payload)
    else:
        payload = _payload(config, manifest.get("seed"), body)
    _emit(payload)
    return EXIT_OK


def cmd_bounds(args):
    problem, manifest = load_bundle(args.bundle)
    if problem.ground_truth is None:
        raise SchemaError(
            "bounds needs a bundle with theta_star and epsilon "
            "(generate one, or add them to the manifest)"
        )
    sf = simplify(problem)
    gt = problem.ground_truth
    lam = args.lam if args.lam is not None else oracle_lambda(sf, gt.epsilon, args.c_mult)
    opts = _solve_options(args)
    result = solve_simplified(sf, lam, opts)
    report = theorem1_report(
        sf, problem, gt.theta_star, args.s, args.l, lam, result, budget=args.budget
    )
    config = {
        "command": "bounds", "bundle": str(args.bundle), "s": args.s, "l": args.l,
        "lam": lam, "c_mult": args.c_mult, "budget": args.budget,
        "tol": args.tol, "max_iters": args.max_iters,
    }
    payload = _payload(config, manifest.get("seed"), {
        "lam": lam,
        "converged": result.converged,
        "report": dataclasses.asdict(report),
    })
    out = Path(args.out) if args.out else Path(args.bundle)
    out.mkdir(parents=True, exist_ok=True)
    dump_json(out / "bounds.json", payload)
    _emit(payload)
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_rho(args):
    psi = read_matrix_csv(args.psi)
    y_mat = read_matrix_csv(args.y)
    extremes = restricted_extremes(
        psi, y_mat, args.l1, args.l2,
        budget=args.budget, require_exhaustive=args.exhaustive, seed=args.seed,
    )
    config = {
        "command": "rho", "psi": str(args.psi), "y": str(args.y),
        "l1": args.l1, "l2": args.l2, "budget": args.budget,
        "exhaustive": args.exhaustive,
    }
    payload = _payload(config, args.seed, dataclasses.asdict(extremes))
    if args.out:
        dump_json(args.out, payload)
    _emit(payload)
    return EXIT_OK


def parse_experiment_config(path):
    """JSON file -> validated config object, dispatched on its "kind" key."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise SchemaError(f"{path}: expected a JSON object at the top level")
    kind = data.get("kind", "condition")
    parsers = {
        "condition": SweepConfig.from_dict,
        "recovery": RecoveryConfig.from_dict,
        "graph": GraphConfig.from_dict,
    }
    if kind not in parsers:
        raise SchemaError(
            f"{path}: unknown experiment kind {kind!r}; "
            f"expected one of {sorted(parsers)}"
        )
    return parsers[kind](data)


def cmd_experiment(args):
    config = parse_experiment_config(args.config)
    if args.paper_scale:
        config = paper_scale_config(config)
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    rows = run_experiment(config)
    out = emit_outputs(rows, args.out, config.to_dict())
    _emit(_payload(config.to_dict(), config.seed, {
        "out": str(out), "rows": len(rows),
    }))
    return EXIT_OK


def cmd_plot(args):
    rows = read_table(args.table)
    out = Path(args.out) if args.out else Path(args.table).with_name("plot.svg")
    plot_rows(rows, out)
    config = {"command": "plot", "table": str(args.table)}
    _emit(_payload(config, None, {"plot": str(out), "rows": len(rows)}))
    return EXIT_OK


def _add_solver_flags(parser):
    parser.add_argument(
        "--tol", type=float, default=1e-8,
        help="relative convergence tolerance (absolute = tol/100; default 1e-8)",
    )
    parser.add_argument(
        "--max-iters", type=int, default=50000,
        help="iteration cap for the splitting solver (default 50000)",
    )


def build_parser():
    parser = _Parser(
        prog="dictlasso",
        description=__doc__.splitlines()[0],
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser(
        "generate",
        help="draw a problem instance for a dictionary spec and save it as a bundle",
        description=(
            "Build the dictionary, plant a ground truth (square invertible "
            "dictionaries get an s-sparse transform; others a dense Gaussian), "
            "draw the design and noise, and write the bundle directory."
        ),
    )
    gen.add_argument("--kind", required=True, choices=KINDS)
    gen.add_argument("--p", type=int, help="signal dimension (most kinds)")
    gen.add_argument("--m", type=int, help="edge count (random_graph)")
    gen.add_argument("--kappa", type=float, help="condition number (conditioned)")
    gen.add_argument("--lam1", type=float, help="identity-part weight (fused)")
    gen.add_argument("--lam2", type=float, help="difference-part weight (fused)")
    gen.add_argument("--dims", type=_dims, help="grid shape, e.g. 4,5 (grid_tv)")
    gen.add_argument("--n", type=int, required=True, help="number of observations")
    gen.add_argument("--lam", type=float, default=0.0, help="penalty level (default 0)")
    gen.add_argument(
        "--noise-sigma", type=float, default=0.0,
        help=f"noise level (default 0; the condition study uses {DEFAULT_NOISE_SIGMA:.6g})",
    )
    gen.add_argument("--sparsity-fraction", type=float, default=0.1)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="bundle directory to create")
    gen.set_defaults(func=cmd_generate)

    solve = sub.add_parser("solve", help="solve a bundle; write theta_hat.csv and result.json")
    solve.add_argument("bundle")
    solve.add_argument("--lam", type=float, help="override the bundle's penalty level")
    solve.add_argument("--out", help="output directory (default: the bundle)")
    _add_solver_flags(solve)
    solve.set_defaults(func=cmd_solve)

    simp = sub.add_parser(
        "simplify", help="reduce a bundle to its sparse-part problem; summary or full dump"
    )
    simp.add_argument("bundle")
    simp.add_argument("--dump", action="store_true", help="write all reduced matrices as CSV")
    simp.add_argument("--out", help="dump directory (default: <bundle>/simplified)")
    simp.set_defaults(func=cmd_simplify)

    bounds = sub.add_parser(
        "bounds", help="evaluate the deterministic error bound on a bundle with ground truth"
    )
    bounds.add_argument("bundle")
    bounds.add_argument("--s", type=int, required=True, help="transform sparsity level")
    bounds.add_argument("--l", type=int, required=True, help="tail chunk size")
    bounds.add_argument("--lam", type=float, help="penalty level (default: oracle rule)")
    bounds.add_argument("--c-mult", type=float, default=2.0, help="oracle multiplier (>= 2)")
    bounds.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    bounds.add_argument("--out", help="output directory (default: the bundle)")
    _add_solver_flags(bounds)
    bounds.set_defaults(func=cmd_bounds)

    rho = sub.add_parser(
        "rho", help="restricted singular-value extremes of [free block, sparse block]"
    )
    rho.add_argument("psi", help="CSV of the matrix whose extremes are taken")
    rho.add_argument("y", help="CSV of the column space generating the sparse block")
    rho.add_argument("--l1", type=int, default=0, help="free dimension count")
    rho.add_argument("--l2", type=int, required=True, help="support size")
    rho.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    rho.add_argument("--exhaustive", action="store_true",
                     help="fail instead of sampling when supports exceed the budget")
    rho.add_argument("--seed", type=int, default=0)
    rho.add_argument("--out", help="optional JSON output file")
    rho.set_defaults(func=cmd_rho)

    exp = sub.add_parser("experiment", help="run a sweep config; write table/meta/plot")
    exp.add_argument("config", help="JSON config with kind condition|recovery|graph")
    exp.add_argument("--out", required=True, help="results directory")
    exp.add_argument("--paper-scale", action="store_true",
                     help="full-study sizes/trials/grid for condition sweeps")
    exp.add_argument("--seed", type=int, help="override the config seed")
    exp.set_defaults(func=cmd_experiment)

    plot = sub.add_parser("plot", help="render plot.svg from a results table.csv")
    plot.add_argument("table")
    plot.add_argument("--out", help="SVG path (default: plot.svg beside the table)")
    plot.set_defaults(func=cmd_plot)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DictLassoError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
