"""Reproducible simulation studies and their table/plot outputs.

Three studies are provided:

- condition sweep: relative estimation error of the penalized solver as
  the dictionary condition number kappa grows, across problem sizes;
- recovery sweep: noiseless exact-recovery rate of a sparse signal as the
  number of observations n grows;
- graph sweep: condition number of random-graph incidence dictionaries as
  the edge/vertex ratio grows.

Every trial draws from its own RNG stream derived from (seed, series
index, trial index), so results are independent of execution order and
identical configs produce byte-identical tables. In the condition sweep
the stream key deliberately excludes kappa: trial t of a size series uses
the same draws at every grid point (common random numbers), so the error
trend across kappa is not blurred by independent sampling noise per cell.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dictionaries import DictionarySpec, conditioned_random_dictionary, random_graph_dictionary
from .exceptions import DictLassoError, SchemaError
from .io import config_hash, dump_json, format_float
from .linalg import condition_number
from .simplify import DictionaryProblem, GroundTruth, simplify
from .solver import SolveOptions, oracle_lambda, solve_simplified

DEFAULT_NOISE_SIGMA = math.sqrt(0.001)
RECOVERY_SUCCESS_TOL = 1e-4
# Noiseless sweeps emulate the vanishing-penalty limit with a small positive
# floor. 1e-5 keeps the shrinkage bias two orders below the success
# tolerance while the splitting solver still converges; much smaller floors
# leave the penalty too weak to steer the underdetermined iterates and the
# solver stalls short of the minimum-l1 solution.
RECOVERY_LAM_FLOOR = 1e-5

# Sweep solves favor throughput; still far tighter than the reported errors.
SWEEP_SOLVER_DEFAULTS = {
    "rho": 1.0,
    "abs_tol": 1e-9,
    "rel_tol": 1e-7,
    "max_iters": 30000,
    "over_relaxation": 1.6,
}

PAPER_SIZES = ((40, 50), (100, 150), (200, 300))
PAPER_TRIALS = 100
DESK_SIZES = ((40, 50), (100, 150))
DESK_TRIALS = 20


def default_kappa_grid(points=7, top=1000.0):
    """Log-spaced condition numbers from 1 to ``top``."""
    return tuple(float(v) for v in np.logspace(0.0, math.log10(top), points))


def _solver_options_from_dict(data):
    if not isinstance(data, dict):
        raise SchemaError(f"solver: expected a mapping, got {type(data).__name__}")
    extras = sorted(set(data) - set(SWEEP_SOLVER_DEFAULTS))
    if extras:
        raise SchemaError(f"solver: unexpected fields {extras}")
    merged = {**SWEEP_SOLVER_DEFAULTS, **data}
    try:
        return SolveOptions(
            rho=float(merged["rho"]),
            abs_tol=float(merged["abs_tol"]),
            rel_tol=float(merged["rel_tol"]),
            max_iters=int(merged["max_iters"]),
            over_relaxation=float(merged["over_relaxation"]),
        )
    except ValueError as exc:
        raise SchemaError(f"solver: {exc}") from exc


@dataclass(frozen=True)
class SweepConfig:
    """Condition-sweep settings; the defaults are the desk-scale study."""

    sizes: tuple = DESK_SIZES
    kappa_grid: tuple = field(default_factory=default_kappa_grid)
    trials: int = DESK_TRIALS
    noise_sigma: float = DEFAULT_NOISE_SIGMA
    sparsity_fraction: float = 0.1
    seed: int = 0
    c_mult: float = 2.0
    solver: SolveOptions = field(
        default_factory=lambda: SolveOptions(**SWEEP_SOLVER_DEFAULTS)
    )

    def __post_init__(self):
        sizes = tuple((int(n), int(p)) for n, p in self.sizes)
        if not sizes:
            raise SchemaError("sizes: must contain at least one (n, p) pair")
        for n, p in sizes:
            if n < 1 or p < 2:
                raise SchemaError(f"sizes: need n >= 1 and p >= 2, got ({n}, {p})")
        grid = tuple(float(k) for k in self.kappa_grid)
        if not grid:
            raise SchemaError("kappa_grid: must be non-empty")
        if any(k < 1.0 for k in grid):
            raise SchemaError("kappa_grid: condition numbers must be >= 1")
        if any(b < a for a, b in zip(grid, grid[1:])):
            raise SchemaError("kappa_grid: must be nondecreasing")
        if self.trials < 1:
            raise SchemaError("trials: must be >= 1")
        if not self.noise_sigma >= 0.0:
            raise SchemaError("noise_sigma: must be >= 0")
        if not 0.0 < self.sparsity_fraction <= 1.0:
            raise SchemaError("sparsity_fraction: must lie in (0, 1]")
        if not self.c_mult >= 2.0:
            raise SchemaError("c_mult: must be >= 2")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "kappa_grid", grid)

    def to_dict(self):
        return {
            "kind": "condition",
            "sizes": [list(s) for s in self.sizes],
            "kappa_grid": list(self.kappa_grid),
            "trials": self.trials,
            "noise_sigma": self.noise_sigma,
            "sparsity_fraction": self.sparsity_fraction,
            "seed": self.seed,
            "c_mult": self.c_mult,
            "solver": dataclasses.asdict(self.solver),
        }

    @classmethod
    def from_dict(cls, data):
        required = {"sizes", "kappa_grid"}
        optional = {
            "kind", "trials", "noise_sigma", "sparsity_fraction", "seed",
            "c_mult", "solver",
        }
        _check_keys(data, required, optional, kind="condition")
        return cls(
            sizes=tuple(tuple(s) for s in data["sizes"]),
            kappa_grid=tuple(data["kappa_grid"]),
            trials=int(data.get("trials", DESK_TRIALS)),
            noise_sigma=float(data.get("noise_sigma", DEFAULT_NOISE_SIGMA)),
            sparsity_fraction=float(data.get("sparsity_fraction", 0.1)),
            seed=int(data.get("seed", 0)),
            c_mult=float(data.get("c_mult", 2.0)),
            solver=_solver_options_from_dict(data.get("solver", {})),
        )


def _check_keys(data, required, optional, kind):
    if not isinstance(data, dict):
        raise SchemaError(f"{kind} config: expected a mapping")
    extras = sorted(set(data) - required - optional)
    if extras:
        raise SchemaError(f"{kind} config: unexpected keys {extras}")
    missing = sorted(required - set(data))
    if missing:
        raise SchemaError(f"{kind} config: missing keys {missing}")


@dataclass(frozen=True)
class RecoveryConfig:
    """Noiseless recovery-sweep settings."""

    p: int
    s: int
    n_grid: tuple
    dictionary: DictionarySpec = None
    trials: int = DESK_TRIALS
    seed: int = 0
    solver: SolveOptions = field(
        default_factory=lambda: SolveOptions(**SWEEP_SOLVER_DEFAULTS)
    )

    def __post_init__(self):
        p = int(self.p)
        if p < 2:
            raise SchemaError(f"p: must be >= 2, got {p}")
        if not 1 <= int(self.s) <= p:
            raise SchemaError(f"s: must lie in [1, {p}], got {self.s}")
        grid = tuple(int(n) for n in self.n_grid)
        if not grid:
            raise SchemaError("n_grid: must be non-empty")
        if any(n < 1 for n in grid):
            raise SchemaError("n_grid: observation counts must be >= 1")
        if any(b < a for a, b in zip(grid, grid[1:])):
            raise SchemaError("n_grid: must be nondecreasing")
        if self.trials < 1:
            raise SchemaError("trials: must be >= 1")
        dictionary = self.dictionary
        if dictionary is None:
            dictionary = DictionarySpec(kind="identity", p=p)
        if dictionary.build().shape != (p, p):
            raise SchemaError(
                f"dictionary: recovery sweeps need a square {p} x {p} dictionary"
            )
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "s", int(self.s))
        object.__setattr__(self, "n_grid", grid)
        object.__setattr__(self, "dictionary", dictionary)

    def to_dict(self):
        return {
            "kind": "recovery",
            "p": self.p,
            "s": self.s,
            "n_grid": list(self.n_grid),
            "dictionary": self.dictionary.to_dict(),
            "trials": self.trials,
            "seed": self.seed,
            "solver": dataclasses.asdict(self.solver),
        }

    @classmethod
    def from_dict(cls, data):
        required = {"p", "s", "n_grid"}
        optional = {"kind", "dictionary", "trials", "seed", "solver"}
        _check_keys(data, required, optional, kind="recovery")
        dictionary = data.get("dictionary")
        return cls(
            p=int(data["p"]),
            s=int(data["s"]),
            n_grid=tuple(data["n_grid"]),
            dictionary=DictionarySpec.from_dict(dictionary) if dictionary else None,
            trials=int(data.get("trials", DESK_TRIALS)),
            seed=int(data.get("seed", 0)),
            solver=_solver_options_from_dict(data.get("solver", {})),
        )


@dataclass(frozen=True)
class GraphConfig:
    """Graph condition-number sweep settings."""

    p: int
    ratio_grid: tuple
    trials: int = 10
    seed: int = 0

    def __post_init__(self):
        p = int(self.p)
        if p < 2:
            raise SchemaError(f"p: must be >= 2, got {p}")
        grid = tuple(float(r) for r in self.ratio_grid)
        if not grid:
            raise SchemaError("ratio_grid: must be non-empty")
        if any(round(r * p) < 1 for r in grid):
            raise SchemaError(f"ratio_grid: every ratio must give >= 1 edge at p = {p}")
        if any(b < a for a, b in zip(grid, grid[1:])):
            raise SchemaError("ratio_grid: must be nondecreasing")
        if self.trials < 1:
            raise SchemaError("trials: must be >= 1")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "ratio_grid", grid)

    def to_dict(self):
        return {
            "kind": "graph",
            "p": self.p,
            "ratio_grid": list(self.ratio_grid),
            "trials": self.trials,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data):
        required = {"p", "ratio_grid"}
        optional = {"kind", "trials", "seed"}
        _check_keys(data, required, optional, kind="graph")
        return cls(
            p=int(data["p"]),
            ratio_grid=tuple(data["ratio_grid"]),
            trials=int(data.get("trials", 10)),
            seed=int(data.get("seed", 0)),
        )


@dataclass(frozen=True)
class SweepRow:
    """One (size, kappa) cell of a condition sweep."""

    n: int
    p: int
    kappa: float
    trial_count: int
    mean_rel_error: float
    std_rel_error: float
    mean_iters: float
    failures: int


@dataclass(frozen=True)
class RecoveryRow:
    """One n value of a noiseless recovery sweep."""

    n: int
    trial_count: int
    success_rate: float
    mean_rel_error: float
    failures: int


@dataclass(frozen=True)
class GraphRow:
    """One edge/vertex ratio of a graph condition-number sweep."""

    ratio: float
    m: int
    trial_count: int
    mean_kappa: float
    max_kappa: float


def _trial_rng(seed, cell, trial):
    return np.random.default_rng(np.random.SeedSequence([seed, cell, trial]))


def condition_trial(n, p, kappa, rng, noise_sigma, sparsity_fraction, c_mult, opts):
    """One draw of the conditioned-dictionary study; returns (rel_error, result)."""
    d = conditioned_random_dictionary(p, kappa, seed=rng)
    s = math.ceil(sparsity_fraction * p)
    x = np.zeros(p)
    x[:s] = rng.standard_normal(s)
    theta_star = np.linalg.solve(d, x)
    phi = rng.standard_normal((n, p))
    epsilon = noise_sigma * rng.standard_normal(n)
    c = phi @ theta_star + epsilon
    problem = DictionaryProblem(
        phi=phi, c=c, d=d, lam=0.0,
        ground_truth=GroundTruth(theta_star, epsilon, noise_sigma),
    )
    sf = simplify(problem)
    lam = oracle_lambda(sf, epsilon, c_mult)
    result = solve_simplified(sf, lam, opts)
    rel_error = float(
        np.linalg.norm(result.theta_hat - theta_star) / np.linalg.norm(theta_star)
    )
    return rel_error, result


def run_condition_sweep(config):
    """Relative error vs condition number, per problem size; one row per cell.

    RNG streams are keyed by (seed, size index, trial), not by kappa:
    within a size series, trial t reuses the same draws at every kappa, so
    adjacent grid points differ only through the conditioning itself.
    """
    rows = []
    for size_index, (n, p) in enumerate(config.sizes):
        for kappa in config.kappa_grid:
            errors, iters, failures = [], [], 0
            for trial in range(config.trials):
                rng = _trial_rng(config.seed, size_index, trial)
                rel_error, result = condition_trial(
                    n, p, kappa, rng, config.noise_sigma,
                    config.sparsity_fraction, config.c_mult, config.solver,
                )
                if result.converged:
                    errors.append(rel_error)
                    iters.append(result.iterations)
                else:
                    failures += 1
            rows.append(
                SweepRow(
                    n=n,
                    p=p,
                    kappa=kappa,
                    trial_count=config.trials,
                    mean_rel_error=float(np.mean(errors)) if errors else float("nan"),
                    std_rel_error=float(np.std(errors)) if errors else float("nan"),
                    mean_iters=float(np.mean(iters)) if iters else float("nan"),
                    failures=failures,
                )
            )
    return rows


def run_recovery_sweep(p, d_spec, s, n_grid, trials=DESK_TRIALS, seed=0, opts=None):
    """Noiseless exact-recovery rate vs number of observations.

    The dictionary must be square and invertible (identity or conditioned
    kinds) so a signal with an s-sparse transform can be planted as
    theta_star = D^-1 x. The penalty is a small floor proportional to
    ||phi' c||_inf (see RECOVERY_LAM_FLOOR), emulating the vanishing-penalty
    limit; success means relative error below 1e-4.
    """
    if s < 1 or s > p:
        raise ValueError(f"s must lie in [1, {p}], got {s}")
    opts = opts or SolveOptions(**SWEEP_SOLVER_DEFAULTS)
    d = d_spec.build() if isinstance(d_spec, DictionarySpec) else np.asarray(d_spec, float)
    if d.shape != (p, p):
        raise ValueError(
            f"recovery sweeps need a square p x p dictionary, got shape {d.shape}"
        )
    rows = []
    for cell_index, n in enumerate(int(v) for v in n_grid):
        successes, errors, failures = 0, [], 0
        for trial in range(trials):
            rng = _trial_rng(seed, cell_index, trial)
            x = np.zeros(p)
            support = rng.choice(p, size=s, replace=False)
            x[support] = rng.standard_normal(s)
            theta_star = np.linalg.solve(d, x)
            phi = rng.standard_normal((n, p))
            c = phi @ theta_star
            problem = DictionaryProblem(
                phi=phi, c=c, d=d, lam=0.0,
                ground_truth=GroundTruth(theta_star, np.zeros(n), 0.0),
            )
            try:
                sf = simplify(problem)
                lam = RECOVERY_LAM_FLOOR * float(np.abs(phi.T @ c).max())
                result = solve_simplified(sf, lam, opts)
            except DictLassoError:
                failures += 1
                continue
            if not result.converged:
                failures += 1
                continue
            rel_error = float(
                np.linalg.norm(result.theta_hat - theta_star)
                / np.linalg.norm(theta_star)
            )
            errors.append(rel_error)
            if rel_error < RECOVERY_SUCCESS_TOL:
                successes += 1
        rows.append(
            RecoveryRow(
                n=n,
                trial_count=trials,
                success_rate=successes / trials,
                mean_rel_error=float(np.mean(errors)) if errors else float("nan"),
                failures=failures,
            )
        )
    return rows


def run_graph_kappa_sweep(p, ratio_grid, trials=10, seed=0):
    """Condition number of random edge-incidence dictionaries vs m/p ratio."""
    rows = []
    for cell_index, ratio in enumerate(float(r) for r in ratio_grid):
        m = round(ratio * p)
        if m < 1:
            raise ValueError(f"ratio {ratio} gives no edges at p = {p}")
        kappas = []
        for trial in range(trials):
            rng = _trial_rng(seed, cell_index, trial)
            d = random_graph_dictionary(p, m, seed=rng)
            kappas.append(condition_number(d))
        rows.append(
            GraphRow(
                ratio=ratio,
                m=m,
                trial_count=trials,
                mean_kappa=float(np.mean(kappas)),
                max_kappa=float(np.max(kappas)),
            )
        )
    return rows


def run_experiment(config):
    """Dispatch a validated config object to its sweep runner."""
    if isinstance(config, SweepConfig):
        return run_condition_sweep(config)
    if isinstance(config, RecoveryConfig):
        return run_recovery_sweep(
            config.p, config.dictionary, config.s, config.n_grid,
            trials=config.trials, seed=config.seed, opts=config.solver,
        )
    if isinstance(config, GraphConfig):
        return run_graph_kappa_sweep(
            config.p, config.ratio_grid, trials=config.trials, seed=config.seed
        )
    raise TypeError(f"cannot run config of type {type(config).__name__}")


def paper_scale_config(config):
    """Swap a condition-sweep config's scale presets for the full-study ones."""
    if not isinstance(config, SweepConfig):
        raise SchemaError(
            "the paper-scale preset only applies to condition sweeps"
        )
    return dataclasses.replace(
        config,
        sizes=PAPER_SIZES,
        trials=PAPER_TRIALS,
        kappa_grid=default_kappa_grid(),
    )


def write_table(path, rows):
    """Dataclass rows -> CSV with a header; floats use repr for byte stability."""
    if not rows:
        raise ValueError("refusing to write an empty table")
    names = [f.name for f in dataclasses.fields(rows[0])]
    lines = [",".join(names)]
    for row in rows:
        values = []
        for name in names:
            v = getattr(row, name)
            values.append(format_float(v) if isinstance(v, float) else str(v))
        lines.append(",".join(values))
    Path(path).write_text("\n".join(lines) + "\n")


def read_table(path):
    """CSV written by write_table -> typed rows, keyed by the header line."""
    lines = [line for line in Path(path).read_text().splitlines() if line.strip()]
    if not lines:
        raise SchemaError(f"{path}: empty table file")
    header = lines[0].split(",")
    for cls in (SweepRow, RecoveryRow, GraphRow):
        fields = dataclasses.fields(cls)
        if header == [f.name for f in fields]:
            break
    else:
        raise SchemaError(f"{path}: unrecognized table header {lines[0]!r}")
    rows = []
    for line in lines[1:]:
        values = line.split(",")
        if len(values) != len(fields):
            raise SchemaError(f"{path}: row width {len(values)} != {len(fields)}")
        kwargs = {
            f.name: int(v) if f.type == "int" else float(v)
            for f, v in zip(fields, values)
        }
        rows.append(cls(**kwargs))
    if not rows:
        raise SchemaError(f"{path}: table has a header but no rows")
    return rows


def _deterministic_figure():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "dictlasso"
    return plt


def plot_rows(rows, path):
    """Line plot for any of the three row types; written as deterministic SVG."""
    plt = _deterministic_figure()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    first = rows[0]
    if isinstance(first, SweepRow):
        for n, p in sorted({(r.n, r.p) for r in rows}):
            series = [r for r in rows if (r.n, r.p) == (n, p)]
            ax.plot(
                [r.kappa for r in series],
                [r.mean_rel_error for r in series],
                marker="o",
                label=f"n={n}, p={p}",
            )
        ax.set_xscale("log")
        ax.set_xlabel("condition number of D")
        ax.set_ylabel("mean relative error")
        ax.legend()
    elif isinstance(first, RecoveryRow):
        ax.plot([r.n for r in rows], [r.success_rate for r in rows], marker="o")
        ax.set_xlabel("observations n")
        ax.set_ylabel("exact recovery rate")
        ax.set_ylim(-0.05, 1.05)
    elif isinstance(first, GraphRow):
        ax.plot([r.ratio for r in rows], [r.mean_kappa for r in rows], marker="o")
        ax.set_xlabel("edges per vertex m/p")
        ax.set_ylabel("mean condition number")
    else:
        raise TypeError(f"cannot plot rows of type {type(first).__name__}")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def emit_outputs(rows, out_dir, config, plot=True):
    """Write table.csv, meta.json, and (optionally) plot.svg into out_dir."""
    if not rows:
        raise ValueError("refusing to emit an empty result set")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_table(out_dir / "table.csv", rows)
    meta = {
        "config": config,
        "config_sha256": config_hash(config),
        "version": __version__,
        "rows": len(rows),
    }
    dump_json(out_dir / "meta.json", meta)
    if plot:
        plot_rows(rows, out_dir / "plot.svg")
    return out_dir
