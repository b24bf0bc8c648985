"""Acceptance checks for the whole toolkit, one criterion per test.

Each test prints a single pass/fail line (capture is suspended for the
print so the line shows up in any pytest run) and then asserts.
Tolerances, instance sizes, and runtime ceilings are pinned here; the
seeds make every criterion deterministic.
"""

import dataclasses
import math
import time

import numpy as np
from scipy.stats import spearmanr

from dictlasso.dictionaries import (
    DictionarySpec,
    complete_graph_dictionary,
    conditioned_random_dictionary,
    difference_matrix_1d,
    fused_lasso_dictionary,
)
from dictlasso.experiments import (
    GraphConfig,
    RecoveryConfig,
    SweepConfig,
    run_condition_sweep,
    run_experiment,
    run_graph_kappa_sweep,
    run_recovery_sweep,
    write_table,
)
from dictlasso.linalg import condition_number
from dictlasso.simplify import DictionaryProblem, GroundTruth, assemble_theta, recover_alpha, simplify
from dictlasso.solver import (
    SolveOptions,
    objective,
    oracle_lambda,
    simplified_objective,
    soft_threshold,
    solve_full,
    solve_simplified,
)
from dictlasso.theory import (
    cone_check,
    drip_constant,
    energy_check,
    restricted_extremes,
    tail_chunk_check,
    theorem1_report,
)

SOFT_THRESHOLD_TOL = 1e-8
CROSS_PATH_TOL = 1e-4
OBJECTIVE_TOL = 1e-10
FUSED_KAPPA_EPS = 1e-9
LEMMA_SLACK = 1e-9
BOUND_SLACK = 1e-9
EXACT_TOL = 1e-12
COMPLETE_GRAPH_TOL = 1e-8
TREND_SPEARMAN_MIN = 0.8
TREND_DOMINANCE_MIN = 6
RECOVERY_SPEARMAN_MIN = 0.9

TIGHT_OPTS = SolveOptions()
EXTRA_TIGHT_OPTS = SolveOptions(abs_tol=1e-13, rel_tol=1e-11)


def _report(capsys, number, name, ok, detail, elapsed, limit=None):
    status = "PASS" if ok else "FAIL"
    timing = f"{elapsed:.1f}s" + (f" / limit {limit:.0f}s" if limit else "")
    line = f"[criterion {number:02d}] {name}: {status} ({detail}; {timing})"
    with capsys.disabled():
        print(line, flush=True)
    assert ok, line
    if limit is not None:
        assert elapsed < limit, f"criterion {number} overran: {timing}"


def test_criterion_01_soft_threshold_closed_form(capsys):
    start = time.perf_counter()
    rng = np.random.default_rng(11)
    p = 25
    worst = 0.0
    for _ in range(50):
        c = 2.0 * rng.standard_normal(p)
        lam = float(0.05 + np.abs(rng.standard_normal()))
        problem = DictionaryProblem(phi=np.eye(p), c=c, d=np.eye(p), lam=lam)
        result = solve_full(problem, EXTRA_TIGHT_OPTS)
        assert result.converged
        worst = max(worst, float(np.abs(result.theta_hat - soft_threshold(c, lam)).max()))
    elapsed = time.perf_counter() - start
    _report(
        capsys,
        1, "identity-design soft-threshold closed form",
        worst <= SOFT_THRESHOLD_TOL,
        f"50 (c, lam) pairs, max abs deviation {worst:.2e} <= {SOFT_THRESHOLD_TOL:.0e}",
        elapsed, limit=5.0,
    )


def test_criterion_02_full_vs_reduced_paths_agree(capsys):
    start = time.perf_counter()
    kappas = (1.0, 5.0, 25.0)
    worst = 0.0
    for i in range(20):
        rng = np.random.default_rng(np.random.SeedSequence([21, i]))
        n, p = 40, 20
        d = conditioned_random_dictionary(p, kappas[i % 3], seed=rng)
        theta_star = rng.standard_normal(p)
        phi = rng.standard_normal((n, p))
        epsilon = 0.05 * rng.standard_normal(n)
        c = phi @ theta_star + epsilon
        problem = DictionaryProblem(
            phi=phi, c=c, d=d, lam=0.0,
            ground_truth=GroundTruth(theta_star, epsilon, 0.05),
        )
        sf = simplify(problem)
        lam = oracle_lambda(sf, epsilon)
        full = solve_full(dataclasses.replace(problem, lam=lam), TIGHT_OPTS)
        reduced = solve_simplified(sf, lam, TIGHT_OPTS)
        assert full.converged and reduced.converged
        deviation = float(
            np.linalg.norm(full.theta_hat - reduced.theta_hat)
            / (1.0 + np.linalg.norm(reduced.theta_hat))
        )
        worst = max(worst, deviation)
    elapsed = time.perf_counter() - start
    _report(
        capsys,
        2, "direct splitting vs reduce-solve-reassemble",
        worst <= CROSS_PATH_TOL,
        f"20 instances (n=40, p=20, kappa cycle {kappas}), "
        f"max relative deviation {worst:.2e} <= {CROSS_PATH_TOL:.0e}",
        elapsed, limit=30.0,
    )


def test_criterion_03_objective_equivalence_after_elimination(capsys):
    start = time.perf_counter()
    lam = 0.3
    worst = 0.0
    for i in range(20):
        rng = np.random.default_rng(np.random.SeedSequence([31, i]))
        template = i % 4
        if template == 0:
            n, p = 12, 8
            d = rng.standard_normal((10, 6)) @ rng.standard_normal((6, p))
        elif template == 1:
            n, p = 10, 6
            d = conditioned_random_dictionary(p, 4.0, seed=rng)
        elif template == 2:
            n, p = 14, 9
            d = rng.standard_normal((5, p))
        else:
            n, p = 12, 10
            d = difference_matrix_1d(p)
        phi = rng.standard_normal((n, p))
        c = phi @ rng.standard_normal(p) + 0.1 * rng.standard_normal(n)
        problem = DictionaryProblem(phi=phi, c=c, d=d, lam=lam)
        sf = simplify(problem)
        for _ in range(10):
            beta = rng.standard_normal(sf.rank_r)
            alpha = recover_alpha(sf, beta)
            theta = assemble_theta(sf, alpha, beta)
            full_value = objective(problem, theta)
            reduced_value = simplified_objective(sf, beta, lam)
            gap = abs(full_value - reduced_value) / (1.0 + abs(reduced_value))
            worst = max(worst, gap)
    elapsed = time.perf_counter() - start
    _report(
        capsys,
        3, "objective equality after free-part elimination",
        worst <= OBJECTIVE_TOL,
        f"20 instances x 10 random sparse-part points, "
        f"max relative gap {worst:.2e} <= {OBJECTIVE_TOL:.0e}",
        elapsed, limit=10.0,
    )


def test_criterion_04_fused_dictionary_conditioning(capsys):
    start = time.perf_counter()
    kappas = {}
    for p in (10, 50, 200, 1000):
        kappas[p] = condition_number(fused_lasso_dictionary(p))
    ok = all(
        1.0 - EXACT_TOL <= kappa <= 3.0 + FUSED_KAPPA_EPS
        for kappa in kappas.values()
    )
    elapsed = time.perf_counter() - start
    summary = ", ".join(f"p={p}: {k:.4f}" for p, k in kappas.items())
    _report(
        capsys,
        4, "fused dictionary condition number in [1, 3]",
        ok, summary, elapsed, limit=10.0,
    )


def test_criterion_05_error_vector_inequalities_at_oracle_penalty(capsys):
    start = time.perf_counter()
    checked = 0
    violations = []
    seed = 0
    while checked < 30 and seed < 45:
        rng = np.random.default_rng(np.random.SeedSequence([41, seed]))
        seed += 1
        n, p, s, l = 30, 15, 2, 6
        d = conditioned_random_dictionary(p, 2.5, seed=rng)
        x = np.zeros(p)
        x[:s] = rng.standard_normal(s)
        theta_star = np.linalg.solve(d, x)
        phi = rng.standard_normal((n, p))
        epsilon = 0.05 * rng.standard_normal(n)
        c = phi @ theta_star + epsilon
        problem = DictionaryProblem(
            phi=phi, c=c, d=d, lam=0.0,
            ground_truth=GroundTruth(theta_star, epsilon, 0.05),
        )
        sf = simplify(problem)
        lam = oracle_lambda(sf, epsilon, c_mult=2.0)
        result = solve_simplified(sf, lam, TIGHT_OPTS)
        if not result.converged:
            continue
        checked += 1
        h = result.beta_hat - sf.v_beta.T @ theta_star
        t0 = list(range(s))
        flags = (
            cone_check(sf.z, h, t0, slack=LEMMA_SLACK),
            tail_chunk_check(sf.z, h, t0, l, slack=LEMMA_SLACK),
            energy_check(sf.x, sf.z, h, t0, l, lam, slack=LEMMA_SLACK),
        )
        if not all(flags):
            violations.append((seed - 1, flags))
    elapsed = time.perf_counter() - start
    _report(
        capsys,
        5, "cone, tail-chunk, and energy inequalities",
        checked == 30 and not violations,
        f"{checked} converged noisy instances at the doubled-score penalty, "
        f"violations: {violations or 'none'} (slack {LEMMA_SLACK:.0e})",
        elapsed, limit=60.0,
    )


def test_criterion_06_deterministic_error_bound_holds(capsys):
    start = time.perf_counter()
    met, failures = 0, []
    min_margin = math.inf
    for seed in range(50):
        rng = np.random.default_rng(np.random.SeedSequence([51, seed]))
        n, p, s = 20, 8, 1
        d = conditioned_random_dictionary(p, 1.4, seed=rng)
        x = np.zeros(p)
        x[:s] = rng.standard_normal(s)
        theta_star = np.linalg.solve(d, x)
        phi = rng.standard_normal((n, p))
        epsilon = 0.01 * rng.standard_normal(n)
        c = phi @ theta_star + epsilon
        problem = DictionaryProblem(
            phi=phi, c=c, d=d, lam=0.0,
            ground_truth=GroundTruth(theta_star, epsilon, 0.01),
        )
        sf = simplify(problem)
        lam = oracle_lambda(sf, epsilon)
        result = solve_simplified(sf, lam, TIGHT_OPTS)
        report = theorem1_report(sf, problem, theta_star, s, 10**6, lam, result)
        assert report.conditions_met in (True, False)
        if not report.conditions_met:
            continue
        met += 1
        if report.theta_error <= report.bound_rhs * (1.0 + BOUND_SLACK):
            min_margin = min(min_margin, report.bound_rhs / max(report.theta_error, 1e-300))
        else:
            failures.append(seed)
    elapsed = time.perf_counter() - start
    _report(
        capsys,
        6, "error bound dominates the observed error",
        met >= 5 and not failures,
        f"hypotheses met on {met}/50 tiny instances (n=20, p=8, s=1, exhaustive "
        f"extremes), bound violated on {failures or 'none'}, "
        f"min bound/error margin {min_margin:.1f}x",
        elapsed, limit=300.0,
    )


def test_criterion_07_restricted_extremes_oracle(capsys):
    start = time.perf_counter()
    details = []

    diag = np.diag([3.0, 2.0, 1.0])
    ext = restricted_extremes(diag, np.eye(3), 0, 1)
    diag_ok = abs(ext.rho_plus - 9.0) <= EXACT_TOL and abs(ext.rho_minus - 1.0) <= EXACT_TOL
    details.append(f"diag exact ({ext.rho_plus:.1f}, {ext.rho_minus:.1f})")

    rng = np.random.default_rng(61)
    q, _ = np.linalg.qr(rng.standard_normal((6, 4)))
    ortho_ok = True
    for l2 in (1, 2, 4):
        ext = restricted_extremes(q, np.eye(4), 0, l2)
        ortho_ok &= abs(ext.rho_plus - 1.0) <= EXACT_TOL
        ortho_ok &= abs(ext.rho_minus - 1.0) <= EXACT_TOL
    details.append("orthonormal exact")

    psi = rng.standard_normal((10, 6))
    plus_series, minus_series = [], []
    for l2 in range(1, 7):
        ext = restricted_extremes(psi, np.eye(6), 0, l2)
        plus_series.append(ext.rho_plus)
        minus_series.append(ext.rho_minus)
    mono_ok = all(b >= a - EXACT_TOL for a, b in zip(plus_series, plus_series[1:]))
    mono_ok &= all(b <= a + EXACT_TOL for a, b in zip(minus_series, minus_series[1:]))
    details.append("monotone in support size")

    drip = drip_constant(plus_series[2], minus_series[2])
    drip_ok = drip == max(plus_series[2] - 1.0, 1.0 - minus_series[2])
    details.append(f"isometry constant identity ({drip:.3f})")

    elapsed = time.perf_counter() - start
    _report(
        capsys,
        7, "restricted extremes closed forms and identities",
        diag_ok and ortho_ok and mono_ok and drip_ok,
        "; ".join(details), elapsed, limit=30.0,
    )


def test_criterion_08_conditioning_trend_study(capsys):
    start = time.perf_counter()
    config = SweepConfig(
        sizes=((40, 50), (100, 150)),
        kappa_grid=tuple(float(k) for k in np.logspace(0.0, 1.5, 7)),
        trials=20,
        seed=3,
    )
    rows = run_condition_sweep(config)
    series = {}
    for row in rows:
        series.setdefault((row.n, row.p), []).append(row.mean_rel_error)
    correlations = {
        size: float(spearmanr(config.kappa_grid, means).statistic)
        for size, means in series.items()
    }
    gaps = [
        small - large
        for small, large in zip(series[(40, 50)], series[(100, 150)])
    ]
    dominance = sum(1 for gap in gaps if gap >= 0.0)
    failures = sum(row.failures for row in rows)
    ok = (
        all(corr >= TREND_SPEARMAN_MIN for corr in correlations.values())
        and dominance >= TREND_DOMINANCE_MIN
        and failures == 0
    )
    elapsed = time.perf_counter() - start
    _report(
        capsys,
        8, "error grows with conditioning, shrinks with size",
        ok,
        f"Spearman {', '.join(f'{s}: {c:.3f}' for s, c in sorted(correlations.items()))} "
        f"(need >= {TREND_SPEARMAN_MIN}); larger size better at {dominance}/7 grid "
        f"points (need >= {TREND_DOMINANCE_MIN}); {failures} failed solves",
        elapsed, limit=600.0,
    )


def test_criterion_09_noiseless_recovery_study(capsys):
    start = time.perf_counter()
    n_grid = (8, 12, 16, 20, 24, 28, 34, 40)
    rows = run_recovery_sweep(
        p=40,
        d_spec=DictionarySpec(kind="identity", p=40),
        s=4,
        n_grid=n_grid,
        trials=20,
        seed=0,
    )
    rates = [row.success_rate for row in rows]
    correlation = float(spearmanr(n_grid, rates).statistic)
    ok = correlation >= RECOVERY_SPEARMAN_MIN and rates[-1] == 1.0
    elapsed = time.perf_counter() - start
    _report(
        capsys,
        9, "recovery rate rises to certainty with observations",
        ok,
        f"rates {rates} over n {n_grid}, Spearman {correlation:.3f} "
        f"(need >= {RECOVERY_SPEARMAN_MIN}), rate at n=40 is {rates[-1]}",
        elapsed, limit=120.0,
    )


def test_criterion_10_graph_dictionary_conditioning(capsys):
    start = time.perf_counter()
    complete = {p: condition_number(complete_graph_dictionary(p)) for p in (4, 6)}
    complete_ok = all(abs(k - 1.0) <= COMPLETE_GRAPH_TOL for k in complete.values())
    rows = run_graph_kappa_sweep(p=30, ratio_grid=(3.0, 10.0, 50.0), trials=10, seed=0)
    means = [row.mean_kappa for row in rows]
    decreasing_ok = all(b < a for a, b in zip(means, means[1:]))
    elapsed = time.perf_counter() - start
    _report(
        capsys,
        10, "denser graphs are better conditioned",
        complete_ok and decreasing_ok,
        f"complete-graph kappa {', '.join(f'p={p}: {k:.10f}' for p, k in complete.items())}; "
        f"mean kappa over edge ratios (3, 10, 50): "
        f"{', '.join(f'{m:.3f}' for m in means)}",
        elapsed, limit=120.0,
    )


def test_criterion_11_byte_identical_reruns(tmp_path, capsys):
    start = time.perf_counter()
    configs = [
        SweepConfig(sizes=((12, 15),), kappa_grid=(1.0, 8.0), trials=2, seed=5),
        RecoveryConfig(p=8, s=2, n_grid=(4, 8), trials=3, seed=5),
        GraphConfig(p=10, ratio_grid=(3.0, 6.0), trials=3, seed=5),
    ]
    identical = []
    for index, config in enumerate(configs):
        first, second = tmp_path / f"a{index}.csv", tmp_path / f"b{index}.csv"
        write_table(first, run_experiment(config))
        write_table(second, run_experiment(config))
        identical.append(first.read_bytes() == second.read_bytes())
    elapsed = time.perf_counter() - start
    _report(
        capsys,
        11, "identical config and seed give identical tables",
        all(identical),
        f"3 study kinds re-run and byte-compared: "
        f"{['identical' if ok else 'DIFFERENT' for ok in identical]}",
        elapsed,
    )
