"""Acceptance criteria, one test each.

Every test prints a single ``[PASS]``/``[FAIL]`` line; the lines are also
repeated in the pytest terminal summary. Run directly with
``python tests/test_acceptance.py`` to get just the summary lines.
"""

import math
import time

import numpy as np
import pytest

from ppp_ase import (
    NetworkParams,
    NumericalError,
    affected_area,
    ase,
    capacity,
    max_range_d0,
    mean_local_delay,
    psi_n_quadrature,
    psi_n_series,
    sir_ccdf,
    utility,
)
from ppp_ase import cli, mcsim, optimizer

from oracles import SIR_CCDF_SPOT, golden_section_max, utility_on_grid

RESULTS = []

FIG_DEFAULTS = NetworkParams(d_sd=1.0, alpha=4.0, tau=1.0, p_s=0.01)


def report(number, ok, text):
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {text}"
    RESULTS.append(line)
    print(line)
    return ok


def rel(a, b):
    return abs(a - b) / abs(b)


def test_criterion_1_fig1_anchor():
    start = time.perf_counter()
    table = cli.fig1_table(FIG_DEFAULTS, grid=200)
    elapsed = time.perf_counter() - start
    row = [r for r in table.rows if r[0] == 0.35]
    best = cli.FIG1_PS[int(np.argmax(row[0][1:]))] if row else None
    ok = best == 0.5 and elapsed < 10
    assert report(1, ok, f"utility table: best p at lambda=0.35 is {best} (want 0.5); "
                         f"200-row table in {elapsed:.2f} s (< 10 s)")


def test_criterion_2_fig3_gains():
    start = time.perf_counter()
    rows = cli.fig3_rows(FIG_DEFAULTS, grid=60)
    gains = optimizer.frontier_gains(rows)
    elapsed = time.perf_counter() - start
    delay_ok = rel(gains["delay_reduction"], 0.347) <= 0.10
    ase_ok = rel(gains["ase_gain"], 1.82) <= 0.10
    ok = delay_ok and ase_ok and elapsed < 120
    assert report(2, ok, f"frontier: delay reduction {gains['delay_reduction']:.4f} (want 0.347 +-10%), "
                         f"ASE gain {gains['ase_gain']:.4f} (want 1.82 +-10%); "
                         f"60 rows in {elapsed:.1f} s (< 120 s)")


def _random_sets(rng, count):
    for _ in range(count):
        yield NetworkParams(
            lam=float(10 ** rng.uniform(-3, 0)),
            alpha=float(rng.uniform(2.5, 6.0)),
            tau=float(10 ** rng.uniform(-1, 1)),
            p=float(rng.uniform(0.05, 0.95)),
        )


@pytest.mark.slow
def test_criterion_3_closed_form_vs_numerical_optimum():
    rng = np.random.default_rng(20240603)
    grid = np.arange(1, 10_000) * 1e-4
    start = time.perf_counter()
    worst_tau, worst_p, failures = 0.0, 0.0, []
    for params in _random_sets(rng, 100):
        tau = optimizer.optimal_tau(params)
        log_best = golden_section_max(lambda x: utility(params.with_(tau=math.exp(x))),
                                      math.log(tau) - math.log(1e4), math.log(tau) + math.log(1e4))
        worst_tau = max(worst_tau, rel(tau, math.exp(log_best)))
        try:
            p_star = optimizer.optimal_p(params).p_star
        except NumericalError as exc:
            failures.append(f"{params}: {exc}")
            continue
        u = utility_on_grid(params.lam, params.alpha, params.d_sd, params.tau, params.p_s, grid)
        worst_p = max(worst_p, abs(p_star - grid[np.argmax(u)]))
    elapsed = time.perf_counter() - start
    ok = worst_tau <= 1e-4 and worst_p <= 1e-4 + 1e-12 and not failures and elapsed < 300
    assert report(3, ok, f"100 sets: max rel(tau*, golden) {worst_tau:.2e} (<= 1e-4), "
                         f"max |p* - grid argmax| {worst_p:.2e} (<= 1e-4), "
                         f"{len(failures)} optimizer failures; {elapsed:.1f} s (< 300 s)")


def test_criterion_4_two_route_psi():
    rng = np.random.default_rng(7)
    worst_series, worst_fd, failures = 0.0, 0.0, []
    for _ in range(300):
        params = NetworkParams(lam=float(10 ** rng.uniform(-4, 0)), alpha=float(rng.uniform(3.0, 7.0)),
                               p=float(rng.uniform(0.02, 0.98)))
        n = int(rng.integers(0, 3))
        quad = psi_n_quadrature(n, params)
        try:
            series = psi_n_series(n, params).value
        except NumericalError as exc:
            failures.append(f"{params}, n={n}: {exc}")
            continue
        worst_series = max(worst_series, rel(series, quad))
        p = params.p
        h = 1e-4 * min(p, 1 - p)
        slope = (psi_n_quadrature(n, params.with_(p=p + h))
                 - psi_n_quadrature(n, params.with_(p=p - h))) / (2 * h)
        worst_fd = max(worst_fd, rel(slope, -params.a_prime * psi_n_quadrature(n + 1, params)))
    ok = worst_series <= 1e-6 and worst_fd <= 1e-4 and not failures
    assert report(4, ok, f"300 sets: max rel(series, quadrature) {worst_series:.2e} (<= 1e-6), "
                         f"max rel derivative identity {worst_fd:.2e} (<= 1e-4), "
                         f"{len(failures)} series failures")


@pytest.mark.slow
def test_criterion_5_monte_carlo_grid():
    start = time.perf_counter()
    worst, cells = 0.0, []
    for lam in (0.01, 0.1, 0.3):
        for p in (0.2, 0.5, 0.8):
            params = NetworkParams(lam=lam, alpha=4.0, tau=1.0, d_sd=1.0, p=p)
            est = mcsim.estimate_all(params, 100_000, seed=1)
            z = (est["sir_ccdf"].z_score(sir_ccdf(params)),
                 est["capacity"].z_score(capacity(params)),
                 est["delay"].z_score(mean_local_delay(params)))
            cells.append((lam, p, z))
            worst = max(worst, *(abs(v) for v in z))
    elapsed = time.perf_counter() - start
    for lam, p, z in cells:
        print(f"  lambda={lam} p={p}: z(ccdf)={z[0]:+.2f} z(capacity)={z[1]:+.2f} z(delay)={z[2]:+.2f}")
    ok = worst <= 3 and elapsed < 600
    assert report(5, ok, f"3x3 grid, n=1e5: max |z| {worst:.2f} (<= 3) over SIR CCDF, capacity, "
                         f"delay; {elapsed:.0f} s (< 600 s)")


def test_criterion_6_spot_value():
    params = NetworkParams(lam=0.1, alpha=4.0, d_sd=1.0, p=1.0, tau=1.0)
    analytic = sir_ccdf(params)
    est = mcsim.estimate_sir_ccdf(params, 100_000, seed=6)
    z = est.z_score(SIR_CCDF_SPOT)
    ok = rel(analytic, math.exp(-math.pi**2 / 20)) <= 1e-15 and abs(z) <= 3
    assert report(6, ok, f"SIR CCDF analytic {analytic:.6f} (exp(-pi^2/20) = {SIR_CCDF_SPOT:.6f}), "
                         f"MC {est.value:.6f} +- {est.std_error:.1e}, z = {z:+.2f}")


def test_criterion_7_identity_suite():
    rng = np.random.default_rng(77)
    worst_ase = worst_u = worst_d0 = 0.0
    for _ in range(1000):
        params = NetworkParams(
            lam=float(10 ** rng.uniform(-4, 0.5)), alpha=float(rng.uniform(2.2, 8.0)),
            d_sd=float(10 ** rng.uniform(-0.5, 0.5)), p=float(rng.uniform(0.01, 0.99)),
            tau=float(10 ** rng.uniform(-2, 2)), p_s=float(10 ** rng.uniform(-6, -0.5)),
        )
        a = ase(params)
        worst_ase = max(worst_ase, rel(a, capacity(params) / affected_area(params)))
        delay = mean_local_delay(params)
        u = utility(params)
        if math.isfinite(delay) and u > 0:
            worst_u = max(worst_u, rel(u, a / delay))
        else:
            worst_u = max(worst_u, abs(u - a / delay))
        worst_d0 = max(worst_d0, rel(sir_ccdf(params.with_(d_sd=max_range_d0(params))), params.p_s))
    ok = max(worst_ase, worst_u, worst_d0) <= 1e-12
    assert report(7, ok, f"1000 sets: ase/capacity {worst_ase:.1e}, utility/(ase/delay) {worst_u:.1e}, "
                         f"sir_ccdf(d0)/p_s {worst_d0:.1e} (all <= 1e-12)")


def test_criterion_8_determinism(tmp_path, capsys):
    runs = {
        "validate": ["validate", "--n", "20000", "--seed", "12", "lambda=0.1", "p=0.5"],
        "sweep": ["sweep", "--n", "2000", "--seed", "5", "sweep.variable=p", "sweep.start=0.2",
                  "sweep.stop=0.8", "sweep.count=3"],
    }
    identical = {}
    for name, argv in runs.items():
        outputs = []
        for k in range(2):
            path = tmp_path / f"{name}{k}.csv"
            cli.main(argv + ["--out", str(path)])
            outputs.append(path.read_bytes())
        identical[name] = outputs[0] == outputs[1] and len(outputs[0]) > 0
    capsys.readouterr()
    ok = all(identical.values())
    assert report(8, ok, "same-seed reruns byte-identical: "
                         + ", ".join(f"{k}={v}" for k, v in identical.items()))


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
