"""Optimal SIR threshold and ALOHA probability for the ASE/delay utility.

For a fixed p the utility is maximized in closed form by
tau* = q (1-p)^((1-delta)/delta), q = (A' p)^(-1/delta).  For a fixed tau the
optimal p is the root of

    [3/(A' p) - tau^delta (1 - p delta)/(1-p)^(2-delta)] psi_0(p) - psi_1(p),

which is dU/dp with its strictly positive prefactor removed.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from . import metrics
from .core import NetworkParams
from .errors import DomainError, NoSignChangeError, NumericalError
from .metrics import DEFAULT_QUAD, QuadratureConfig

P_EPS = 1e-6
SCAN_POINTS = 41


@dataclass(frozen=True)
class OptimResult:
    tau_star: float
    p_star: float
    u_star: float
    iterations: int
    residual: float
    bracket: tuple[float, float]
    n_roots: int = 1
    on_boundary: bool = False


def optimal_tau(params: NetworkParams) -> float:
    """Closed-form utility-maximizing SIR threshold for the given p."""
    p = params.p
    if not 0.0 < p < 1.0:
        raise DomainError(f"optimal tau needs 0 < p < 1, got p={p!r}")
    delta = params.delta
    q = (params.a_prime * p) ** (-1.0 / delta)
    return q * (1.0 - p) ** ((1.0 - delta) / delta)


def stationarity_lhs(params: NetworkParams) -> float:
    """Left side of the p-stationarity condition (the bracketed factor)."""
    p, delta = params.p, params.delta
    return (3.0 / (params.a_prime * p)
            - params.tau**delta * (1.0 - p * delta) / (1.0 - p) ** (2.0 - delta))


def utility_slope_factor(params: NetworkParams, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """dU/dp divided by its positive prefactor; same sign as dU/dp."""
    psi0 = metrics.psi_n_quadrature(0, params, cfg)
    psi1 = metrics.psi_n_quadrature(1, params, cfg)
    return stationarity_lhs(params) * psi0 - psi1


def stationarity_residual(params: NetworkParams, psi0: float, psi1: float) -> float:
    """Relative imbalance |lhs - psi_1/psi_0| / max(|lhs|, psi_1/psi_0)."""
    lhs = stationarity_lhs(params)
    rhs = psi1 / psi0
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs))


def optimal_p(params: NetworkParams, cfg: QuadratureConfig = DEFAULT_QUAD,
              tol: float = 1e-8) -> OptimResult:
    """Utility-maximizing transmit probability for the threshold in ``params``.

    Sign changes of the slope factor are located on a logit-spaced scan of
    [eps, 1-eps] and refined with Brent's method. If several exist the one
    with the largest utility wins and ``n_roots`` records how many were seen.

    Raises:
        NoSignChangeError: the utility is monotone on the bracket; ``report``
            carries the better endpoint.
    """
    if params.tau <= 0:
        raise DomainError("optimal p needs tau > 0")
    if tol <= 0:
        raise ValueError("tol must be > 0")

    def slope(p):
        return utility_slope_factor(params.with_(p=float(p)), cfg)

    def util(p):
        return float(metrics.utility(params.with_(p=float(p)), cfg))

    grid = special.expit(np.linspace(special.logit(P_EPS), special.logit(1 - P_EPS), SCAN_POINTS))
    signs = [slope(p) for p in grid]
    brackets = [
        (grid[i], grid[i + 1]) for i in range(len(grid) - 1)
        # + to -: a local maximum of U
        if signs[i] > 0 and signs[i + 1] <= 0
    ]
    if not brackets:
        lo, hi = grid[0], grid[-1]
        best = hi if util(hi) >= util(lo) else lo
        report = OptimResult(
            tau_star=params.tau, p_star=float(best), u_star=util(best),
            iterations=0, residual=math.nan, bracket=(float(lo), float(hi)),
            n_roots=0, on_boundary=True,
        )
        raise NoSignChangeError(
            f"dU/dp keeps one sign on [{P_EPS}, {1 - P_EPS}]", report=report
        )

    candidates = []
    for lo, hi in brackets:
        root, info = optimize.brentq(slope, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                                     maxiter=200, full_output=True)
        candidates.append((util(root), float(root), info.iterations, lo, hi))
    u_star, p_star, iterations, lo, hi = max(candidates)

    at_root = params.with_(p=float(p_star))
    psi0 = metrics.psi_n_quadrature(0, at_root, cfg)
    psi1 = metrics.psi_n_quadrature(1, at_root, cfg)
    residual = float(stationarity_residual(at_root, psi0, psi1))
    bracket = _certify_bracket(slope, util, p_star, u_star, lo, hi)
    if residual > tol:
        raise NumericalError(
            f"stationarity residual {residual:.2e} exceeds tol {tol:.2e} at p={p_star!r}"
        )
    return OptimResult(
        tau_star=params.tau, p_star=float(p_star), u_star=u_star,
        iterations=iterations, residual=residual, bracket=bracket,
        n_roots=len(brackets),
    )


def _certify_bracket(slope, util, root, u_root, lo, hi):
    """Tightest interval (widths grow 10x) around the root that certifies a maximum.

    The slope must be > 0 on the left and <= 0 on the right, and U at the
    root must be at least U at both ends. Too narrow an interval leaves the
    U comparison below rounding, so the search widens until it is decidable.
    """
    width = max(abs(root) * 1e-9, 1e-12)
    while width < (hi - lo):
        a, b = max(lo, root - width), min(hi, root + width)
        if slope(a) > 0 and slope(b) <= 0 and u_root >= util(a) and u_root >= util(b):
            return (float(a), float(b))
        width *= 10.0
    return (float(lo), float(hi))


def joint_optimum(params: NetworkParams, cfg: QuadratureConfig = DEFAULT_QUAD,
                  tol: float = 1e-8, max_iter: int = 50) -> OptimResult:
    """Alternate the closed-form tau step with the p root until both settle.

    Only conditional optimality is established for each step, so the result
    is a fixed point of the alternation rather than a certified global optimum.
    """
    current = params if 0 < params.p < 1 else params.with_(p=0.5)
    iterations = 0
    result = None
    for iterations in range(1, max_iter + 1):
        tau = optimal_tau(current)
        result = optimal_p(current.with_(tau=tau), cfg, tol=max(tol, 1e-8))
        change = max(abs(tau - current.tau) / tau, abs(result.p_star - current.p))
        current = current.with_(tau=tau, p=result.p_star)
        if change < tol:
            break
    # tau must be consistent with the final p
    tau = optimal_tau(current)
    final = current.with_(tau=tau)
    return OptimResult(
        tau_star=float(tau), p_star=current.p, u_star=float(metrics.utility(final, cfg)),
        iterations=iterations, residual=result.residual, bracket=result.bracket,
        n_roots=result.n_roots,
    )


def delay_optimal_p(params: NetworkParams, tol: float = 1e-12) -> float:
    """p minimizing the mean local delay.

    With b = A' tau^delta, d ln D/dp = -1/p + b (1 - p delta)(1-p)^(delta-2),
    which runs from -inf to +inf on (0, 1); its root is found on 1-p in log
    space so very sparse networks (p* -> 1) stay resolvable.
    """
    if params.tau <= 0:
        raise DomainError("delay-optimal p needs tau > 0")
    b = params.a_prime * params.tau**params.delta
    delta = params.delta

    def dlog(log_s):
        s = math.exp(log_s)  # s = 1 - p
        p = 1.0 - s
        return -1.0 / p + b * (1.0 - p * delta) * s ** (delta - 2.0)

    lo, hi = -1.0, math.log(1.0 - 1e-3)
    while dlog(lo) < 0:
        lo *= 2.0
        if lo < -700:
            return 1.0
    while dlog(hi) > 0:
        hi = math.log1p(-(1.0 - math.exp(hi)) / 2.0)
    log_s = optimize.brentq(dlog, lo, hi, xtol=tol)
    return 1.0 - math.exp(log_s)


@dataclass(frozen=True)
class FrontierRow:
    lam: float
    p_star: float
    ase_adaptive: float
    delay_adaptive: float
    baselines: dict
    status: str = "ok"


def _frontier_row(args):
    lam, template, cfg, tol, fixed_ps = args
    params = template.with_(lam=float(lam))
    baselines = {}
    for p in fixed_ps:
        point = params.with_(p=p)
        baselines[p] = (metrics.ase(point, cfg), metrics.mean_local_delay(point))
    try:
        result = optimal_p(params, cfg, tol)
    except NoSignChangeError as exc:
        result = exc.report
        status = "boundary"
    except NumericalError as exc:
        return FrontierRow(float(lam), math.nan, math.nan, math.nan, baselines,
                           status=f"failed: {exc}")
    else:
        status = "ok"
    best = params.with_(p=result.p_star)
    return FrontierRow(float(lam), result.p_star, metrics.ase(best, cfg),
                       metrics.mean_local_delay(best), baselines, status)


def adaptive_frontier(lambda_grid, template: NetworkParams, cfg: QuadratureConfig = DEFAULT_QUAD,
                      tol: float = 1e-8, fixed_ps=(0.6, 0.4), workers: int = 1):
    """(ASE, delay) with p chosen per density, alongside fixed-p baselines.

    Failed rows are kept with ``status`` describing the failure.
    """
    grid = [float(x) for x in lambda_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("lambda grid must be strictly increasing")
    jobs = [(lam, template, cfg, tol, tuple(fixed_ps)) for lam in grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_frontier_row, jobs))
    return [_frontier_row(job) for job in jobs]


def _interp_curve(x_curve, y_curve, x):
    x_curve = np.asarray(x_curve, dtype=float)
    y_curve = np.asarray(y_curve, dtype=float)
    ok = np.isfinite(x_curve) & np.isfinite(y_curve)
    x_curve, y_curve = x_curve[ok], y_curve[ok]
    if not x_curve[0] <= x <= x_curve[-1]:
        raise ValueError(f"{x!r} lies outside the curve range [{x_curve[0]}, {x_curve[-1]}]")
    if np.any(np.diff(x_curve) <= 0):
        raise ValueError("curve is not monotone in the interpolation variable")
    return float(np.interp(x, x_curve, y_curve))


def frontier_gains(rows, ase_level: float = 0.02, delay_level: float = 1.8,
                   baseline_p: float = 0.6) -> dict:
    """Adaptive-vs-fixed gains read off the frontier by linear interpolation.

    Returns the relative delay reduction at ASE ``ase_level`` and the
    relative ASE increase at delay ``delay_level``.
    """
    ok = [r for r in rows if r.status in ("ok", "boundary")]
    a_ad = [r.ase_adaptive for r in ok]
    d_ad = [r.delay_adaptive for r in ok]
    a_fx = [r.baselines[baseline_p][0] for r in rows]
    d_fx = [r.baselines[baseline_p][1] for r in rows]
    delay_ad = _interp_curve(a_ad, d_ad, ase_level)
    delay_fx = _interp_curve(a_fx, d_fx, ase_level)
    ase_ad = _interp_curve(d_ad, a_ad, delay_level)
    ase_fx = _interp_curve(d_fx, a_fx, delay_level)
    return {
        "delay_adaptive": delay_ad,
        "delay_fixed": delay_fx,
        "delay_reduction": (delay_fx - delay_ad) / delay_fx,
        "ase_adaptive": ase_ad,
        "ase_fixed": ase_fx,
        "ase_gain": ase_ad / ase_fx - 1.0,
    }
