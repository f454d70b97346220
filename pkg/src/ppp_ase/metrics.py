"""Capacity, area spectral efficiency, mean local delay and utility.

The integrals

    psi_n(p) = int_0^inf (e^t - 1)^(n delta) exp(-A' p (e^t - 1)^delta) dt

are evaluated by adaptive quadrature (authoritative) and, as a cross-check,
by the residue series of :mod:`ppp_ase.series`. Capacity is in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate, special

from .core import NetworkParams, affected_area, max_range_d0
from .errors import DomainError, QuadratureError
from .series import SeriesEstimate, g_series

TAIL_POLICIES = ("decay-threshold", "infinite")


@dataclass(frozen=True)
class QuadratureConfig:
    """Settings for the semi-infinite psi_n integrals.

    ``tail_cutoff_policy="decay-threshold"`` integrates up to the T where the
    exponent A' p (e^T - 1)^delta reaches ``tail_threshold`` and adds the
    analytic tail estimate; ``"infinite"`` hands the whole half-line to QUADPACK.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 10_000
    tail_cutoff_policy: str = "decay-threshold"
    tail_threshold: float = 50.0

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("quadrature tolerances must be > 0")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.tail_cutoff_policy not in TAIL_POLICIES:
            raise ValueError(f"tail_cutoff_policy must be one of {TAIL_POLICIES}")
        if self.tail_threshold <= 0:
            raise ValueError("tail_threshold must be > 0")


DEFAULT_QUAD = QuadratureConfig()


@dataclass(frozen=True)
class MetricReport:
    capacity: float
    affected_area: float
    ase: float
    delay: float
    utility: float
    d0: float

    @property
    def delay_is_infinite(self) -> bool:
        return math.isinf(self.delay)


def _psi_exponent_scale(params: NetworkParams) -> float:
    a = params.a_prime * params.p
    if not a > 0:
        raise DomainError("psi_n needs p > 0 (the integral diverges at p = 0)")
    return a


def psi_n_quadrature(n: int, params: NetworkParams, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """psi_n(p) by adaptive quadrature."""
    if n < 0 or int(n) != n:
        raise ValueError(f"n must be a non-negative integer, got {n!r}")
    a = _psi_exponent_scale(params)
    delta = params.delta

    def integrand(t):
        if t > 700.0:  # exp(-a e^(delta t)) underflows long before this
            return 0.0
        x = math.expm1(t)
        if x == 0.0:
            return 1.0 if n == 0 else 0.0
        u = x**delta
        if a * u > 745.0:
            return 0.0
        return u**n * math.exp(-a * u)

    # the integrand turns over where a (e^t - 1)^delta ~ 1
    knee = math.log1p(a ** (-1.0 / delta))
    tail = 0.0
    if cfg.tail_cutoff_policy == "decay-threshold":
        cutoff = math.log1p((cfg.tail_threshold / a) ** (1.0 / delta))
        # with u = a (e^t-1)^delta, dt <= du/(delta u): tail <= a^-n Gamma(n, Y)/delta
        y = cfg.tail_threshold
        if n == 0:
            tail = special.exp1(y) / delta
        else:
            tail = a ** (-n) * special.gammaincc(n, y) * special.gamma(n) / delta
        pieces = [(0.0, min(knee, cutoff)), (min(knee, cutoff), cutoff)]
    else:
        pieces = [(0.0, knee), (knee, math.inf)]

    total, err, failed = 0.0, 0.0, False
    per_piece = max(1, cfg.max_subdivisions // len(pieces))
    for lo, hi in pieces:
        if hi <= lo:
            continue
        result = integrate.quad(
            integrand, lo, hi,
            epsabs=cfg.abs_tol, epsrel=cfg.rel_tol,
            limit=per_piece, full_output=1,
        )
        total += float(result[0])
        err += float(result[1])
        failed |= len(result) > 3  # QUADPACK appends a message when ier != 0
    value = total + tail
    if failed and err > max(cfg.rel_tol * abs(value), cfg.abs_tol):
        raise QuadratureError(
            f"psi_{n} quadrature did not converge (error estimate {err:.2e})",
            estimate=value, abserr=err,
        )
    return value


def psi_n_series(n: int, params: NetworkParams, terms: int = 60) -> SeriesEstimate:
    """psi_n(p) = q^(n delta + 1)/delta * G(n + 1/delta, 1/delta, q), q = (A' p)^(-1/delta)."""
    if n < 0 or int(n) != n:
        raise ValueError(f"n must be a non-negative integer, got {n!r}")
    a = _psi_exponent_scale(params)
    delta = params.delta
    nu = params.alpha / 2.0  # 1/delta without the round trip through delta
    log_q = -math.log(a) / delta
    g = g_series(n + nu, nu, math.exp(log_q), terms=terms)
    scale = math.exp((n * delta + 1.0) * log_q) / delta
    return SeriesEstimate(scale * g.value, scale * g.error_bound, g.n_terms)


def capacity(params: NetworkParams, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """p E[ln(1 + SIR)] = p psi_0(p), in nats."""
    if params.p == 0.0:
        return 0.0
    return params.p * psi_n_quadrature(0, params, cfg)


def _ase_prefactor(params: NetworkParams) -> float:
    return (params.lam * params.c_delta * params.p**2 * params.tau**params.delta
            / abs(math.log(params.p_s)))


def ase(params: NetworkParams, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Capacity per affected area, lambda C p^2 tau^delta psi_0 / |ln p_s|."""
    if params.p <= 0.0 or params.tau <= 0.0:
        raise DomainError("ASE needs p > 0 and tau > 0 (affected area is unbounded)")
    return _ase_prefactor(params) * psi_n_quadrature(0, params, cfg)


def _delay_exponent(params: NetworkParams) -> float:
    return (params.a_prime * params.p * params.tau**params.delta
            / (1.0 - params.p) ** (1.0 - params.delta))


def mean_local_delay(params: NetworkParams) -> float:
    """(1/p) exp(A' p tau^delta / (1-p)^(1-delta)); ``inf`` at p = 0 and p = 1."""
    if params.p == 0.0 or params.p == 1.0:
        return math.inf
    try:
        return math.exp(_delay_exponent(params)) / params.p
    except OverflowError:
        return math.inf


def utility(params: NetworkParams, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """ASE / mean local delay in the closed form with the delay folded in."""
    if params.p == 0.0 or params.p == 1.0:
        return 0.0
    if params.tau == 0.0:
        return 0.0
    return (_ase_prefactor(params) * params.p * math.exp(-_delay_exponent(params))
            * psi_n_quadrature(0, params, cfg))


def evaluate(params: NetworkParams, cfg: QuadratureConfig = DEFAULT_QUAD) -> MetricReport:
    """All metrics at one parameter point, with boundary cases tagged instead of raised."""
    cap = capacity(params, cfg)
    if params.p > 0.0 and params.tau > 0.0:
        area = affected_area(params)
        d0 = max_range_d0(params)
        ase_value = cap / area
    else:
        area = d0 = math.inf
        ase_value = 0.0
    delay = mean_local_delay(params)
    util = ase_value / delay if math.isfinite(delay) else 0.0
    return MetricReport(cap, area, ase_value, delay, util, d0)
