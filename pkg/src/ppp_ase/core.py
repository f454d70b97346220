"""Network parameters and the SIR success-probability formulas.

All distances are in normalized model units and the SIR threshold ``tau`` is
linear. Noise is ignored (interference-limited regime) and the transmit power
cancels from every ratio, so it is not a parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError

#: Smallest accepted path-loss exponent.  C(delta) diverges as alpha -> 2.
ALPHA_MIN = 2.0 + 1e-9


def c_of_delta(delta: float) -> float:
    """Return C(delta) = 1/sinc(delta) = pi*delta/sin(pi*delta).

    This is the constant of the integral identity
    ``int_0^inf x^(mu-1)/(1+q x^nu) dx = q^(-mu/nu) C(mu/nu) / mu``.
    """
    if not 0.0 < delta < 1.0:
        raise DomainError(f"C(delta) needs 0 < delta < 1, got delta={delta!r}")
    x = math.pi * delta
    return x / math.sin(x)


@dataclass(frozen=True)
class DerivedConstants:
    delta: float
    c_delta: float
    a_prime: float


@dataclass(frozen=True)
class NetworkParams:
    """Analytical parameter set of the PPP-interfered link.

    Attributes:
        lam: interferer density (nodes per unit area), > 0.
        alpha: path-loss exponent, > 2.
        d_sd: source-destination distance, > 0.
        p: ALOHA transmit probability in [0, 1].
        tau: linear SIR threshold, >= 0.
        p_s: link success floor defining the affected area, in (0, 1).
    """

    lam: float = 0.1
    alpha: float = 4.0
    d_sd: float = 1.0
    p: float = 0.5
    tau: float = 1.0
    p_s: float = 0.01

    def __post_init__(self):
        for name in ("lam", "alpha", "d_sd", "p", "tau", "p_s"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise DomainError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if self.alpha < ALPHA_MIN:
            raise DomainError(
                f"path-loss exponent alpha must exceed 2, got alpha={self.alpha!r}"
            )
        if self.lam <= 0:
            raise DomainError(f"density lambda must be > 0, got {self.lam!r}")
        if self.d_sd <= 0:
            raise DomainError(f"distance d_sd must be > 0, got {self.d_sd!r}")
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"transmit probability p must lie in [0, 1], got {self.p!r}")
        if self.tau < 0:
            raise DomainError(f"SIR threshold tau must be >= 0, got {self.tau!r}")
        if not 0.0 < self.p_s < 1.0:
            raise DomainError(f"success floor p_s must lie in (0, 1), got {self.p_s!r}")

    @property
    def delta(self) -> float:
        return 2.0 / self.alpha

    @property
    def c_delta(self) -> float:
        return c_of_delta(self.delta)

    @property
    def a_prime(self) -> float:
        """A' = lambda * pi * d_sd^2 * C(delta)."""
        return self.lam * math.pi * self.d_sd**2 * self.c_delta

    @property
    def derived(self) -> DerivedConstants:
        return DerivedConstants(self.delta, self.c_delta, self.a_prime)

    def with_(self, **changes) -> "NetworkParams":
        """Copy with some fields replaced (re-validated)."""
        return replace(self, **changes)


def _points_of(realization) -> np.ndarray:
    points = getattr(realization, "points", realization)
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        return points.reshape(0, 2)
    return points.reshape(-1, 2)


def log_conditional_success(realization, params: NetworkParams) -> float:
    """Natural log of the conditional success probability (see below).

    Useful when the probability itself underflows for dense fields.
    """
    if params.p == 0.0:
        return -math.inf
    points = _points_of(realization)
    r2 = np.einsum("ij,ij->i", points, points)
    if np.any(r2 == 0.0):
        raise DomainError("interferer located at the destination (distance 0)")
    return log_success_from_gains(r2 ** (-params.alpha / 2.0), params)


def log_success_from_gains(gains: np.ndarray, params: NetworkParams) -> float:
    """Log success probability from the path gains |x|^-alpha of the interferers."""
    if params.p == 0.0:
        return -math.inf
    # s = tau d_sd^alpha |x|^-alpha ; per-interferer factor 1 - p s/(1+s)
    s = (params.tau * params.d_sd**params.alpha) * gains
    return math.log(params.p) + float(np.sum(np.log1p(-params.p * s / (1.0 + s))))


def conditional_success_probability(realization, params: NetworkParams) -> float:
    """Success probability of the link given the interferer field.

    ``p * prod_x [p/(1 + tau d_sd^alpha |x|^-alpha) + 1 - p]``, averaging over
    the Rayleigh fading and ALOHA marks of one slot. ``realization`` is a
    ``PppRealization`` or an ``(N, 2)`` array of interferer coordinates with
    the destination at the origin and the source excluded.
    """
    return math.exp(log_conditional_success(realization, params))


def sir_ccdf(params: NetworkParams) -> float:
    """P(SIR > tau) = exp(-A' p tau^delta), averaged over the PPP."""
    return math.exp(-params.a_prime * params.p * params.tau**params.delta)


def _range_denominator(params: NetworkParams) -> float:
    if params.p <= 0.0 or params.tau <= 0.0:
        raise DomainError("range is unbounded for p = 0 or tau = 0")
    return params.lam * params.c_delta * params.p * params.tau**params.delta


def max_range_d0(params: NetworkParams) -> float:
    """Largest link distance whose success probability stays above ``p_s``."""
    return math.sqrt(abs(math.log(params.p_s)) / (math.pi * _range_denominator(params)))


def affected_area(params: NetworkParams) -> float:
    """pi * d_0^2 = |ln p_s| / (lambda C(delta) p tau^delta); independent of d_sd."""
    return abs(math.log(params.p_s)) / _range_denominator(params)
