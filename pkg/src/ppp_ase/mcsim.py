"""Monte Carlo oracle for the SIR CCDF, capacity and mean local delay.

Interferers are drawn from a homogeneous PPP on a disk of radius R around the
destination, each with a unit-mean exponential fading power and an ALOHA mark.
Every realization owns an independent Philox stream: the key is the master
seed and the high counter word is the realization index, so any chunking of
the realizations (serial or across processes) reproduces the same draws, and
reductions use ``math.fsum`` so the summation order does not matter either.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import NetworkParams, log_success_from_gains
from .errors import ConfigurationError, DomainError

MIN_REALIZATIONS = 1000
UNDERFLOW = 1e-300
MAX_SLOTS = 10**7


@dataclass(frozen=True)
class RadiusPolicy:
    """Simulation window rule.

    By default R = max(d_sd_factor * d_sd, density_factor / sqrt(lambda)).
    ``fixed`` overrides the rule.  A radius is rejected when it does not
    exceed the link distance or when the bound on the ignored outside-window
    interference, lambda p 2 pi tau d_sd^alpha R^(2-alpha) / (alpha - 2)
    (relative error of the success probability), exceeds
    ``max_truncation_bias``.
    """

    d_sd_factor: float = 40.0
    density_factor: float = 20.0
    fixed: float | None = None
    max_truncation_bias: float = 0.05

    def radius(self, params: NetworkParams) -> float:
        if self.fixed is not None:
            radius = float(self.fixed)
        else:
            radius = max(self.d_sd_factor * params.d_sd,
                         self.density_factor / math.sqrt(params.lam))
        self.check(params, radius)
        return radius

    def check(self, params: NetworkParams, radius: float) -> None:
        if not radius > params.d_sd:
            raise ConfigurationError(
                f"simulation radius {radius!r} must exceed the link distance {params.d_sd!r}"
            )
        bias = truncation_bias_bound(params, radius)
        if bias > self.max_truncation_bias:
            raise ConfigurationError(
                f"simulation radius {radius:.4g} too small: truncation bias bound "
                f"{bias:.3g} exceeds {self.max_truncation_bias:.3g}"
            )


def truncation_bias_bound(params: NetworkParams, radius: float) -> float:
    alpha = params.alpha
    return (params.lam * params.p * 2.0 * math.pi * params.tau * params.d_sd**alpha
            * radius ** (2.0 - alpha) / (alpha - 2.0))


DEFAULT_RADIUS = RadiusPolicy()


@dataclass(frozen=True)
class PppRealization:
    points: np.ndarray
    fading: np.ndarray
    aloha_marks: np.ndarray
    seed: int
    index: int = 0
    source_fading: float = 1.0

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    n_realizations: int
    seed: int
    method: str = ""
    flagged: int = 0
    lower_bound: bool = False
    max_share: float = 0.0
    extra: dict = field(default_factory=dict, compare=False)

    def z_score(self, target: float) -> float:
        if math.isinf(self.value):
            # an infinite (flagged) estimate cannot match a finite target
            return math.copysign(math.inf, self.value) if math.isfinite(target) else math.nan
        if self.std_error == 0.0:
            return 0.0 if self.value == target else math.copysign(math.inf, self.value - target)
        return (self.value - target) / self.std_error


def realization_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for realization ``index`` under master ``seed``."""
    if seed < 0 or index < 0:
        raise ValueError("seed and index must be non-negative")
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, index]))


def _draw(rng: np.random.Generator, lam: float, radius: float, p: float):
    """Source fading, squared distances, fading and marks of one field.

    The angles are drawn last (see ``sample_ppp``) so estimators that only
    need distances can stop here without shifting any other draw.
    """
    source_fading = rng.standard_exponential()
    count = rng.poisson(lam * math.pi * radius**2)
    u = rng.random(count)
    while not np.all(u):  # a point exactly at the destination
        u[u == 0.0] = rng.random(count - np.count_nonzero(u))
    fading = rng.standard_exponential(count)
    marks = rng.random(count) < p
    return radius * radius * u, fading, marks, source_fading


def sample_ppp(lam: float, radius: float, seed: int, p: float = 1.0, index: int = 0) -> PppRealization:
    """One interferer field on the disk of given radius, deterministic in (seed, index).

    The count is Poisson(lam pi R^2) and points are uniform on the disk
    (radius sqrt(U) R, uniform angle).
    """
    if not lam > 0 or not radius > 0:
        raise ValueError("sample_ppp needs lam > 0 and radius > 0")
    rng = realization_rng(seed, index)
    r2, fading, marks, source_fading = _draw(rng, lam, radius, p)
    r = np.sqrt(r2)
    theta = 2.0 * math.pi * rng.random(len(r2))
    points = np.column_stack((r * np.cos(theta), r * np.sin(theta)))
    return PppRealization(points, fading, marks, seed, index, source_fading)


def aggregate_interference(realization: PppRealization, alpha: float) -> float:
    """Sum of fading * |x|^-alpha * mark (transmit power normalized out)."""
    points = np.asarray(realization.points, dtype=float).reshape(-1, 2)
    r2 = np.einsum("ij,ij->i", points, points)
    if np.any(r2 == 0.0):
        raise DomainError("interferer located at the destination (distance 0)")
    gains = np.asarray(realization.fading, dtype=float) * r2 ** (-alpha / 2.0)
    return float(np.sum(gains * np.asarray(realization.aloha_marks, dtype=bool)))


def _slot_delay(rng, path_gain, params: NetworkParams) -> int:
    """Slots until the first success for a frozen field, fresh fading/marks per slot."""
    signal_scale = params.d_sd ** (-params.alpha)
    for slot in range(1, MAX_SLOTS + 1):
        transmit = rng.random() < params.p
        fading = rng.standard_exponential(len(path_gain))
        marks = rng.random(len(path_gain)) < params.p
        h_s = rng.standard_exponential()
        if not transmit:
            continue
        interference = float(np.sum(fading * path_gain * marks))
        if h_s * signal_scale >= params.tau * interference:
            return slot
    return -1


def _chunk(args):
    params, radius, seed, start, stop, slots = args
    n = stop - start
    out = {
        "rb_ccdf": np.empty(n),
        "indicator": np.empty(n),
        "capacity": np.empty(n),
        "log_cond": np.empty(n),
    }
    if slots:
        out["slots"] = np.empty(n)
    signal_scale = params.d_sd ** (-params.alpha)
    log_p = math.log(params.p) if params.p > 0 else -math.inf
    for j, index in enumerate(range(start, stop)):
        rng = realization_rng(seed, index)
        r2, fading, marks, h_s = _draw(rng, params.lam, radius, params.p)
        gains = r2 ** (-params.alpha / 2.0)
        log_cond = log_success_from_gains(gains, params)
        out["log_cond"][j] = log_cond
        out["rb_ccdf"][j] = math.exp(log_cond - log_p) if params.p > 0 else 1.0
        interference = float(np.dot(fading * gains, marks))
        signal = h_s * signal_scale
        out["indicator"][j] = 1.0 if signal >= params.tau * interference else 0.0
        if interference > 0.0:
            out["capacity"][j] = params.p * math.log1p(signal / interference)
        else:
            out["capacity"][j] = 0.0 if params.p == 0.0 else math.inf
        if slots:
            out["slots"][j] = _slot_delay(rng, gains, params)
    return out


def simulate(params: NetworkParams, n: int, radius_policy: RadiusPolicy | None = None,
             seed: int = 0, slots: bool = False, workers: int = 1, chunk_size: int = 5000) -> dict:
    """Per-realization samples of every estimator, in realization order."""
    if n < MIN_REALIZATIONS:
        raise ValueError(f"need at least {MIN_REALIZATIONS} realizations, got {n}")
    policy = radius_policy or DEFAULT_RADIUS
    radius = policy.radius(params)
    bounds = [(i, min(i + chunk_size, n)) for i in range(0, n, chunk_size)]
    jobs = [(params, radius, seed, a, b, slots) for a, b in bounds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk, jobs))
    else:
        parts = [_chunk(job) for job in jobs]
    samples = {key: np.concatenate([part[key] for part in parts]) for key in parts[0]}
    samples["radius"] = radius
    return samples


def _summarize(values: np.ndarray, seed: int, method: str, **kwargs) -> McEstimate:
    n = len(values)
    if not np.all(np.isfinite(values)):
        return McEstimate(math.inf, math.inf, n, seed, method,
                          flagged=int(np.sum(~np.isfinite(values))), **kwargs)
    mean = math.fsum(values) / n
    var = math.fsum((values - mean) ** 2) / (n - 1)
    total = math.fsum(np.abs(values))
    share = float(np.max(np.abs(values)) / total) if total > 0 else 0.0
    return McEstimate(mean, math.sqrt(var / n), n, seed, method, max_share=share, **kwargs)


def _ccdf_estimate(samples, seed, method):
    key = {"rao-blackwell": "rb_ccdf", "indicator": "indicator"}.get(method)
    if key is None:
        raise ValueError(f"unknown SIR CCDF method {method!r}")
    return _summarize(samples[key], seed, method)


def _capacity_estimate(samples, seed):
    return _summarize(samples["capacity"], seed, "fresh-fading")


def _delay_estimate(samples, seed, method):
    if method == "rao-blackwell":
        log_cond = samples["log_cond"]
        floor = math.log(UNDERFLOW)
        flagged = int(np.sum(log_cond < floor))
        values = np.exp(-np.maximum(log_cond, floor))
        return _summarize(values, seed, method, flagged=flagged, lower_bound=flagged > 0)
    if method == "slots":
        values = samples["slots"].copy()
        flagged = int(np.sum(values < 0))
        values[values < 0] = MAX_SLOTS
        return _summarize(values, seed, method, flagged=flagged, lower_bound=flagged > 0)
    raise ValueError(f"unknown delay method {method!r}")


def estimate_sir_ccdf(params: NetworkParams, n: int, radius_policy: RadiusPolicy | None = None,
                      seed: int = 0, method: str = "rao-blackwell", workers: int = 1) -> McEstimate:
    """P(SIR >= tau | source transmits).

    ``"indicator"`` draws the source fading and counts successes;
    ``"rao-blackwell"`` averages the exact conditional success probability
    given the field, which removes the fading and ALOHA noise.
    """
    if params.p == 0.0 and method == "rao-blackwell":
        # no active interferers at all
        return McEstimate(1.0, 0.0, n, seed, method)
    samples = simulate(params, n, radius_policy, seed, workers=workers)
    return _ccdf_estimate(samples, seed, method)


def estimate_capacity(params: NetworkParams, n: int, radius_policy: RadiusPolicy | None = None,
                      seed: int = 0, workers: int = 1) -> McEstimate:
    """p E[ln(1 + SIR)] in nats with fresh fading and marks per realization.

    A realization with no active interferer in the window has infinite SIR;
    such runs return ``inf`` with the count in ``flagged``.
    """
    if params.p == 0.0:
        return McEstimate(0.0, 0.0, n, seed, "fresh-fading")
    samples = simulate(params, n, radius_policy, seed, workers=workers)
    return _capacity_estimate(samples, seed)


def estimate_mean_delay(params: NetworkParams, n: int, radius_policy: RadiusPolicy | None = None,
                        seed: int = 0, method: str = "rao-blackwell", workers: int = 1) -> McEstimate:
    """E over fields of 1/P(success | field), the mean local delay in slots.

    ``"rao-blackwell"`` uses the geometric mean 1/P(C_Phi) exactly;
    ``"slots"`` simulates slot by slot until the first success. When a
    conditional success probability underflows, ``lower_bound`` is set and
    the value only bounds the delay from below.
    """
    if not 0.0 < params.p < 1.0:
        raise DomainError("mean delay estimation needs 0 < p < 1")
    samples = simulate(params, n, radius_policy, seed, slots=(method == "slots"), workers=workers)
    return _delay_estimate(samples, seed, method)


def estimate_all(params: NetworkParams, n: int, radius_policy: RadiusPolicy | None = None,
                 seed: int = 0, workers: int = 1) -> dict:
    """SIR CCDF, capacity and delay estimates from one shared set of realizations."""
    if not 0.0 < params.p < 1.0:
        raise DomainError("joint estimation needs 0 < p < 1")
    samples = simulate(params, n, radius_policy, seed, workers=workers)
    return {
        "sir_ccdf": _ccdf_estimate(samples, seed, "rao-blackwell"),
        "capacity": _capacity_estimate(samples, seed),
        "delay": _delay_estimate(samples, seed, "rao-blackwell"),
    }


def dump_realizations(path, params: NetworkParams, n: int, radius_policy: RadiusPolicy | None = None,
                      seed: int = 0) -> int:
    """Write ``realization_id,x,y,fading,mark`` lines for the first n realizations.

    Returns the number of lines written.
    """
    policy = radius_policy or DEFAULT_RADIUS
    radius = policy.radius(params)
    lines = 0
    with open(path, "w", newline="") as fh:
        for index in range(n):
            real = sample_ppp(params.lam, radius, seed, params.p, index)
            for (x, y), h, mark in zip(real.points.tolist(), real.fading.tolist(),
                                       real.aloha_marks.tolist()):
                fh.write(f"{index},{x!r},{y!r},{h!r},{int(mark)}\n")
                lines += 1
    return lines
