"""Residue-series evaluation of

    G(mu, nu, q) = int_0^inf t^(mu-1) e^(-t) / (1 + q t^nu) dt.

Writing the integral as a Mellin-Barnes contour integral

    G = 1/(2 pi i) int q^(-s/nu) (pi/nu) / sin(pi s/nu) Gamma(mu - s) ds,

and closing the contour to the right picks up two families of poles:

* s = mu + m (m >= 0) from Gamma(mu - s); term
  (-1)^m / m! * q^(-(mu+m)/nu) * (pi/nu) / sin(pi (mu+m)/nu),
  i.e. the termwise-expanded exponential combined with the identity
  int x^(a-1)/(1+q x^nu) dx = q^(-a/nu) C(a/nu) / a;
* s = k nu (k >= 1) from the sine; term (-1)^(k+1) q^(-k) Gamma(mu - k nu).

When a member of each family lands on the same s the pole is double and the
pair is replaced by one logarithmic term. For nu > 1 both families converge
for every q > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import special

from .errors import SeriesDivergenceError, SingularTermError

#: Pole pairs closer than this (in s) are treated as one double pole.
MERGE_TOL = 1e-12
#: Pole pairs closer than this but not merged are numerically unusable.
SINGULAR_TOL = 1e-9
#: Consecutive growing terms that signal divergence.
GROWTH_RUN = 10
#: Largest tolerated ratio of the biggest term to the sum.
MAX_CANCELLATION = 1e7


@dataclass(frozen=True)
class SeriesEstimate:
    value: float
    error_bound: float
    n_terms: int

    def __float__(self) -> float:
        return self.value


def _coincident_k(s: float, nu: float):
    """Return (k, gap) for the sine pole k*nu nearest to s (k >= 1)."""
    k = round(s / nu)
    if k < 1:
        return None, math.inf
    return k, abs(s - k * nu)


def _family_a_term(m: int, mu: float, nu: float, log_q: float):
    """Term m of the Gamma-pole family; returns (value, merged_k or None)."""
    s = mu + m
    k, gap = _coincident_k(s, nu)
    if gap <= MERGE_TOL * max(1.0, s):
        # double pole: residue of -1/eps^2 + (digamma(m+1) + ln q/nu)/eps
        sign = -1.0 if (m + k) % 2 == 0 else 1.0
        mag = math.exp(-k * log_q - math.lgamma(m + 1))
        return sign * mag * (special.digamma(m + 1) + log_q / nu), k
    if gap < SINGULAR_TOL:
        raise SingularTermError(
            f"C({s / nu!r}) is within {gap:.1e} of the sinc zero at {k}; "
            "series term is ill-conditioned"
        )
    sign = 1.0 if m % 2 == 0 else -1.0
    mag = math.exp(-s / nu * log_q - math.lgamma(m + 1))
    return sign * mag * (math.pi / nu) / math.sin(math.pi * s / nu), None


def g_series(mu: float, nu: float, q: float, terms: int = 60) -> SeriesEstimate:
    """Evaluate G(mu, nu, q) from its residue series.

    ``terms`` Gamma-family terms are summed together with every sine-family
    pole up to the same abscissa. The returned error bound is the magnitude
    of the first omitted term of each family.

    Raises:
        SingularTermError: two poles are within ``SINGULAR_TOL`` of each other
            without coinciding.
        SeriesDivergenceError: term magnitudes grow for ``GROWTH_RUN``
            consecutive terms, or cancellation wipes out the significance.
    """
    if mu <= 0 or nu <= 0 or q <= 0:
        raise ValueError("g_series needs mu > 0, nu > 0, q > 0")
    if terms < 1:
        raise ValueError("terms must be >= 1")
    log_q = math.log(q)
    values = []
    merged = set()

    run, last = 0, math.inf
    for m in range(terms):
        value, k = _family_a_term(m, mu, nu, log_q)
        if k is not None:
            merged.add(k)
        values.append(value)
        run = run + 1 if abs(value) > last else 0
        last = abs(value)
        if run >= GROWTH_RUN:
            raise SeriesDivergenceError(
                f"Gamma-pole terms grew for {GROWTH_RUN} consecutive terms (q={q!r})"
            )

    s_max = mu + terms - 1
    k_max = int(math.floor(s_max / nu + 1e-12))
    run, last = 0, math.inf
    for k in range(1, k_max + 1):
        if k in merged:
            continue
        value = _sine_term(k, mu, nu, log_q)
        values.append(value)
        run = run + 1 if abs(value) > last else 0
        last = abs(value)
        if run >= GROWTH_RUN:
            raise SeriesDivergenceError(
                f"sine-pole terms grew for {GROWTH_RUN} consecutive terms (q={q!r})"
            )

    total = math.fsum(values)
    biggest = max(abs(v) for v in values)
    if total == 0.0 or biggest / abs(total) > MAX_CANCELLATION:
        raise SeriesDivergenceError(
            f"cancellation: largest term {biggest:.3e} vs sum {total:.3e}"
        )

    return SeriesEstimate(total, _omitted_bound(terms, k_max + 1, mu, nu, log_q), len(values))


def _omitted_bound(m: int, k: int, mu: float, nu: float, log_q: float) -> float:
    """Magnitude of the first omitted term of each family."""
    envelope_a = math.exp(-(mu + m) / nu * log_q - math.lgamma(m + 1))
    try:
        term_a, merged_k = _family_a_term(m, mu, nu, log_q)
        bound = abs(term_a)
    except SingularTermError:
        merged_k, bound = None, envelope_a
    arg = mu - k * nu
    if merged_k == k or abs(arg - round(arg)) < SINGULAR_TOL and arg <= 0.5:
        # the sine pole coincides with an omitted Gamma pole, already counted
        return bound
    return bound + abs(_sine_term(k, mu, nu, log_q))


def _sine_term(k: int, mu: float, nu: float, log_q: float) -> float:
    arg = mu - k * nu
    sign = 1.0 if k % 2 == 1 else -1.0
    gsign = special.gammasgn(arg)
    if gsign == 0 or not math.isfinite(special.gammaln(arg)):
        raise SingularTermError(f"Gamma({arg!r}) is at a pole")
    return sign * gsign * math.exp(special.gammaln(arg) - k * log_q)
