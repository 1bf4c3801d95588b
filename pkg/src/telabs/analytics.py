"""Closed-form objects for the absorption time.

Notation (kept close to the underlying math): ``lambda_fn`` is the exponential
growth rate Lambda(s) of the first-passage MGF in the start position, ``g_c0``
and ``g_cx`` are the MGFs of the origin-excursion time and of the first
passage from x, and ``g_ax`` the MGF of the absorption time with visit count
law M.  ``h_a``/``h_b`` are the Legendre transforms that act as rate functions
for the two domain cases, with ``s_hat``/``z_tilde`` the Case-B truncation
point and its slope.

Everything here is a pure function of immutable inputs.  Values of MGFs and
rate functions are extended reals: ``math.inf`` encodes divergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from telabs.params import MgfDomain, RateParams, ScalingParams
from telabs.visits import VisitCountLaw

__all__ = [
    "s_boundary",
    "lambda_fn",
    "lambda_deriv1",
    "lambda_deriv2",
    "g_c0",
    "g_cx",
    "g_ax",
    "log_g_ax",
    "mean_c0",
    "mean_ax",
    "classify_domain",
    "s_hat",
    "z_tilde",
    "h_a",
    "h_b",
    "rate_i1",
    "rate_i2",
    "rate_md1",
    "rate_md2",
    "CaseLabel",
    "RateFunctionResult",
    "ld_rate1",
    "ld_rate2",
]

# relative tolerance for "s_M equals the Case-A threshold" decisions; the
# open/closed subcase of the domain classification is equality-sensitive
_EQ_RTOL = 1e-12


def s_boundary(p: RateParams) -> float:
    """(sqrt(lam) - sqrt(mu))^2 / 2, where the discriminant of Lambda vanishes."""
    return 0.5 * (p.lam + p.mu) - math.sqrt(p.lam * p.mu)


def _disc(s: float, p: RateParams) -> float:
    # (lam + mu - 2s)^2 - 4*lam*mu, written so it is exact at s = 0
    return (p.lam - p.mu) ** 2 + 4.0 * s * (s - p.lam - p.mu)


def lambda_fn(s: float, p: RateParams) -> float:
    """Growth rate Lambda(s) = (lam - mu - sqrt((lam+mu-2s)^2 - 4 lam mu)) / 2.

    Returns ``inf`` past the boundary, where the discriminant turns negative.
    """
    if s > s_boundary(p):
        return math.inf
    return 0.5 * (p.lam - p.mu - math.sqrt(max(_disc(s, p), 0.0)))


def lambda_deriv1(s: float, p: RateParams) -> float:
    """Lambda'(s) = (lam + mu - 2s) / sqrt(disc); diverges at the boundary."""
    d = math.sqrt(max(_disc(s, p), 0.0))
    if s >= s_boundary(p) or d == 0.0:
        raise ValueError(f"s={s} is not strictly inside the domain of Lambda")
    return (p.lam + p.mu - 2.0 * s) / d


def lambda_deriv2(s: float, p: RateParams) -> float:
    """Lambda''(s) = 8 lam mu / disc^(3/2)."""
    d = math.sqrt(max(_disc(s, p), 0.0))
    if s >= s_boundary(p) or d == 0.0:
        raise ValueError(f"s={s} is not strictly inside the domain of Lambda")
    return 8.0 * p.lam * p.mu / d**3


def g_c0(s: float, p: RateParams) -> float:
    """MGF of one origin excursion: (lam + mu - 2s - sqrt(disc)) / (2 mu)."""
    if s > s_boundary(p):
        return math.inf
    return (p.lam + p.mu - 2.0 * s - math.sqrt(max(_disc(s, p), 0.0))) / (2.0 * p.mu)


def g_cx(s: float, p: RateParams) -> float:
    """MGF of the first passage from x: g_c0(s) * exp(x * Lambda(s))."""
    if s > s_boundary(p):
        return math.inf
    return g_c0(s, p) * math.exp(p.x * lambda_fn(s, p))


def g_ax(s: float, p: RateParams, m: VisitCountLaw) -> float:
    """MGF of the absorption time: G_M(log g_c0(s)) * exp(x * Lambda(s)).

    Divergence of the composed MGF (the Case-B mechanism) propagates as
    ``inf``.
    """
    if s > s_boundary(p):
        return math.inf
    inner = m.mgf(math.log(g_c0(s, p)))
    if math.isinf(inner):
        return math.inf
    return inner * math.exp(p.x * lambda_fn(s, p))


def log_g_ax(s: float, p: RateParams, m: VisitCountLaw) -> float:
    """log of :func:`g_ax`, overflow-free for the scaled-CGF limit checks."""
    if s > s_boundary(p):
        return math.inf
    inner = m.log_mgf(math.log(g_c0(s, p)))
    if math.isinf(inner):
        return math.inf
    return inner + p.x * lambda_fn(s, p)


def mean_c0(p: RateParams) -> float:
    """E of one origin excursion, 2 / (lam - mu)."""
    return 2.0 / (p.lam - p.mu)


def mean_ax(p: RateParams, m: VisitCountLaw) -> float:
    """E of the absorption time: E[M] * E[C0] + x * Lambda'(0).

    The E[M] factor follows from differentiating the composed MGF at 0; the
    simulation oracle confirms it (see tests).
    """
    return m.mean() * mean_c0(p) + p.x * (p.lam + p.mu) / (p.lam - p.mu)


@dataclass(frozen=True, slots=True)
class CaseLabel:
    """Domain classification of the absorption-time MGF.

    Case A: the visit-count MGF survives up to log sqrt(lam/mu), so the full
    interval up to the discriminant boundary is available.  Case B: the
    composed MGF dies earlier, at ``s_hat``; the rate function then picks up a
    linear branch past ``z_tilde``.
    """

    case: str  # "A" or "B"
    domain: MgfDomain
    s_hat: float | None = None  # Case B only


def _threshold(p: RateParams) -> float:
    return 0.5 * math.log(p.lam / p.mu)


def classify_domain(p: RateParams, m: VisitCountLaw) -> CaseLabel:
    """Case A/B decision with the exact open/closed boundary bookkeeping."""
    dom_m = m.domain()
    s_m = dom_m.s_sup
    thr = _threshold(p)
    at_threshold = math.isfinite(s_m) and math.isclose(
        s_m, thr, rel_tol=_EQ_RTOL, abs_tol=0.0
    )
    if s_m > thr or at_threshold:
        closed = not at_threshold or dom_m.closed
        return CaseLabel("A", MgfDomain(s_boundary(p), closed=closed))
    sh = s_hat(p, s_m)
    return CaseLabel("B", MgfDomain(sh, closed=dom_m.closed), s_hat=sh)


def s_hat(p: RateParams, s_m: float) -> float:
    """Inverse of log g_c0 at s_m: (lam + mu - mu e^{s_m} - lam e^{-s_m}) / 2.

    Solving g_c0(s) = e^{s_m} for s is a quadratic in e^{s_m}; this closed
    form replaces a root finder and satisfies g_c0(s_hat) = e^{s_m} to
    roundoff.  Only meaningful in Case B (s_m below log sqrt(lam/mu)).
    """
    thr = _threshold(p)
    if not s_m < thr or math.isclose(s_m, thr, rel_tol=_EQ_RTOL, abs_tol=0.0):
        raise ValueError(f"s_m={s_m} is not a Case-B value (threshold {thr})")
    return 0.5 * (p.lam + p.mu - p.mu * math.exp(s_m) - p.lam * math.exp(-s_m))


def z_tilde(p: RateParams, s_m: float) -> float:
    """Slope Lambda'(s_hat) where the Case-B rate function turns linear."""
    sh = s_hat(p, s_m)
    u = p.lam + p.mu - 2.0 * sh
    return u / math.sqrt(u * u - 4.0 * p.lam * p.mu)


def h_a(z: float, p: RateParams) -> float:
    """Legendre transform of Lambda: (sqrt((z-1) lam) - sqrt((z+1) mu))^2 / 2 on z >= 1."""
    if z < 1.0:
        return math.inf
    return 0.5 * (math.sqrt((z - 1.0) * p.lam) - math.sqrt((z + 1.0) * p.mu)) ** 2


def h_b(z: float, p: RateParams, s_m: float) -> float:
    """Case-B Legendre transform: equals h_a up to z_tilde, linear beyond."""
    zt = z_tilde(p, s_m)  # also validates Case B
    if z < 1.0:
        return math.inf
    if z <= zt:
        return h_a(z, p)
    sh = s_hat(p, s_m)
    return sh * z - lambda_fn(sh, p)


def rate_i1(z: float, p: RateParams) -> float:
    """Rate function of A_x / x as x -> oo (Case A semantics)."""
    return h_a(z, p)


def rate_i2(z: float, sp: ScalingParams) -> float:
    """Rate function of A_x(beta mu, mu) as mu -> oo: x * h_a(z/x; beta, 1)."""
    return sp.x * h_a(z / sp.x, sp.unit_rates())


def rate_md1(z: float, p: RateParams) -> float:
    """Moderate-deviation rate z^2 / (2 Lambda''(0)), Lambda''(0) = 8 lam mu / (lam-mu)^3."""
    return z * z * (p.lam - p.mu) ** 3 / (16.0 * p.lam * p.mu)


def rate_md2(z: float, sp: ScalingParams) -> float:
    """Moderate-deviation rate under the mu -> oo family: z^2 / (2 x * 8 beta/(beta-1)^3)."""
    curv = 8.0 * sp.beta / (sp.beta - 1.0) ** 3
    return z * z / (2.0 * sp.x * curv)


@dataclass(frozen=True, slots=True)
class RateFunctionResult:
    """A rate-function value plus the lower endpoint of the exposed region.

    ``exposed_from`` is ``-inf`` in Case A (the lower bound holds everywhere);
    in Case B only z beyond it are exposed points of the rate function.
    """

    value: float
    exposed_from: float


def ld_rate1(z: float, p: RateParams, m: VisitCountLaw) -> RateFunctionResult:
    """Large-deviation rate of A_x / x with the Case-B exposure bookkeeping."""
    label = classify_domain(p, m)
    if label.case == "A":
        return RateFunctionResult(h_a(z, p), -math.inf)
    s_m = m.domain().s_sup
    return RateFunctionResult(h_b(z, p, s_m), z_tilde(p, s_m))


def ld_rate2(z: float, sp: ScalingParams, m: VisitCountLaw) -> RateFunctionResult:
    """Large-deviation rate of A_x(beta mu, mu), exposure scaled by x."""
    unit = sp.unit_rates()
    label = classify_domain(unit, m)
    if label.case == "A":
        return RateFunctionResult(sp.x * h_a(z / sp.x, unit), -math.inf)
    s_m = m.domain().s_sup
    return RateFunctionResult(
        sp.x * h_b(z / sp.x, unit, s_m), sp.x * z_tilde(unit, s_m)
    )
