"""Numerical experiments that check what the limit theorems assert, at desk scale.

The Legendre oracle certifies the closed-form rate functions; the scaled-CGF
tables check the hypotheses behind the large-deviation limits; the KS-based
checks exercise the exact scaling identity and the asymptotic normality; the
moderate-deviation decay experiment is a diagnostic whose finite-scale output
is only a shadow of the limit statement, so it reports censored cells rather
than pretending zero counts carry information.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from telabs import analytics
from telabs.params import RateParams, ScalingParams
from telabs.simulation import simulate_batch
from telabs.visits import VisitCountLaw

__all__ = [
    "KsReport",
    "kolmogorov_sf",
    "ks_two_sample",
    "ks_one_sample_normal",
    "numeric_legendre",
    "CgfLimitReport",
    "scaled_cgf_limit_check",
    "equal_distribution_check",
    "normality_check",
    "DecayCell",
    "DecayReport",
    "md_decay_experiment",
    "noncentral_md_samples",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# Kolmogorov-Smirnov machinery
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class KsReport:
    """KS statistic and asymptotic p-value; n2 = 0 marks a one-sample test."""

    statistic: float
    n1: int
    n2: int
    p_value: float


def kolmogorov_sf(t: float) -> float:
    """Survival function of the Kolmogorov distribution, 100-term series."""
    if t <= 0.0:
        return 1.0
    total = 0.0
    for j in range(1, 101):
        term = math.exp(-2.0 * (j * t) ** 2)
        total += term if j % 2 else -term
        if term < 1e-300:
            break
    return min(max(2.0 * total, 0.0), 1.0)


def ks_two_sample(x: np.ndarray, y: np.ndarray) -> KsReport:
    """Two-sample KS test: sup distance of the empirical CDFs."""
    x = np.sort(np.asarray(x, dtype=float))
    y = np.sort(np.asarray(y, dtype=float))
    n1, n2 = x.size, y.size
    if n1 < 1 or n2 < 1:
        raise ValueError("both samples must be non-empty")
    pooled = np.concatenate([x, y])
    cdf1 = np.searchsorted(x, pooled, side="right") / n1
    cdf2 = np.searchsorted(y, pooled, side="right") / n2
    stat = float(np.abs(cdf1 - cdf2).max())
    en = math.sqrt(n1 * n2 / (n1 + n2))
    return KsReport(stat, n1, n2, kolmogorov_sf(en * stat))


def _normal_cdf(z: np.ndarray) -> np.ndarray:
    flat = np.asarray(z, dtype=float).ravel()
    return np.array([0.5 * math.erfc(-v / math.sqrt(2.0)) for v in flat]).reshape(
        np.shape(z)
    )


def ks_one_sample_normal(z: np.ndarray) -> KsReport:
    """One-sample KS test of z against the standard Normal CDF."""
    z = np.sort(np.asarray(z, dtype=float))
    n = z.size
    if n < 2:
        raise ValueError("need at least two observations")
    cdf = _normal_cdf(z)
    grid = np.arange(n + 1) / n
    stat = float(max(np.abs(cdf - grid[:-1]).max(), np.abs(grid[1:] - cdf).max()))
    return KsReport(stat, n, 0, kolmogorov_sf(math.sqrt(n) * stat))


# ---------------------------------------------------------------------------
# Numeric Legendre transform (independent oracle for h_a / h_b)
# ---------------------------------------------------------------------------


def _golden_max(f, a: float, b: float, xtol: float) -> float:
    """Golden-section maximization of f on [a, b]."""
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while d - c > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return max(fc, fd)


def numeric_legendre(
    cgf,
    s_cap: float,
    z: float,
    grid_points: int = 2048,
    xtol: float = 1e-12,
    lo_limit: float = 1e9,
) -> float:
    """sup over s <= s_cap of (s*z - cgf(s)) by grid search plus golden-section polish.

    The lower end of the grid starts near -8*|s-scale| and doubles while the
    maximizer keeps escaping to the left (the argmax runs to -inf as the slope
    z approaches the left edge of the cgf's slope range); an objective that is
    still growing at the -``lo_limit`` cap is reported as +inf.
    """

    def objective(s: float) -> float:
        v = cgf(s)
        return -math.inf if math.isinf(v) else s * z - v

    hi = s_cap - 1e-9
    lo = -8.0 * max(1.0, abs(s_cap))
    best_prev = -math.inf
    while True:
        grid = np.linspace(lo, hi, grid_points)
        values = np.array([objective(s) for s in grid])
        k = int(values.argmax())
        best = values[k]
        if k > 0:
            break
        if abs(lo) >= lo_limit:
            if best - best_prev > 1e-6:
                return math.inf
            break
        best_prev = best
        lo *= 2.0
    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, grid_points - 1)]
    return _golden_max(objective, a, b, xtol)


# ---------------------------------------------------------------------------
# Scaled-CGF limit tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class CgfLimitReport:
    """Gap between the finite-scale scaled CGF and its limit, per scale."""

    mode: str
    s: float
    limit: float
    rows: tuple[tuple[float, float, float], ...]  # (scale, value, gap)
    slope: float  # log-log slope of gap vs scale (nan when not estimable)

    def gaps(self) -> list[float]:
        return [row[2] for row in self.rows]


def scaled_cgf_limit_check(
    s: float,
    m: VisitCountLaw,
    params: RateParams | ScalingParams,
    mode: str,
    scales: tuple[float, ...] = (10.0, 100.0, 1000.0, 10000.0),
) -> CgfLimitReport:
    """Exact evaluation of the scaled CGF of the absorption time against its limit.

    scaling1: (1/x) log G_{A_x}(s) -> Lambda(s) as the start position x grows.
    scaling2: (1/mu) log G_{A_x(beta mu, mu)}(mu s) -> x * Lambda(s; beta, 1).
    """
    rows = []
    if mode == "scaling1":
        if not isinstance(params, RateParams):
            raise ValueError("scaling1 takes RateParams")
        limit = analytics.lambda_fn(s, params)
        for scale in scales:
            px = RateParams(params.lam, params.mu, scale)
            value = analytics.log_g_ax(s, px, m) / scale
            rows.append((scale, value, abs(value - limit)))
    elif mode == "scaling2":
        if not isinstance(params, ScalingParams):
            raise ValueError("scaling2 takes ScalingParams")
        limit = params.x * analytics.lambda_fn(s, params.unit_rates())
        for scale in scales:
            p_mu = RateParams(params.beta * scale, scale, params.x)
            value = analytics.log_g_ax(scale * s, p_mu, m) / scale
            rows.append((scale, value, abs(value - limit)))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    finite = [(sc, g) for sc, _, g in rows if math.isfinite(g) and g > 0.0]
    if len(finite) >= 2:
        lx = np.log([sc for sc, _ in finite])
        ly = np.log([g for _, g in finite])
        slope = float(np.polyfit(lx, ly, 1)[0])
    else:
        slope = math.nan
    return CgfLimitReport(mode, s, limit, tuple(rows), slope)


# ---------------------------------------------------------------------------
# Sampling-based checks
# ---------------------------------------------------------------------------


def _derived_seed(seed: int, k: int) -> int:
    return int(np.random.SeedSequence([seed, k]).generate_state(1, np.uint64)[0] >> 1)


def _scaled_absorption(
    beta: float, x: float, mu: float, m: VisitCountLaw, n: int, seed: int
) -> np.ndarray:
    """Samples of mu * A_{x/mu}(beta*mu, mu)."""
    p = RateParams(beta * mu, mu, x / mu)
    return mu * simulate_batch(n, seed, p, m, target="ax").samples


def equal_distribution_check(
    beta: float,
    x: float,
    mu1: float,
    mu2: float,
    n: int,
    seed: int,
    m: VisitCountLaw,
) -> KsReport:
    """Two-sample KS test of mu * A_{x/mu}(beta mu, mu) at two values of mu.

    The scaled absorption times are equal in law for every mu, so the test
    should accept at any fixed level up to its own false-positive rate.
    """
    a1 = _scaled_absorption(beta, x, mu1, m, n, _derived_seed(seed, 1))
    a2 = _scaled_absorption(beta, x, mu2, m, n, _derived_seed(seed, 2))
    return ks_two_sample(a1, a2)


def normality_check(
    sp: ScalingParams, m: VisitCountLaw, n: int, seed: int
) -> KsReport:
    """One-sample KS of sqrt(mu)(A - Abar) / sqrt(8 beta x/(beta-1)^3) vs N(0,1)."""
    if n < 2:
        raise ValueError("need at least two samples to standardize")
    batch = simulate_batch(n, seed, sp.rates(), m, target="ax")
    scale = math.sqrt(8.0 * sp.beta * sp.x / (sp.beta - 1.0) ** 3)
    z = math.sqrt(sp.mu) * (batch.samples - batch.summary.mean) / scale
    return ks_one_sample_normal(z)


# ---------------------------------------------------------------------------
# Moderate-deviation decay experiment (diagnostic)
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class DecayCell:
    scale: float
    threshold: float
    epsilon: float
    count: int
    n: int
    scaled_log_prob: float | None  # epsilon * log(count / n); None when censored
    predicted: float  # -(MD rate at the threshold)

    @property
    def censored(self) -> bool:
        return self.scaled_log_prob is None


@dataclass(frozen=True, slots=True)
class DecayReport:
    mode: str
    gamma: float
    cells: tuple[DecayCell, ...]
    fitted_slope: float  # OLS slope of observed vs predicted at the largest scale


def md_decay_experiment(
    mode: str,
    gamma: float,
    thresholds: tuple[float, ...],
    scales: tuple[float, ...],
    n: int,
    seed: int,
    params: RateParams | ScalingParams,
    m: VisitCountLaw,
) -> DecayReport:
    """Empirical tail decay of the moderate-deviation statistic.

    scaling1: (A_x - E[A_x]) / sqrt(x / eps_x), eps_x = x^-gamma, speed 1/eps.
    scaling2: sqrt(mu*eps_mu) (A_x(beta mu, mu) - E), eps_mu = mu^-gamma.

    Zero-count cells are censored, never reported as -inf.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"need gamma in (0, 1), got {gamma}")
    cells: list[DecayCell] = []
    for j, scale in enumerate(scales):
        eps = float(scale) ** (-gamma)
        if mode == "scaling1":
            if not isinstance(params, RateParams):
                raise ValueError("scaling1 takes RateParams")
            p = RateParams(params.lam, params.mu, scale)
            center = analytics.mean_ax(p, m)
            batch = simulate_batch(n, _derived_seed(seed, j), p, m, target="ax")
            stat = (batch.samples - center) / math.sqrt(scale / eps)
            predict = lambda z: -analytics.rate_md1(z, p)  # noqa: E731
        elif mode == "scaling2":
            if not isinstance(params, ScalingParams):
                raise ValueError("scaling2 takes ScalingParams")
            sp = ScalingParams(params.beta, scale, params.x)
            p = sp.rates()
            center = analytics.mean_ax(p, m)
            batch = simulate_batch(n, _derived_seed(seed, j), p, m, target="ax")
            stat = math.sqrt(scale * eps) * (batch.samples - center)
            predict = lambda z: -analytics.rate_md2(z, sp)  # noqa: E731
        else:
            raise ValueError(f"unknown mode {mode!r}")
        for z in thresholds:
            count = int((stat >= z).sum()) if z >= 0.0 else int((stat <= z).sum())
            observed = eps * math.log(count / n) if count > 0 else None
            cells.append(DecayCell(scale, z, eps, count, n, observed, predict(z)))
    top = max(scales)
    pairs = [
        (c.predicted, c.scaled_log_prob)
        for c in cells
        if c.scale == top and not c.censored and c.predicted < 0.0
    ]
    if len(pairs) >= 2:
        px = np.array([a for a, _ in pairs])
        py = np.array([b for _, b in pairs])
        slope = float(np.polyfit(px, py, 1)[0])
    else:
        slope = math.nan
    return DecayReport(mode, gamma, tuple(cells), slope)


def noncentral_md_samples(
    beta: float, x: float, mu: float, gamma: float, n: int, seed: int
, m: VisitCountLaw) -> np.ndarray:
    """Samples of the non-central statistic (mu eps) * A_{x/(mu eps)}(beta mu, mu).

    Its law depends on (mu, gamma) only through the product mu * eps, a direct
    consequence of the exact scaling identity.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"need gamma in (0, 1), got {gamma}")
    c = mu ** (1.0 - gamma)  # mu * eps
    p = RateParams(beta * mu, mu, x / c)
    return c * simulate_batch(n, seed, p, m, target="ax").samples
