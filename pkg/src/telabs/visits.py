"""Distributions of the visit count M (number of origin visits before absorption).

All three laws are positive-integer valued and light tailed: their MGF is
finite on an interval reaching strictly past 0, which is what the asymptotic
machinery requires.  Samplers take an explicit ``numpy.random.Generator`` so
parallel callers can own disjoint streams; the distribution objects themselves
are immutable and freely shareable.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from telabs.params import MgfDomain

__all__ = ["VisitCountLaw", "Geometric", "ShiftedPoisson", "ShiftedPig"]


class VisitCountLaw(ABC):
    """A light-tailed law on {1, 2, 3, ...} with closed-form MGF."""

    kind: str = "abstract"

    @abstractmethod
    def mgf(self, s: float) -> float:
        """E[exp(s*M)], ``inf`` outside the domain."""

    @abstractmethod
    def log_mgf(self, s: float) -> float:
        """log of :meth:`mgf`, computed without overflow; ``inf`` outside the domain."""

    @abstractmethod
    def domain(self) -> MgfDomain:
        """The MGF domain, including whether the right boundary is attained."""

    @abstractmethod
    def mean(self) -> float:
        """E[M]."""

    @abstractmethod
    def pmf(self, m: int) -> float:
        """P(M = m) for integer m >= 1."""

    @abstractmethod
    def sample(self, rng: np.random.Generator, size: int | None = None):
        """One draw (``size=None``) or an int64 array of draws."""

    @abstractmethod
    def params(self) -> dict[str, float]:
        """Parameter name/value pairs, e.g. for metadata sidecars."""


@dataclass(frozen=True, slots=True)
class Geometric(VisitCountLaw):
    """P(M = m) = (1-alpha)^(m-1) * alpha; alpha = 1 collapses to M == 1.

    The MGF domain is open: G_M(s) -> inf as s approaches -log(1-alpha).
    """

    alpha: float
    kind = "geometric"

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"need alpha in (0, 1], got {self.alpha}")

    def mgf(self, s: float) -> float:
        # denominator 1 - (1-alpha)e^s rearranged so mgf(0) == 1 exactly
        den = self.alpha - (1.0 - self.alpha) * math.expm1(s)
        if den <= 0.0:
            return math.inf
        return self.alpha * math.exp(s) / den

    def log_mgf(self, s: float) -> float:
        den = self.alpha - (1.0 - self.alpha) * math.expm1(s)
        if den <= 0.0:
            return math.inf
        return math.log(self.alpha) + s - math.log(den)

    def domain(self) -> MgfDomain:
        if self.alpha == 1.0:
            return MgfDomain(math.inf)
        return MgfDomain(-math.log1p(-self.alpha), closed=False)

    def mean(self) -> float:
        return 1.0 / self.alpha

    def pmf(self, m: int) -> float:
        if m < 1:
            return 0.0
        return (1.0 - self.alpha) ** (m - 1) * self.alpha

    def sample(self, rng: np.random.Generator, size: int | None = None):
        if self.alpha == 1.0:
            if size is None:
                return 1
            return np.ones(size, dtype=np.int64)
        u = rng.random(size)
        # inversion of P(M > k) = (1-alpha)^k
        draws = np.floor(np.log1p(-u) / math.log1p(-self.alpha)).astype(np.int64) + 1
        if size is None:
            return int(draws)
        return draws

    def params(self) -> dict[str, float]:
        return {"alpha": self.alpha}


@dataclass(frozen=True, slots=True)
class ShiftedPoisson(VisitCountLaw):
    """M = 1 + Poisson(theta); entire MGF, so the domain supremum is infinite."""

    theta: float
    kind = "shifted_poisson"

    def __post_init__(self) -> None:
        if not self.theta > 0.0:
            raise ValueError(f"need theta > 0, got {self.theta}")

    def mgf(self, s: float) -> float:
        return math.exp(self.log_mgf(s))

    def log_mgf(self, s: float) -> float:
        return s + self.theta * math.expm1(s)

    def domain(self) -> MgfDomain:
        return MgfDomain(math.inf)

    def mean(self) -> float:
        return 1.0 + self.theta

    def pmf(self, m: int) -> float:
        if m < 1:
            return 0.0
        k = m - 1
        return math.exp(k * math.log(self.theta) - self.theta - math.lgamma(k + 1.0))

    def sample(self, rng: np.random.Generator, size: int | None = None):
        draws = rng.poisson(self.theta, size) + 1
        if size is None:
            return int(draws)
        return draws.astype(np.int64)

    def params(self) -> dict[str, float]:
        return {"theta": self.theta}


@dataclass(frozen=True, slots=True)
class ShiftedPig(VisitCountLaw):
    """Shifted Poisson-inverse-Gaussian visit count.

    M - 1 is Poisson(theta * W) with W inverse Gaussian of mean 1/xi and shape
    1, the mixture whose MGF is exp(s + xi - sqrt(xi^2 - 2*theta*(e^s - 1))).
    The MGF is finite up to and including s_sup = log(1 + xi^2/(2*theta)), so
    the domain boundary is closed.
    """

    theta: float
    xi: float
    kind = "shifted_pig"

    def __post_init__(self) -> None:
        if not self.theta > 0.0:
            raise ValueError(f"need theta > 0, got {self.theta}")
        if not self.xi > 0.0:
            raise ValueError(f"need xi > 0, got {self.xi}")

    def _s_sup(self) -> float:
        return math.log1p(self.xi**2 / (2.0 * self.theta))

    def mgf(self, s: float) -> float:
        return math.exp(self.log_mgf(s))

    def log_mgf(self, s: float) -> float:
        if s > self._s_sup():
            return math.inf
        # the radicand is >= 0 on the domain; clamp roundoff at the boundary
        rad = max(self.xi**2 - 2.0 * self.theta * math.expm1(s), 0.0)
        return s + self.xi - math.sqrt(rad)

    def domain(self) -> MgfDomain:
        return MgfDomain(self._s_sup(), closed=True)

    def mean(self) -> float:
        return 1.0 + self.theta / self.xi

    def pmf(self, m: int) -> float:
        if m < 1:
            return 0.0
        return self.pmf_head(m)[m - 1]

    def pmf_head(self, count: int) -> np.ndarray:
        """P(M = 1), ..., P(M = count) by a stable two-term forward recursion.

        Writing z = sqrt(xi^2 + 2*theta), the pmf ratio involves the ratio of
        successive half-integer Bessel K values, which obeys
        R_{k+1} = 1/R_k + (2k+1)/z with R_0 = 1.
        """
        z = math.sqrt(self.xi**2 + 2.0 * self.theta)
        out = np.empty(count)
        out[0] = math.exp(self.xi - z)
        ratio = 1.0
        for k in range(count - 1):
            out[k + 1] = out[k] * self.theta * ratio / ((k + 1.0) * z)
            ratio = 1.0 / ratio + (2.0 * k + 1.0) / z
        return out

    def sample(self, rng: np.random.Generator, size: int | None = None):
        w = rng.wald(1.0 / self.xi, 1.0, size)
        draws = rng.poisson(self.theta * w) + 1
        if size is None:
            return int(draws)
        return draws.astype(np.int64)

    def params(self) -> dict[str, float]:
        return {"theta": self.theta, "xi": self.xi}
