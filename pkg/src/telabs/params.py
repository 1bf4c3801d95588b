"""Parameter containers shared across the package.

MGF values live on the extended real line: a moment generating function that
diverges is reported as ``math.inf`` (an explicit IEEE state, never an
overflowed large float), so domain boundaries compose cleanly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class RateParams:
    """Switching rates and start position of the telegraph particle.

    ``lam`` is the switch rate while moving up (velocity +1), ``mu`` the
    switch rate while moving down (velocity -1).  Absorption at the origin is
    almost surely finite only when ``lam > mu``, so construction enforces it.
    """

    lam: float
    mu: float
    x: float = 1.0

    def __post_init__(self) -> None:
        if not (self.lam > self.mu > 0.0):
            raise ValueError(f"need lam > mu > 0, got lam={self.lam}, mu={self.mu}")
        if not self.x > 0.0:
            raise ValueError(f"need x > 0, got x={self.x}")


@dataclass(frozen=True, slots=True)
class ScalingParams:
    """Rate-ratio parameterization ``lam = beta * mu`` used by the mu -> oo family."""

    beta: float
    mu: float = 1.0
    x: float = 1.0

    def __post_init__(self) -> None:
        if not self.beta > 1.0:
            raise ValueError(f"need beta > 1, got beta={self.beta}")
        if not self.mu > 0.0:
            raise ValueError(f"need mu > 0, got mu={self.mu}")
        if not self.x > 0.0:
            raise ValueError(f"need x > 0, got x={self.x}")

    def rates(self) -> RateParams:
        """The concrete rate pair (beta*mu, mu) at this family member."""
        return RateParams(self.beta * self.mu, self.mu, self.x)

    def unit_rates(self) -> RateParams:
        """The normalized member (beta, 1) that the asymptotics reduce to."""
        return RateParams(self.beta, 1.0, self.x)


@dataclass(frozen=True, slots=True)
class MgfDomain:
    """Domain of an MGF: ``(-inf, s_sup)`` or ``(-inf, s_sup]``.

    ``closed`` is meaningful only for finite ``s_sup``; an infinite supremum
    is always reported open.
    """

    s_sup: float
    closed: bool = False

    def __post_init__(self) -> None:
        if math.isinf(self.s_sup) and self.closed:
            object.__setattr__(self, "closed", False)

    def contains(self, s: float) -> bool:
        return s < self.s_sup or (self.closed and s == self.s_sup)
