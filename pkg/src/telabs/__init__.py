"""Toolkit for the absorption time of a telegraph process on [0, oo).

A particle starts at ``x > 0``, alternates velocities +1/-1 with exponential
phase durations (rate ``lam`` while moving up, ``mu`` while moving down,
``lam > mu``), and is absorbed at the origin on its M-th visit, where M is a
light-tailed positive-integer random variable.  The package provides the
closed-form moment generating functions and rate functions of the absorption
time, exact event-driven samplers, numerical verification experiments for the
large/moderate-deviation asymptotics, and the simulation-based estimation
pipeline for the rate ratio ``beta = lam / mu``.
"""

from telabs.params import MgfDomain, RateParams, ScalingParams
from telabs.visits import Geometric, ShiftedPig, ShiftedPoisson, VisitCountLaw
from telabs import analytics, estimation, simulation, verification

__all__ = [
    "MgfDomain",
    "RateParams",
    "ScalingParams",
    "VisitCountLaw",
    "Geometric",
    "ShiftedPoisson",
    "ShiftedPig",
    "analytics",
    "simulation",
    "verification",
    "estimation",
]

__version__ = "0.1.0"
