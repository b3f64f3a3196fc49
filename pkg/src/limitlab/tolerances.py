"""Centralized numerical tolerances.

Every module takes its tolerance knobs from one record so tests have a
single place to tighten or relax them.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # constructor-level checks (unit directors, symmetry of built values)
    construct: float = 1e-12
    # admissible drift per algebraic operation
    drift: float = 1e-13
    # inverse-operator domain check (relative discarded norm)
    subspace: float = 1e-8
    # divergence-free residual for velocity fields
    solenoidal: float = 1e-10
    # relative slack for per-step energy monotonicity (roundoff allowance)
    energy_slack: float = 1e-10


DEFAULT = Tolerances()
