"""Angular lattice sums over the square lattice, the combination Delta3(2,2m;s),
and the critical-line zeros of the associated L-functions and sums."""

from __future__ import annotations

from .angsum import SumSpec, TruncationPolicy, c01, c14m, c2n1, system_sum
from .delta3 import f2m, phi2m
from .specfun import QuadratureSpec, beta_catalan, ln_gamma, macdonald_k, zeta

__all__ = [
    "SumSpec",
    "TruncationPolicy",
    "QuadratureSpec",
    "c01",
    "c14m",
    "c2n1",
    "system_sum",
    "f2m",
    "phi2m",
    "ln_gamma",
    "zeta",
    "beta_catalan",
    "macdonald_k",
]

__version__ = "0.1.0"
