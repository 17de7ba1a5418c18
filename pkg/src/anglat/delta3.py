"""The phase factor F_2m, its half-angle phi_2m, the rescaled sums C~ and S~,
and the analytic combination

    Delta3(2, 2m; s) = Gamma(s)^2 pi^{-2s} F_2m(s)^{-1} C(0,1;s) C(1,4m;s)
                     = C~(s)^2 - S~(s)^2,

together with its functional equation, critical-line identities, derivative,
Laurent data at the poles and the large-sigma approximation.

All magnitudes are carried in log form where they can underflow: on the
critical line |Gamma(s)|^2 decays like exp(-pi t), so Delta3 itself leaves
double range near t ~ 230.  Functions that return Delta3 accept a real
``log_ref`` and then return exp(-2 log_ref) * Delta3, which is analytic in s
and has the same zeros and phase.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .angsum import DEFAULT_POLICY, BesselCache, TruncationPolicy, c14m_weights, kober_sums
from .errors import BranchCutWarning, DegenerateError, DomainError, PoleError
from .specfun import ln_gamma

__all__ = [
    "PhaseState",
    "Delta3Value",
    "LargeSigma",
    "f2m",
    "phi2m",
    "phi2m_prime",
    "phase_state",
    "line_log_scale",
    "factor_sums",
    "delta3",
    "delta3_tilde_parts",
    "g4m",
    "functional_residual",
    "delta3_derivative",
    "delta3_prime_line",
    "log_derivative",
    "laurent_coefficient",
    "large_sigma_approx",
    "null_trajectory_t",
    "hyperbola_center",
    "line_stationary_point",
    "tilde_floor_ratio",
    "simple_zero_ratio",
    "log_modulus_t2",
    "theta_angles",
]

LOG_PI = math.log(math.pi)

# numerical-derivative configuration (Richardson on central differences)
DERIV_H0 = 1e-3
DERIV_LEVELS = 3


@dataclass(frozen=True)
class PhaseState:
    """F_2m(s), a half-angle phi with exp(2 i phi) = F, and sqrt(F).

    ``branch_flag`` is "principal" when phi = Log(F)/(2i) and sqrtF is the
    principal root, and "continued" on the critical line where phi is the
    continuous real branch phi_2m,c(t) and sqrtF = exp(i phi).
    """

    m: int
    s: complex
    F: complex
    phi: complex
    sqrtF: complex
    branch_flag: str


@dataclass(frozen=True)
class Delta3Value:
    value: complex
    m: int
    s: complex
    near_pole: bool
    log_ref: float = 0.0


class LargeSigma(NamedTuple):
    full: complex
    prefactor: complex
    null_phase: float


def f2m(m: int, s: complex) -> complex:
    """F_2m(s) = prod_{k=1}^{2m} (k - s)/(k - 1 + s).

    Zeros at s = 1..2m, poles at s = 0, -1, ..., 1-2m.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    s = complex(s)
    out = 1 + 0j
    for k in range(1, 2 * m + 1):
        den = k - 1 + s
        if den == 0:
            raise PoleError(f"F_{2 * m}(s) has a pole at s={1 - k} (factor k={k})", s)
        out *= (k - s) / den
    return out


def phi2m(m: int, t: float) -> float:
    """phi_2m,c(t): the real half-angle of F_2m(1/2 + i t).

    On the line F = prod (k-1/2-it)/(k-1/2+it), so the branch that vanishes
    as t -> +inf is sum_k atan((k-1/2)/t) ~ 2 m^2 / t.  It is odd in t and
    tends to m*pi as t -> 0+ (returned at t = 0).
    """
    t = float(t)
    if t == 0.0:
        return m * math.pi
    return float(sum(math.atan((k - 0.5) / t) for k in range(1, 2 * m + 1)))


def phi2m_prime(m: int, t: float) -> float:
    """d phi_2m,c / dt."""
    t = float(t)
    return float(-sum((k - 0.5) / (t * t + (k - 0.5) ** 2) for k in range(1, 2 * m + 1)))


def phase_state(m: int, s: complex) -> PhaseState:
    s = complex(s)
    F = f2m(m, s)
    if s.real == 0.5:
        phi = phi2m(m, s.imag)
        return PhaseState(m, s, F, complex(phi), cmath.exp(1j * phi), "continued")
    if F == 0:
        return PhaseState(m, s, F, complex(math.nan, math.inf), 0j, "principal")
    logF = cmath.log(F)
    return PhaseState(m, s, F, logF / 2j, cmath.exp(0.5 * logF), "principal")


def line_log_scale(s: complex) -> float:
    """Re(ln Gamma(s) - s ln pi): log of |Gamma(s) pi^{-s}|, the natural
    reference for ``log_ref``."""
    return (ln_gamma(s) - complex(s) * LOG_PI).real


def _near_singular(m: int, s: complex, tol: float = 1e-6) -> bool:
    # Delta3 can be singular only at integers <= 2m (Gamma(s)^2, 1/F, C(0,1))
    r = round(s.real)
    return r <= 2 * m and abs(s - r) < tol


def factor_sums(m: int, s: complex, policy: TruncationPolicy = DEFAULT_POLICY,
                cache: BesselCache | None = None) -> tuple[complex, complex]:
    """(C(0,1;s), C(1,4m;s)) from one shared Bessel table; m = 0 gives
    C(1,0;s) = C(0,1;s)."""
    if m == 0:
        c0 = kober_sums(s, [0], policy, cache)[0].value
        return c0, c0
    w = c14m_weights(m)
    ns = {0} | {p // 2 for p in w}
    res = kober_sums(s, ns, policy, cache)
    c14 = complex(sum(float(wt) * res[p // 2].value for p, wt in w.items()))
    return res[0].value, c14


def _log_prefactor(m: int, s: complex) -> complex:
    """log of Gamma(s)^2 pi^{-2s} / F_2m(s) (any branch)."""
    F = f2m(m, s)
    if F == 0:
        raise PoleError(f"Delta3 has a pole at s={s} (zero of F_{2 * m})", s)
    return 2 * (ln_gamma(s) - s * LOG_PI) - cmath.log(F)


def delta3(m: int, s: complex, policy: TruncationPolicy = DEFAULT_POLICY,
           log_ref: float = 0.0, cache: BesselCache | None = None) -> Delta3Value:
    """Delta3(2, 2m; s), scaled by exp(-2 log_ref)."""
    s = complex(s)
    if s == 1:
        raise PoleError("Delta3 has a pole at s=1", s)
    c0, c14 = factor_sums(m, s, policy, cache)
    lp = _log_prefactor(m, s) - 2 * log_ref
    value = cmath.exp(lp) * c0 * c14
    return Delta3Value(value, m, s, _near_singular(m, s), log_ref)


def delta3_tilde_parts(m: int, s: complex, policy: TruncationPolicy = DEFAULT_POLICY,
                       log_ref: float = 0.0, cache: BesselCache | None = None) -> tuple[complex, complex]:
    """(C~, S~) = Gamma(s)/(2 pi^s sqrt F) (C(0,1) +- C(1,4m)), principal sqrt.

    Both are scaled by exp(-log_ref).
    """
    s = complex(s)
    F = f2m(m, s)
    if F == 0:
        raise PoleError(f"C~ and S~ are singular at zeros of F_{2 * m}", s)
    if F.real < 0 and abs(F.imag) < 1e-6 * abs(F):
        warnings.warn(f"s={s} lies within 1e-6 of the branch cut of sqrt(F_{2 * m})", BranchCutWarning,
                      stacklevel=2)
    c0, c14 = factor_sums(m, s, policy, cache)
    pref = 0.5 * cmath.exp(ln_gamma(s) - s * LOG_PI - log_ref - 0.5 * cmath.log(F))
    return pref * (c0 + c14), pref * (c0 - c14)


def theta_angles(m: int, t: float, policy: TruncationPolicy = DEFAULT_POLICY) -> tuple[float, float]:
    """(Theta_c, Theta_s) = (arg C~, arg S~) at s = 1/2 + i t."""
    s = complex(0.5, t)
    ct, st = delta3_tilde_parts(m, s, policy, log_ref=line_log_scale(s))
    return cmath.phase(ct), cmath.phase(st)


def g4m(m: int, s: complex, policy: TruncationPolicy = DEFAULT_POLICY,
        log_ref: float = 0.0) -> complex:
    """G_4m(s) = C(1,4m;s) Gamma(s+2m)/pi^s (m = 0: C(0,1) Gamma(s)/pi^s)."""
    s = complex(s)
    _, c14 = factor_sums(m, s, policy)
    return cmath.exp(ln_gamma(s + 2 * m) - s * LOG_PI - log_ref) * c14


def functional_residual(m: int, s: complex, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """max of |G(s) - G(1-s)|/|G(s)| and |D(s) - F(1-s) D(1-s)|/|D(s)|.

    For m = 0 the Delta3 relation reduces to D(s) = D(1-s) with
    D = (Gamma(s) pi^{-s} C(0,1;s))^2.  Ratios are formed in log space so the
    check does not underflow at large |t|.
    """
    s = complex(s)
    w = 1 - s
    a0, a14 = factor_sums(m, s, policy)
    b0, b14 = factor_sums(m, w, policy)
    lg_s = ln_gamma(s + 2 * m) - s * LOG_PI
    lg_w = ln_gamma(w + 2 * m) - w * LOG_PI
    r_g = abs(1 - cmath.exp(lg_w - lg_s) * b14 / a14)
    ld_s = _log_prefactor(m, s)
    ld_w = _log_prefactor(m, w) + cmath.log(f2m(m, w))
    # D(s) - F(1-s) D(1-s) relative to D(s)
    r_d = abs(1 - cmath.exp(ld_w - ld_s) * (b0 * b14) / (a0 * a14))
    return float(max(r_g, r_d))


def _richardson(f: Callable[[float], complex], h0: float, levels: int) -> tuple[complex, float]:
    """Central-difference derivative f'(0) with Richardson extrapolation."""
    if not h0 > 1e-8:
        raise DomainError("derivative step underflow (h0 must exceed 1e-8)")
    table = []
    for j in range(levels):
        h = h0 / 2 ** j
        table.append((f(h) - f(-h)) / (2 * h))
    rows = [table]
    for i in range(1, levels):
        prev = rows[-1]
        rows.append([prev[j + 1] + (prev[j + 1] - prev[j]) / (4 ** i - 1) for j in range(len(prev) - 1)])
    best = rows[-1][0]
    err = abs(best - rows[-2][-1]) if levels > 1 else math.inf
    return best, float(err)


def delta3_derivative(m: int, s: complex, policy: TruncationPolicy = DEFAULT_POLICY,
                      log_ref: float = 0.0, h0: float = DERIV_H0, levels: int = DERIV_LEVELS,
                      full_output: bool = False):
    """d Delta3 / ds by Richardson-extrapolated central differences along sigma."""
    s = complex(s)

    def f(h):
        return delta3(m, s + h, policy, log_ref).value

    d, err = _richardson(f, h0, levels)
    return (d, err) if full_output else d


def delta3_prime_line(m: int, t: float, policy: TruncationPolicy = DEFAULT_POLICY,
                      log_ref: float = 0.0, h0: float = DERIV_H0, levels: int = DERIV_LEVELS,
                      full_output: bool = False):
    """Delta3'(2, 2m; 1/2 + i t)."""
    return delta3_derivative(m, complex(0.5, t), policy, log_ref, h0, levels, full_output)


def log_derivative(m: int, s: complex, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """Delta3'/Delta3 at s: its real part is d log|Delta3|/d sigma and minus
    its imaginary part is d log|Delta3|/dt."""
    s = complex(s)
    ref = line_log_scale(s)
    d = delta3_derivative(m, s, policy, ref)
    return d / delta3(m, s, policy, ref).value


def laurent_coefficient(m: int, s0: complex, order: int, policy: TruncationPolicy = DEFAULT_POLICY,
                        radius: float = 1e-2, nodes: int = 64) -> complex:
    """Coefficient c_{-order} of Delta3 about s0 from a discrete Cauchy integral."""
    s0 = complex(s0)
    theta = 2 * math.pi * (np.arange(nodes) + 0.5) / nodes
    z = radius * np.exp(1j * theta)
    vals = np.array([delta3(m, s0 + zi, policy).value for zi in z])
    return complex(np.mean(vals * z ** order))


def large_sigma_approx(s: complex, corrected: bool = False) -> LargeSigma:
    """Leading-shell approximation of Delta3(2,2;s) for large Re s (m = 1).

    prefactor = 16 Gamma(1-s) Gamma(s+2) Gamma(s) / (Gamma(3-s) pi^{2s}),
    written with Gamma(1-s)/Gamma(3-s) = 1/((1-s)(2-s)) so that integer s
    are harmless; full = prefactor (1 + 4^{-s} + 36 * 5^{-2s-2}).  With
    ``corrected`` the last term is 36 * 5^{-s-2}, which is what the first
    lattice shells of C(0,1) C(1,4) actually give (coefficient 23.04 = 16*36/25
    on 5^{-s}).  ``null_phase`` is the Stirling-form phase
    Im[2s log(s/pi) - 2s - log s + 25/(6s) + 2/s^2].
    """
    s = complex(s)
    if s.real < 3.5:
        raise DomainError("large-sigma approximation needs Re s >= 3.5")
    log_pref = ln_gamma(s + 2) + ln_gamma(s) - 2 * s * LOG_PI
    prefactor = 16 * cmath.exp(log_pref) / ((1 - s) * (2 - s))
    last = 36 * cmath.exp((-s - 2 if corrected else -2 * s - 2) * math.log(5.0))
    full = prefactor * (1 + cmath.exp(-s * math.log(4.0)) + last)
    return LargeSigma(full, prefactor, _null_phase(s))


def _null_phase(s: complex) -> float:
    return (2 * s * cmath.log(s / math.pi) - 2 * s - cmath.log(s) + 25 / (6 * s) + 2 / s ** 2).imag


def null_trajectory_t(sigma: float, level: float, t_max: float = 20.0) -> float:
    """Smallest t > 0 where the Stirling null phase at sigma + i t equals level.

    Real-part nulls use level = (n + 1/2) pi, imaginary-part nulls n pi.
    """
    from scipy.optimize import brentq

    def g(t):
        return _null_phase(complex(sigma, t)) - level

    ts = np.linspace(1e-6, t_max, 4001)
    vals = np.array([g(t) for t in ts])
    idx = np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))
    if idx.size == 0:
        raise DegenerateError(f"no null trajectory at level {level} below t={t_max}")
    i = int(idx[0])
    return float(brentq(g, ts[i], ts[i + 1], xtol=1e-13))


def log_modulus_t2(m: int, t: float, policy: TruncationPolicy = DEFAULT_POLICY,
                   h0: float = 1e-2, levels: int = 3) -> float:
    """d^2/dt^2 log|Delta3(1/2 + i t)| by Richardson second differences."""
    s0 = complex(0.5, t)
    ref = line_log_scale(s0)

    def g(dt):
        return math.log(abs(delta3(m, complex(0.5, t + dt), policy, ref).value))

    g0 = g(0.0)
    table = []
    for j in range(levels):
        h = h0 / 2 ** j
        table.append((g(h) - 2 * g0 + g(-h)) / (h * h))
    rows = [table]
    for i in range(1, levels):
        prev = rows[-1]
        rows.append([prev[j + 1] + (prev[j + 1] - prev[j]) / (4 ** i - 1) for j in range(len(prev) - 1)])
    return float(rows[-1][0])


def hyperbola_center(m: int, t_star: float, policy: TruncationPolicy = DEFAULT_POLICY) -> tuple[float, float]:
    """Centre of the rectangular constant-phase hyperbolae near s* = 1/2 + i t*.

    With D2 = d^2/dt^2 log|Delta3| at s*, and den = D2^2/4 + 4 m^4/t*^6:
        sigma - 1/2 = (m^2 / (2 t*^2)) D2 / den,   t - t* = (2 m^4 / t*^5) / den.
    """
    d2 = log_modulus_t2(m, t_star, policy)
    if not math.isfinite(d2):
        raise DegenerateError("second derivative of log|Delta3| is not finite")
    den = 0.25 * d2 * d2 + 4 * m ** 4 / t_star ** 6
    if den == 0:
        raise DegenerateError("degenerate hyperbola (vanishing curvature)")
    sigma = 0.5 + (m * m / (2 * t_star ** 2)) * d2 / den
    t = t_star + (2 * m ** 4 / t_star ** 5) / den
    return float(sigma), float(t)


def line_stationary_point(m: int, t_lo: float, t_hi: float, policy: TruncationPolicy = DEFAULT_POLICY,
                          samples: int = 16, xtol: float = 1e-10) -> float:
    """Ordinate t* in (t_lo, t_hi) where d/dt log|Delta3(1/2 + i t)| = 0,
    equivalently d arg Delta3 / d sigma = 0.

    Intended for an interval between consecutive zeros, where the modulus
    has an interior maximum; the first sign change of the derivative on a
    uniform sample is refined.
    """
    from scipy.optimize import brentq

    def g(t):
        return -log_derivative(m, complex(0.5, t), policy).imag

    pad = 1e-3 * (t_hi - t_lo)
    ts = np.linspace(t_lo + pad, t_hi - pad, samples)
    vals = [g(t) for t in ts]
    for a, b, fa, fb in zip(ts, ts[1:], vals, vals[1:]):
        if fa > 0 >= fb:
            return float(brentq(g, a, b, xtol=xtol))
    raise DegenerateError(f"no stationary point of log|Delta3| in ({t_lo}, {t_hi})")


def _tilde_max(m: int, t: float, ref: float, policy: TruncationPolicy) -> float:
    c, sv = delta3_tilde_parts(m, complex(0.5, t), policy, log_ref=ref)
    return max(abs(c), abs(sv))


def tilde_floor_ratio(m: int, t: float, policy: TruncationPolicy = DEFAULT_POLICY,
                      offsets: tuple[float, ...] = (0.25, 0.5)) -> float:
    """max(|C~|, |S~|) at 1/2 + i t relative to its largest value at t +- offsets.

    At a zero of one factor C~ = +-S~ is half the other factor; the ratio can
    only vanish where both factors vanish together.
    """
    ref = line_log_scale(complex(0.5, t))
    here = _tilde_max(m, t, ref, policy)
    around = max(_tilde_max(m, t + sg * d, ref, policy) for d in offsets for sg in (-1, 1))
    return here / max(here, around)


def simple_zero_ratio(m: int, t: float, gap: float, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """|Delta3'(t)| * gap / max |Delta3(t +- gap/2)| at a zero 1/2 + i t.

    ``gap`` is the distance to the nearest neighbouring zero.  A simple zero
    gives a ratio of order one; a double zero drives it to zero.
    """
    s = complex(0.5, t)
    ref = line_log_scale(s)
    d = abs(delta3_derivative(m, s, policy, ref))
    near = max(abs(delta3(m, complex(0.5, t + sg * 0.5 * gap), policy, ref).value) for sg in (-1, 1))
    return d * gap / near
