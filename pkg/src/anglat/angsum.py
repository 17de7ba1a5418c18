"""Angular lattice sums over the square lattice.

Notation: for theta = arg(p1 + i p2) and (p1, p2) != (0, 0),

    C(n, m; s) = sum cos^n(m theta) / (p1^2 + p2^2)^s
    S(n, m; s) = sum sin^n(m theta) / (p1^2 + p2^2)^s

so that C(2n, 1; s) = sum p1^{2n} / (p1^2 + p2^2)^{s+n}.

The sums C(2n, 1; s) are evaluated from the Kober-type expansion

    C(2n,1;s) = 2 sqrt(pi) Gamma(s+n-1/2) zeta(2s-1) / Gamma(s+n)
              + 8 pi^s / Gamma(s+n) sum_{p1,p2>=1} (p2/p1)^{s-1/2} (p1 p2 pi)^n
                                                 K_{s+n-1/2}(2 pi p1 p2)

with C(0,1;s) picking up the extra axial term 2 zeta(2s).  Grouping the
double sum by k = p1 p2 gives sum_k D_k(s) (pi k)^n K_{s+n-1/2}(2 pi k) with
D_k(s) = sum_{d | k} (k/d^2)^{s-1/2}, so each K value is computed once per k.
Every other trigonometric sum is reduced, with exact rational weights, to the
generators C(4j, 1; s).
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError, DomainError, NearPoleWarning, PoleError, UnsupportedSumError
from .specfun import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    beta_catalan,
    ln_gamma,
    macdonald_k_scaled,
    saddle_log_magnitude,
    zeta,
)

__all__ = [
    "Family",
    "SumSpec",
    "TruncationPolicy",
    "BesselCache",
    "SumResult",
    "Relation",
    "kober_sums",
    "c2n1",
    "c01",
    "c14m",
    "c14m_weights",
    "chebyshev_t_coeffs",
    "reduce_powers",
    "reduce_spec",
    "system_sum",
    "recurrence_c",
    "brute_force",
    "APPENDIX_TABLE",
    "GENERATORS_V1",
]

LOG_PI = math.log(math.pi)
SQRT_PI = math.sqrt(math.pi)
_EPS = np.finfo(float).eps


class Family(str, Enum):
    COS_POW = "CosPow"
    SIN_POW = "SinPow"
    MIXED = "MixedMoment"


@dataclass(frozen=True)
class SumSpec:
    """Which angular sum: C(n,m), S(n,m), or the mixed moment p1^{2a} p2^{2b}.

    The mixed moment is sum p1^{2a} p2^{2b} / (p1^2+p2^2)^{s+a+b}, i.e. the
    angular weight cos^{2a} sin^{2b} at exponent s.
    """

    family: Family
    n: int = 0
    m: int = 1
    a: int = 0
    b: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.family is Family.MIXED:
            if self.a < 0 or self.b < 0:
                raise ValueError("mixed-moment exponents must be nonnegative")
        else:
            if self.n < 0 or self.m < 1:
                raise ValueError("need n >= 0 and m >= 1")

    def label(self) -> str:
        if self.family is Family.COS_POW:
            return f"C({self.n},{self.m})"
        if self.family is Family.SIN_POW:
            return f"S({self.n},{self.m})"
        return f"p1^{2 * self.a} p2^{2 * self.b}"

    @classmethod
    def cos(cls, n: int, m: int = 1) -> SumSpec:
        return cls(Family.COS_POW, n=n, m=m)

    @classmethod
    def sin(cls, n: int, m: int = 1) -> SumSpec:
        return cls(Family.SIN_POW, n=n, m=m)

    @classmethod
    def mixed(cls, a: int, b: int) -> SumSpec:
        return cls(Family.MIXED, a=a, b=b)


@dataclass(frozen=True)
class TruncationPolicy:
    """Truncation of the Kober double sum.

    ``p_cap`` bounds the product p1*p2 (all pairs with p1*p2 <= P are kept).
    In auto mode the cap starts at ceil(|s+n-1/2|/pi)+2 and doubles (at most
    six times) until successive results agree; otherwise ``p_cap`` is used as
    given and checked against p_cap+2.  A step is accepted when the change is
    below ``stability_tol`` times |result|, or below roundoff of the summed
    terms (so that values sitting on a zero do not force endless doubling).
    """

    p_cap: int = 8
    auto: bool = True
    stability_tol: float = 1e-11
    bessel_floor: float = 0.0
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE
    max_doublings: int = 6

    def __post_init__(self):
        if self.p_cap < 1:
            raise ValueError("p_cap must be >= 1")
        if not 0.0 < self.stability_tol <= 1e-4:
            raise ValueError("stability_tol must lie in (0, 1e-4]")
        if self.bessel_floor < 0:
            raise ValueError("bessel_floor must be nonnegative")


DEFAULT_POLICY = TruncationPolicy()


class BesselCache:
    """Memo of log-scaled K rows keyed by (order, max shift, k).

    Each entry stores K_{nu0+j}(2 pi k) for j = 0..max_shift as a scaled row
    plus its log scale.  Entries are produced by exactly the computation the
    uncached path performs, so cached and uncached results are bit-identical.
    Dictionary reads and writes are atomic under the GIL and inserts are
    idempotent, so one instance may be shared by threads; process workers
    should each build their own.
    """

    def __init__(self, max_entries: int = 200_000):
        self._store: dict = {}
        self.max_entries = max_entries
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self._store)

    def get(self, key):
        row = self._store.get(key)
        if row is None:
            self.misses += 1
        else:
            self.hits += 1
        return row

    def put(self, key, row):
        if len(self._store) >= self.max_entries:
            self._store.pop(next(iter(self._store)))
        self._store.setdefault(key, row)


@dataclass(frozen=True)
class SumResult:
    value: complex
    error: float
    p_used: int
    near_pole: bool = False


# ---------------------------------------------------------------------------
# Kober evaluation


@lru_cache(maxsize=4)
def _divisor_pairs(kmax: int):
    """Flattened (k, d) pairs with d | k for 1 <= k <= kmax, grouped by k."""
    ks, ds = [], []
    for d in range(1, kmax + 1):
        mult = np.arange(d, kmax + 1, d)
        ks.append(mult)
        ds.append(np.full(len(mult), d))
    k = np.concatenate(ks)
    d = np.concatenate(ds)
    order = np.lexsort((d, k))
    k, d = k[order], d[order]
    starts = np.flatnonzero(np.r_[True, k[1:] != k[:-1]])
    return k.astype(float), d.astype(float), starts


def _divisor_sums(s: complex, kmax: int) -> np.ndarray:
    k, d, starts = _divisor_pairs(_round_up(kmax))
    stop = starts[kmax] if kmax < len(starts) else len(k)
    terms = np.exp((s - 0.5) * (np.log(k[:stop]) - 2.0 * np.log(d[:stop])))
    return np.add.reduceat(terms, starts[:kmax])


def _round_up(k: int) -> int:
    # keep the divisor table in a few sizes so lru_cache is effective
    size = 64
    while size < k:
        size *= 2
    return size


def _nonpositive_int(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _axial(n: int, s: complex) -> complex:
    """2 sqrt(pi) Gamma(s+n-1/2) zeta(2s-1) / Gamma(s+n)."""
    if _nonpositive_int(s + n):
        return 0j
    if s.real >= 0.5 or (n >= 1 and abs(s - 0.5) < 0.25):
        if _nonpositive_int(s + n - 0.5):
            return 0j
        lg = ln_gamma(s + n - 0.5) - ln_gamma(s + n)
        return 2.0 * SQRT_PI * cmath.exp(lg) * zeta(2 * s - 1)
    # Gamma(s-1/2) zeta(2s-1) = pi^{2s-3/2} Gamma(1-s) zeta(2-2s), then
    # Gamma(s+n-1/2) = Gamma(s-1/2) (s-1/2)_n; this form is finite at the
    # removable points s = 1/2 - j.
    poch = 1 + 0j
    for i in range(n):
        poch *= s - 0.5 + i
    lg = (2 * s - 1.5) * LOG_PI + ln_gamma(1 - s) - ln_gamma(s + n)
    return 2.0 * SQRT_PI * poch * cmath.exp(lg) * zeta(2 - 2 * s)


class _KTable:
    """Grows the scaled K table over k = 1, 2, ... for one (nu0, max shift)."""

    def __init__(self, nu0: complex, max_shift: int, quad: QuadratureSpec, cache: BesselCache | None):
        self.nu0 = nu0
        self.max_shift = max_shift
        self.quad = quad
        self.cache = cache
        self.vals = np.empty((max_shift + 1, 0), dtype=complex)
        self.logs = np.empty(0)

    def extend(self, kmax: int, skip: np.ndarray | None = None):
        """Add k = have+1..kmax; entries flagged in ``skip`` are set to zero."""
        have = self.logs.size
        if kmax <= have:
            return
        ks_all = np.arange(have + 1, kmax + 1)
        keep = np.ones(len(ks_all), bool) if skip is None else ~skip
        ks = ks_all[keep]
        shifts = tuple(range(self.max_shift + 1))
        if ks.size == 0:
            v = np.empty((len(shifts), 0), dtype=complex)
            lg = np.empty(0)
        elif self.cache is None:
            v, lg = macdonald_k_scaled(self.nu0, 2 * math.pi * ks, shifts, self.quad)
        else:
            v = np.empty((len(shifts), len(ks)), dtype=complex)
            lg = np.empty(len(ks))
            missing = []
            for i, k in enumerate(ks):
                row = self.cache.get(self._key(k))
                if row is None:
                    missing.append(i)
                else:
                    v[:, i], lg[i] = row
            if missing:
                mk = ks[missing]
                mv, ml = macdonald_k_scaled(self.nu0, 2 * math.pi * mk, shifts, self.quad)
                for c, i in enumerate(missing):
                    v[:, i] = mv[:, c]
                    lg[i] = ml[c]
                    self.cache.put(self._key(ks[i]), (mv[:, c].copy(), ml[c]))
        full_v = np.zeros((len(shifts), len(ks_all)), dtype=complex)
        full_l = np.full(len(ks_all), -np.inf)
        full_v[:, keep] = v
        full_l[keep] = lg
        self.vals = np.concatenate([self.vals, full_v], axis=1)
        self.logs = np.concatenate([self.logs, full_l])

    def _key(self, k):
        return (self.nu0.real, self.nu0.imag, self.max_shift, int(k), self.quad)


def _bessel_terms(n: int, s: complex, table: _KTable, j: int, kmax: int, dsum: np.ndarray) -> np.ndarray:
    """Per-k terms 8 pi^s/Gamma(s+n) D_k (pi k)^n K_{s+n-1/2}(2 pi k)."""
    if _nonpositive_int(s + n):
        return np.zeros(kmax, dtype=complex)
    k = np.arange(1, kmax + 1, dtype=float)
    c = math.log(8.0) + s * LOG_PI - ln_gamma(s + n)
    expo = c + n * np.log(math.pi * k) + table.logs[:kmax]
    return np.exp(expo) * table.vals[j, :kmax] * dsum[:kmax]


# terms whose saddle-point size bound is this many e-folds below the sum
# accumulated in the first stage are not evaluated
_SKIP_EFOLDS = 75.0


def _negligible(s, ns, n0, ks, dsum, log_scale) -> np.ndarray:
    skip = np.ones(len(ks), bool)
    x = 2 * math.pi * ks
    logd = np.log(np.maximum(np.abs(dsum[ks - 1]), 1e-300))
    for n in ns:
        if _nonpositive_int(s + n):
            continue
        c = (math.log(8.0) + s * LOG_PI - ln_gamma(s + n)).real
        bound = c + n * np.log(math.pi * ks) + saddle_log_magnitude(s - 0.5 + n, x) + logd + 3.0
        skip &= bound < log_scale[n] - _SKIP_EFOLDS
    return skip


def _initial_cap(s: complex, n: int) -> int:
    return int(math.ceil(abs(s + n - 0.5) / math.pi)) + 2


def kober_sums(s: complex, ns, policy: TruncationPolicy = DEFAULT_POLICY,
               cache: BesselCache | None = None) -> dict[int, SumResult]:
    """C(2n,1;s) for every n in ``ns`` from one shared Bessel table.

    n = 0 denotes C(0,1;s) (with its extra 2 zeta(2s) axial term).
    """
    s = complex(s)
    ns = sorted(set(int(n) for n in ns))
    if ns[0] < 0:
        raise ValueError("n must be nonnegative")
    if s == 1:
        raise PoleError("lattice sums have a pole at s=1 (zeta(2s-1))", s)
    flip = s.imag < 0
    sc = s.conjugate() if flip else s
    out = _kober_canonical(sc, ns, policy, cache)
    if flip:
        out = {n: SumResult(r.value.conjugate(), r.error, r.p_used, r.near_pole) for n, r in out.items()}
    return out


def _kober_canonical(s: complex, ns: list[int], policy: TruncationPolicy, cache) -> dict[int, SumResult]:
    near_half = abs(s - 0.5) < 1e-5
    n0 = ns[0]
    table = _KTable(s - 0.5 + n0, ns[-1] - n0, policy.quadrature, cache)
    if policy.auto:
        caps = [_initial_cap(s, ns[-1])]
        for _ in range(policy.max_doublings + 1):
            caps.append(2 * caps[-1])
    else:
        caps = [policy.p_cap, policy.p_cap + 2]
    near = abs(s - 1) < 1e-3 or abs(s - 0.5) < 1e-3
    axial = {}
    for n in ns:
        a = _axial(n, s) if not (n == 0 and near_half) else 0j
        if n == 0 and not near_half:
            a += 2.0 * zeta(2 * s)
        axial[n] = a
    results: dict[int, SumResult] = {}
    pending = list(ns)
    prev = {}
    dsum = None
    log_scale = None
    for idx, cap in enumerate(caps):
        if dsum is None or dsum.size < cap:
            dsum = _divisor_sums(s, cap)
        skip = None
        if log_scale is not None and cap > table.logs.size:
            skip = _negligible(s, ns, n0, np.arange(table.logs.size + 1, cap + 1), dsum, log_scale)
        table.extend(cap, skip)
        stage_scale = {}
        for n in list(pending):
            terms = _bessel_terms(n, s, table, n - n0, cap, dsum)
            if policy.bessel_floor > 0 and terms.size and terms[0] != 0:
                terms = np.where(np.abs(terms) < policy.bessel_floor * abs(terms[0]), 0, terms)
            total = axial[n] + np.sum(terms)
            scale = abs(axial[n]) + float(np.sum(np.abs(terms)))
            stage_scale[n] = math.log(scale) if scale > 0 else -math.inf
            if n in prev:
                delta = abs(total - prev[n])
                ok = delta <= policy.stability_tol * abs(total) or delta <= 16 * _EPS * scale
                if ok:
                    err = delta + 16 * _EPS * scale
                    results[n] = SumResult(complex(total), float(err), cap, near)
                    pending.remove(n)
                    continue
            prev[n] = total
        if log_scale is None:
            log_scale = {n: stage_scale.get(n, -math.inf) for n in ns}
        if not pending:
            break
        if idx == len(caps) - 1 or (not policy.auto and idx == 1):
            raise ConvergenceError(
                f"Kober sum not stable at P={cap} for s={s}",
                estimate=float(max(abs(prev[n]) for n in pending)),
            )
    if near_half and 0 in results:
        # C(0,1) is regular at s=1/2 but the Kober split has cancelling poles
        # there; use the product form 4 zeta(s) beta(s).
        r = results[0]
        results[0] = SumResult(4.0 * zeta(s) * beta_catalan(s), r.error, r.p_used, True)
    return results


def c2n1(n: int, s: complex, policy: TruncationPolicy = DEFAULT_POLICY,
         cache: BesselCache | None = None, full_output: bool = False):
    """C(2n,1;s) = sum p1^{2n}/(p1^2+p2^2)^{s+n} for n >= 1."""
    if n < 1:
        raise ValueError("c2n1 needs n >= 1; use c01 for n = 0")
    r = kober_sums(s, [n], policy, cache)[n]
    return r if full_output else r.value


def c01(s: complex, policy: TruncationPolicy = DEFAULT_POLICY,
        cache: BesselCache | None = None, full_output: bool = False):
    """C(0,1;s) = sum' (p1^2+p2^2)^{-s} = 4 zeta(s) beta(s)."""
    s = complex(s)
    if abs(s - 1) < 1e-3 and s != 1:
        warnings.warn(f"C(0,1;s) evaluated {abs(s - 1):.1e} from its pole at s=1", NearPoleWarning, stacklevel=2)
    r = kober_sums(s, [0], policy, cache)[0]
    return r if full_output else r.value


# ---------------------------------------------------------------------------
# Chebyshev and recurrence algebra


def chebyshev_t_coeffs(degree: int) -> list[int]:
    """Integer coefficients of T_degree(x), index = power of x."""
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    if degree > 64:
        raise OverflowError("Chebyshev degree above 64 is not supported")
    prev, cur = [1], [0, 1]
    if degree == 0:
        return prev
    for _ in range(degree - 1):
        nxt = [0] + [2 * c for c in cur]
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return cur


@dataclass(frozen=True)
class Relation:
    """Linear relation among the sums C(2l,1;s).

    kind "reduction": C(2n,1) = sum terms[2l] C(2l,1).
    kind "identity":  sum terms[2l] C(2l,1) = 0.
    Keys are the cosine power 2l.
    """

    n: int
    kind: str
    terms: dict[int, Fraction] = field(default_factory=dict)


def recurrence_c(n: int) -> Relation:
    """Binomial recurrence from sin^{2n} = (1 - cos^2)^n and the x<->y symmetry.

    Odd n gives C(2n,1) = 1/2 sum_{l<n} nCl (-1)^l C(2l,1); even n gives the
    identity sum_{l<n} nCl (-1)^l C(2l,1) = 0.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n % 2:
        terms = {2 * l: Fraction(math.comb(n, l) * (-1) ** l, 2) for l in range(n)}
        return Relation(n, "reduction", terms)
    terms = {2 * l: Fraction(math.comb(n, l) * (-1) ** l) for l in range(n)}
    return Relation(n, "identity", terms)


def reduce_powers(poly: dict[int, Fraction]) -> dict[int, Fraction]:
    """Rewrite sum w_p C(p,1) (p = cosine power) over generators C(4j,1).

    Odd powers vanish by the p1 -> -p1 symmetry; powers 2n with n odd are
    eliminated top-down with the odd-n recurrence.
    """
    work = {p: Fraction(w) for p, w in poly.items() if w != 0 and p % 2 == 0}
    out: dict[int, Fraction] = {}
    while work:
        p = max(work)
        w = work.pop(p)
        n = p // 2
        if n % 2 == 0:
            out[p] = out.get(p, Fraction(0)) + w
            continue
        for q, c in recurrence_c(n).terms.items():
            work[q] = work.get(q, Fraction(0)) + w * c
            if work[q] == 0:
                del work[q]
    return {p: w for p, w in sorted(out.items()) if w != 0}


def _poly_mul(a: dict[int, Fraction], b: dict[int, Fraction]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, Fraction(0)) + x * y
    return out


def _poly_pow(a: dict[int, Fraction], e: int) -> dict[int, Fraction]:
    out = {0: Fraction(1)}
    for _ in range(e):
        out = _poly_mul(out, a)
    return out


def spec_polynomial(spec: SumSpec) -> dict[int, Fraction]:
    """Angular weight of ``spec`` as a polynomial in c = cos(theta).

    Odd sine powers return an empty polynomial: sin^n(m theta) with n odd is
    odd under p2 -> -p2, so the lattice sum vanishes.
    """
    if spec.family is Family.MIXED:
        one_m_c2 = {0: Fraction(1), 2: Fraction(-1)}
        return _poly_mul({2 * spec.a: Fraction(1)}, _poly_pow(one_m_c2, spec.b))
    tm = {p: Fraction(c) for p, c in enumerate(chebyshev_t_coeffs(spec.m)) if c}
    if spec.family is Family.COS_POW:
        return _poly_pow(tm, spec.n)
    if spec.n % 2:
        return {}
    one_m_t2 = {0: Fraction(1)}
    t2 = _poly_mul(tm, tm)
    for p, c in t2.items():
        one_m_t2[p] = one_m_t2.get(p, Fraction(0)) - c
    return _poly_pow(one_m_t2, spec.n // 2)


def reduce_spec(spec: SumSpec) -> dict[int, Fraction]:
    """Exact weights of ``spec`` over generators C(4j,1), keyed by power 4j."""
    return reduce_powers(spec_polynomial(spec))


def c14m_weights(m: int) -> dict[int, Fraction]:
    """Weights of C(1,4m) over the generators C(4j,1), j = 0..m."""
    return reduce_spec(SumSpec.cos(1, 4 * m))


GENERATORS_V1 = (0, 4, 8)

F = Fraction
APPENDIX_TABLE: dict[SumSpec, dict[int, Fraction]] = {
    SumSpec.cos(2, 1): {0: F(1, 2)},
    SumSpec.cos(4, 1): {4: F(1)},
    SumSpec.cos(6, 1): {0: F(-1, 4), 4: F(3, 2)},
    SumSpec.cos(8, 1): {8: F(1)},
    SumSpec.cos(10, 1): {0: F(1, 2), 4: F(-5, 2), 8: F(5, 2)},
    SumSpec.cos(1, 2): {},
    SumSpec.cos(1, 6): {},
    SumSpec.cos(1, 4): {0: F(-3), 4: F(8)},
    SumSpec.cos(2, 2): {0: F(-1), 4: F(4)},
    SumSpec.sin(2, 2): {0: F(2), 4: F(-4)},
    SumSpec.sin(2, 1): {0: F(1, 2)},
    SumSpec.cos(2, 3): {0: F(1, 2)},
    SumSpec.sin(2, 3): {0: F(1, 2)},
    SumSpec.mixed(1, 1): {0: F(1, 2), 4: F(-1)},
    SumSpec.mixed(2, 1): {0: F(1, 4), 4: F(-1, 2)},
    SumSpec.mixed(1, 2): {0: F(1, 4), 4: F(-1, 2)},
    SumSpec.cos(1, 8): {0: F(49), 4: F(-224), 8: F(128)},
    SumSpec.cos(2, 4): {0: F(25), 4: F(-112), 8: F(64)},
    SumSpec.sin(2, 4): {0: F(-24), 4: F(112), 8: F(-64)},
    SumSpec.mixed(3, 1): {0: F(-1, 4), 4: F(3, 2), 8: F(-1)},
    SumSpec.mixed(2, 2): {0: F(1, 2), 4: F(-2), 8: F(1)},
    SumSpec.mixed(4, 1): {0: F(-1, 2), 4: F(5, 2), 8: F(-3, 2)},
    SumSpec.mixed(3, 2): {0: F(1, 4), 4: F(-1), 8: F(1, 2)},
}
del F


def _combine(weights: dict[int, Fraction], values: dict[int, complex]) -> complex:
    return complex(sum(float(w) * values[p // 2] for p, w in weights.items()))


def c14m(m: int, s: complex, policy: TruncationPolicy = DEFAULT_POLICY,
         cache: BesselCache | None = None, full_output: bool = False):
    """C(1,4m;s) = sum cos(4m theta)/(p1^2+p2^2)^s from the generators."""
    if not 1 <= m <= 8:
        raise ValueError("c14m supports 1 <= m <= 8")
    w = c14m_weights(m)
    res = kober_sums(s, [p // 2 for p in w], policy, cache)
    value = _combine(w, {n: r.value for n, r in res.items()})
    if not full_output:
        return value
    err = sum(abs(float(wt)) * res[p // 2].error for p, wt in w.items())
    return SumResult(value, err, max(r.p_used for r in res.values()), any(r.near_pole for r in res.values()))


def system_sum(spec: SumSpec, s: complex, policy: TruncationPolicy = DEFAULT_POLICY,
               cache: BesselCache | None = None) -> complex:
    """Evaluate any sum whose reduction uses only C(0,1), C(4,1), C(8,1)."""
    w = reduce_spec(spec)
    extra = [p for p in w if p not in GENERATORS_V1]
    if extra:
        names = ", ".join(f"C({p},1)" for p in extra)
        raise UnsupportedSumError(f"{spec.label()} needs generators beyond C(0,1), C(4,1), C(8,1): {names}")
    if not w:
        return 0j
    res = kober_sums(s, [p // 2 for p in w], policy, cache)
    return _combine(w, {n: r.value for n, r in res.items()})


# ---------------------------------------------------------------------------
# direct summation oracle


def _angular_weight(spec: SumSpec, p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
    theta = np.arctan2(p2, p1)
    if spec.family is Family.COS_POW:
        return np.cos(spec.m * theta) ** spec.n
    if spec.family is Family.SIN_POW:
        return np.sin(spec.m * theta) ** spec.n
    return np.cos(theta) ** (2 * spec.a) * np.sin(theta) ** (2 * spec.b)


def brute_force(spec: SumSpec, s: complex, radius: int = 2000, full_output: bool = False):
    """Direct lattice sum over 0 < max(|p1|,|p2|) <= radius plus a tail integral.

    The tail is the continuum integral of weight * r^{-2s} outside the square
    of half-width radius + 1/2.  Returns the value, or (value, bound) with the
    conservative bound pi R^{2-2 sigma}/(sigma-1).
    """
    s = complex(s)
    if s.real < 1.5:
        raise DomainError("direct summation needs Re s >= 1.5")
    if radius < 100:
        raise DomainError("radius must be at least 100")
    cols = np.arange(-radius, radius + 1, dtype=float)
    total = 0j
    chunk = max(1, 2_000_000 // len(cols))
    for start in range(-radius, radius + 1, chunk):
        rows = np.arange(start, min(start + chunk, radius + 1), dtype=float)
        p1, p2 = np.meshgrid(cols, rows)
        r2 = p1 * p1 + p2 * p2
        origin = r2 == 0
        r2[origin] = 1.0
        w = _angular_weight(spec, p1, p2)
        w[origin] = 0.0
        total += complex(np.sum(w * np.exp(-s * np.log(r2))))
    # tail: int_0^{2 pi} w(theta) rho^{2-2s}/(2s-2) dtheta, rho = (R+1/2)/max(|cos|,|sin|)
    gx, gw = np.polynomial.legendre.leggauss(64)
    edges = np.linspace(0, 2 * math.pi, 9)
    tail = 0j
    for a, b in zip(edges[:-1], edges[1:]):
        th = 0.5 * (a + b) + 0.5 * (b - a) * gx
        rho = (radius + 0.5) / np.maximum(np.abs(np.cos(th)), np.abs(np.sin(th)))
        w = _angular_weight(spec, np.cos(th), np.sin(th))
        tail += 0.5 * (b - a) * complex(np.sum(gw * w * np.exp((2 - 2 * s) * np.log(rho)))) / (2 * s - 2)
    value = total + tail
    bound = math.pi * radius ** (2 - 2 * s.real) / (s.real - 1)
    return (value, bound) if full_output else value
