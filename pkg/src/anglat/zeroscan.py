"""Critical-line zeros of zeta, L_{-4}, C(0,1;s) and C(1,4m;s).

Each family has a completed function that is real on s = 1/2 + i t:

    zeta    exp(i theta) zeta(s),  theta = arg Gamma(1/4 + i t/2) - (t/2) log pi
    beta4   exp(i theta) beta(s),  theta = arg Gamma(3/4 + i t/2) - (t/2) log(pi/4)
    c01     exp(i theta) C(0,1;s), theta = arg Gamma(s) - t log pi
    c14(m)  exp(i theta) C(1,4m;s), theta = arg Gamma(s + 2m) - t log pi

The last two are G(s)/|Gamma pi^{-s}| with G(s) = G(1-s) = conj(G(s)) on the
line, so their sign changes are exactly the zeros.  Zeros are bracketed on a
uniform grid, refined with Brent's method, and checked against the smooth
counting functions.
"""

from __future__ import annotations

import math
import multiprocessing
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .angsum import DEFAULT_POLICY, TruncationPolicy, c14m_weights, kober_sums
from .errors import AmbiguousLabelError, InsufficientDataError, MissedZeroWarning
from .specfun import beta_catalan, ln_gamma, zeta

__all__ = [
    "ZeroFamily",
    "ZETA",
    "BETA4",
    "C01",
    "c14_family",
    "ZeroRecord",
    "IntervalCount",
    "SpacingHistogram",
    "completed_real",
    "completed_values",
    "realness_ratio",
    "scan",
    "scan_many",
    "count_table",
    "format_table",
    "predicted_count",
    "TABLE_FAMILIES",
    "wigner",
    "spacing_stats",
    "classify_delta3_zeros",
    "default_workers",
]

LOG_PI = math.log(math.pi)
DEFAULT_STEP = 0.02
REALNESS_TOL = 1e-8


@dataclass(frozen=True, order=True)
class ZeroFamily:
    kind: str  # "zeta", "beta4", "c01", "c14"
    m: int = 0

    def __post_init__(self):
        if self.kind not in ("zeta", "beta4", "c01", "c14"):
            raise ValueError(f"unknown family {self.kind!r}")
        if (self.kind == "c14") != (self.m >= 1):
            raise ValueError("c14 needs m >= 1; other families take m = 0")

    @property
    def label(self) -> str:
        return f"c1{4 * self.m}" if self.kind == "c14" else self.kind

    @classmethod
    def parse(cls, text: str, m: int | None = None) -> "ZeroFamily":
        """Accepts zeta, beta4, c01, c14 (with m), c14:2, c18, c112."""
        text = text.strip().lower()
        if text in ("zeta", "beta4", "c01"):
            return cls(text)
        if text.startswith("c14:"):
            return cls("c14", int(text[4:]))
        if text == "c14":
            return cls("c14", 1 if m is None else m)
        if text.startswith("c1") and text[2:].isdigit() and int(text[2:]) % 4 == 0:
            return cls("c14", int(text[2:]) // 4)
        raise ValueError(f"unknown family {text!r}")


ZETA = ZeroFamily("zeta")
BETA4 = ZeroFamily("beta4")
C01 = ZeroFamily("c01")


def c14_family(m: int) -> ZeroFamily:
    return ZeroFamily("c14", m)


@dataclass(frozen=True)
class ZeroRecord:
    family: ZeroFamily
    t: float
    bracket: tuple[float, float]
    refined_tol: float


@dataclass
class IntervalCount:
    range: tuple[float, float]
    counts: dict[str, int]
    predicted: dict[str, float] = field(default_factory=dict)
    cumulative: bool = False


@dataclass
class SpacingHistogram:
    family: ZeroFamily | None
    spacings: np.ndarray
    edges: np.ndarray
    densities: np.ndarray
    wigner_s: np.ndarray
    wigner_p: np.ndarray


def default_workers() -> int:
    env = os.environ.get("ANGLAT_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("ANGLAT_THREADS must be >= 1")
        return n
    return 1


# ---------------------------------------------------------------------------
# completed functions


def _theta(family: ZeroFamily, t: float) -> float:
    if family.kind == "zeta":
        return ln_gamma(complex(0.25, 0.5 * t)).imag - 0.5 * t * LOG_PI
    if family.kind == "beta4":
        return ln_gamma(complex(0.75, 0.5 * t)).imag - 0.5 * t * math.log(math.pi / 4)
    return ln_gamma(complex(0.5 + 2 * family.m, t)).imag - t * LOG_PI


def _lattice_ns(families) -> set[int]:
    ns: set[int] = set()
    for f in families:
        if f.kind == "c01":
            ns.add(0)
        elif f.kind == "c14":
            ns |= {p // 2 for p in c14m_weights(f.m)}
    return ns


def _raw_values(families, t: float, policy: TruncationPolicy) -> dict[ZeroFamily, complex]:
    """Uncompleted complex values at 1/2 + i t, lattice families from one block."""
    s = complex(0.5, t)
    out: dict[ZeroFamily, complex] = {}
    ns = _lattice_ns(families)
    block = {n: r.value for n, r in kober_sums(s, ns, policy).items()} if ns else {}
    for f in families:
        if f.kind == "zeta":
            out[f] = zeta(s)
        elif f.kind == "beta4":
            out[f] = beta_catalan(s)
        elif f.kind == "c01":
            out[f] = block[0]
        else:
            out[f] = complex(sum(float(w) * block[p // 2] for p, w in c14m_weights(f.m).items()))
    return out


def completed_values(families, t: float, policy: TruncationPolicy = DEFAULT_POLICY,
                     full_output: bool = False):
    """Completed real values of several families at one ordinate.

    With ``full_output`` also returns the discarded imaginary parts.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    raw = _raw_values(families, t, policy)
    vals, imags = {}, {}
    for f, v in raw.items():
        th = _theta(f, t)
        z = complex(math.cos(th), math.sin(th)) * v
        vals[f] = z.real
        imags[f] = z.imag
    return (vals, imags) if full_output else vals


def completed_real(family: ZeroFamily, t: float, policy: TruncationPolicy = DEFAULT_POLICY,
                   full_output: bool = False):
    """Completed real value; with ``full_output`` returns (value, imaginary residue)."""
    vals, imags = completed_values((family,), t, policy, full_output=True)
    return (vals[family], imags[family]) if full_output else vals[family]


def realness_ratio(re: np.ndarray, im: np.ndarray) -> float:
    """Largest |Im|/|value| over samples that are not close to a zero.

    Next to a zero both parts are at roundoff level, so only samples with
    modulus at least 1e-3 of the median modulus enter.
    """
    mod = np.hypot(re, im)
    keep = mod >= 1e-3 * np.median(mod)
    if not keep.any():
        return 0.0
    return float(np.max(np.abs(im[keep]) / mod[keep]))


def _sample_chunk(args):
    families, ts, policy = args
    out = np.empty((len(families), len(ts)))
    imag = np.empty_like(out)
    for j, t in enumerate(ts):
        vals, ims = completed_values(families, float(t), policy, full_output=True)
        for i, f in enumerate(families):
            out[i, j] = vals[f]
            imag[i, j] = ims[f]
    return out, imag


def _refine_chunk(args):
    jobs, policy, xtol = args
    out = []
    for family, a, b in jobs:
        t = brentq(lambda x: completed_real(family, x, policy), a, b, xtol=xtol, rtol=4 * np.finfo(float).eps)
        out.append(float(t))
    return out


def _pool_map(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    ctx = multiprocessing.get_context("fork") if "fork" in multiprocessing.get_all_start_methods() else None
    with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
        return list(pool.map(fn, tasks))


def _grid(t_lo: float, t_hi: float, step: float) -> np.ndarray:
    n = int(math.ceil((t_hi - t_lo) / step - 1e-9))
    ts = t_lo + step * np.arange(n + 1)
    ts[-1] = t_hi
    return ts


def _sample(families, ts: np.ndarray, policy, workers: int):
    nchunk = max(1, min(len(ts), 8 * workers))
    pieces = np.array_split(ts, nchunk)
    res = _pool_map(_sample_chunk, [(tuple(families), p, policy) for p in pieces], workers)
    vals = np.concatenate([r[0] for r in res], axis=1)
    imag = np.concatenate([r[1] for r in res], axis=1)
    worst = max(realness_ratio(vals[i], imag[i]) for i in range(len(families)))
    return vals, worst


def _brackets(ts: np.ndarray, vals: np.ndarray) -> list[tuple[float, float]]:
    sgn = np.where(vals >= 0, 1, -1)
    idx = np.flatnonzero(sgn[:-1] != sgn[1:])
    return [(float(ts[i]), float(ts[i + 1])) for i in idx]


def _expected(family: ZeroFamily, t_lo: float, t_hi: float) -> float:
    # the smooth formulas are only meaningful for t > 2 pi; below that count nothing
    lo = max(t_lo, 7.0)
    if t_hi <= lo:
        return 0.0
    return predicted_count(family, t_hi) - max(predicted_count(family, lo), 0.0)


def scan_many(families, t_range: tuple[float, float], step: float = DEFAULT_STEP,
              policy: TruncationPolicy = DEFAULT_POLICY, workers: int | None = None,
              refine_tol: float = 1e-9, guard: bool = True) -> dict[ZeroFamily, list[ZeroRecord]]:
    """Scan several families over one shared grid.

    Lattice families share one Bessel table per ordinate.  When a family's
    count falls more than two below the smooth prediction the family is
    rescanned at step/4; a remaining deficit raises MissedZeroWarning.
    """
    families = tuple(sorted(set(families)))
    t_lo, t_hi = map(float, t_range)
    if not 0 <= t_lo < t_hi:
        raise ValueError("need 0 <= t_lo < t_hi")
    if not 0 < step <= 0.05:
        raise ValueError("step must lie in (0, 0.05]")
    if refine_tol > 1e-6:
        raise ValueError("refine_tol must be <= 1e-6")
    workers = default_workers() if workers is None else workers
    if workers < 1:
        raise ValueError("workers must be >= 1")

    ts = _grid(t_lo, t_hi, step)
    vals, worst = _sample(families, ts, policy, workers)
    if worst > REALNESS_TOL:
        warnings.warn(f"completed function has relative imaginary part {worst:.2e}", RuntimeWarning, stacklevel=2)
    brackets = {f: _brackets(ts, vals[i]) for i, f in enumerate(families)}

    if guard:
        for f in families:
            if len(brackets[f]) < _expected(f, t_lo, t_hi) - 2:
                fine = _grid(t_lo, t_hi, step / 4)
                fv, _ = _sample((f,), fine, policy, workers)
                brackets[f] = _brackets(fine, fv[0])
                if len(brackets[f]) < _expected(f, t_lo, t_hi) - 2:
                    warnings.warn(f"{f.label}: {len(brackets[f])} zeros found on [{t_lo}, {t_hi}], "
                                  f"{_expected(f, t_lo, t_hi):.1f} expected", MissedZeroWarning, stacklevel=2)

    jobs = [(f, a, b) for f in families for a, b in brackets[f]]
    nchunk = max(1, min(len(jobs), 8 * workers))
    parts = [list(p) for p in np.array_split(np.arange(len(jobs)), nchunk)] if jobs else []
    res = _pool_map(_refine_chunk, [([jobs[i] for i in p], policy, refine_tol) for p in parts], workers)
    roots = [t for r in res for t in r]
    out: dict[ZeroFamily, list[ZeroRecord]] = {f: [] for f in families}
    for (f, a, b), t in zip(jobs, roots):
        out[f].append(ZeroRecord(f, t, (a, b), refine_tol))
    for f in families:
        out[f].sort(key=lambda r: r.t)
    return out


def scan(family: ZeroFamily, t_range: tuple[float, float], step: float = DEFAULT_STEP,
         policy: TruncationPolicy = DEFAULT_POLICY, workers: int | None = None,
         refine_tol: float = 1e-9, guard: bool = True) -> list[ZeroRecord]:
    return scan_many((family,), t_range, step, policy, workers, refine_tol, guard)[family]


# ---------------------------------------------------------------------------
# counting


def predicted_count(family: ZeroFamily | str, t: float) -> float:
    """Leading-order smooth counting functions.

    zeta:  (t/2pi) log t - (t/2pi)(1 + log 2pi)
    beta4: (t/2pi) log t - (t/2pi)(1 + log(pi/2))
    c01, c14(m): (t/pi) log t - (t/pi)(1 + log pi)
    "delta3" (any m): N_c14 + N_c01.
    """
    kind = family if isinstance(family, str) else family.kind
    if t <= 2 * math.pi:
        raise ValueError("predicted_count needs t > 2 pi")
    a = t / (2 * math.pi)
    if kind == "zeta":
        return a * math.log(t) - a * (1 + math.log(2 * math.pi))
    if kind == "beta4":
        return a * math.log(t) - a * (1 + math.log(math.pi / 2))
    if kind in ("c01", "c14"):
        return 2 * a * math.log(t) - 2 * a * (1 + LOG_PI)
    if kind == "delta3":
        return predicted_count("c14", t) + predicted_count("c01", t)
    raise ValueError(f"unknown family {kind!r}")


TABLE_FAMILIES = (ZETA, BETA4, c14_family(1), c14_family(2), c14_family(3))


def count_table(t_max: float = 300.0, width: float = 10.0, families=TABLE_FAMILIES,
                step: float = DEFAULT_STEP, policy: TruncationPolicy = DEFAULT_POLICY,
                workers: int | None = None, zeros: dict[ZeroFamily, list[ZeroRecord]] | None = None,
                block: float = 100.0) -> list[IntervalCount]:
    """Per-interval counts with cumulative rows every ``block`` in t.

    The sum column ``zeta+beta4+c14`` is added when those three families are
    present; cumulative rows carry the smooth predictions.
    """
    if t_max > 400:
        raise ValueError("t_max must be <= 400")
    families = tuple(families)
    if zeros is None:
        zeros = scan_many(families, (0.0, t_max), step, policy, workers)
    ts = {f: np.array([r.t for r in zeros[f]]) for f in families}
    sum_fams = (ZETA, BETA4, c14_family(1))
    with_sum = all(f in families for f in sum_fams)

    def counts_in(a, b):
        c = {f.label: int(np.count_nonzero((ts[f] >= a) & (ts[f] < b))) for f in families}
        if with_sum:
            c["sum"] = sum(c[f.label] for f in sum_fams)
        return c

    rows = []
    nint = int(round(t_max / width))
    per_block = int(round(block / width))
    for i in range(nint):
        a, b = i * width, (i + 1) * width
        rows.append(IntervalCount((a, b), counts_in(a, b)))
        if (i + 1) % per_block == 0 or i == nint - 1:
            pred = {}
            for f in families:
                if f in sum_fams:
                    pred[f.label] = predicted_count(f, b)
            if with_sum:
                pred["sum"] = sum(pred[f.label] for f in sum_fams)
            rows.append(IntervalCount((0.0, b), counts_in(0.0, b), pred, cumulative=True))
    return rows


def format_table(rows: list[IntervalCount]) -> str:
    labels = list(rows[0].counts)
    lines = ["t\t" + "\t".join(labels)]
    for r in rows:
        a, b = r.range
        lines.append(f"{a:g}-{b:g}\t" + "\t".join(str(r.counts[k]) for k in labels))
        if r.cumulative:
            shown = {k: int(round(v)) for k, v in r.predicted.items() if k != "sum"}
            if "sum" in r.predicted:
                shown["sum"] = sum(shown[f.label] for f in (ZETA, BETA4, c14_family(1)))
            lines.append("predicted\t" + "\t".join(str(shown[k]) if k in shown else "" for k in labels))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# spacings


def wigner(S) -> np.ndarray:
    """Unitary-ensemble Wigner surmise (32/pi^2) S^2 exp(-4 S^2/pi).

    This normalization has unit mass and unit mean.
    """
    S = np.asarray(S, dtype=float)
    return (32.0 / math.pi ** 2) * S * S * np.exp(-4.0 * S * S / math.pi)


def spacing_stats(zeros, family: ZeroFamily | None = None, bin_width: float = 0.2,
                  unfold: bool = True) -> SpacingHistogram:
    """Nearest-neighbour spacings rescaled to unit mean, with a histogram.

    With ``unfold`` the ordinates are first mapped through the smooth counting
    function so that the slowly rising density does not broaden the
    distribution; the spacings are then divided by their mean.
    """
    t = np.sort(np.array([z.t if isinstance(z, ZeroRecord) else float(z) for z in zeros]))
    if len(t) < 50:
        raise InsufficientDataError(f"need at least 50 zeros, got {len(t)}")
    if family is None and isinstance(zeros[0], ZeroRecord):
        family = zeros[0].family
    if unfold and family is not None:
        t = t[t > 2 * math.pi]
        if len(t) < 50:
            raise InsufficientDataError("fewer than 50 zeros above t = 2 pi")
        x = np.array([predicted_count(family, v) for v in t])
    else:
        x = t
    d = np.diff(x)
    S = d / d.mean()
    top = bin_width * math.ceil(S.max() / bin_width + 1e-12)
    edges = np.arange(0.0, top + 0.5 * bin_width, bin_width)
    counts, _ = np.histogram(S, bins=edges)
    dens = counts / (len(S) * bin_width)
    ws = np.linspace(0.0, max(top, 4.0), 201)
    return SpacingHistogram(family, S, edges, dens, ws, wigner(ws))


# ---------------------------------------------------------------------------
# labelling the zeros of Delta3


def _factor_label(family: ZeroFamily) -> int:
    return {"zeta": 1, "beta4": -4}.get(family.kind) or int(f"1{4 * family.m}")


def classify_delta3_zeros(m: int = 1, t_range: tuple[float, float] = (0.0, 20.0),
                          policy: TruncationPolicy = DEFAULT_POLICY, step: float = DEFAULT_STEP,
                          workers: int | None = None, zeros=None, tol: float = 1e-6):
    """Zeros of Delta3(2,2m;1/2+it) labelled by the factor they come from:
    +1 (zeta), -4 (L_{-4}) or 1(4m) (C(1,4m))."""
    fams = (ZETA, BETA4, c14_family(m))
    if zeros is None:
        zeros = scan_many(fams, t_range, step, policy, workers)
    merged = sorted((r.t, _factor_label(f)) for f in fams for r in zeros[f]
                    if t_range[0] <= r.t <= t_range[1])
    for (ta, la), (tb, lb) in zip(merged, merged[1:]):
        if tb - ta < tol and la != lb:
            raise AmbiguousLabelError(f"zeros with labels {la} and {lb} coincide near t={ta}")
    return merged
