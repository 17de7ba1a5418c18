"""Null contours of Re Delta3 and Im Delta3 on rectangular (sigma, t) grids.

Fields are sampled once per grid and shared by both null sets.  Extraction
is marching squares with linear interpolation along cell edges; cells whose
corners alternate in sign are resolved from the field at the cell centre.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .angsum import DEFAULT_POLICY, TruncationPolicy
from .delta3 import delta3, delta3_derivative, large_sigma_approx, line_log_scale, phi2m
from .errors import AnglatError, DegenerateError
from .zeroscan import _pool_map, default_workers

__all__ = [
    "GridSpec",
    "ContourPolyline",
    "FIELDS",
    "sample_grid",
    "sample_prefactor",
    "extract_null",
    "null_contours",
    "tangent_at_line",
    "branch_circle",
    "real_axis_crossings",
    "polylines_to_json",
]

FIELDS = ("ReDelta3", "ImDelta3", "PrefactorRe", "PrefactorIm")


@dataclass(frozen=True)
class GridSpec:
    sigma_range: tuple[float, float]
    t_range: tuple[float, float]
    n_sigma: int
    n_t: int

    def __post_init__(self):
        if self.n_sigma < 16 or self.n_t < 16:
            raise ValueError("grids need at least 16 nodes per axis")
        if not (self.sigma_range[0] < self.sigma_range[1] and self.t_range[0] < self.t_range[1]):
            raise ValueError("grid ranges must be nonempty")

    @property
    def sigmas(self) -> np.ndarray:
        return np.linspace(self.sigma_range[0], self.sigma_range[1], self.n_sigma)

    @property
    def ts(self) -> np.ndarray:
        return np.linspace(self.t_range[0], self.t_range[1], self.n_t)

    @property
    def cell(self) -> tuple[float, float]:
        return ((self.sigma_range[1] - self.sigma_range[0]) / (self.n_sigma - 1),
                (self.t_range[1] - self.t_range[0]) / (self.n_t - 1))


@dataclass
class ContourPolyline:
    field: str
    m: int
    vertices: list[tuple[float, float]]
    closed: bool = False
    open_ends: tuple[bool, bool] = (False, False)  # ends at a masked cell

    def as_array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)


def _singular_mask(m: int, grid: GridSpec) -> np.ndarray:
    """True at nodes within half a cell of an integer <= 2m on the real axis."""
    hs, ht = grid.cell
    S, T = np.meshgrid(grid.sigmas, grid.ts)
    r = np.round(S)
    return (r <= 2 * m) & (np.abs(S - r) < 0.5 * hs) & (np.abs(T) < 0.5 * ht)


def _delta3_row(args):
    m, sigmas, t, mask_row, policy = args
    out = np.full(len(sigmas), complex(math.nan, math.nan))
    for j, sg in enumerate(sigmas):
        if mask_row[j]:
            continue
        try:
            out[j] = delta3(m, complex(sg, t), policy).value
        except (AnglatError, ZeroDivisionError, OverflowError):
            pass
    return out


def sample_grid(m: int, grid: GridSpec, policy: TruncationPolicy = DEFAULT_POLICY,
                workers: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(Re Delta3, Im Delta3) on the grid, arrays indexed [t, sigma].

    Nodes near poles, or where evaluation fails, are NaN.
    """
    workers = default_workers() if workers is None else workers
    mask = _singular_mask(m, grid)
    sig = grid.sigmas
    rows = _pool_map(_delta3_row, [(m, sig, float(t), mask[i], policy) for i, t in enumerate(grid.ts)], workers)
    z = np.array(rows)
    return z.real.copy(), z.imag.copy()


def sample_prefactor(grid: GridSpec, full: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Real and imaginary parts of the large-sigma prefactor (or full
    approximation) for m = 1 on a grid with sigma >= 3.5."""
    S, T = np.meshgrid(grid.sigmas, grid.ts)
    z = np.empty(S.shape, dtype=complex)
    for idx in np.ndindex(S.shape):
        ls = large_sigma_approx(complex(S[idx], T[idx]))
        z[idx] = ls.full if full else ls.prefactor
    return z.real.copy(), z.imag.copy()


# ---------------------------------------------------------------------------
# marching squares

# edges: 0 bottom (i,j)-(i,j+1), 1 right (i,j+1)-(i+1,j+1), 2 top (i+1,j)-(i+1,j+1), 3 left (i,j)-(i+1,j)
_CASES = {
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)], 6: [(0, 2)], 7: [(3, 2)],
    8: [(2, 3)], 9: [(0, 2)], 11: [(1, 2)], 12: [(1, 3)], 13: [(0, 1)], 14: [(3, 0)],
}


def _edge_key(i: int, j: int, e: int):
    # canonical id shared by the two cells touching an edge
    if e == 0:
        return ("h", i, j)
    if e == 2:
        return ("h", i + 1, j)
    if e == 3:
        return ("v", i, j)
    return ("v", i, j + 1)


def _edge_point(F, xs, ys, key, level):
    kind, i, j = key
    if kind == "h":
        a, b = F[i, j] - level, F[i, j + 1] - level
        f = a / (a - b)
        return (xs[j] + f * (xs[j + 1] - xs[j]), ys[i])
    a, b = F[i, j] - level, F[i + 1, j] - level
    f = a / (a - b)
    return (xs[j], ys[i] + f * (ys[i + 1] - ys[i]))


def extract_null(F: np.ndarray, grid: GridSpec, level: float = 0.0, field: str = "ReDelta3", m: int = 1,
                 center: Callable[[float, float], float] | None = None) -> list[ContourPolyline]:
    """Polylines where the sampled field F[t, sigma] crosses ``level``.

    ``center(sigma, t)`` resolves saddle cells; without it the mean of the four
    corners is used.
    """
    xs, ys = grid.sigmas, grid.ts
    F = np.asarray(F, dtype=float)
    ny, nx = F.shape
    above = F > level
    bad = ~np.isfinite(F)
    segs: list[tuple] = []
    masked_edges: set = set()
    for i in range(ny - 1):
        for j in range(nx - 1):
            corners = (bad[i, j], bad[i, j + 1], bad[i + 1, j + 1], bad[i + 1, j])
            if any(corners):
                for e in range(4):
                    masked_edges.add(_edge_key(i, j, e))
                continue
            idx = int(above[i, j]) | int(above[i, j + 1]) << 1 | int(above[i + 1, j + 1]) << 2 | int(above[i + 1, j]) << 3
            if idx in (0, 15):
                continue
            if idx in (5, 10):
                if center is not None:
                    c = center(0.5 * (xs[j] + xs[j + 1]), 0.5 * (ys[i] + ys[i + 1]))
                else:
                    c = 0.25 * (F[i, j] + F[i, j + 1] + F[i + 1, j] + F[i + 1, j + 1])
                c_above = c > level
                if idx == 5:  # bottom-left and top-right above
                    pairs = [(3, 2), (0, 1)] if c_above else [(3, 0), (1, 2)]
                else:
                    pairs = [(3, 0), (1, 2)] if c_above else [(0, 1), (2, 3)]
            else:
                pairs = _CASES[idx]
            for a, b in pairs:
                segs.append((_edge_key(i, j, a), _edge_key(i, j, b)))

    # stitch segments sharing edge keys
    adj: dict = {}
    for n, (a, b) in enumerate(segs):
        adj.setdefault(a, []).append(n)
        adj.setdefault(b, []).append(n)
    used = [False] * len(segs)
    out = []

    def walk(start_key, seg_n):
        keys = [start_key]
        cur_key, n = start_key, seg_n
        while True:
            used[n] = True
            a, b = segs[n]
            nxt = b if a == cur_key else a
            keys.append(nxt)
            cand = [k for k in adj[nxt] if not used[k]]
            if not cand:
                return keys
            cur_key, n = nxt, cand[0]

    # open chains first (start at keys of degree 1), then loops
    for key, lst in adj.items():
        if len(lst) == 1 and not used[lst[0]]:
            keys = walk(key, lst[0])
            out.append((keys, False))
    for n in range(len(segs)):
        if not used[n]:
            keys = walk(segs[n][0], n)
            out.append((keys, keys[0] == keys[-1]))
    lines = []
    for keys, closed in out:
        verts = [tuple(float(v) for v in _edge_point(F, xs, ys, k, level)) for k in keys]
        ends = (keys[0] in masked_edges and not closed, keys[-1] in masked_edges and not closed)
        lines.append(ContourPolyline(field, m, verts, closed, ends))
    return lines


def null_contours(m: int, grid: GridSpec, policy: TruncationPolicy = DEFAULT_POLICY,
                  workers: int | None = None, resolve_saddles: bool = True) -> dict[str, list[ContourPolyline]]:
    re, im = sample_grid(m, grid, policy, workers)
    out = {}
    for name, F, part in (("ReDelta3", re, 0), ("ImDelta3", im, 1)):
        def center(sg, t, part=part):
            v = delta3(m, complex(sg, t), policy).value
            return v.imag if part else v.real
        out[name] = extract_null(F, grid, 0.0, name, m, center if resolve_saddles else None)
    return out


def polylines_to_json(lines: list[ContourPolyline]) -> str:
    by_field: dict[str, list] = {}
    ms = {}
    for ln in lines:
        by_field.setdefault(ln.field, []).append([[round(x, 10), round(y, 10)] for x, y in ln.vertices])
        ms[ln.field] = ln.m
    payload = [{"field": f, "m": ms[f], "polylines": p} for f, p in by_field.items()]
    return json.dumps(payload[0] if len(payload) == 1 else payload) + "\n"


# ---------------------------------------------------------------------------
# geometry at the critical line and the real axis


def tangent_at_line(m: int, t: float, policy: TruncationPolicy = DEFAULT_POLICY,
                    check: bool = True, tol: float = 1e-10):
    """Tangents of the Re-null and Im-null curves where they meet s = 1/2 + i t.

    Returns ((1, tan phi), (-tan phi, 1)) with phi = phi_2m,c(t).
    """
    phi = phi2m(m, t)
    if abs(math.cos(phi)) < 1e-15:
        raise DegenerateError(f"tan phi is infinite at t={t}")
    if check:
        s = complex(0.5, t)
        ref = line_log_scale(s)
        d = delta3_derivative(m, s, policy, ref)
        v = delta3(m, s, policy, ref).value
        if abs(d) < tol * max(abs(v), 1.0):
            raise DegenerateError(f"dDelta3/dt vanishes at t={t}")
    tp = math.tan(phi)
    return (1.0, tp), (-tp, 1.0)


def branch_circle(m: int = 1, n: int = 256) -> np.ndarray:
    """Points (sigma, t) of the circle |s - 1/2| = sqrt(3)/2 on which F_2 is
    real and negative (the cut of sqrt(F_2))."""
    if m != 1:
        raise ValueError("the branch set is a circle only for m = 1")
    a = 2 * math.pi * np.arange(n) / n
    pts = np.column_stack([0.5 + 0.5 * math.sqrt(3) * np.cos(a), 0.5 * math.sqrt(3) * np.sin(a)])
    return pts


def _real_segments(m: int, lo: float, hi: float, margin: float) -> list[tuple[float, float]]:
    cuts = [k for k in range(math.floor(lo), math.ceil(hi) + 1) if lo <= k <= hi and k <= 2 * m]
    edges = [lo] + [c for k in cuts for c in (k - margin, k + margin)] + [hi]
    segs = []
    for a, b in zip(edges[::2], edges[1::2]):
        if b - a > margin:
            segs.append((a, b))
    return segs


def real_axis_crossings(m: int, sigma_range: tuple[float, float] = (-4.5, 11.5), step: float = 0.02,
                        policy: TruncationPolicy = DEFAULT_POLICY, margin: float = 0.05,
                        xtol: float = 1e-10) -> dict[str, list[float]]:
    """Points where null curves cross the real axis.

    Delta3 is real for real s, so the axis itself is an Im-null line.  A
    Re-null curve crosses it where Delta3(sigma) = 0, and an Im-null curve
    branches off it where dDelta3/dsigma = 0 (near the axis Im Delta3 is
    t Delta3'(sigma)).  Sign changes are bracketed on a grid of the given
    step, kept ``margin`` away from the integers <= 2m, and refined by Brent.
    """
    out: dict[str, list[float]] = {"re": [], "im": []}

    def f(x):
        return delta3(m, x, policy).value.real

    def g(x):
        return delta3_derivative(m, x, policy).real

    for a, b in _real_segments(m, *sigma_range, margin):
        xs = np.linspace(a, b, max(3, int(math.ceil((b - a) / step)) + 1))
        for name, fn in (("re", f), ("im", g)):
            v = np.array([fn(x) for x in xs])
            idx = np.flatnonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)
            for i in idx:
                out[name].append(float(brentq(fn, xs[i], xs[i + 1], xtol=xtol)))
    for k in out:
        out[k].sort()
    return out
