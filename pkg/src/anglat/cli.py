"""Command-line front end: ``anglat <command> ...``.

Exit codes: 0 success, 1 numerical failure (or failed self-check), 2 usage error.
"""

from __future__ import annotations

import argparse
import cmath
import contextlib
import csv
import io
import json
import math
import re
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import angsum, contour, delta3 as d3, specfun, zeroscan
from .angsum import APPENDIX_TABLE, SumSpec, TruncationPolicy
from .errors import AnglatError
from .specfun import QuadratureSpec

_COMPLEX_RE = re.compile(
    r"^\s*(?P<re>[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)?"
    r"(?P<im>[+-]?(\d+\.?\d*|\.\d+)?([eE][+-]?\d+)?i)?\s*$"
)
_IMAG_RE = re.compile(r"^\s*(?P<im>[+-]?(\d+\.?\d*|\.\d+)?([eE][+-]?\d+)?)i\s*$")


def parse_complex(text: str) -> complex:
    """Parse "a+bi", "a", "bi", "a-i" (decimal reals)."""
    pure = _IMAG_RE.match(text)
    if pure:
        body = pure.group("im")
        return complex(0.0, {"": 1.0, "+": 1.0, "-": -1.0}.get(body) or float(body))
    m = _COMPLEX_RE.match(text)
    if not m or not (m.group("re") or m.group("im")):
        raise argparse.ArgumentTypeError(f"cannot parse complex number {text!r} (expected a+bi)")
    re_part = float(m.group("re")) if m.group("re") else 0.0
    im_txt = m.group("im")
    if im_txt:
        body = im_txt[:-1]
        if body in ("", "+"):
            im_part = 1.0
        elif body == "-":
            im_part = -1.0
        else:
            im_part = float(body)
    else:
        im_part = 0.0
    if m.group("re") and im_txt and im_txt[0] not in "+-":
        raise argparse.ArgumentTypeError(f"missing sign before imaginary part in {text!r}")
    return complex(re_part, im_part)


def parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def format_complex(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


@dataclass
class RunConfig:
    precision: str = "double"
    policy: TruncationPolicy = field(default_factory=TruncationPolicy)
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    output_format: str = "json"
    workers: int = 1

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("worker count must be >= 1")
        if self.precision not in ("double", "extended"):
            raise ValueError("precision must be 'double' or 'extended'")
        if self.output_format not in ("json", "csv"):
            raise ValueError("output format must be json or csv")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        precision = getattr(args, "precision", "double")
        if precision == "extended":
            quad = QuadratureSpec(target_rel_err=1e-15)
            policy = TruncationPolicy(stability_tol=1e-13, quadrature=quad)
        else:
            quad = QuadratureSpec()
            policy = TruncationPolicy(quadrature=quad)
        workers = getattr(args, "workers", None)
        if workers is None:
            workers = zeroscan.default_workers()
        fmt = "json" if getattr(args, "format", "json") == "json" else "csv"
        return cls(precision, policy, quad, fmt, workers)


def _emit(text: str, out: str | None):
    if not text.endswith("\n"):
        text += "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands


def cmd_eval(args, cfg: RunConfig) -> int:
    s = args.s
    t0 = time.perf_counter()
    err = None
    p_used = None
    fam = args.family
    if fam == "c01":
        r = angsum.kober_sums(s, [0], cfg.policy)[0]
        value, err, p_used = r.value, r.error, r.p_used
    elif fam == "c2n1":
        r = angsum.kober_sums(s, [args.n], cfg.policy)[args.n]
        value, err, p_used = r.value, r.error, r.p_used
    elif fam == "c14":
        r = angsum.c14m(args.m, s, cfg.policy, full_output=True)
        value, err, p_used = r.value, r.error, r.p_used
    elif fam == "zeta":
        value = specfun.zeta(s)
    elif fam == "beta4":
        value = specfun.beta_catalan(s)
    else:  # pragma: no cover - argparse restricts choices
        raise AssertionError(fam)
    dt = time.perf_counter() - t0
    payload = {"family": fam, "s": format_complex(s), "value": format_complex(value),
               "error": err, "p_used": p_used, "seconds": round(dt, 6)}
    if fam == "c14":
        payload["m"] = args.m
    if fam == "c2n1":
        payload["n"] = args.n
    _emit(json.dumps(payload), None)
    return 0


def cmd_delta3(args, cfg: RunConfig) -> int:
    s = args.s
    ref = d3.line_log_scale(s) if args.scaled else 0.0
    v = d3.delta3(args.m, s, cfg.policy, log_ref=ref)
    payload = {"m": args.m, "s": format_complex(s), "value": format_complex(v.value),
               "near_pole": v.near_pole, "log_ref": ref}
    if args.parts:
        c, sv = d3.delta3_tilde_parts(args.m, s, cfg.policy, log_ref=ref)
        payload["C_tilde"] = format_complex(c)
        payload["S_tilde"] = format_complex(sv)
        payload["parts_log_ref"] = ref
    if args.residual:
        payload["functional_residual"] = d3.functional_residual(args.m, s, cfg.policy)
    _emit(json.dumps(payload), None)
    return 0


def _family(args) -> zeroscan.ZeroFamily:
    return zeroscan.ZeroFamily.parse(args.family, args.m)


def cmd_zeros(args, cfg: RunConfig) -> int:
    fam = _family(args)
    recs = zeroscan.scan(fam, (args.tmin, args.tmax), args.step, cfg.policy, cfg.workers)
    if cfg.output_format == "json":
        text = json.dumps([{"family": r.family.label, "t": r.t, "bracket": list(r.bracket),
                            "refined_tol": r.refined_tol} for r in recs])
    else:
        text = _csv([[r.family.label, repr(r.t), repr(r.bracket[0]), repr(r.bracket[1]), r.refined_tol]
                     for r in recs], ["family", "t", "t_lo", "t_hi", "refined_tol"])
    _emit(text, args.out)
    return 0


def cmd_table1(args, cfg: RunConfig) -> int:
    rows = zeroscan.count_table(args.tmax, args.width, step=args.step, policy=cfg.policy, workers=cfg.workers)
    if args.format == "json":
        text = json.dumps([{"range": list(r.range), "counts": r.counts, "predicted": r.predicted,
                            "cumulative": r.cumulative} for r in rows])
    else:
        text = zeroscan.format_table(rows)
    _emit(text, args.out)
    return 0


def cmd_hist(args, cfg: RunConfig) -> int:
    fam = _family(args)
    recs = zeroscan.scan(fam, (0.0, args.tmax), args.step, cfg.policy, cfg.workers)
    h = zeroscan.spacing_stats(recs, fam, args.bin_width)
    mids = 0.5 * (h.edges[:-1] + h.edges[1:])
    rows = [[f"{a:.6g}", f"{b:.6g}", f"{d:.10g}", f"{w:.10g}"]
            for a, b, d, w in zip(h.edges[:-1], h.edges[1:], h.densities, zeroscan.wigner(mids))]
    _emit(_csv(rows, ["bin_lo", "bin_hi", "density", "wigner"]), args.out)
    return 0


def cmd_contours(args, cfg: RunConfig) -> int:
    grid = contour.GridSpec(args.sigma, args.t, args.nx, args.nt)
    lines = []
    if args.field == "prefactor":
        pre_re, pre_im = contour.sample_prefactor(grid, full=args.full_series)
        lines += contour.extract_null(pre_re, grid, 0.0, "PrefactorRe", 1)
        lines += contour.extract_null(pre_im, grid, 0.0, "PrefactorIm", 1)
    else:
        res = contour.null_contours(args.m, grid, cfg.policy, cfg.workers)
        if args.field in ("re", "both"):
            lines += res["ReDelta3"]
        if args.field in ("im", "both"):
            lines += res["ImDelta3"]
    if not lines:
        text = json.dumps({"field": None, "m": args.m, "polylines": []}) + "\n"
    else:
        text = contour.polylines_to_json(lines)
    _emit(text, args.out)
    return 0


# ---------------------------------------------------------------------------
# self-check


@dataclass
class Check:
    name: str
    residual: float
    threshold: float
    passed: bool


def _check(name, residual, threshold, passed=None) -> Check:
    residual = float(residual)
    ok = (residual < threshold) if passed is None else bool(passed)
    return Check(name, residual, threshold, ok and math.isfinite(residual))


@contextlib.contextmanager
def _fault(kind: str | None):
    """Test mode: corrupt one routine so the matching check must fail."""
    if kind is None:
        yield
        return
    if kind != "chebyshev":
        raise ValueError(f"unknown fault {kind!r}")
    original = angsum.chebyshev_t_coeffs

    def wrong(degree):
        c = list(original(degree))
        if degree >= 2:
            c[2] += 1
        return c

    angsum.chebyshev_t_coeffs = wrong
    try:
        yield
    finally:
        angsum.chebyshev_t_coeffs = original


def run_selfcheck(quick: bool = False, fault: str | None = None, policy: TruncationPolicy | None = None) -> list[Check]:
    policy = policy or TruncationPolicy()
    rng = np.random.default_rng(20240611)
    checks: list[Check] = []
    with _fault(fault):
        # Hobson integral against the Macdonald routine
        n = 6 if quick else 30
        worst = 0.0
        for _ in range(n):
            p, q = rng.uniform(0.5, 3.0, 2)
            s = rng.uniform(0, 5) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
            worst = max(worst, specfun.hobson_residual(s, p, q))
        checks.append(_check("hobson_integral", worst, 1e-8))

        # closed form K_{1/2}
        k = specfun.macdonald_k(0.5, 3.0)
        checks.append(_check("k_half_closed_form", abs(k / (math.sqrt(math.pi / 6) * math.exp(-3)) - 1), 1e-12))

        # zeta functional equation in the strip
        worst = 0.0
        for s in (0.3 + 5j, 0.7 + 20j, 0.1 + 50j, 0.9 + 3j):
            lhs = specfun.zeta(s)
            rhs = (2 ** s) * math.pi ** (s - 1) * cmath.sin(math.pi * s / 2) * cmath.exp(specfun.ln_gamma(1 - s)) \
                * specfun.zeta(1 - s)
            worst = max(worst, abs(lhs - rhs) / abs(lhs))
        checks.append(_check("zeta_functional_equation", worst, 1e-10))

        # completed beta symmetry
        worst = 0.0
        for s in (0.3 + 5j, 0.2 + 30j, -0.5 + 2j):
            a, b = specfun.completed_beta(s), specfun.completed_beta(1 - s)
            worst = max(worst, abs(a - b) / abs(a))
        checks.append(_check("beta_reflection", worst, 1e-10))

        # C(0,1) = 4 zeta beta
        worst = 0.0
        for _ in range(6 if quick else 25):
            s = complex(rng.uniform(-2, 3), rng.uniform(0, 50))
            if abs(s - 1) < 0.05:
                continue
            c = angsum.c01(s, policy)
            worst = max(worst, abs(c - 4 * specfun.zeta(s) * specfun.beta_catalan(s)) / abs(c))
        checks.append(_check("c01_product_identity", worst, 1e-9))

        # stored reductions against the Chebyshev algebra
        bad = sum(1 for spec, w in APPENDIX_TABLE.items() if angsum.reduce_spec(spec) != w)
        checks.append(_check("reduction_table", bad, 0.5))

        # C(1,4) and C(1,8) from the generators against direct summation
        worst = 0.0
        for m in (1, 2):
            s = 2.5
            weights = angsum.reduce_spec(SumSpec.cos(1, 4 * m))
            block = angsum.kober_sums(s, [p // 2 for p in weights], policy)
            val = sum(float(w) * block[p // 2].value for p, w in weights.items())
            ref = angsum.brute_force(SumSpec.cos(1, 4 * m), s, radius=300)
            worst = max(worst, abs(val - ref) / abs(ref))
        checks.append(_check("c14m_chebyshev_vs_direct", worst, 1e-6))

        # functional equations of G_4m and Delta3
        worst = 0.0
        pts = (0.3 + 7j, 0.2 + 12j) if quick else (0.3 + 7j, 0.2 + 12j, 0.4 + 9j, -0.5 + 25j, 0.1 + 40j)
        for m in (0, 1, 2, 3):
            for s in pts:
                worst = max(worst, d3.functional_residual(m, s, policy))
        checks.append(_check("functional_equations", worst, 1e-8))

        # C(2m,1;1/2+it) -> 2 zeta(1+2it)
        devs = []
        ts = np.linspace(1, 10, 10 if quick else 19)
        for m in (10, 30, 100):
            devs.append(max(abs(angsum.c2n1(m, complex(0.5, t), policy) / (2 * specfun.zeta(complex(1, 2 * t))) - 1)
                            for t in ts))
        mono = all(b < a for a, b in zip(devs, devs[1:]))
        checks.append(_check("c2m1_limit_monotone", devs[-1], math.inf, passed=mono))
    return checks


def cmd_selfcheck(args, cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    checks = run_selfcheck(args.quick, args.inject_fault, cfg.policy)
    if args.format == "json":
        _emit(json.dumps([c.__dict__ for c in checks]), None)
    else:
        for c in checks:
            print(f"{'PASS' if c.passed else 'FAIL'}  {c.name:32s} residual={c.residual:.3e}  threshold={c.threshold:.1e}")
        print(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed in {time.perf_counter() - t0:.1f} s")
    return 0 if all(c.passed for c in checks) else 1


# ---------------------------------------------------------------------------


_VALUE_OPTS = ("--s", "--sigma", "--t")


def _join_negative_values(argv: list[str]) -> list[str]:
    # let "--sigma -4.5:11.5" and "--s -1+2i" through argparse
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_OPTS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="anglat", description="Angular lattice sums and their zeros.")
    p.add_argument("--precision", choices=("double", "extended"), default="double")
    p.add_argument("--workers", type=int, default=None, help="process count (default: ANGLAT_THREADS or 1)")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="evaluate a lattice sum or L-function")
    e.add_argument("--family", required=True, choices=("c01", "c14", "c2n1", "zeta", "beta4"))
    e.add_argument("--s", required=True, type=parse_complex)
    e.add_argument("--m", type=int, default=1)
    e.add_argument("--n", type=int, default=1)
    e.set_defaults(func=cmd_eval)

    d = sub.add_parser("delta3", help="evaluate Delta3(2,2m;s)")
    d.add_argument("--m", type=int, default=1)
    d.add_argument("--s", required=True, type=parse_complex)
    d.add_argument("--parts", action="store_true", help="also print C~ and S~")
    d.add_argument("--residual", action="store_true", help="also print the functional-equation residual")
    d.add_argument("--scaled", action="store_true", help="divide by |Gamma(s) pi^-s|^2")
    d.set_defaults(func=cmd_delta3)

    z = sub.add_parser("zeros", help="critical-line zeros of one family")
    z.add_argument("--family", required=True)
    z.add_argument("--m", type=int, default=None)
    z.add_argument("--tmin", type=float, default=0.0)
    z.add_argument("--tmax", type=float, required=True)
    z.add_argument("--step", type=float, default=zeroscan.DEFAULT_STEP)
    z.add_argument("--format", choices=("csv", "json"), default="csv")
    z.add_argument("--out")
    z.set_defaults(func=cmd_zeros)

    t = sub.add_parser("table1", help="zero counts per interval")
    t.add_argument("--tmax", type=float, default=300.0)
    t.add_argument("--width", type=float, default=10.0)
    t.add_argument("--step", type=float, default=zeroscan.DEFAULT_STEP)
    t.add_argument("--format", choices=("text", "json"), default="text")
    t.add_argument("--out")
    t.set_defaults(func=cmd_table1)

    h = sub.add_parser("hist", help="spacing histogram with the Wigner surmise")
    h.add_argument("--family", required=True)
    h.add_argument("--m", type=int, default=None)
    h.add_argument("--tmax", type=float, default=300.0)
    h.add_argument("--step", type=float, default=zeroscan.DEFAULT_STEP)
    h.add_argument("--bin-width", type=float, default=0.2)
    h.add_argument("--out")
    h.set_defaults(func=cmd_hist)

    c = sub.add_parser("contours", help="null contours of Re and Im Delta3")
    c.add_argument("--m", type=int, default=1)
    c.add_argument("--sigma", type=parse_range, default=(-4.5, 11.5))
    c.add_argument("--t", type=parse_range, default=(0.1, 20.0))
    c.add_argument("--nx", type=int, default=640)
    c.add_argument("--nt", type=int, default=800)
    c.add_argument("--field", choices=("re", "im", "both", "prefactor"), default="both")
    c.add_argument("--full-series", action="store_true", help="prefactor field: include the shell series")
    c.add_argument("--out")
    c.set_defaults(func=cmd_contours)

    s = sub.add_parser("selfcheck", help="run the invariant suite")
    s.add_argument("--quick", action="store_true")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.add_argument("--inject-fault", choices=("chebyshev",), default=None, help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_selfcheck)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_negative_values(argv))
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    try:
        cfg = RunConfig.from_args(args)
    except ValueError as exc:
        print(f"anglat: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args, cfg)
    except (AnglatError, ArithmeticError) as exc:
        print(f"anglat: numerical error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"anglat: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
