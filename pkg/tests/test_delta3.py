from __future__ import annotations

import cmath
import math
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from anglat import delta3 as d3
from anglat.errors import BranchCutWarning, DegenerateError, DomainError, PoleError

finite = dict(allow_nan=False, allow_infinity=False)


# ---------------------------------------------------------------- phase factor

def test_f2m_zeros_and_poles():
    assert d3.f2m(0, 0.3 + 2j) == 1
    for m in (1, 2, 3):
        for k in range(1, 2 * m + 1):
            assert d3.f2m(m, k) == 0
        for k in range(0, 2 * m):
            with pytest.raises(PoleError):
                d3.f2m(m, -k)
    with pytest.raises(ValueError):
        d3.f2m(-1, 0.5)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 4), st.floats(-10, 10, **finite), st.floats(0.01, 200, **finite))
def test_f2m_reflection(m, x, y):
    s = complex(x, y)
    assert abs(d3.f2m(m, s) * d3.f2m(m, 1 - s) - 1) < 1e-10


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 4), st.floats(0.01, 500, **finite))
def test_f2m_on_line_is_double_phase(m, t):
    assert abs(d3.f2m(m, complex(0.5, t)) - cmath.exp(2j * d3.phi2m(m, t))) < 1e-12


def test_phi2m_values():
    # m = 1 at t = sqrt(3)/2: pi/6 + pi/3
    assert abs(d3.phi2m(1, math.sqrt(3) / 2) - math.pi / 2) < 1e-14
    assert abs(d3.phi2m(1, 100.0) - 0.02) < 1e-5
    assert abs(d3.phi2m(2, 200.0) - 8 / 200) < 1e-5
    assert d3.phi2m(3, 0.0) == 3 * math.pi
    assert abs(d3.phi2m(2, -7.0) + d3.phi2m(2, 7.0)) < 1e-15


@pytest.mark.parametrize("m,t", [(1, 3.0), (2, 0.4), (3, 25.0)])
def test_phi2m_prime(m, t):
    h = 1e-5
    fd = (d3.phi2m(m, t + h) - d3.phi2m(m, t - h)) / (2 * h)
    assert abs(d3.phi2m_prime(m, t) - fd) < 1e-8


def test_exceptional_points_on_line():
    # where phi_2m,c crosses an odd multiple of pi/2 tan(phi) is infinite;
    # where it crosses a nonzero multiple of pi cot(phi) is infinite
    def crossings(m, level):
        ts = [0.001 * i for i in range(1, 20000)]
        vals = [d3.phi2m(m, t) - level for t in ts]
        return sum(1 for a, b in zip(vals, vals[1:]) if a * b < 0)

    assert crossings(1, math.pi / 2) == 1
    tan_inf = crossings(2, math.pi / 2) + crossings(2, 3 * math.pi / 2)
    cot_inf = crossings(2, math.pi)
    assert (tan_inf, cot_inf) == (2, 1)


def test_phase_state_branches():
    on = d3.phase_state(1, complex(0.5, 3.0))
    assert on.branch_flag == "continued"
    assert abs(on.sqrtF ** 2 - on.F) < 1e-14
    off = d3.phase_state(1, 0.3 + 2j)
    assert off.branch_flag == "principal"
    assert abs(off.sqrtF ** 2 - off.F) < 1e-14


def test_branch_cut_warning():
    s = complex(0.5, math.sqrt(3) / 2)
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        d3.delta3_tilde_parts(1, s)
    assert any(issubclass(w.category, BranchCutWarning) for w in rec)


# ---------------------------------------------------------------- Delta3 itself

def test_delta3_matches_independent_product():
    for m, s in ((1, 0.3 + 5j), (2, 2.2 - 1j), (0, 0.7 + 12j)):
        c0 = oracles.kober_c2n1(0, s)
        if m == 0:
            c14 = c0
        else:
            w = d3.c14m_weights(m)
            c14 = sum(float(v) * (oracles.kober_c2n1(p // 2, s) if p else c0) for p, v in w.items())
        pref = cmath.exp(2 * (oracles.loggamma(s) - s * math.log(math.pi))) / d3.f2m(m, s)
        ref = pref * c0 * c14
        assert abs(d3.delta3(m, s).value - ref) < 1e-9 * abs(ref)


def test_delta3_pole_and_flags():
    with pytest.raises(PoleError):
        d3.delta3(1, 1)
    assert d3.delta3(1, 2 + 1e-8).near_pole
    assert not d3.delta3(1, 0.5 + 3j).near_pole


def test_log_ref_scaling():
    s = 0.5 + 80j
    ref = d3.line_log_scale(s)
    a = d3.delta3(1, s).value
    b = d3.delta3(1, s, log_ref=ref).value
    assert abs(a * math.exp(-2 * ref) - b) < 1e-12 * abs(b)


@pytest.mark.parametrize("m,s", [(1, 0.3 + 7j), (0, 0.4 + 9j), (2, 0.2 + 12j), (3, -0.5 + 30j)])
def test_functional_residual(m, s):
    assert d3.functional_residual(m, s) < 1e-8


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("t", [30.0, 57.3, 140.0])
def test_line_realness(m, t):
    s = complex(0.5, t)
    ref = d3.line_log_scale(s)
    d = d3.delta3(m, s, log_ref=ref).value
    rot = d * cmath.exp(1j * d3.phi2m(m, t))
    # the C(1,12) generator weights reach ~1e4, hence the looser bound
    assert abs(rot.imag) < 1e-9 * abs(rot)
    g = d3.g4m(m, s, log_ref=d3.line_log_scale(s + 2 * m))
    assert abs(g.imag) < 1e-9 * abs(g)


@pytest.mark.parametrize("m,s", [(1, complex(0.5, 30.0)), (2, 0.2 + 12j), (1, 2.5 + 1j)])
def test_tilde_parts_factor_delta3(m, s):
    ref = d3.line_log_scale(s)
    c, sv = d3.delta3_tilde_parts(m, s, log_ref=ref)
    d = d3.delta3(m, s, log_ref=ref).value
    assert abs(c * c - sv * sv - d) < 1e-10 * abs(d)


def test_tilde_parts_share_imaginary_part_on_line():
    for t in (30.0, 57.3):
        c, sv = d3.delta3_tilde_parts(1, complex(0.5, t), log_ref=d3.line_log_scale(complex(0.5, t)))
        assert abs(c.imag - sv.imag) < 1e-10 * max(abs(c), abs(sv))


def test_theta_angles_at_factor_zero():
    # at a C(1,4) zero C~ = S~ so the two angles coincide
    tc, ts = d3.theta_angles(1, 19.805994)
    assert abs(cmath.exp(1j * tc) - cmath.exp(1j * ts)) < 1e-3


# ---------------------------------------------------------------- derivatives

def test_richardson_on_analytic_function():
    d, err = d3._richardson(lambda h: cmath.exp(2 * h), 1e-2, 4)
    assert abs(d - 2) < 1e-10 and err < 1e-8
    with pytest.raises(DomainError):
        d3._richardson(lambda h: h, 1e-9, 3)


def test_derivative_consistent_with_analytic_continuation():
    s = 0.3 + 7j
    d, err = d3.delta3_derivative(1, s, full_output=True)
    # compare with a derivative taken along t: f'(s) = -i d/dt f
    h = 1e-4
    ft = (d3.delta3(1, s + 1j * h).value - d3.delta3(1, s - 1j * h).value) / (2j * h)
    assert abs(d - ft) < 1e-6 * abs(d)
    assert err < 1e-6 * abs(d)


def test_laurent_coefficients():
    assert abs(d3.laurent_coefficient(1, 1, 2) + 1.5964226) < 1e-5
    assert abs(d3.laurent_coefficient(1, 0, 1) + 0.7982113) < 1e-5
    assert abs(d3.laurent_coefficient(1, 2, 1) - 1.1698146) < 1e-5


# ---------------------------------------------------------------- large sigma

def test_large_sigma_approximation():
    for s in (5 + 2j, 6.5 + 4j, 4.0 + 1j):
        approx = d3.large_sigma_approx(s).full
        exact = d3.delta3(1, s).value
        assert abs(approx - exact) < 5e-3 * abs(exact)
        # the corrected last term follows the first lattice shells
        fixed = d3.large_sigma_approx(s, corrected=True).full
        assert abs(fixed - exact) < 0.2 * abs(approx - exact)
    with pytest.raises(DomainError):
        d3.large_sigma_approx(3 + 1j)


def test_null_trajectories_descend():
    for level in (math.pi, 1.5 * math.pi):
        ts = [d3.null_trajectory_t(sg, level) for sg in (4.0, 5.0, 6.0, 7.0)]
        assert all(a > b > 0 for a, b in zip(ts, ts[1:]))
    with pytest.raises(DegenerateError):
        d3.null_trajectory_t(5.0, 100 * math.pi, t_max=5.0)


def test_hyperbola_center_left_of_line():
    ts = d3.line_stationary_point(1, 19.80599, 21.02204)
    assert abs(ts - 20.0487) < 1e-3
    sigma, t = d3.hyperbola_center(1, ts)
    assert sigma < 0.5 and abs(t - ts) < 0.05
    grad_center = abs(d3.log_derivative(1, complex(sigma, t)))
    grad_line = abs(d3.log_derivative(1, complex(0.5, ts)))
    assert grad_center < 0.1 * grad_line


# ---------------------------------------------------------------- zero structure

def test_zero_checks_at_first_merged_zeros():
    # C(1,4) zero at 19.806 and zeta zero at 21.022
    assert d3.simple_zero_ratio(1, 19.805994, 1.216) > 0.1
    assert d3.tilde_floor_ratio(1, 19.805994) > 0.1
    assert d3.tilde_floor_ratio(1, 21.02204) > 0.1
