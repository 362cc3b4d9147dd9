import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from evbc.analytic import (BoundarySideData, asymptotic_V_a, asymptotic_V_b, boundary_side_data,
                           compatibility_V, constant_lambda_left, constant_lambda_right,
                           nonexistence_certificate, sampled_ratios, solve_step_interior)
from evbc.discretization import build_grid
from evbc.errors import DegenerateJump, ZeroDenominator
from evbc.problem import DomainSpec, ProblemSpec, step

REF = dict(d=0.1, m_in=2.0, m_L=1.0, m_R=3.0)


def left_terms(k, d, m_in, m_L):
    # the boundary-row expression term by term, ratio -e^{kd}
    E = k * (m_in - m_L)
    return m_in / (k * d * E) * (-math.exp(k * d)) + (m_L * k / (k * E) + m_in / (k * d * E))


def right_terms(k, d, m_in, m_R):
    E = k * (m_R - m_in)
    return m_in / (k * d * E) * (-math.exp(-k * d)) + (m_R * k / (k * E) + m_in / (k * d * E))


def test_lambda_left_unit_case():
    val = constant_lambda_left(1.0, 1.0, 2.0, 1.0)
    assert val == pytest.approx(3 - 2 * math.e, rel=1e-14)
    assert val == pytest.approx(left_terms(1.0, 1.0, 2.0, 1.0), rel=1e-14)
    assert val == pytest.approx(-2.43656, abs=5e-6)


def test_lambda_left_large_k():
    val = constant_lambda_left(300.0, 0.1, 2.0, 1.0)
    assert val < -1e6
    assert val == pytest.approx(left_terms(300.0, 0.1, 2.0, 1.0), rel=1e-12)


def test_lambda_left_small_kd_limit():
    k, d = 1.0, 1e-6
    # series: -1/k - m_in d / (2 (m_in - m_L)) + O(d^2)
    series = -1.0 / k - 2.0 * d / (2 * (2.0 - 1.0))
    assert constant_lambda_left(k, d, 2.0, 1.0) == pytest.approx(series, rel=1e-10)
    assert constant_lambda_left(k, d, 2.0, 1.0) == pytest.approx(-1.0 / k, rel=1e-5)


def test_lambda_left_overflow_sentinel():
    assert constant_lambda_left(4000.0, 0.1, 2.0, 1.0) == -math.inf
    assert constant_lambda_left(4000.0, 0.1, 0.5, 1.0) == math.inf


def test_lambda_right_unit_case():
    val = constant_lambda_right(1.0, 1.0, 2.0, 3.0)
    assert val == pytest.approx(2 * (1 - math.exp(-1)) + 3, rel=1e-14)
    assert val == pytest.approx(right_terms(1.0, 1.0, 2.0, 3.0), rel=1e-14)
    assert val == pytest.approx(4.26424, abs=5e-6)


def test_lambda_right_large_k():
    val = constant_lambda_right(300.0, 0.1, 2.0, 3.0)
    assert val < 0.05
    # 3/300 + (2/9000)(1 - e^{-30})
    assert val == pytest.approx(0.01 + 2 / 9000, rel=1e-12)
    assert val == pytest.approx(right_terms(300.0, 0.1, 2.0, 3.0), rel=1e-12)


def test_lambda_right_tends_to_zero():
    vals = [constant_lambda_right(k, 0.1, 2.0, 3.0) for k in (1e2, 1e3, 1e4, 1e5)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-4


def test_degenerate_constant_lambdas():
    with pytest.raises(DegenerateJump):
        constant_lambda_left(1.0, 0.1, 1.0, 1.0)
    with pytest.raises(DegenerateJump):
        constant_lambda_right(1.0, 0.1, 3.0, 3.0)


def test_large_k_limits():
    left = [constant_lambda_left(k, REF["d"], REF["m_in"], REF["m_L"]) for k in (50, 100, 200, 400)]
    assert all(b < a for a, b in zip(left, left[1:]))
    assert left[2] < -1e3
    consts = [k * constant_lambda_right(k, REF["d"], REF["m_in"], REF["m_R"]) for k in (100, 200, 400)]
    assert max(consts) / min(consts) - 1 < 0.2


@pytest.mark.parametrize("kd", [0.1, 1.0, 10.0])
def test_sampled_ratios(kd):
    grid = build_grid(-1.0, 10)
    k = kd / grid.d
    left, right = sampled_ratios(k, grid)
    assert left == pytest.approx(-math.exp(kd), rel=1e-12)
    assert right == pytest.approx(-math.exp(-kd), rel=1e-12)


@pytest.fixture
def dom():
    return DomainSpec(-1.0, 1.0, 3.0)


def test_smooth_solution_is_global_exponential(dom):
    spec = ProblemSpec(dom, step([-1, -0.6, -0.2, 0], [2.0, 1.2, 3.5]), k=2.0)
    f = solve_step_interior(spec)
    assert f.value(-0.5) == pytest.approx(math.exp(-1.0), rel=1e-14)
    for x in np.linspace(-1, 0, 21):
        assert f.value(x) == pytest.approx(math.exp(2 * x), rel=1e-13)
        assert f.derivative(x) == pytest.approx(2 * math.exp(2 * x), rel=1e-13)
    assert f.value(-1.0) == pytest.approx(math.exp(-2.0), rel=1e-10)
    assert f.value(0.0) == pytest.approx(1.0, rel=1e-10)


def test_flux_single_piece_equals_smooth(dom):
    s = step([-1, 0], [2.0])
    smooth = solve_step_interior(ProblemSpec(dom, s, 1.7))
    flux = solve_step_interior(ProblemSpec(dom, s, 1.7, "flux"))
    for x in np.linspace(-1, 0, 11):
        assert flux.value(x) == pytest.approx(smooth.value(x), rel=1e-12)
        assert flux.derivative(x) == pytest.approx(smooth.derivative(x), rel=1e-12)


def dense_flux_oracle(breakpoints, values, k):
    """Global-basis 2N x 2N solve: f_i = A_i e^{kx} + B_i e^{-kx}."""
    N = len(values)
    A = np.zeros((2 * N, 2 * N))
    rhs = np.zeros(2 * N)
    a = breakpoints[0]
    A[0, 0], A[0, 1], rhs[0] = math.exp(k * a), math.exp(-k * a), math.exp(k * a)
    row = 1
    for i in range(N - 1):
        y = breakpoints[i + 1]
        ep, em = math.exp(k * y), math.exp(-k * y)
        A[row, 2 * i:2 * i + 4] = [ep, em, -ep, -em]
        A[row + 1, 2 * i:2 * i + 4] = [values[i] * ep, -values[i] * em,
                                       -values[i + 1] * ep, values[i + 1] * em]
        row += 2
    A[row, 2 * N - 2], A[row, 2 * N - 1], rhs[row] = 1.0, 1.0, 1.0
    coef = np.linalg.solve(A, rhs)

    def f(x):
        i = min(max(int(np.searchsorted(breakpoints, x, side="left")), 1), N) - 1
        return coef[2 * i] * math.exp(k * x) + coef[2 * i + 1] * math.exp(-k * x)
    return f


def test_flux_two_pieces_against_dense_oracle(dom):
    bps, vals = (-1.0, -0.5, 0.0), (1.0, 2.0)
    f = solve_step_interior(ProblemSpec(dom, step(bps, vals), 1.0, "flux"))
    oracle = dense_flux_oracle(bps, vals, 1.0)
    for x in np.linspace(-1, 0, 41):
        assert f.value(x) == pytest.approx(oracle(x), rel=1e-12)
    assert flux_condition_residual(f, vals) < 1e-12


def flux_condition_residual(f, values):
    """Worst scaled violation of the 2N endpoint/interface conditions."""
    k = f.k
    worst = abs(f.value(f.pieces[0][0]) - math.exp(k * f.pieces[0][0])) / math.exp(k * f.pieces[0][0])
    for i in range(len(f.pieces) - 1):
        fl, dl = f.end_state(i)
        x0, _, A, B = f.pieces[i + 1]
        fr, dr = A + B, k * (A - B)
        scale = max(abs(fl), abs(fr), 1e-300)
        worst = max(worst, abs(fl - fr) / scale)
        fscale = max(abs(values[i] * dl), abs(values[i + 1] * dr), 1e-300)
        worst = max(worst, abs(values[i] * dl - values[i + 1] * dr) / fscale)
    end, _ = f.end_state(len(f.pieces) - 1)
    return max(worst, abs(end - 1.0))


def test_flux_random_profiles_satisfy_conditions(dom):
    rng = np.random.default_rng(4)
    for _ in range(60):
        N = int(rng.integers(1, 17))
        bps = np.concatenate(([-1.0], np.sort(rng.uniform(-1, 0, N - 1)), [0.0]))
        if np.any(np.diff(bps) <= 1e-6):
            continue
        vals = rng.uniform(0.5, 4, N)
        k = float(rng.choice([0.1, 1.0, 10.0]))
        f = solve_step_interior(ProblemSpec(dom, step(bps, vals), k, "flux"))
        assert flux_condition_residual(f, vals) < 1e-11
        oracle = dense_flux_oracle(tuple(bps), tuple(vals), k)
        for x in np.linspace(-1, 0, 9):
            assert f.value(x) == pytest.approx(oracle(x), rel=1e-9)


def test_boundary_side_data_smooth(dom):
    k = 2.0
    spec = ProblemSpec(dom, step([-1, -0.5, 0], [2.0, 1.0]), k)
    f = solve_step_interior(spec)
    b = boundary_side_data(f, spec, "b")
    assert b.f_val == pytest.approx(1.0, rel=1e-14)
    assert b.fx_minus == pytest.approx(k, rel=1e-14)
    assert b.fx_plus == pytest.approx(-k, rel=1e-14)
    a = boundary_side_data(f, spec, "a")
    assert a.fx_minus == pytest.approx(k * math.exp(-k), rel=1e-14)
    assert a.fx_plus == pytest.approx(k * math.exp(-k), rel=1e-14)
    assert (a.m_minus, a.m_plus, b.m_minus, b.m_plus) == (1.0, 2.0, 1.0, 3.0)
    with pytest.raises(ValueError):
        boundary_side_data(f, spec, "c")


def test_solver_requires_positive_k(dom):
    with pytest.raises(ValueError):
        solve_step_interior(ProblemSpec(dom, step([-1, 0], [2.0]), 0.0))


@pytest.mark.parametrize("k", [0.3, 1.0, 7.0])
def test_V_side_a_is_minus_k(dom, k):
    spec = ProblemSpec(dom, step([-1, 0], [2.0]), k)
    f = solve_step_interior(spec)
    assert compatibility_V(boundary_side_data(f, spec, "a"), k) == pytest.approx(-k, rel=1e-12)


def test_V_side_b_example():
    dom = DomainSpec(-1.0, 1.0, 3.0)
    spec = ProblemSpec(dom, step([-1, -0.5, 0], [2.0, 1.0]), 2.0)
    f = solve_step_interior(spec)
    assert compatibility_V(boundary_side_data(f, spec, "b"), 2.0) == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("c", [2.0, -0.5])
@pytest.mark.parametrize("mode", ["smooth", "flux"])
def test_V_normalization_invariant(dom, c, mode):
    spec = ProblemSpec(dom, step([-1, -0.3, 0], [2.0, 1.5]), 1.3, mode)
    f = solve_step_interior(spec)
    for side in "ab":
        base = compatibility_V(boundary_side_data(f, spec, side), 1.3)
        scaled = compatibility_V(boundary_side_data(f.scaled(c), spec, side), 1.3)
        assert scaled == pytest.approx(base, rel=1e-13)


def test_V_zero_denominator():
    data = BoundarySideData("a", 1.0, 2.0, 2.0, 1.0, 1.5, 1.5)
    with pytest.raises(ZeroDenominator):
        compatibility_V(data, 1.0)


def test_asymptotic_forms():
    for k in (0.1, 2.0, 50.0):
        assert asymptotic_V_a(k, 2.0, 1.0) == pytest.approx(-k, rel=1e-15)
        assert asymptotic_V_a(k, 0.5, 1.0) == pytest.approx(-k, rel=1e-15)
    assert asymptotic_V_b(3.0, 2.0, 2.0) == 0.0
    assert asymptotic_V_b(2.0, 1.0, 3.0) == 1.0
    with pytest.raises(DegenerateJump):
        asymptotic_V_a(1.0, 1.0, 1.0)


@pytest.mark.parametrize("k,m_N,m_R,expected", [(2.0, 1.0, 3.0, -3.0), (1.0, 1.0, 1.0, -1.0)])
def test_certificate_examples(k, m_N, m_R, expected):
    dom = DomainSpec(-1.0, 0.5, m_R)
    spec = ProblemSpec(dom, step([-1, -0.5, 0], [2.0, m_N]), k)
    rep = nonexistence_certificate(spec)
    # V_a = -k, V_b = k (m_R - m_N) / (m_N + m_R), evaluated independently
    assert rep.residual == pytest.approx(-k - k * (m_R - m_N) / (m_N + m_R), rel=1e-12)
    assert rep.residual == pytest.approx(expected, rel=1e-12)
    assert rep.closed_form_residual == pytest.approx(-2 * k * m_R / (m_N + m_R), rel=1e-15)
    assert rep.closed_form_residual == pytest.approx(expected, rel=1e-15)
    assert not rep.eigenvalue_exists
    assert abs(rep.m_R_root) <= 1e-12
    assert rep.lambda_a * rep.V_a == pytest.approx(1.0)
    if rep.V_b == 0:
        assert rep.lambda_b == math.inf
    else:
        assert rep.lambda_b * rep.V_b == pytest.approx(1.0)


def test_certificate_degenerate(dom):
    with pytest.raises(DegenerateJump):
        nonexistence_certificate(ProblemSpec(dom, step([-1, 0], [1.0]), 1.0))
    # no jump at b is allowed: V(b) = 0
    rep = nonexistence_certificate(ProblemSpec(dom, step([-1, -0.5, 0], [2.0, 3.0]), 1.0))
    assert rep.V_b == 0.0 and rep.residual == pytest.approx(-1.0, rel=1e-14)


def test_certificate_flux_mode_reports(dom):
    rep = nonexistence_certificate(ProblemSpec(dom, step([-1, -0.5, 0], [2.0, 1.0]), 2.0, "flux"))
    assert math.isnan(rep.closed_form_residual)
    assert rep.eigenvalue_exists == (abs(rep.residual) <= 1e-9)
    assert math.isfinite(rep.m_R_root)


@settings(max_examples=150, deadline=None)
@given(N=st.integers(1, 16), data=st.data(),
       m_R=st.floats(0.5, 4.0), m_L=st.floats(0.5, 4.0), k=st.sampled_from([0.1, 1.0, 10.0]))
def test_smooth_certificate_population(N, data, m_R, m_L, k):
    vals = data.draw(st.lists(st.floats(0.5, 4.0), min_size=N, max_size=N))
    if abs(vals[0] - m_L) < 1e-6 or abs(vals[-1] - m_R) < 1e-6:
        return
    dom = DomainSpec(-1.0, m_L, m_R)
    spec = ProblemSpec(dom, step(np.linspace(-1, 0, N + 1), vals), k)
    rep = nonexistence_certificate(spec)
    assert rep.V_a == pytest.approx(-k, rel=1e-10)
    assert rep.residual == pytest.approx(-2 * k * m_R / (vals[-1] + m_R), rel=1e-12)
    assert rep.residual < 0
    assert not rep.eigenvalue_exists
    assert abs(rep.m_R_root) <= 1e-12
