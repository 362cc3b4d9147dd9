"""Closed-form solutions and the non-existence certificate.

For a constant coefficient the boundary rows of the discrete problem give two
explicit expressions for lambda, one per endpoint, when the eigenfunction is
``e^{kx}``. For a step coefficient the interior equation reduces to
``-f'' + k^2 f = 0`` on every piece, so candidate eigenfunctions are sums of
exponentials and the compatibility ratios ``V(a)``, ``V(b)`` can be computed
exactly.

Piece amplitudes use a locally scaled basis, ``A e^{k (x - x_left)} + B e^{-k (x - x_left)}``,
so that propagation across a piece never multiplies by more than
``e^{k * width}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import brentq

from .discretization import Grid
from .errors import DegenerateJump, SingularTransfer, ZeroDenominator
from .problem import ProblemSpec, StepProfile, jump_coeffs

# e^{kd} is evaluated directly only up to this exponent
MAX_EXPONENT = 300.0
TOL_COMPAT = 1e-9


def constant_lambda_left(k: float, d: float, m_in: float, m_L: float) -> float:
    """lambda from the boundary row at ``a`` with the ratio ``-f_{M-1}/f_M = -e^{kd}``.

    Returns a signed infinity once ``k d`` exceeds :data:`MAX_EXPONENT`.
    """
    if not (k > 0 and d > 0):
        raise ValueError("need k > 0 and d > 0")
    E_a = k * (m_in - m_L)
    if E_a == 0:
        raise DegenerateJump("m_in equals m_L: no jump at a")
    if k * d > MAX_EXPONENT:
        return math.copysign(math.inf, -E_a)
    return (m_L * k - m_in * math.expm1(k * d) / d) / (k * E_a)


def constant_lambda_right(k: float, d: float, m_in: float, m_R: float) -> float:
    """lambda from the boundary row at ``b`` with the ratio ``-f_1/f_0 = -e^{-kd}``."""
    if not (k > 0 and d > 0):
        raise ValueError("need k > 0 and d > 0")
    E_b = k * (m_R - m_in)
    if E_b == 0:
        raise DegenerateJump("m_in equals m_R: no jump at b")
    return (m_R * k - m_in * math.expm1(-k * d) / d) / (k * E_b)


def sampled_ratios(k: float, grid: Grid):
    """``(-f_{M-1}/f_M, -f_1/f_0)`` for ``f(x) = e^{kx}`` sampled on the grid nodes."""
    f = np.exp(k * grid.nodes)
    return -f[-2] / f[-1], -f[1] / f[0]


@dataclass(frozen=True)
class PiecewiseExponential:
    """Piecewise solution of ``-f'' + k^2 f = 0`` on ``[a, 0]``.

    ``pieces`` holds ``(x_left, x_right, A, B)`` per piece, left to right,
    with ``f = A e^{k (x - x_left)} + B e^{-k (x - x_left)}`` on the piece.
    """

    k: float
    pieces: tuple

    @property
    def breakpoints(self):
        return (self.pieces[0][0],) + tuple(p[1] for p in self.pieces)

    def _piece(self, x):
        ys = self.breakpoints
        if not ys[0] <= x <= ys[-1]:
            raise ValueError(f"x={x} outside [{ys[0]}, {ys[-1]}]")
        i = int(np.clip(np.searchsorted(ys, x, side="left"), 1, len(self.pieces))) - 1
        return self.pieces[i]

    def value(self, x: float) -> float:
        x0, _, A, B = self._piece(x)
        t = self.k * (x - x0)
        return A * math.exp(t) + B * math.exp(-t)

    def derivative(self, x: float) -> float:
        x0, _, A, B = self._piece(x)
        t = self.k * (x - x0)
        return self.k * (A * math.exp(t) - B * math.exp(-t))

    def end_state(self, i: int):
        """``(f, f_x)`` at the right end of piece ``i``."""
        x0, x1, A, B = self.pieces[i]
        t = self.k * (x1 - x0)
        return A * math.exp(t) + B * math.exp(-t), self.k * (A * math.exp(t) - B * math.exp(-t))

    def scaled(self, c: float) -> "PiecewiseExponential":
        return PiecewiseExponential(self.k, tuple((x0, x1, c * A, c * B) for x0, x1, A, B in self.pieces))


def _propagate(k, widths, values, A1, B1):
    """Amplitudes of every piece given the first piece's, with continuity of f and m f_x."""
    amps = [(A1, B1)]
    for i in range(len(widths) - 1):
        A, B = amps[-1]
        ep, em = math.exp(k * widths[i]), math.exp(-k * widths[i])
        f = A * ep + B * em
        g = (A * ep - B * em) * values[i] / values[i + 1]
        amps.append((0.5 * (f + g), 0.5 * (f - g)))
    return amps


def solve_step_interior(spec: ProblemSpec) -> PiecewiseExponential:
    """Eigenfunction candidate for a step profile, normalized so ``f(a) = e^{ka}``, ``f(0) = 1``.

    In ``smooth`` mode the solution is the single C^1 function ``e^{kx}``. In
    ``flux`` mode ``f`` and ``m f_x`` are continuous at interior breakpoints
    and the first piece's amplitudes come from a 2x2 endpoint system.
    """
    prof = spec.profile
    if not isinstance(prof, StepProfile):
        raise TypeError("solve_step_interior needs a StepProfile")
    k = spec.k
    if not k > 0:
        raise ValueError("need k > 0")
    ys = prof.breakpoints
    if spec.interface_model == "smooth":
        pieces = tuple((y0, y1, math.exp(k * y0), 0.0) for y0, y1 in zip(ys, ys[1:]))
        return PiecewiseExponential(k, pieces)

    widths = [y1 - y0 for y0, y1 in zip(ys, ys[1:])]
    # linearity: end value of f is a combination of the end values for unit A1 and unit B1
    ends = []
    for A1, B1 in ((1.0, 0.0), (0.0, 1.0)):
        A, B = _propagate(k, widths, prof.values, A1, B1)[-1]
        ends.append(A * math.exp(k * widths[-1]) + B * math.exp(-k * widths[-1]))
    system = np.array([[1.0, 1.0], ends])
    rhs = np.array([math.exp(k * prof.a), 1.0])
    norms = np.max(np.abs(system), axis=1, keepdims=True)
    if np.any(norms == 0) or not np.all(np.isfinite(system)):
        raise SingularTransfer("degenerate endpoint-matching system")
    scaled = system / norms
    if abs(np.linalg.det(scaled)) < 1e-14:
        raise SingularTransfer(f"endpoint-matching determinant {np.linalg.det(scaled):.3e}")
    A1, B1 = np.linalg.solve(scaled, rhs / norms[:, 0])
    amps = _propagate(k, widths, prof.values, float(A1), float(B1))
    pieces = tuple((y0, y1, A, B) for (y0, y1), (A, B) in zip(zip(ys, ys[1:]), amps))
    return PiecewiseExponential(k, pieces)


@dataclass(frozen=True)
class BoundarySideData:
    side: Literal["a", "b"]
    f_val: float
    fx_minus: float
    fx_plus: float
    E: float
    m_minus: float
    m_plus: float


def boundary_side_data(f: PiecewiseExponential, spec: ProblemSpec, side: str) -> BoundarySideData:
    """Traces at an endpoint: interior derivative from ``f``, exterior one from the far field."""
    bd = jump_coeffs(spec)
    k = f.k
    if side == "a":
        x0, _, A, B = f.pieces[0]
        val = A + B
        return BoundarySideData("a", val, k * val, k * (A - B), bd.E_a, spec.domain.m_L, bd.m_plus_a)
    if side == "b":
        val, fx = f.end_state(len(f.pieces) - 1)
        return BoundarySideData("b", val, fx, -k * val, bd.E_b, bd.m_minus_b, spec.domain.m_R)
    raise ValueError(f"side must be 'a' or 'b', got {side!r}")


def compatibility_V(data: BoundarySideData, k: float) -> float:
    """``V = k E f / (m^- f_x^- - m^+ f_x^+)``; the boundary condition forces ``sigma = V``."""
    left = data.m_minus * data.fx_minus
    right = data.m_plus * data.fx_plus
    denom = left - right
    if denom == 0 or abs(denom) <= 1e-14 * (abs(left) + abs(right)):
        raise ZeroDenominator(f"flux jump vanishes at side {data.side}")
    return k * data.E * data.f_val / denom


def asymptotic_V_a(k: float, m_1: float, m_L: float) -> float:
    if m_1 == m_L:
        raise DegenerateJump("m_1 equals m_L")
    return k * (m_1 - m_L) / (m_L - m_1)


def asymptotic_V_b(k: float, m_N: float, m_R: float) -> float:
    return k * (m_R - m_N) / (m_N + m_R)


@dataclass(frozen=True)
class CompatibilityReport:
    V_a: float
    V_b: float
    lambda_a: float
    lambda_b: float
    residual: float
    closed_form_residual: float
    eigenvalue_exists: bool
    m_R_root: float


def _reciprocal(v: float) -> float:
    return 1.0 / v if v != 0 else math.inf


def nonexistence_certificate(spec: ProblemSpec, tol_compat: float = TOL_COMPAT,
                             eps_jump: float = 1e-12) -> CompatibilityReport:
    """Compare ``V(a)`` and ``V(b)`` for the step-profile eigenfunction candidate.

    Also locates the right plateau value ``m_R`` at which the two ratios would
    agree, keeping the interior solution fixed. In smooth mode this is 0,
    which no admissible plateau can take.

    Only a vanishing jump at ``a`` is fatal here; with no jump at ``b`` the
    ratio ``V(b)`` is simply 0.
    """
    if not spec.k > 0:
        raise ValueError("need k > 0")
    bd = jump_coeffs(spec, eps_jump)
    if abs(bd.E_a) <= eps_jump:
        raise DegenerateJump(f"no jump at a: m(a+) = m_L = {spec.domain.m_L}")
    k = spec.k
    f = solve_step_interior(spec)
    side_a = boundary_side_data(f, spec, "a")
    side_b = boundary_side_data(f, spec, "b")
    V_a = compatibility_V(side_a, k)
    V_b = compatibility_V(side_b, k)
    residual = V_a - V_b

    m_N = spec.profile.values[-1]
    m_R = spec.domain.m_R
    if spec.interface_model == "smooth":
        closed = -2.0 * k * m_R / (m_N + m_R)
    else:
        closed = math.nan

    def residual_at(mr):
        data = BoundarySideData("b", side_b.f_val, side_b.fx_minus, side_b.fx_plus,
                                k * (mr - m_N), m_N, mr)
        return V_a - compatibility_V(data, k)

    return CompatibilityReport(
        V_a=V_a, V_b=V_b,
        lambda_a=_reciprocal(V_a), lambda_b=_reciprocal(V_b),
        residual=residual,
        closed_form_residual=closed,
        eigenvalue_exists=abs(residual) <= tol_compat,
        m_R_root=_plateau_root(residual_at, side_b, V_a, k, m_N, m_R),
    )


def _plateau_root(residual_at, side_b, V_a, k, m_N, m_R):
    lo, hi = -0.5 * m_N, 2.0 * max(m_R, m_N)
    try:
        r_lo, r_hi = residual_at(lo), residual_at(hi)
    except ZeroDenominator:
        r_lo = r_hi = math.nan
    if r_lo * r_hi < 0:
        return brentq(residual_at, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    # residual is linear-fractional in the plateau; solve it directly
    f, fxm = side_b.f_val, side_b.fx_minus
    denom = k * f * (V_a - k)
    if denom == 0:
        return math.nan
    return -m_N * (k * k * f + V_a * fxm) / denom
