"""Finite-difference discretization of the pencil ``P f = lambda Q f``.

Nodes are indexed right to left: ``x_0 = b = 0`` and ``x_M = a``, so array
index equals node index. Row 0 of ``P`` carries the boundary condition at
``b``, row M the one at ``a``; interior rows discretize
``-(m f_x)_x + k^2 m f`` with the conservative midpoint stencil. ``Q`` is
diagonal with unit corners and ``k^2 m_x(x_i)`` inside.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateJump, InvalidDomain, SingularQ
from .problem import ContinuousProfile, ProblemSpec, jump_coeffs


@dataclass(frozen=True)
class Grid:
    M: int
    d: float
    nodes: np.ndarray

    @property
    def a(self) -> float:
        return float(self.nodes[-1])


@dataclass(frozen=True)
class TriMatrix:
    """Tridiagonal matrix stored by bands.

    ``sub[i]`` is entry ``(i+1, i)``, ``super[i]`` is entry ``(i, i+1)``.
    """

    diag: np.ndarray
    sub: np.ndarray
    super: np.ndarray

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=float)
        sub = np.asarray(self.sub, dtype=float)
        sup = np.asarray(self.super, dtype=float)
        n = diag.shape[0]
        if sub.shape != (max(n - 1, 0),) or sup.shape != (max(n - 1, 0),):
            raise ValueError("off-diagonal bands must have length order - 1")
        for name, arr in (("diag", diag), ("sub", sub), ("super", sup)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def order(self) -> int:
        return self.diag.shape[0]

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.sub, -1) + np.diag(self.super, 1)

    def matvec(self, f) -> np.ndarray:
        f = np.asarray(f)
        out = self.diag * f
        out[:-1] += self.super * f[1:]
        out[1:] += self.sub * f[:-1]
        return out

    def shifted(self, c: float) -> "TriMatrix":
        return TriMatrix(self.diag + c, self.sub, self.super)

    @classmethod
    def from_dense(cls, A) -> "TriMatrix":
        A = np.asarray(A, dtype=float)
        return cls(np.diag(A).copy(), np.diag(A, -1).copy(), np.diag(A, 1).copy())

    def bands_csv(self) -> str:
        """Band entries as CSV with columns ``row, col, value``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["row", "col", "value"])
        n = self.order
        for i in range(n):
            if i > 0:
                w.writerow([i, i - 1, repr(float(self.sub[i - 1]))])
            w.writerow([i, i, repr(float(self.diag[i]))])
            if i < n - 1:
                w.writerow([i, i + 1, repr(float(self.super[i]))])
        return buf.getvalue()


@dataclass(frozen=True)
class DiagMatrix:
    diag: np.ndarray

    @property
    def order(self) -> int:
        return len(self.diag)


def build_grid(a: float, M: int) -> Grid:
    if not a < 0:
        raise InvalidDomain(f"left endpoint must be negative, got a={a}")
    if M < 2:
        raise InvalidDomain(f"need at least 2 intervals, got M={M}")
    d = -a / M
    nodes = -d * np.arange(M + 1)
    nodes[0], nodes[-1] = 0.0, a
    return Grid(M, d, nodes)


def _check_jumps(spec: ProblemSpec, eps_jump: float):
    if not spec.k > 0:
        raise ValueError("assembly requires k > 0")
    bd = jump_coeffs(spec, eps_jump)
    if bd.degenerate:
        raise DegenerateJump(f"|E(a)|={abs(bd.E_a):.3e}, |E(b)|={abs(bd.E_b):.3e} must exceed {eps_jump}")
    return bd


def boundary_rows(spec: ProblemSpec, d: float, eps_jump: float = 1e-12):
    """Closed-form boundary entries ``(a_00, a_01, a_{M,M-1}, a_MM)``."""
    bd = _check_jumps(spec, eps_jump)
    k, m_L, m_R = spec.k, spec.domain.m_L, spec.domain.m_R
    a00 = m_R * k / (k * bd.E_b) + bd.m_minus_b / (k * d * bd.E_b)
    a01 = -bd.m_minus_b / (k * d * bd.E_b)
    aMm = -bd.m_plus_a / (k * d * bd.E_a)
    aMM = m_L * k / (k * bd.E_a) + bd.m_plus_a / (k * d * bd.E_a)
    return a00, a01, aMm, aMM


def _interior_bands(profile: ContinuousProfile, k: float, grid: Grid):
    x = grid.nodes[1:-1]
    d = grid.d
    m_right = profile.value_at(x + d / 2)   # couples to f_{i-1}
    m_left = profile.value_at(x - d / 2)    # couples to f_{i+1}
    diag = (m_right + m_left) / d**2 + k**2 * profile.value_at(x)
    return -m_left / d**2, diag, -m_right / d**2


def assemble_P(spec: ProblemSpec, grid: Grid, eps_jump: float = 1e-12) -> TriMatrix:
    if not isinstance(spec.profile, ContinuousProfile):
        raise TypeError("assembly needs a continuous profile")
    a00, a01, aMm, aMM = boundary_rows(spec, grid.d, eps_jump)
    M = grid.M
    diag = np.empty(M + 1)
    sub = np.empty(M)
    sup = np.empty(M)
    lo, mid, hi = _interior_bands(spec.profile, spec.k, grid)
    diag[0], sup[0] = a00, a01
    diag[M], sub[M - 1] = aMM, aMm
    diag[1:M] = mid
    # row i: sub[i-1] multiplies f_{i-1} (right neighbour), super[i] multiplies f_{i+1}
    sub[0:M - 1] = hi
    sup[1:M] = lo
    return TriMatrix(diag, sub, sup)


def assemble_Q(spec: ProblemSpec, grid: Grid) -> DiagMatrix:
    if not isinstance(spec.profile, ContinuousProfile):
        raise TypeError("Q needs a continuous profile with a derivative")
    diag = np.ones(grid.M + 1)
    diag[1:-1] = spec.k**2 * spec.profile.derivative_at(grid.nodes[1:-1])
    return DiagMatrix(diag)


def reduce_to_standard(P: TriMatrix, Q: DiagMatrix, eps_sing: float = 1e-10) -> TriMatrix:
    """Form ``Q^{-1} P`` by row scaling.

    ``eps_sing`` is relative to the largest ``|Q|`` entry.
    """
    q = np.asarray(Q.diag, dtype=float)
    if q.shape[0] != P.order:
        raise ValueError("P and Q orders differ")
    thresh = eps_sing * np.max(np.abs(q))
    bad = np.flatnonzero(np.abs(q) < thresh) if thresh > 0 else np.arange(len(q))
    if bad.size:
        raise SingularQ(int(bad[0]), float(q[bad[0]]))
    return TriMatrix(P.diag / q, P.sub / q[1:], P.super / q[:-1])


def apply_interior_stencil(spec: ProblemSpec, grid: Grid, f_samples) -> np.ndarray:
    """Interior rows 1..M-1 of ``P`` applied to nodal samples.

    Returns the ``M - 1`` interior values, in node order.
    """
    f = np.asarray(f_samples)
    if f.shape[0] != grid.M + 1:
        raise ValueError(f"expected {grid.M + 1} samples, got {f.shape[0]}")
    lo, mid, hi = _interior_bands(spec.profile, spec.k, grid)
    return hi * f[:-2] + mid * f[1:-1] + lo * f[2:]
