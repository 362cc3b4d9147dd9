"""Domains, coefficient profiles and boundary jump coefficients.

Positions are dimensionless with the right endpoint fixed at ``b = 0`` and the
left endpoint ``a < 0``. Outside ``[a, 0]`` the coefficient takes the plateau
values ``m_L`` (left) and ``m_R`` (right).

Step profiles index their pieces left to right, so piece 1 touches ``a`` and
piece N touches ``b``. The finite-difference grid in :mod:`evbc.discretization`
indexes nodes right to left; the two conventions are never mixed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Mapping, Sequence, Union

import numpy as np

from .errors import DegenerateJump, InvalidDomain, OutOfDomain

FAMILIES = ("affine", "exponential-blend", "tanh-blend", "tabulated")
FAMILY_PARAMS = {
    "affine": ("intercept", "slope"),
    "exponential-blend": ("low", "high", "rate"),
    "tanh-blend": ("low", "high", "center", "width"),
    "tabulated": ("x", "m"),
}
INTERFACE_MODELS = ("smooth", "flux")

# dense sampling used for bound checks and sup-norm distances
_DENSE = 10_001


@dataclass(frozen=True)
class DomainSpec:
    a: float
    m_L: float
    m_R: float
    b: float = 0.0

    def __post_init__(self):
        if not self.a < 0:
            raise InvalidDomain(f"left endpoint a must be negative, got {self.a}")
        if self.b != 0.0:
            raise InvalidDomain(f"right endpoint b is fixed at 0, got {self.b}")
        if not (self.m_L > 0 and self.m_R > 0):
            raise InvalidDomain(f"plateaus must be positive, got m_L={self.m_L}, m_R={self.m_R}")


@dataclass(frozen=True)
class ContinuousProfile:
    """A continuous coefficient m(x) on ``[domain.a, 0]``.

    Families and their parameters:

    * ``affine``: ``intercept + slope * x``
    * ``exponential-blend``: ``low + (high - low) * expm1(rate (x - a)) / expm1(-rate a)``
    * ``tanh-blend``: ``low + (high - low) * (1 + tanh((x - center) / width)) / 2``
    * ``tabulated``: piecewise-linear interpolation of the table ``(x, m)``;
      the derivative interpolates centered differences taken on the table's
      own nodes.

    Values are checked against ``[m_L, m_R]`` by dense sampling on
    construction.
    """

    domain: DomainSpec
    family: str
    params: Mapping[str, Union[float, tuple]] = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown profile family {self.family!r}; expected one of {FAMILIES}")
        expected = FAMILY_PARAMS[self.family]
        missing = [p for p in expected if p not in self.params]
        extra = [p for p in self.params if p not in expected]
        if missing or extra:
            raise ValueError(f"{self.family} profile needs parameters {expected}; "
                             f"missing {missing}, unexpected {extra}")
        params = dict(self.params)
        if self.family == "tabulated":
            xs = tuple(float(v) for v in params["x"])
            ms = tuple(float(v) for v in params["m"])
            if len(xs) != len(ms) or len(xs) < 2:
                raise ValueError("tabulated profile needs matching x and m tables of length >= 2")
            if any(x1 <= x0 for x0, x1 in zip(xs, xs[1:])):
                raise ValueError("tabulated x must be strictly increasing")
            if xs[0] > self.domain.a or xs[-1] < 0.0:
                raise ValueError("tabulated x must cover [a, 0]")
            params = {"x": xs, "m": ms}
            object.__setattr__(self, "_slopes", tuple(np.gradient(np.array(ms), np.array(xs))))
        else:
            params = {k: float(v) for k, v in params.items()}
            if self.family == "exponential-blend" and params["rate"] == 0.0:
                raise ValueError("exponential-blend rate must be nonzero")
            if self.family == "tanh-blend" and params["width"] <= 0.0:
                raise ValueError("tanh-blend width must be positive")
        object.__setattr__(self, "params", params)

        xs = np.linspace(self.domain.a, 0.0, _DENSE)
        vals = self.value_at(xs)
        slack = 1e-12 * max(self.domain.m_L, self.domain.m_R)
        if np.any(vals < self.domain.m_L - slack) or np.any(vals > self.domain.m_R + slack):
            raise ValueError(
                f"profile leaves [m_L, m_R] = [{self.domain.m_L}, {self.domain.m_R}]: "
                f"sampled range [{vals.min()}, {vals.max()}]")

    @property
    def a(self) -> float:
        return self.domain.a

    def value_at(self, x):
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.family == "affine":
            out = p["intercept"] + p["slope"] * x
        elif self.family == "exponential-blend":
            a = self.domain.a
            out = p["low"] + (p["high"] - p["low"]) * np.expm1(p["rate"] * (x - a)) / math.expm1(-p["rate"] * a)
        elif self.family == "tanh-blend":
            out = p["low"] + 0.5 * (p["high"] - p["low"]) * (1.0 + np.tanh((x - p["center"]) / p["width"]))
        else:
            out = np.interp(x, p["x"], p["m"])
        return float(out) if out.ndim == 0 else out

    def derivative_at(self, x):
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.family == "affine":
            out = np.full_like(x, p["slope"])
        elif self.family == "exponential-blend":
            a, r = self.domain.a, p["rate"]
            out = (p["high"] - p["low"]) * r * np.exp(r * (x - a)) / math.expm1(-r * a)
        elif self.family == "tanh-blend":
            out = 0.5 * (p["high"] - p["low"]) / p["width"] / np.cosh((x - p["center"]) / p["width"]) ** 2
        else:
            out = np.interp(x, p["x"], self._slopes)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class StepProfile:
    """Piecewise-constant coefficient: ``values[i]`` on ``(breakpoints[i], breakpoints[i+1])``."""

    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        ys = tuple(float(y) for y in self.breakpoints)
        ms = tuple(float(m) for m in self.values)
        if len(ms) < 1 or len(ys) != len(ms) + 1:
            raise ValueError("need N >= 1 values and N + 1 breakpoints")
        if any(y1 <= y0 for y0, y1 in zip(ys, ys[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if ys[-1] != 0.0:
            raise InvalidDomain(f"last breakpoint must be 0, got {ys[-1]}")
        if ys[0] >= 0.0:
            raise InvalidDomain("first breakpoint must be negative")
        if any(m <= 0 for m in ms):
            raise ValueError("step values must be positive")
        object.__setattr__(self, "breakpoints", ys)
        object.__setattr__(self, "values", ms)

    @property
    def a(self) -> float:
        return self.breakpoints[0]

    @property
    def n_pieces(self) -> int:
        return len(self.values)

    def piece_index(self, x):
        """0-based piece containing ``x``; interior breakpoints belong to the left piece."""
        idx = np.searchsorted(self.breakpoints, x, side="left")
        return np.clip(idx, 1, self.n_pieces) - 1

    def value_at(self, x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.values)[self.piece_index(x)]
        return float(out) if out.ndim == 0 else out


Profile = Union[ContinuousProfile, StepProfile]


@dataclass(frozen=True)
class ProblemSpec:
    domain: DomainSpec
    profile: Profile
    k: float
    interface_model: Literal["smooth", "flux"] = "smooth"

    def __post_init__(self):
        if not self.k >= 0:
            raise ValueError(f"wavenumber must be non-negative, got {self.k}")
        if self.interface_model not in INTERFACE_MODELS:
            raise ValueError(f"interface_model must be one of {INTERFACE_MODELS}")
        if isinstance(self.profile, ContinuousProfile):
            if self.profile.domain != self.domain:
                raise InvalidDomain("profile was built on a different domain")
        elif self.profile.a != self.domain.a:
            raise InvalidDomain(f"step profile starts at {self.profile.a}, domain at {self.domain.a}")

    @property
    def m_plus_a(self) -> float:
        """Interior trace m(a+)."""
        if isinstance(self.profile, StepProfile):
            return self.profile.values[0]
        return self.profile.value_at(self.domain.a)

    @property
    def m_minus_b(self) -> float:
        """Interior trace m(0-)."""
        if isinstance(self.profile, StepProfile):
            return self.profile.values[-1]
        return self.profile.value_at(0.0)

    def with_k(self, k: float) -> "ProblemSpec":
        return ProblemSpec(self.domain, self.profile, k, self.interface_model)


@dataclass(frozen=True)
class BoundaryData:
    E_a: float
    E_b: float
    m_plus_a: float
    m_minus_b: float
    degenerate: bool = False

    def require_nondegenerate(self):
        if self.degenerate:
            raise DegenerateJump(f"jump coefficient vanishes: E(a)={self.E_a}, E(b)={self.E_b}")


def eval_profile(p: Profile, x: float) -> float:
    if not p.a <= x <= 0.0:
        raise OutOfDomain(f"x={x} outside [{p.a}, 0]")
    return p.value_at(x)


def sample_step(p: ContinuousProfile, N: int) -> StepProfile:
    """Step approximation with N equal pieces, each valued at its midpoint."""
    if N < 1:
        raise ValueError(f"need at least one piece, got N={N}")
    ys = np.linspace(p.a, 0.0, N + 1)
    ys[0], ys[-1] = p.a, 0.0
    mids = 0.5 * (ys[:-1] + ys[1:])
    return StepProfile(tuple(ys), tuple(np.atleast_1d(p.value_at(mids))))


def _refinement(p: ContinuousProfile, s: StepProfile) -> np.ndarray:
    nodes = list(s.breakpoints)
    if p.family == "tabulated":
        nodes += [x for x in p.params["x"] if s.a < x < 0.0]
    return np.unique(np.array(nodes))


def profile_distance(p: ContinuousProfile, s: StepProfile, norm: Literal["sup", "L1"] = "sup") -> float:
    """Distance between a continuous profile and a step profile on ``[a, 0]``.

    ``sup`` samples every closed piece densely (at least 10^4 points overall)
    and compares against that piece's value, so breakpoint conventions do not
    matter. ``L1`` uses the composite midpoint rule on the common refinement of
    both partitions.
    """
    if not math.isclose(p.a, s.a, rel_tol=0, abs_tol=1e-12 * abs(p.a)):
        raise InvalidDomain("profiles live on different domains")
    if norm == "sup":
        per = max(2, math.ceil(_DENSE / s.n_pieces)) + 1
        worst = 0.0
        for (y0, y1), m in zip(zip(s.breakpoints, s.breakpoints[1:]), s.values):
            xs = np.linspace(y0, y1, per)
            worst = max(worst, float(np.max(np.abs(p.value_at(xs) - m))))
        return worst
    if norm == "L1":
        nodes = _refinement(p, s)
        cells = max(8, math.ceil(4 * _DENSE / (len(nodes) - 1)))
        total = 0.0
        for y0, y1 in zip(nodes, nodes[1:]):
            h = (y1 - y0) / cells
            xs = y0 + h * (np.arange(cells) + 0.5)
            m = s.value_at(0.5 * (y0 + y1))
            total += h * float(np.sum(np.abs(p.value_at(xs) - m)))
        return total
    raise ValueError(f"unknown norm {norm!r}")


def jump_coeffs(spec: ProblemSpec, eps_jump: float = 1e-12) -> BoundaryData:
    """Boundary jump coefficients ``E(a) = k (m(a+) - m_L)`` and ``E(b) = k (m_R - m(0-))``.

    A vanishing jump at ``k > 0`` is flagged on the result rather than raised;
    consumers call :meth:`BoundaryData.require_nondegenerate`.
    """
    k = spec.k
    m_pa, m_mb = spec.m_plus_a, spec.m_minus_b
    E_a = k * (m_pa - spec.domain.m_L)
    E_b = k * (spec.domain.m_R - m_mb)
    degenerate = k > 0 and (abs(E_a) <= eps_jump or abs(E_b) <= eps_jump)
    return BoundaryData(E_a, E_b, m_pa, m_mb, degenerate)


def affine(domain: DomainSpec, intercept: float, slope: float) -> ContinuousProfile:
    return ContinuousProfile(domain, "affine", {"intercept": intercept, "slope": slope})


def constant(domain: DomainSpec, value: float) -> ContinuousProfile:
    return affine(domain, value, 0.0)


def step(breakpoints: Sequence[float], values: Sequence[float]) -> StepProfile:
    return StepProfile(tuple(breakpoints), tuple(values))
