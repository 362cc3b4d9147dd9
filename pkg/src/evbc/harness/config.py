"""Flat ``key = value`` run configuration.

Lines are ``dotted.key = value``; ``#`` starts a comment. Lists are comma
separated. Unknown keys are rejected. Example::

    domain.a = -1
    domain.m_L = 1
    domain.m_R = 3
    profile.family = affine
    profile.intercept = 2.5
    profile.slope = 1
    k = 2
    M = 32
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import ConfigError, InvalidDomain
from ..problem import (FAMILY_PARAMS, INTERFACE_MODELS, ContinuousProfile, DomainSpec,
                       ProblemSpec, StepProfile)

STEP_FAMILY = "step"
_LIST_PARAMS = {"x", "m", "breakpoints", "values"}

_SCALAR_KEYS = {
    "domain.a", "domain.m_L", "domain.m_R", "profile.family",
    "k", "k.values", "k.min", "k.max", "k.steps", "k.spacing",
    "M", "M.list", "N.list", "interface_model",
    "ksweep.m_in", "ksweep.d", "refine.j",
    "tol.eps_sing", "tol.eps_jump", "tol.compat", "tol.qr", "tol.qr_max_iter",
    "output",
}


@dataclass(frozen=True)
class RunConfig:
    a: float
    m_L: float
    m_R: float
    profile_family: Optional[str] = None
    profile_params: tuple = ()
    k_values: tuple = ()
    M_values: tuple = ()
    N_values: tuple = ()
    interface_model: str = "smooth"
    ksweep_m_in: Optional[float] = None
    ksweep_d: Optional[float] = None
    refine_j: int = 3
    eps_sing: float = 1e-10
    eps_jump: float = 1e-12
    tol_compat: float = 1e-9
    qr_tol: float = 1e-12
    qr_max_iter: int = 100
    output: Optional[str] = None

    def domain(self) -> DomainSpec:
        return DomainSpec(self.a, self.m_L, self.m_R)

    def profile(self):
        if self.profile_family is None:
            raise ConfigError("profile.family", "this command needs a profile")
        params = dict(self.profile_params)
        if self.profile_family == STEP_FAMILY:
            return StepProfile(params["breakpoints"], params["values"])
        return ContinuousProfile(self.domain(), self.profile_family, params)

    def problem(self, k: float) -> ProblemSpec:
        return ProblemSpec(self.domain(), self.profile(), k, self.interface_model)

    def digest(self) -> str:
        return hashlib.sha256(serialize(self).encode()).hexdigest()


def _fmt(v) -> str:
    if isinstance(v, (tuple, list)):
        return ", ".join(_fmt(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def serialize(cfg: RunConfig) -> str:
    """Canonical text form; ``parse_config(serialize(cfg)) == cfg``."""
    out = [
        f"domain.a = {_fmt(cfg.a)}",
        f"domain.m_L = {_fmt(cfg.m_L)}",
        f"domain.m_R = {_fmt(cfg.m_R)}",
    ]
    if cfg.profile_family is not None:
        out.append(f"profile.family = {cfg.profile_family}")
        out += [f"profile.{name} = {_fmt(v)}" for name, v in cfg.profile_params]
    for key, values in (("k.values", cfg.k_values), ("M.list", cfg.M_values), ("N.list", cfg.N_values)):
        if values:
            out.append(f"{key} = {_fmt(values)}")
    out.append(f"interface_model = {cfg.interface_model}")
    if cfg.ksweep_m_in is not None:
        out.append(f"ksweep.m_in = {_fmt(cfg.ksweep_m_in)}")
    if cfg.ksweep_d is not None:
        out.append(f"ksweep.d = {_fmt(cfg.ksweep_d)}")
    out += [
        f"refine.j = {cfg.refine_j}",
        f"tol.eps_sing = {_fmt(cfg.eps_sing)}",
        f"tol.eps_jump = {_fmt(cfg.eps_jump)}",
        f"tol.compat = {_fmt(cfg.tol_compat)}",
        f"tol.qr = {_fmt(cfg.qr_tol)}",
        f"tol.qr_max_iter = {cfg.qr_max_iter}",
    ]
    if cfg.output is not None:
        out.append(f"output = {cfg.output}")
    return "\n".join(out) + "\n"


def _tokenize(text: str) -> dict:
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", "expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}", "empty key")
        if key in entries:
            raise ConfigError(key, "duplicate key")
        entries[key] = value
    return entries


def _float(key, raw) -> float:
    try:
        v = float(raw)
    except ValueError:
        raise ConfigError(key, f"not a number: {raw!r}") from None
    if not np.isfinite(v):
        raise ConfigError(key, "must be finite")
    return v


def _int(key, raw) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(key, f"not an integer: {raw!r}") from None


def _list(key, raw, conv):
    items = [s.strip() for s in raw.split(",") if s.strip()]
    if not items:
        raise ConfigError(key, "empty list")
    return tuple(conv(key, s) for s in items)


def _k_values(e: dict) -> tuple:
    forms = [f for f in ("k", "k.values", "k.min") if f in e]
    if len(forms) > 1:
        raise ConfigError("k", "give exactly one of k, k.values, or k.min/k.max/k.steps")
    if "k" in e:
        ks = (_float("k", e.pop("k")),)
    elif "k.values" in e:
        ks = _list("k.values", e.pop("k.values"), _float)
    elif "k.min" in e:
        for key in ("k.max", "k.steps"):
            if key not in e:
                raise ConfigError(key, "required with k.min")
        lo, hi = _float("k.min", e.pop("k.min")), _float("k.max", e.pop("k.max"))
        steps = _int("k.steps", e.pop("k.steps"))
        spacing = e.pop("k.spacing", "linear")
        if steps < 1:
            raise ConfigError("k.steps", "empty range")
        if hi < lo:
            raise ConfigError("k.max", "must not be below k.min")
        if spacing == "linear":
            ks = tuple(float(v) for v in np.linspace(lo, hi, steps))
        elif spacing == "log":
            if lo <= 0:
                raise ConfigError("k.min", "must be positive for log spacing")
            ks = tuple(float(v) for v in np.geomspace(lo, hi, steps))
        else:
            raise ConfigError("k.spacing", "must be 'linear' or 'log'")
    else:
        return ()
    for key in ("k.max", "k.steps", "k.spacing"):
        if key in e:
            raise ConfigError(key, "only valid together with k.min")
    if any(k <= 0 for k in ks):
        raise ConfigError("k", "wavenumbers must be positive")
    return ks


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document.

    Raises:
        ConfigError: carrying the offending key and the reason.
    """
    e = _tokenize(text)
    family = e.get("profile.family")
    allowed = set(_SCALAR_KEYS)
    if family is not None:
        names = ("breakpoints", "values") if family == STEP_FAMILY else FAMILY_PARAMS.get(family)
        if names is None:
            raise ConfigError("profile.family", f"unknown family {family!r}")
        allowed |= {f"profile.{n}" for n in names}
    for key in e:
        if key not in allowed:
            raise ConfigError(key, "unknown key")

    for key in ("domain.a", "domain.m_L", "domain.m_R"):
        if key not in e:
            raise ConfigError(key, "required")
    a = _float("domain.a", e.pop("domain.a"))
    m_L = _float("domain.m_L", e.pop("domain.m_L"))
    m_R = _float("domain.m_R", e.pop("domain.m_R"))
    if a >= 0:
        raise ConfigError("domain.a", "domain.a must be negative")
    if m_L <= 0:
        raise ConfigError("domain.m_L", "must be positive")
    if m_R <= 0:
        raise ConfigError("domain.m_R", "must be positive")

    params = ()
    if family is not None:
        e.pop("profile.family")
        collected = []
        for n in names:
            key = f"profile.{n}"
            if key not in e:
                raise ConfigError(key, "required for this family")
            raw = e.pop(key)
            collected.append((n, _list(key, raw, _float) if n in _LIST_PARAMS else _float(key, raw)))
        params = tuple(collected)

    kwargs = {}
    kwargs["k_values"] = _k_values(e)
    if "M" in e and "M.list" in e:
        raise ConfigError("M", "give either M or M.list")
    if "M" in e:
        kwargs["M_values"] = (_int("M", e.pop("M")),)
    elif "M.list" in e:
        kwargs["M_values"] = _list("M.list", e.pop("M.list"), _int)
    if any(M < 2 for M in kwargs.get("M_values", ())):
        raise ConfigError("M", "grids need M >= 2")
    if "N.list" in e:
        kwargs["N_values"] = _list("N.list", e.pop("N.list"), _int)
        if any(N < 1 for N in kwargs["N_values"]):
            raise ConfigError("N.list", "piece counts must be >= 1")
    if "interface_model" in e:
        model = e.pop("interface_model")
        if model not in INTERFACE_MODELS:
            raise ConfigError("interface_model", f"must be one of {INTERFACE_MODELS}")
        kwargs["interface_model"] = model
    for key, name in (("ksweep.m_in", "ksweep_m_in"), ("ksweep.d", "ksweep_d"),
                      ("tol.eps_sing", "eps_sing"), ("tol.eps_jump", "eps_jump"),
                      ("tol.compat", "tol_compat"), ("tol.qr", "qr_tol")):
        if key in e:
            v = _float(key, e.pop(key))
            if v <= 0:
                raise ConfigError(key, "must be positive")
            kwargs[name] = v
    for key, name in (("refine.j", "refine_j"), ("tol.qr_max_iter", "qr_max_iter")):
        if key in e:
            v = _int(key, e.pop(key))
            if v < 1:
                raise ConfigError(key, "must be >= 1")
            kwargs[name] = v
    if "output" in e:
        kwargs["output"] = e.pop("output")

    cfg = RunConfig(a, m_L, m_R, family, params, **kwargs)
    if family is not None:
        try:
            prof = cfg.profile()
            if family == STEP_FAMILY and prof.a != a:
                raise ConfigError("profile.breakpoints", "first breakpoint must equal domain.a")
        except (ValueError, InvalidDomain) as exc:
            raise ConfigError("profile", str(exc)) from None
    return cfg


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)
