"""The experiments behind each CLI subcommand.

Every command takes a validated :class:`RunConfig` and returns a
:class:`CsvTable`; rows come out in config order so output is deterministic.
"""
from __future__ import annotations

import math

from .. import __version__
from ..analytic import constant_lambda_left, constant_lambda_right, nonexistence_certificate
from ..discretization import assemble_P, assemble_Q, build_grid, reduce_to_standard
from ..eigen import match_spectra, qr_eigenvalues, spectrum_residual
from ..errors import ConfigError, DegenerateJump
from ..problem import (ContinuousProfile, ProblemSpec, StepProfile, jump_coeffs, profile_distance,
                       sample_step)
from .config import RunConfig
from .table import CsvTable


def _new_table(cfg: RunConfig, command: str, header) -> CsvTable:
    table = CsvTable(list(header))
    table.note("tool", f"evbc {__version__}")
    table.note("command", command)
    table.note("config_sha256", cfg.digest())
    return table


def _require(values, key):
    if not values:
        raise ConfigError(key, "required for this command")
    return values


def _continuous(cfg: RunConfig) -> ContinuousProfile:
    prof = cfg.profile()
    if not isinstance(prof, ContinuousProfile):
        raise ConfigError("profile.family", "this command needs a continuous profile")
    return prof


def _interior_value(cfg: RunConfig) -> float:
    if cfg.ksweep_m_in is not None:
        return cfg.ksweep_m_in
    prof = cfg.profile() if cfg.profile_family else None
    if isinstance(prof, ContinuousProfile) and prof.family == "affine" and prof.params["slope"] == 0:
        return prof.params["intercept"]
    if isinstance(prof, StepProfile) and len(set(prof.values)) == 1:
        return prof.values[0]
    raise ConfigError("ksweep.m_in", "needed unless the profile is constant")


def cmd_ksweep(cfg: RunConfig) -> CsvTable:
    """Both constant-coefficient lambda expressions across the k range."""
    ks = _require(cfg.k_values, "k")
    m_in = _interior_value(cfg)
    if cfg.ksweep_d is not None:
        d = cfg.ksweep_d
    elif cfg.M_values:
        d = -cfg.a / cfg.M_values[0]
    else:
        raise ConfigError("ksweep.d", "needed unless M is given")
    table = _new_table(cfg, "ksweep", ("k", "lambda_left", "lambda_right", "abs_gap"))
    table.note("m_in", repr(float(m_in)))
    table.note("d", repr(float(d)))
    for k in ks:
        left = constant_lambda_left(k, d, m_in, cfg.m_L)
        right = constant_lambda_right(k, d, m_in, cfg.m_R)
        table.add_row((k, left, right, abs(left - right)))
    return table


def cmd_stepstudy(cfg: RunConfig) -> CsvTable:
    """Step approximations of a continuous profile: distance shrinks, compatibility never holds."""
    prof = _continuous(cfg)
    Ns = _require(cfg.N_values, "N.list")
    ks = _require(cfg.k_values, "k")
    if len(ks) != 1:
        raise ConfigError("k", "stepstudy takes a single wavenumber")
    header = ("N", "dist_sup", "dist_l1", "V_a", "V_b", "residual", "closed_form_residual", "exists_flag")
    table = _new_table(cfg, "stepstudy", header)
    for N in Ns:
        s = sample_step(prof, N)
        d_sup = profile_distance(prof, s, "sup")
        d_l1 = profile_distance(prof, s, "L1")
        spec = ProblemSpec(cfg.domain(), s, ks[0], cfg.interface_model)
        try:
            jump_coeffs(spec, cfg.eps_jump).require_nondegenerate()
            rep = nonexistence_certificate(spec, cfg.tol_compat, cfg.eps_jump)
        except DegenerateJump as exc:
            table.note("error", f"N={N}: DegenerateJump: {exc}")
            table.add_row((N, d_sup, d_l1) + (math.nan,) * 5)
            continue
        table.add_row((N, d_sup, d_l1, rep.V_a, rep.V_b, rep.residual,
                       rep.closed_form_residual, int(rep.eigenvalue_exists)))
    return table


def _spectrum(cfg: RunConfig, M: int):
    ks = _require(cfg.k_values, "k")
    if len(ks) != 1:
        raise ConfigError("k", "this command takes a single wavenumber")
    _continuous(cfg)
    spec = cfg.problem(ks[0])
    grid = build_grid(cfg.a, M)
    T = reduce_to_standard(assemble_P(spec, grid, cfg.eps_jump), assemble_Q(spec, grid), cfg.eps_sing)
    return T, qr_eigenvalues(T, cfg.qr_tol, cfg.qr_max_iter)


def _smallest(values, j):
    return sorted(values, key=lambda z: (abs(z), z.real, z.imag))[:j]


def cmd_refine(cfg: RunConfig) -> CsvTable:
    """The j smallest-modulus discrete eigenvalues under grid refinement."""
    Ms = _require(cfg.M_values, "M")
    j = cfg.refine_j
    header = (["M"] + [f"re_lambda_{i}" for i in range(1, j + 1)]
              + [f"im_lambda_{i}" for i in range(1, j + 1)] + ["cauchy_diff"])
    table = _new_table(cfg, "refine", header)
    prev = None
    for M in Ms:
        _, spec = _spectrum(cfg, M)
        vals = _smallest(spec.values, j)
        vals += [complex(math.nan, math.nan)] * (j - len(vals))
        diff = match_spectra(vals, prev) if prev is not None else math.nan
        table.add_row([M] + [v.real for v in vals] + [v.imag for v in vals] + [diff])
        prev = vals
    return table


def cmd_eig(cfg: RunConfig) -> CsvTable:
    """Full spectrum of ``Q^{-1} P`` for a single grid."""
    Ms = _require(cfg.M_values, "M")
    if len(Ms) != 1:
        raise ConfigError("M", "eig takes a single grid size")
    T, spec = _spectrum(cfg, Ms[0])
    table = _new_table(cfg, "eig", ("index", "re_lambda", "im_lambda"))
    table.note("spectrum_residual", repr(float(spectrum_residual(T, spec))))
    table.note("qr_iterations", spec.iterations)
    for i, lam in enumerate(spec.values):
        table.add_row((i, lam.real, lam.imag))
    return table


COMMANDS = {
    "ksweep": cmd_ksweep,
    "stepstudy": cmd_stepstudy,
    "refine": cmd_refine,
    "eig": cmd_eig,
}
