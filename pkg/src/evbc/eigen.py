"""Eigenvalues of real nonsymmetric tridiagonal matrices.

:func:`qr_eigenvalues` runs Francis double-shift QR on a dense copy of the
(upper Hessenberg) tridiagonal matrix. :func:`roots_oracle` is an independent
check for small orders: characteristic polynomial coefficients from the
three-term recurrence, roots by Aberth-Ehrlich iteration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .discretization import TriMatrix
from .errors import ConvergenceFailure, OracleDegree

ORACLE_MAX_ORDER = 8


@dataclass(frozen=True)
class ComplexSpectrum:
    values: tuple
    iterations: int = 0
    deflations: int = 0

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=complex)


def spectrum_key(z: complex):
    """Ascending real part; conjugates stay adjacent (negative imaginary part first)."""
    return (z.real, abs(z.imag), z.imag)


def _sorted_spectrum(values, **stats) -> ComplexSpectrum:
    vals = sorted((complex(v) for v in values), key=spectrum_key)
    return ComplexSpectrum(tuple(vals), **stats)


def _closed_form_2x2(p, q, r, s):
    """Eigenvalues of [[p, q], [r, s]] without cancellation in the real case."""
    half = 0.5 * (p - s)
    disc = half * half + q * r
    mean = 0.5 * (p + s)
    if disc >= 0:
        root = math.sqrt(disc)
        big = half + math.copysign(root, half)
        if big == 0.0:
            return mean, mean
        # second root from the product avoids cancellation
        lam1 = s + big
        lam2 = s - q * r / big
        return lam1, lam2
    root = math.sqrt(-disc)
    return complex(mean, -root), complex(mean, root)


def qr_eigenvalues(T: TriMatrix, tol: float = 1e-12, max_iter: int = 100) -> ComplexSpectrum:
    """All eigenvalues of a real tridiagonal matrix.

    Args:
        T: the matrix.
        tol: relative deflation threshold; ``h[l, l-1]`` is treated as zero
            once ``|h[l, l-1]| <= tol * (|h[l-1, l-1]| + |h[l, l]|)``.
        max_iter: QR sweeps allowed per deflation before giving up.

    Raises:
        ConvergenceFailure: no deflation after ``max_iter`` sweeps.
    """
    n = T.order
    if not (np.all(np.isfinite(T.diag)) and np.all(np.isfinite(T.sub)) and np.all(np.isfinite(T.super))):
        raise ValueError("matrix has non-finite entries")
    if n == 0:
        return ComplexSpectrum(())
    if n == 1:
        return ComplexSpectrum((complex(T.diag[0]),))
    if n == 2:
        lam = _closed_form_2x2(T.diag[0], T.super[0], T.sub[0], T.diag[1])
        return _sorted_spectrum(lam)

    h = T.to_dense()
    wr = np.zeros(n)
    wi = np.zeros(n)
    anorm = float(np.sum(np.abs(h)))
    total_its = 0
    deflations = 0
    shift = 0.0
    nn = n - 1
    x = y = w = 0.0
    while nn >= 0:
        its = 0
        while True:
            # find the lowest negligible subdiagonal above row nn
            l = nn
            while l >= 1:
                s = abs(h[l - 1, l - 1]) + abs(h[l, l])
                if s == 0.0:
                    s = anorm
                if abs(h[l, l - 1]) <= tol * s:
                    h[l, l - 1] = 0.0
                    break
                l -= 1
            x = h[nn, nn]
            if l == nn:
                wr[nn] = x + shift
                nn -= 1
                deflations += 1
                break
            y = h[nn - 1, nn - 1]
            w = h[nn, nn - 1] * h[nn - 1, nn]
            if l == nn - 1:
                lam = _closed_form_2x2(h[nn - 1, nn - 1], h[nn - 1, nn], h[nn, nn - 1], h[nn, nn])
                for idx, v in zip((nn - 1, nn), lam):
                    wr[idx] = complex(v).real + shift
                    wi[idx] = complex(v).imag
                nn -= 2
                deflations += 1
                break
            if its == max_iter:
                raise ConvergenceFailure(
                    f"no deflation after {max_iter} QR sweeps at active block ending {nn}")
            if its > 0 and its % 10 == 0:
                # exceptional shift
                shift += x
                h[np.arange(nn + 1), np.arange(nn + 1)] -= x
                s = abs(h[nn, nn - 1]) + abs(h[nn - 1, nn - 2])
                x = y = 0.75 * s
                w = -0.4375 * s * s
            its += 1
            total_its += 1
            # look for two consecutive small subdiagonals
            m = nn - 2
            while m >= l:
                z = h[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / h[m + 1, m] + h[m, m + 1]
                q = h[m + 1, m + 1] - z - r - s
                r = h[m + 2, m + 1]
                s = abs(p) + abs(q) + abs(r)
                p, q, r = p / s, q / s, r / s
                if m == l:
                    break
                u = abs(h[m, m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(h[m - 1, m - 1]) + abs(z) + abs(h[m + 1, m + 1]))
                if u <= np.finfo(float).eps * v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                h[i, i - 2] = 0.0
                if i != m + 2:
                    h[i, i - 3] = 0.0
            # chase the bulge
            for k in range(m, nn):
                if k != m:
                    p = h[k, k - 1]
                    q = h[k + 1, k - 1]
                    r = h[k + 2, k - 1] if k != nn - 1 else 0.0
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p, q, r = p / x, q / x, r / x
                s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
                if s == 0.0:
                    continue
                if k == m:
                    if l != m:
                        h[k, k - 1] = -h[k, k - 1]
                else:
                    h[k, k - 1] = -s * x
                p += s
                x, y, z = p / s, q / s, r / s
                q, r = q / p, r / p
                last = k == nn - 1
                cols = slice(k, nn + 1)
                pr = h[k, cols] + q * h[k + 1, cols]
                if not last:
                    pr = pr + r * h[k + 2, cols]
                    h[k + 2, cols] -= pr * z
                h[k + 1, cols] -= pr * y
                h[k, cols] -= pr * x
                rows = slice(l, min(nn, k + 3) + 1)
                pc = x * h[rows, k] + y * h[rows, k + 1]
                if not last:
                    pc = pc + z * h[rows, k + 2]
                    h[rows, k + 2] -= pc * r
                h[rows, k + 1] -= pc * q
                h[rows, k] -= pc
    return _sorted_spectrum(wr + 1j * wi, iterations=total_its, deflations=deflations)


def charpoly_eval_scaled(T: TriMatrix, z: complex, with_derivative: bool = False):
    """``det(T - z I)`` as ``(mantissa, exponent)`` with value ``mantissa * 2**exponent``.

    With ``with_derivative`` the d/dz derivative is returned too, sharing the
    same exponent: ``(mantissa, dmantissa, exponent)``.
    """
    n = T.order
    d_prev, d_cur = 0j, 1.0 + 0j           # D_{-1} (unused), D_0
    g_prev, g_cur = 0j, 0j                 # derivatives
    exp2 = 0
    for j in range(n):
        c = T.sub[j - 1] * T.super[j - 1] if j > 0 else 0.0
        t = T.diag[j] - z
        d_new = t * d_cur - c * d_prev
        g_new = -d_cur + t * g_cur - c * g_prev
        d_prev, d_cur = d_cur, d_new
        g_prev, g_cur = g_cur, g_new
        big = max(abs(d_cur), abs(d_prev), abs(g_cur), abs(g_prev))
        if big > 2.0**500 or (0.0 < big < 2.0**-500):
            e = math.frexp(big)[1]
            scale = math.ldexp(1.0, -e)
            d_prev, d_cur, g_prev, g_cur = d_prev * scale, d_cur * scale, g_prev * scale, g_cur * scale
            exp2 += e
    if with_derivative:
        return d_cur, g_cur, exp2
    return d_cur, exp2


def charpoly_eval(T: TriMatrix, z: complex) -> complex:
    """``det(T - z I)`` by the three-term recurrence (may overflow to inf for huge orders)."""
    mant, exp2 = charpoly_eval_scaled(T, z)
    try:
        scale = 2.0**exp2
    except OverflowError:
        scale = math.inf
    return mant * scale if mant != 0 else 0j


def charpoly_coeffs(T: TriMatrix) -> np.ndarray:
    """Coefficients of ``det(z I - T)``, highest degree first (monic)."""
    prev = np.array([1.0])
    cur = np.array([1.0])
    for j in range(T.order):
        c = T.sub[j - 1] * T.super[j - 1] if j > 0 else 0.0
        nxt = np.polysub(np.polymul([1.0, -T.diag[j]], cur), c * prev) if j > 0 \
            else np.array([1.0, -T.diag[0]])
        prev, cur = cur, nxt
    return cur


def aberth_roots(coeffs, rtol: float = 1e-13, max_iter: int = 500) -> np.ndarray:
    """All roots of a polynomial by Aberth-Ehrlich simultaneous iteration."""
    c = np.asarray(coeffs, dtype=complex)
    c = c / c[0]
    n = len(c) - 1
    if n == 0:
        return np.array([], dtype=complex)
    dc = np.polyder(c)
    # Fujiwara bound: every root lies within this radius of the origin
    radius = 2.0 * max(abs(c[j]) ** (1.0 / j) for j in range(1, n + 1))
    radius = max(radius, 1e-3)
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    z = radius * np.exp(1j * angles) * (1 + 0.01 * np.arange(n) / n)
    for _ in range(max_iter):
        pz = np.polyval(c, z)
        dpz = np.polyval(dc, z)
        done = True
        new = z.copy()
        for i in range(n):
            if pz[i] == 0:
                continue
            ratio = pz[i] / dpz[i] if dpz[i] != 0 else complex(1e-8 * (1 + abs(z[i])))
            others = z[i] - np.delete(z, i)
            others = others[others != 0]
            denom = 1 - ratio * np.sum(1.0 / others)
            step = ratio / denom if denom != 0 else ratio
            new[i] = z[i] - step
            if abs(step) > rtol * max(1.0, abs(new[i])):
                done = False
        z = new
        if done:
            break
    return z


def roots_oracle(T: TriMatrix) -> ComplexSpectrum:
    """Brute-force spectrum for orders up to 8 (independent of the QR path)."""
    if T.order > ORACLE_MAX_ORDER:
        raise OracleDegree(f"oracle limited to order <= {ORACLE_MAX_ORDER}, got {T.order}")
    roots = aberth_roots(charpoly_coeffs(T))
    # roots of a real polynomial: snap near-real values and symmetrize pairs
    cleaned = []
    for r in roots:
        cleaned.append(complex(r.real, 0.0) if abs(r.imag) <= 1e-14 * max(1.0, abs(r)) else complex(r))
    return _sorted_spectrum(cleaned)


def spectrum_residual(T: TriMatrix, s: ComplexSpectrum) -> float:
    """Worst relative Newton correction ``|p(lam)| / (|p'(lam)| (1 + |lam|))`` over ``s``.

    ``p`` is evaluated through the scaled determinant recurrence, so the
    common exponent cancels in the ratio. An exact root gives 0.
    """
    worst = 0.0
    for lam in s:
        d, g, _ = charpoly_eval_scaled(T, lam, with_derivative=True)
        if d == 0:
            continue
        if g == 0:
            return math.inf
        worst = max(worst, abs(d) / (abs(g) * (1.0 + abs(lam))))
    return worst


def match_spectra(u, v) -> float:
    """Max distance after greedy nearest-neighbour pairing."""
    u = list(complex(x) for x in u)
    v = list(complex(x) for x in v)
    if len(u) != len(v):
        raise ValueError("spectra differ in length")
    worst = 0.0
    for x in u:
        j = min(range(len(v)), key=lambda i: abs(v[i] - x))
        worst = max(worst, abs(v[j] - x))
        v.pop(j)
    return worst
