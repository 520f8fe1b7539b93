"""Double-precision complex Gamma and Riemann zeta, zeta zeros on the critical line.

Gamma uses the g=7, n=9 Lanczos approximation with reflection for Re s < 1/2.
Zeta is evaluated through the alternating eta series with Borwein's
acceleration for Re s >= 1/2 and through the functional equation below.
"""
from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

LOG_2PI = math.log(2 * math.pi)
MAX_ZERO_HEIGHT = 60.0
MIN_ZETA_PRIME = 1e-6


class PoleError(ValueError):
    pass


_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _is_nonpositive_integer(s: complex) -> bool:
    return s.imag == 0 and s.real <= 0 and s.real == math.floor(s.real)


def log_gamma_lanczos(z: complex) -> complex:
    """log Gamma(z) for Re z >= 1/2 (branch is not the principal one)."""
    z = complex(z) - 1
    x = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        x += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return 0.5 * LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def gamma_complex(s: complex) -> complex:
    s = complex(s)
    if _is_nonpositive_integer(s):
        raise PoleError(f"Gamma has a pole at {s.real:g}")
    if s.real < 0.5:
        return math.pi / (cmath.sin(math.pi * s) * gamma_complex(1 - s))
    return cmath.exp(log_gamma_lanczos(s))


@functools.lru_cache(maxsize=None)
def _borwein_weights(n: int) -> np.ndarray:
    """``e_k = (-1)^k (d_n - d_k) / d_n`` for k < n, exact integers rounded once."""
    d = []
    term = Fraction(1, n)  # i = 0 term of (n+i-1)! 4^i / ((n-i)! (2i)!), divided by n!/n
    acc = Fraction(0)
    for i in range(n + 1):
        if i > 0:
            term *= Fraction(4 * (n + i - 1) * (n - i + 1), (2 * i) * (2 * i - 1))
        acc += term
        d.append(acc)
    dn = d[n]
    return np.array([(-1) ** k * float((dn - d[k]) / dn) for k in range(n)])


def _borwein_terms(s: complex) -> int:
    t = abs(s.imag)
    # error ~ 3 (1 + 2|t|) e^{pi |t|} / (3 + sqrt 8)^n relative, for Re s >= 1/2
    need = math.pi * t + math.log(3 * (1 + 2 * t)) + 40.0
    return max(20, math.ceil(need / math.log(3 + math.sqrt(8))))


def _eta(s: complex) -> complex:
    n = _borwein_terms(s)
    w = _borwein_weights(n)
    k = np.arange(1, n + 1, dtype=np.float64)
    return complex(np.sum(w * np.exp(-s * np.log(k))))


def _zeta_eta(s: complex) -> complex:
    return _eta(s) / (1 - cmath.exp((1 - s) * math.log(2)))


# Points 1 + 2 pi i k / log 2 (k != 0) are zeros of 1 - 2^{1-s}; there eta/(1-2^{1-s})
# is 0/0, so average over a circle instead (mean value property, radius r).
_CIRCLE_R = 0.25
_CIRCLE_N = 24
_CIRCLE = [_CIRCLE_R * cmath.exp(2j * math.pi * (j + 0.5) / _CIRCLE_N) for j in range(_CIRCLE_N)]


def zeta_complex(s: complex) -> complex:
    s = complex(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    if s.real < 0.5:
        if s.imag == 0 and s.real == math.floor(s.real) and s.real <= 0:
            m = int(-s.real)
            if m == 0:
                return complex(-0.5)
            if m % 2 == 0:
                return 0j
        one_minus = 1 - s
        return (
            cmath.exp(s * math.log(2) + (s - 1) * math.log(math.pi))
            * cmath.sin(math.pi * s / 2)
            * gamma_complex(one_minus)
            * zeta_complex(one_minus)
        )
    if abs(s - 1) > 0.5 and abs(1 - cmath.exp((1 - s) * math.log(2))) < 0.1:
        return sum(_zeta_eta(s + c) for c in _CIRCLE) / _CIRCLE_N
    return _zeta_eta(s)


def zeta_derivative(s: complex, h: float = 0.05, levels: int = 4) -> complex:
    """zeta'(s) from central differences refined by a Richardson tableau.

    ``levels`` halvings of ``h``; the error is O(h^(2*levels)).
    """
    s = complex(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    if abs(s - 1) <= h * 1.01:
        raise PoleError("step straddles the pole at s = 1")
    rows: list[list[complex]] = []
    step = h
    for i in range(levels):
        row = [(zeta_complex(s + step) - zeta_complex(s - step)) / (2 * step)]
        for j in range(1, i + 1):
            f = 4.0**j
            row.append((f * row[j - 1] - rows[i - 1][j - 1]) / (f - 1))
        rows.append(row)
        step /= 2
    return rows[-1][-1]


def riemann_siegel_theta(t: float) -> float:
    """Asymptotic theta(t); adequate for t >= 5 (used only for the sign of Z)."""
    return (
        t / 2 * math.log(t / (2 * math.pi))
        - t / 2
        - math.pi / 8
        + 1 / (48 * t)
        + 7 / (5760 * t**3)
        + 31 / (80640 * t**5)
    )


def hardy_z(t: float) -> float:
    return (cmath.exp(1j * riemann_siegel_theta(t)) * zeta_complex(complex(0.5, t))).real


@dataclass(frozen=True)
class ZetaZero:
    gamma: float
    zeta_prime: complex

    @property
    def rho(self) -> complex:
        return complex(0.5, self.gamma)


_SCAN_START = 10.0  # no zeros below 14.13
_SCAN_STEP = 0.05


@functools.lru_cache(maxsize=8)
def _zeros_upto(T: float) -> tuple[ZetaZero, ...]:
    zeros = []
    ts = np.arange(_SCAN_START, T + _SCAN_STEP, _SCAN_STEP)
    ts = ts[ts <= T]
    if ts.size == 0 or ts[-1] < T:
        ts = np.append(ts, T)
    vals = [hardy_z(float(t)) for t in ts]
    for a, b, fa, fb in zip(ts[:-1], ts[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            g = float(a)
        elif fa * fb < 0:
            g = brentq(hardy_z, float(a), float(b), xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
        else:
            continue
        dz = zeta_derivative(complex(0.5, g))
        if abs(dz) < MIN_ZETA_PRIME:
            raise ArithmeticError(f"zero at gamma={g} looks multiple (|zeta'| = {abs(dz):.2e})")
        zeros.append(ZetaZero(g, dz))
    return tuple(zeros)


def find_zeta_zeros(T: float) -> list[ZetaZero]:
    """Zeros 1/2 + i gamma with 0 < gamma <= T, in increasing order."""
    if not 0 < T <= MAX_ZERO_HEIGHT:
        raise ValueError(f"T must lie in (0, {MAX_ZERO_HEIGHT:g}]")
    return list(_zeros_upto(float(T)))


def write_zero_cache(path: str | Path, zeros: list[ZetaZero]) -> None:
    with Path(path).open("w") as fh:
        for z in zeros:
            fh.write(f"{z.gamma:.12g} {z.zeta_prime.real:.12g} {z.zeta_prime.imag:.12g}\n")


def read_zero_cache(path: str | Path) -> list[ZetaZero]:
    out = []
    for line in Path(path).read_text().splitlines():
        if line.strip():
            g, re_, im_ = (float(x) for x in line.split())
            out.append(ZetaZero(g, complex(re_, im_)))
    if any(b.gamma <= a.gamma for a, b in zip(out, out[1:])):
        raise ValueError("zero cache is not sorted by gamma")
    return out


def check_zero_cache(path: str | Path, tol: float = 1e-6) -> list[ZetaZero]:
    """Load a zero cache and compare it against a fresh computation."""
    cached = read_zero_cache(path)
    if not cached:
        return cached
    fresh = find_zeta_zeros(min(MAX_ZERO_HEIGHT, cached[-1].gamma + 0.5))
    if len(fresh) < len(cached):
        raise ValueError("zero cache holds more zeros than recomputation finds")
    for c, f in zip(cached, fresh):
        if abs(c.gamma - f.gamma) > tol or abs(c.zeta_prime - f.zeta_prime) > tol * max(1.0, abs(f.zeta_prime)):
            raise ValueError(f"zero cache mismatch near gamma={f.gamma:.9f}")
    return cached


@dataclass(frozen=True)
class ZetaConstants:
    kappa: float
    zeta_prime_minus1: float
    C: float


@functools.lru_cache(maxsize=1)
def constants() -> ZetaConstants:
    kappa = (zeta_complex(3) / zeta_complex(2)).real
    zp = zeta_derivative(-1).real
    return ZetaConstants(kappa, zp, -2 * zp - LOG_2PI / 6)
