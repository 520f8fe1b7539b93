"""The diagonal partition function log Z(beta, beta) and what hangs off it.

Every diagonal sum over primitive vectors is collapsed to a sum over levels
``m = v1 + v2``: level 1 holds the two axis vectors, level ``m >= 2`` holds
``phi(m)`` vectors.  Mixed moments ``sum_{gcd(x, m) = 1} x^a (m - x)^b`` come from
closed forms in ``phi(m)`` and ``J(m) = prod_{p | m} (1 - p)``.
"""
from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .lattice import squarefree_kernel_product, totients
from .zetalib import constants, gamma_complex, zeta_complex

BETA_MIN = 1e-4
BETA_MAX = 10.0
DEFAULT_TOL = 1e-12


def _check_beta(beta: float, lo: float = BETA_MIN, hi: float = BETA_MAX) -> None:
    if not lo < beta <= hi:
        raise ValueError(f"beta={beta!r} outside ({lo:g}, {hi:g}]")


# Level-function kernels h_k(u), with (d/du)^k h_0 = (-1)^k h_k.
def _h0(u: np.ndarray) -> np.ndarray:
    return -np.log(-np.expm1(-u))


def _h1(u: np.ndarray) -> np.ndarray:
    return 1.0 / np.expm1(u)


def _h2(u: np.ndarray) -> np.ndarray:
    return 1.0 / (np.expm1(u) * -np.expm1(-u))


_KERNELS = (_h0, _h1, _h2)


def tail_bound(beta: float, M: int, power: int) -> float:
    """Bound on ``sum_{m > M} m^power e^{-beta m} / (1 - e^{-beta M})``.

    With ``c_m <= m`` and ``h_k(u) <= e^{-u} / (1 - e^{-u})^k`` this majorises the
    tail of every level series used here (power = k + 1 for order-k sums).
    Valid when ``beta * M >= power``, where the summand is decreasing.
    """
    # int_M^inf x^p e^{-beta x} dx = e^{-beta M} sum_{j<=p} p!/(p-j)! M^{p-j} / beta^{j+1}
    acc = 0.0
    fact = 1.0
    for j in range(power + 1):
        acc += fact * M ** (power - j) / beta ** (j + 1)
        fact *= power - j
    q = math.exp(-beta * M)
    return q * acc / (1 - q) ** 2


def truncation_level(beta: float, tol: float, power: int = 1) -> int:
    """Smallest convenient M with ``tail_bound(beta, M, power) <= tol``."""
    L = max(50.0, -math.log(tol * beta**2))
    M = math.ceil(L / beta)
    while tail_bound(beta, M, power) > tol:
        M = math.ceil(M * 1.1) + 1
    return M


@functools.lru_cache(maxsize=8)
def _level_data(M: int) -> tuple[np.ndarray, ...]:
    """Arrays indexed by level m = 1..M: m, c_m and the moment sums S_{a,b}(m)."""
    phi = totients(M)[1:].astype(np.float64)
    J = squarefree_kernel_product(M)[1:]
    m = np.arange(1, M + 1, dtype=np.float64)
    c = phi.copy()
    c[0] = 2.0
    s10 = m * phi / 2
    s20 = m**2 * phi / 3 + m * J / 6
    s11 = m * s10 - s20
    # level 1: vectors (1, 0) and (0, 1)
    s10[0] = 1.0
    s20[0] = 1.0
    s11[0] = 0.0
    return m, c, s10, s20, s11


def level_moment(k1: int, k2: int, M: int) -> np.ndarray:
    """``S_{k1,k2}(m) = sum over primitive v with v1 + v2 = m of v1^k1 v2^k2``."""
    m, c, s10, s20, s11 = _level_data(M)
    key = (k1, k2)
    table = {(0, 0): c, (1, 0): s10, (0, 1): s10, (2, 0): s20, (0, 2): s20, (1, 1): s11}
    if key not in table:
        raise ValueError(f"unsupported derivative order ({k1}, {k2}); need k1 + k2 <= 2")
    return table[key]


def _level_sum(beta: float, weights_key: tuple[int, int] | str, order: int, tol: float) -> float:
    power = order + 1
    M = truncation_level(beta, tol, power)
    m = _level_data(M)[0]
    if weights_key == "total":
        # (v1 + v2)^order summed over a level = m^order c_m
        w = _level_data(M)[1] * m**order
    else:
        w = level_moment(*weights_key, M)
    return float(np.sum(w * _KERNELS[order](beta * m)))


def log_Z(beta: float, tol: float = DEFAULT_TOL) -> float:
    """``-sum_v log(1 - e^{-beta (v1 + v2)})`` with certified truncation error <= tol."""
    _check_beta(beta)
    return _level_sum(beta, (0, 0), 0, tol)


def mean_total(beta: float, tol: float = DEFAULT_TOL) -> float:
    """E[X1 + X2] = -d/dbeta log Z(beta, beta)."""
    _check_beta(beta)
    return _level_sum(beta, "total", 1, tol)


def variance_total(beta: float, tol: float = DEFAULT_TOL) -> float:
    """Var[X1 + X2] = d^2/dbeta^2 log Z(beta, beta)."""
    _check_beta(beta)
    return _level_sum(beta, "total", 2, tol)


def cumulant(k1: int, k2: int, beta: float, tol: float = DEFAULT_TOL) -> float:
    """Mixed partial d^{k1+k2} log Z / d beta1^k1 d beta2^k2 at beta1 = beta2 = beta."""
    if k1 < 0 or k2 < 0 or k1 + k2 > 2:
        raise ValueError(f"unsupported derivative order ({k1}, {k2}); need k1 + k2 <= 2")
    _check_beta(beta, 1e-3, BETA_MAX)
    k = k1 + k2
    return (-1) ** k * _level_sum(beta, (k1, k2), k, tol)


def hessian(beta: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Covariance matrix of (X1, X2) under the diagonal Boltzmann measure."""
    a = cumulant(2, 0, beta, tol)
    b = cumulant(1, 1, beta, tol)
    return np.array([[a, b], [b, a]])


def log_Z_two_param(beta1: float, beta2: float, box: int) -> float:
    """Direct product form over primitive vectors in ``[0, box]^2`` (test oracle)."""
    from .lattice import primitive_vectors_in_box

    vs = np.array([(v.x, v.y) for v in primitive_vectors_in_box(box, box)], dtype=np.float64)
    return float(np.sum(_h0(beta1 * vs[:, 0] + beta2 * vs[:, 1])))


@dataclass(frozen=True)
class CalibrationResult:
    n: int
    beta: float
    mean_total: float
    residual: float
    variance_total: float


@functools.lru_cache(maxsize=256)
def calibrate(n: int) -> CalibrationResult:
    """Solve ``E_beta[X1 + X2] = 2n`` (mean_total is strictly decreasing in beta)."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    target = 2.0 * n
    kappa = constants().kappa
    beta = min((kappa / n) ** (1 / 3), 5.0)
    lo = hi = beta
    while mean_total(lo) < target:
        lo /= 2
    while mean_total(hi) > target:
        hi *= 2
    tol = 1e-10 * max(1.0, target)
    for _ in range(200):
        f = mean_total(beta) - target
        if abs(f) <= tol:
            break
        if f > 0:
            lo = beta
        else:
            hi = beta
        step = beta + f / variance_total(beta)  # Newton: d(mean)/dbeta = -variance
        beta = step if lo < step < hi else 0.5 * (lo + hi)
    mt = mean_total(beta)
    return CalibrationResult(n, beta, mt, mt - target, variance_total(beta))


@dataclass(frozen=True)
class DirichletCheck:
    partial: complex
    target: complex
    gap_bound: float

    @property
    def gap(self) -> float:
        return abs(self.partial - self.target)


def dirichlet_check(s: complex, M: int) -> DirichletCheck:
    """Partial sum of ``sum_m c_m m^{-s}`` against ``(zeta(s-1) + zeta(s)) / zeta(s)``."""
    s = complex(s)
    if s.real <= 2:
        raise ValueError("need Re s > 2")
    if M < 1:
        raise ValueError("M must be positive")
    m, c = _level_data(M)[:2]
    partial = complex(np.sum(c * np.exp(-s * np.log(m))))
    target = (zeta_complex(s - 1) + zeta_complex(s)) / zeta_complex(s)
    sigma = s.real
    return DirichletCheck(partial, target, M ** (2 - sigma) / (sigma - 2))


def mellin_integrand(s: complex, beta: float) -> complex:
    """``Gamma(s) zeta(s+1) (zeta(s-1) + zeta(s)) / (zeta(s) beta^s)``."""
    return (
        gamma_complex(s)
        * zeta_complex(s + 1)
        * (zeta_complex(s - 1) + zeta_complex(s))
        / zeta_complex(s)
        * cmath.exp(-s * math.log(beta))
    )


IERR_ABSCISSA = -0.5
IERR_HEIGHT = 60.0


@dataclass(frozen=True)
class IerrResult:
    value: float
    quad_error: float
    tail_bound: float
    imag_residue: float


def _ierr_tail(beta: float, T: float) -> float:
    # |integrand| <= 4 |t|^{5/4} e^{-pi |t| / 2} sqrt(beta) along Re s = -1/2 for |t| >= 10
    f = lambda t: 4 * t**1.25 * math.exp(-math.pi * t / 2) * math.sqrt(beta)
    val, _ = integrate.quad(f, T, np.inf)
    return val / math.pi


def I_err(beta: float, *, with_imag: bool = False, epsabs: float = 1e-13) -> IerrResult:
    """Integral of the Mellin integrand along Re s = -1/2, over 2 i pi.

    Computed as (1/pi) int_0^T Re F(-1/2 + i t) dt, truncated at T = 60.
    ``with_imag`` additionally integrates Im F over [-T, T] to exhibit the
    conjugate symmetry.
    """
    _check_beta(beta, 1e-3, 1.0)
    re = lambda t: mellin_integrand(complex(IERR_ABSCISSA, t), beta).real
    val, err = integrate.quad(re, 0.0, IERR_HEIGHT, epsabs=epsabs, epsrel=1e-12, limit=400)
    imag = 0.0
    if with_imag:
        im = lambda t: mellin_integrand(complex(IERR_ABSCISSA, t), beta).imag
        lo, _ = integrate.quad(im, -IERR_HEIGHT, 0.0, epsabs=epsabs, epsrel=1e-12, limit=400)
        hi, _ = integrate.quad(im, 0.0, IERR_HEIGHT, epsabs=epsabs, epsrel=1e-12, limit=400)
        imag = (lo + hi) / (2 * math.pi)
    if err > 1e-8:
        raise ArithmeticError(f"I_err quadrature did not converge (error estimate {err:.2e})")
    return IerrResult(val / math.pi, err / math.pi, _ierr_tail(beta, IERR_HEIGHT), imag)
