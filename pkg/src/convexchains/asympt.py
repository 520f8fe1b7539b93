"""Oscillatory zero-sum term and the asymptotic estimates built on it."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .enumeration import count_table, polyomino_counts
from .zetalib import LOG_2PI, constants, find_zeta_zeros, gamma_complex, zeta_complex, MAX_ZERO_HEIGHT

DEFAULT_ZEROS = 3
LN10 = math.log(10)

# Two-term closed form of the oscillatory term, first zero pair only.
TWO_TERM_COS = 6.0240e-11
TWO_TERM_SIN = 9.5848e-10
TWO_TERM_GAMMA = 14.1347


def _zeros(K: int):
    zeros = find_zeta_zeros(MAX_ZERO_HEIGHT)
    if K < 1 or K > len(zeros):
        raise ValueError(f"K={K} outside 1..{len(zeros)} (zeros cached up to height {MAX_ZERO_HEIGHT:g})")
    return zeros[:K]


def zero_residue(rho: complex, zeta_prime: complex, beta: float) -> complex:
    """Residue of the Mellin integrand at a simple zero rho of zeta."""
    return (
        gamma_complex(rho)
        * zeta_complex(rho + 1)
        * zeta_complex(rho - 1)
        / zeta_prime
        * cmath.exp(-rho * math.log(beta))
    )


@dataclass(frozen=True)
class ZeroSum:
    value: float
    last_term: float
    terms: tuple[float, ...]


def i_crit_zero_sum(beta: float, K: int = DEFAULT_ZEROS) -> ZeroSum:
    """Sum over the first K conjugate zero pairs of the residues at rho and conj(rho)."""
    if not 1e-4 < beta <= 1.0:
        raise ValueError("beta must lie in (1e-4, 1]")
    terms = tuple(2.0 * zero_residue(z.rho, z.zeta_prime, beta).real for z in _zeros(K))
    return ZeroSum(math.fsum(terms), abs(terms[-1]), terms)


def i_crit_conjugate_sum(beta: float, K: int = DEFAULT_ZEROS) -> complex:
    """Same sum with the conjugate zeros evaluated explicitly (no pairing)."""
    total = 0j
    for z in _zeros(K):
        total += zero_residue(z.rho, z.zeta_prime, beta)
        total += zero_residue(z.rho.conjugate(), z.zeta_prime.conjugate(), beta)
    return total


def i_crit_two_term(beta: float) -> float:
    if not 1e-4 < beta <= 1.0:
        raise ValueError("beta must lie in (1e-4, 1]")
    phase = TWO_TERM_GAMMA * math.log(beta)
    return (TWO_TERM_COS * math.cos(phase) + TWO_TERM_SIN * math.sin(phase)) / math.sqrt(beta)


@dataclass(frozen=True)
class AsymptoticEstimate:
    n: int
    main_exponent: float
    icrit_term: float
    log_prefactor: float

    @property
    def log_value(self) -> float:
        return self.main_exponent + self.icrit_term + self.log_prefactor

    @property
    def log10_value(self) -> float:
        return self.log_value / LN10

    @property
    def value(self) -> tuple[float, int]:
        """(mantissa, decimal exponent) with mantissa in [1, 10)."""
        e = math.floor(self.log10_value)
        mant = 10 ** (self.log10_value - e)
        if mant >= 10:  # rounding at the boundary
            mant, e = mant / 10, e + 1
        return mant, e

    def ratio(self, exact: int) -> float:
        """exact / estimate, computed in log space."""
        return math.exp(log_int(exact) - self.log_value)


def log_int(x: int) -> float:
    """Natural log of a positive big integer without materialising it as a float."""
    if x <= 0:
        raise ValueError("log of nonpositive integer")
    shift = max(0, x.bit_length() - 64)
    return math.log(x >> shift) + shift * math.log(2)


def chain_prefactor(n: int) -> float:
    """log of e^{-2 zeta'(-1)} / ((2 pi)^{7/6} sqrt 3 kappa^{1/18} n^{17/18})."""
    c = constants()
    return (
        -2 * c.zeta_prime_minus1
        - 7 / 6 * LOG_2PI
        - 0.5 * math.log(3)
        - math.log(c.kappa) / 18
        - 17 / 18 * math.log(n)
    )


def estimate_p(n: int, K: int | None = DEFAULT_ZEROS) -> AsymptoticEstimate:
    """Asymptotic estimate of the number of convex chains ending at (n, n).

    ``K=None`` drops the oscillatory term altogether.
    """
    if n < 1:
        raise ValueError("n must be positive")
    kappa = constants().kappa
    beta = (kappa / n) ** (1 / 3)
    icrit = 0.0 if K is None else i_crit_zero_sum(beta, K).value
    return AsymptoticEstimate(n, 3 * kappa ** (1 / 3) * n ** (2 / 3), icrit, chain_prefactor(n))


# Exponent of kappa in the polyomino prefactor.  Combining the expansion
# log Z~ = kappa/beta^2 + (1/6) log(1/beta) + C with the local limit
# (kappa/4)^{1/6} / (sqrt(3 pi) n^{2/3}) gives kappa^{1/9}; the constant
# (kappa/4)^{5/18}, i.e. exponent 5/18, also circulates and is off by kappa^{1/6}.
POLYOMINO_KAPPA_EXPONENT = 1 / 9
POLYOMINO_KAPPA_EXPONENT_ALT = 5 / 18


def polyomino_prefactor(n: int, kappa_exponent: float = POLYOMINO_KAPPA_EXPONENT) -> float:
    """log of kappa^a 2^{-5/9} e^{-2 zeta'(-1)} / (sqrt 3 pi^{2/3} n^{11/18})."""
    c = constants()
    return (
        kappa_exponent * math.log(c.kappa)
        - 5 / 9 * math.log(2)
        - 2 * c.zeta_prime_minus1
        - 0.5 * math.log(3)
        - 2 / 3 * math.log(math.pi)
        - 11 / 18 * math.log(n)
    )


def estimate_polyomino(
    n: int, K: int | None = DEFAULT_ZEROS, *, kappa_exponent: float = POLYOMINO_KAPPA_EXPONENT
) -> AsymptoticEstimate:
    """Asymptotic estimate of the number of polyomino paths of total length n."""
    if n < 1:
        raise ValueError("n must be positive")
    kappa = constants().kappa
    beta = (2 * kappa / n) ** (1 / 3)
    icrit = 0.0 if K is None else i_crit_zero_sum(beta, K).value
    return AsymptoticEstimate(
        n, 3 * (kappa / 4) ** (1 / 3) * n ** (2 / 3), icrit, polyomino_prefactor(n, kappa_exponent)
    )


def polyomino_ratio(n: int, K: int = DEFAULT_ZEROS, **kw) -> float:
    """Exact polyomino count over its asymptotic estimate."""
    return estimate_polyomino(n, K, **kw).ratio(polyomino_counts(n)[n])


@dataclass(frozen=True)
class GapRow:
    n: int
    gap: float
    residual: float


def rh_gap(N: int, K: int = DEFAULT_ZEROS, **table_kw) -> list[GapRow]:
    """``log p(n) - 3 kappa^{1/3} n^{2/3}`` for 1 <= n <= N, with the model residual.

    The residual removes the oscillatory term and the log-prefactor predicted by
    the asymptotic formula; it equals ``log(exact / estimate_p(n))``.
    """
    if N < 1:
        raise ValueError("N must be positive")
    table = count_table(N, N, **table_kw)
    rows = []
    for n in range(1, N + 1):
        est = estimate_p(n, K)
        gap = log_int(table[n, n]) - est.main_exponent
        rows.append(GapRow(n, gap, gap - est.icrit_term - est.log_prefactor))
    return rows
