"""Reusable numerical checks, grouped into the suites run by ``verify``."""
from __future__ import annotations

import math
import random

import numpy as np

from . import asympt, enumeration, lattice, partition, sampler, zetalib
from .report import Check, check_eq, check_in, check_le, check_lt

P100 = 26878385993387721255010
GAMMA1, GAMMA2 = 14.1347, 21.0220
IDENTITY_BETAS = (0.05, 0.1, 0.2, 0.5)


def exact_hit_probability(n: int, beta: float, table: enumeration.CountTable | None = None) -> float:
    """P_beta[X = (n, n)] = p(n, n) e^{-2 beta n} / Z(beta)."""
    p = table[n, n] if table is not None else enumeration.chain_count(n)
    return math.exp(asympt.log_int(p) - 2 * beta * n - partition.log_Z(beta))


# -- oracle ---------------------------------------------------------------

def oracle_counts(limit: int = 6) -> list[Check]:
    table = enumeration.count_table(limit, limit)
    bad = [
        (a, b)
        for a in range(limit + 1)
        for b in range(limit + 1)
        if table[a, b] != enumeration.brute_force_count(a, b)
    ]
    return [check_eq(f"count_table == brute force for a, b <= {limit}", len(bad), 0)]


def oracle_polyomino(limit: int = 8) -> list[Check]:
    pc = enumeration.polyomino_counts(limit)
    bad = [n for n in range(limit + 1) if pc[n] != enumeration.brute_force_polyomino(n)]
    return [check_eq(f"polyomino_counts == brute force for n <= {limit}", len(bad), 0)]


def oracle_bijection(trials: int = 1000, seed: int = 0) -> list[Check]:
    rng = random.Random(seed)
    box = lattice.primitive_vectors_in_box(20, 20)
    failures = 0
    for _ in range(trials):
        vs = rng.sample(box, rng.randint(0, 6))
        cfg = lattice.ChainConfiguration({v: rng.randint(1, 5) for v in vs})
        chain = lattice.config_to_chain(cfg)
        if lattice.chain_to_config(chain) != cfg or chain.endpoint != cfg.endpoint:
            failures += 1
    return [check_eq("chain <-> configuration round trip", failures, 0)]


def oracle_line_weights(M: int = 200) -> list[Check]:
    lw = lattice.line_weights(M)
    counts = np.zeros(M + 1, dtype=np.int64)
    for v in lattice.primitive_vectors_in_box(M, M):
        if v.weight <= M:
            counts[v.weight] += 1
    return [check_eq(f"line weights == primitive vector census for m <= {M}", bool(np.all(lw.c == counts[1:])), True)]


# -- identities -----------------------------------------------------------

def identity_residual(beta: float, K: int = 3) -> dict:
    c = zetalib.constants()
    parts = {
        "log_Z": partition.log_Z(beta),
        "main": c.kappa / beta**2,
        "i_crit": asympt.i_crit_zero_sum(beta, K).value,
        "log_term": 7 / 6 * math.log(1 / beta),
        "C": c.C,
        "i_err": partition.I_err(beta).value,
    }
    parts["residual"] = parts["log_Z"] - parts["main"] - parts["i_crit"] - parts["log_term"] - parts["C"] - parts["i_err"]
    return parts


def identity_checks(betas=IDENTITY_BETAS, tol: float = 1e-5) -> list[Check]:
    return [check_le(f"log Z expansion residual at beta={b}", abs(identity_residual(b)["residual"]), tol) for b in betas]


def dirichlet_checks(s: complex = 3, M: int = 100_000) -> list[Check]:
    d1 = partition.dirichlet_check(s, M)
    d2 = partition.dirichlet_check(s, 2 * M)
    out = [
        check_le(f"Dirichlet gap <= tail bound (s={s}, M={M})", d1.gap, d1.gap_bound),
        check_le(f"Dirichlet gap ratio M -> 2M (s={s})", d2.gap / d1.gap, 0.6),
    ]
    if complex(s) == 3 and M == 100_000:
        out.insert(0, check_le("Dirichlet gap at s=3, M=1e5", d1.gap, 2e-5))
    return out


def functional_equation_checks(tol: float = 1e-8) -> list[Check]:
    worst = 0.0
    for sigma in (-0.5, 0.25):
        for t in np.linspace(-40, 40, 33):
            s = complex(sigma, t)
            lhs = zetalib.zeta_complex(s)
            rhs = (
                2**s
                * math.pi ** (s - 1)
                * np.sin(math.pi * s / 2)
                * zetalib.gamma_complex(1 - s)
                * zetalib.zeta_complex(1 - s)
            )
            worst = max(worst, abs(lhs - rhs) / abs(lhs))
    return [check_le("functional equation relative residual", worst, tol)]


def calibration_checks(ns=(100, 10_000, 1_000_000)) -> list[Check]:
    out = []
    kappa = zetalib.constants().kappa
    for n in ns:
        c = partition.calibrate(n)
        out.append(check_le(f"calibration residual n={n}", abs(c.residual), 1e-9 * 2 * n))
        if n == 10_000:
            out.append(check_in("beta^3 n / kappa at n=1e4", c.beta**3 * n / kappa, 0.98, 1.02))
    return out


def zero_checks() -> list[Check]:
    zs = zetalib.find_zeta_zeros(30)
    worst = max(abs(zetalib.zeta_complex(z.rho)) for z in zs)
    return [
        check_le("|gamma_1 - 14.1347|", abs(zs[0].gamma - GAMMA1), 5e-4),
        check_le("|gamma_2 - 21.0220|", abs(zs[1].gamma - GAMMA2), 5e-4),
        check_eq("zeros with gamma <= 30", len(zs), 3),
        check_le("max |zeta(rho)| at located zeros", worst, 1e-10),
    ]


def icrit_checks(betas=(0.01, 0.05, 0.1)) -> list[Check]:
    out = []
    for b in betas:
        z = asympt.i_crit_zero_sum(b, 1).value
        out.append(check_le(f"two-term vs zero-sum I_crit at beta={b} (relative)", abs(asympt.i_crit_two_term(b) - z) / abs(z), 5e-3))
    return out


# -- published reference values -----------------------------------------------

def count_anchor() -> list[Check]:
    return [check_eq("p(100)", enumeration.chain_count(100), P100)]


def estimate_anchor(K: int = 2) -> list[Check]:
    est = asympt.estimate_p(100, K)
    value = math.exp(est.log_value)
    return [
        check_in("estimate_p(100)", value, 2.2e22, 2.6e22),
        check_in("p(100) / estimate_p(100)", est.ratio(P100), 1.05, 1.20),
    ]


def local_limit_checks(table: enumeration.CountTable | None = None) -> list[Check]:
    table = table or enumeration.count_table(200, 200)
    kappa = zetalib.constants().kappa

    def ratio(n: int) -> float:
        exact = exact_hit_probability(n, partition.calibrate(n).beta, table)
        return exact / (kappa ** (1 / 3) / (2 * math.pi * math.sqrt(3) * n ** (4 / 3)))

    r50, r100, r200 = ratio(50), ratio(100), ratio(200)
    return [
        check_in("local limit ratio at n=100", r100, 0.7, 1.3),
        check_lt("|ratio - 1| at n=200 vs n=50", abs(r200 - 1), abs(r50 - 1)),
    ]


def polyomino_checks(n: int = 2000, reference: int = 200) -> list[Check]:
    r = asympt.polyomino_ratio(n)
    r_ref = asympt.polyomino_ratio(reference)
    return [
        check_in(f"polyomino exact / estimate at n={n}", r, 0.8, 1.25),
        check_lt(f"|ratio - 1| at n={n} vs n={reference}", abs(r - 1), abs(r_ref - 1)),
    ]


# -- Monte Carlo --------------------------------------------------------------

def sampler_law_checks(n: int = 30, samples: int = 200_000, seed: int = 2024, threads: int = 1) -> list[Check]:
    cal = partition.calibrate(n)
    st = sampler.endpoint_stats(cal.beta, samples, seed, target=(n, n), threads=threads)
    sd_mean = math.sqrt(partition.cumulant(2, 0, cal.beta) / samples)
    p = exact_hit_probability(n, cal.beta)
    sd_hits = math.sqrt(samples * p * (1 - p))
    return [
        check_le(f"|mean X1 - {n}| in units of sigma", abs(st.mean[0] - n) / sd_mean, 3.0),
        check_le(f"|hits - expected| at ({n},{n}) in binomial sigma", abs(st.hit_count - samples * p) / sd_hits, 3.0),
    ]


def limit_shape_medians(n: int, samples: int, seed: int) -> float:
    run = sampler.sample_conditioned_many(n, samples, 10**8, seed)
    return float(np.median([sampler.limit_shape_deviation(c) for c in run.chains]))


def limit_shape_checks(n: int = 60, reference: int = 15, samples: int = 100, seed: int = 11) -> list[Check]:
    big = limit_shape_medians(n, samples, seed)
    small = limit_shape_medians(reference, samples, seed + 1)
    return [check_lt(f"median deviation n={n} < n={reference}", big, small)]


def marginal_law_checks(draws: int = 100_000, seed: int = 5) -> list[Check]:
    out = []
    rng = np.random.default_rng(seed)
    picks = [(1, 0), (1, 1), (2, 1), (1, 3), (3, 2)]
    for beta in (0.3, 1.0):
        vs = sampler.VectorSet.from_vectors([lattice.PrimitiveVector(*p) for p in picks])
        K = sampler.draw_multiplicities(beta, vs, draws, rng)
        for j, p in enumerate(picks):
            q = math.exp(-beta * sum(p))
            for k in (0, 1):
                prob = (1 - q) * q**k
                freq = float(np.mean(K[:, j] == k))
                sd = math.sqrt(prob * (1 - prob) / draws)
                out.append(check_le(f"P[omega{p}={k}] at beta={beta} (sigma units)", abs(freq - prob) / sd, 3.0))
    return out


SUITES = {
    "oracle": lambda **kw: oracle_counts() + oracle_polyomino() + oracle_bijection() + oracle_line_weights(),
    "identities": lambda **kw: identity_checks() + dirichlet_checks() + functional_equation_checks() + calibration_checks(),
    "montecarlo": lambda samples=200_000, seed=2024, threads=1, **kw: (
        sampler_law_checks(samples=samples, seed=seed, threads=threads) + marginal_law_checks() + limit_shape_checks()
    ),
    "paper": lambda **kw: (
        count_anchor() + estimate_anchor() + zero_checks() + icrit_checks() + local_limit_checks() + polyomino_checks()
    ),
}
