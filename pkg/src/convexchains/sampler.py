"""Boltzmann sampling of configurations, rejection to a fixed endpoint, limit shape.

Multiplicities are independent geometric variables, ``P[omega(v) = k] =
(1 - q) q^k`` with ``q = exp(-beta (v1 + v2))``, drawn by inverse transform.
Draws are produced in fixed-size chunks, each from its own child of a
``numpy.random.SeedSequence``, so results do not depend on how many worker
threads consume the chunks.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .lattice import ChainConfiguration, ConvexChain, PrimitiveVector, config_to_chain, primitive_vectors_in_box
from .partition import calibrate
from .zetalib import constants

DEFAULT_CUTOFF = 46.0
CHUNK = 1024


def as_seed_sequence(rng_state) -> np.random.SeedSequence:
    if isinstance(rng_state, np.random.SeedSequence):
        return rng_state
    return np.random.SeedSequence(rng_state)


@dataclass(frozen=True)
class VectorSet:
    """Primitive vectors kept by a sampler, as an (N, 2) array plus their weights."""

    coords: np.ndarray
    weights: np.ndarray

    @classmethod
    def below_level(cls, max_level: int) -> "VectorSet":
        vs = [v for v in primitive_vectors_in_box(max_level, max_level) if v.weight <= max_level]
        return cls.from_vectors(vs)

    @classmethod
    def in_box(cls, n1: int, n2: int) -> "VectorSet":
        return cls.from_vectors(primitive_vectors_in_box(n1, n2))

    @classmethod
    def from_vectors(cls, vs: Sequence[PrimitiveVector]) -> "VectorSet":
        coords = np.array([(v.x, v.y) for v in vs], dtype=np.int64).reshape(-1, 2)
        return cls(coords, coords.sum(axis=1).astype(np.float64))

    def __len__(self) -> int:
        return len(self.coords)


def cutoff_level(beta: float, cutoff: float = DEFAULT_CUTOFF) -> int:
    return max(1, math.floor(cutoff / beta))


def truncation_tv_bound(beta: float, cutoff: float = DEFAULT_CUTOFF) -> float:
    """Total-variation distance to the untruncated model, ``<= sum_{m > L} m e^{-beta m}``."""
    L = cutoff_level(beta, cutoff)
    q = math.exp(-beta)
    # sum_{m > L} m q^m = q^{L+1} ((L + 1) - L q) / (1 - q)^2
    return q ** (L + 1) * ((L + 1) - L * q) / (1 - q) ** 2


def draw_multiplicities(beta: float, vectors: VectorSet, count: int, rng: np.random.Generator) -> np.ndarray:
    """(count, len(vectors)) matrix of independent geometric multiplicities.

    Returned as integer-valued float64 so endpoints can go through BLAS.
    """
    u = 1.0 - rng.random((count, len(vectors)))  # uniform on (0, 1]
    inv_log_q = -1.0 / (beta * vectors.weights)
    k = np.log(u, out=u)
    k *= inv_log_q
    return np.floor(k, out=k)


def endpoints(K: np.ndarray, vectors: VectorSet) -> np.ndarray:
    """Integer endpoints of the configurations held in the rows of K."""
    return np.rint(K @ vectors.coords.astype(np.float64)).astype(np.int64)


def _check_beta(beta: float) -> None:
    if not 1e-3 < beta <= 10:
        raise ValueError("beta must lie in (1e-3, 10]")


def sample_config(beta: float, rng_state, cutoff: float = DEFAULT_CUTOFF) -> ChainConfiguration:
    """One configuration from the Boltzmann measure truncated at ``beta (v1 + v2) <= cutoff``."""
    _check_beta(beta)
    rng = rng_state if isinstance(rng_state, np.random.Generator) else np.random.default_rng(rng_state)
    vectors = VectorSet.below_level(cutoff_level(beta, cutoff))
    k = draw_multiplicities(beta, vectors, 1, rng)[0]
    nz = np.nonzero(k)[0]
    return ChainConfiguration({PrimitiveVector(int(vectors.coords[i, 0]), int(vectors.coords[i, 1])): int(k[i]) for i in nz})


@dataclass
class SampleStats:
    samples: int
    mean: np.ndarray
    cov: np.ndarray
    hit_count: int
    target: tuple[int, int] | None = None
    beta: float = float("nan")
    tv_bound: float = 0.0

    @property
    def hit_frequency(self) -> float:
        return self.hit_count / self.samples


def _chunk_sizes(total: int) -> list[int]:
    full, rest = divmod(total, CHUNK)
    return [CHUNK] * full + ([rest] if rest else [])


def _endpoint_chunk(args) -> tuple[np.ndarray, np.ndarray, int]:
    beta, vectors, size, seed, target = args
    rng = np.random.default_rng(seed)
    X = endpoints(draw_multiplicities(beta, vectors, size, rng), vectors)
    hits = int(np.sum((X[:, 0] == target[0]) & (X[:, 1] == target[1]))) if target else 0
    Xf = X.astype(np.float64)
    return Xf.sum(axis=0), Xf.T @ Xf, hits


def endpoint_stats(
    beta: float,
    samples: int,
    rng_state,
    *,
    target: tuple[int, int] | None = None,
    cutoff: float = DEFAULT_CUTOFF,
    threads: int = 1,
) -> SampleStats:
    """Empirical mean and covariance of the endpoint X, plus hits of ``target``."""
    _check_beta(beta)
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    vectors = VectorSet.below_level(cutoff_level(beta, cutoff))
    sizes = _chunk_sizes(samples)
    seeds = as_seed_sequence(rng_state).spawn(len(sizes))
    jobs = [(beta, vectors, s, sd, target) for s, sd in zip(sizes, seeds)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(_endpoint_chunk, jobs))
    else:
        parts = [_endpoint_chunk(j) for j in jobs]
    s1 = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    hits = sum(p[2] for p in parts)
    mean = s1 / samples
    cov = (s2 - samples * np.outer(mean, mean)) / (samples - 1)
    return SampleStats(samples, mean, cov, hits, target, beta, truncation_tv_bound(beta, cutoff))


def expected_acceptance_rate(n: int) -> float:
    """Asymptotic probability that the calibrated endpoint equals (n, n)."""
    kappa = constants().kappa
    return kappa ** (1 / 3) / (2 * math.pi * math.sqrt(3) * n ** (4 / 3))


class SamplerExhausted(RuntimeError):
    def __init__(self, n: int, draws: int, found: int, expected_rate: float):
        super().__init__(
            f"no endpoint ({n}, {n}) hit often enough after {draws} draws "
            f"(got {found}); expected acceptance rate ~{expected_rate:.3g}"
        )
        self.n = n
        self.draws = draws
        self.found = found
        self.expected_rate = expected_rate


@dataclass
class ConditionedRun:
    chains: list[ConvexChain]
    draws: int
    beta: float
    active_vectors: int = field(default=0)


def sample_conditioned_many(
    n: int,
    count: int,
    max_draws: int,
    rng_state,
    *,
    restrict_to_box: bool = True,
    cutoff: float = DEFAULT_CUTOFF,
) -> ConditionedRun:
    """``count`` independent uniform chains ending at (n, n), by rejection.

    With ``restrict_to_box`` only vectors inside ``[0, n]^2`` are drawn: any other
    vector with nonzero multiplicity would overshoot the endpoint, so the accepted
    configurations have the same (uniform) law while far fewer draws are wasted.
    """
    if not 1 <= n <= 200:
        raise ValueError("n must lie in 1..200")
    beta = calibrate(n).beta
    if restrict_to_box:
        vectors = VectorSet.in_box(n, n)
    else:
        vectors = VectorSet.below_level(cutoff_level(beta, cutoff))
    rng = np.random.default_rng(as_seed_sequence(rng_state))
    chains: list[ConvexChain] = []
    draws = 0
    while len(chains) < count and draws < max_draws:
        size = min(CHUNK, max_draws - draws)
        K = draw_multiplicities(beta, vectors, size, rng)
        X = endpoints(K, vectors)
        used = size
        for r in np.nonzero((X[:, 0] == n) & (X[:, 1] == n))[0]:
            nz = np.nonzero(K[r])[0]
            cfg = ChainConfiguration(
                {PrimitiveVector(int(vectors.coords[i, 0]), int(vectors.coords[i, 1])): int(K[r, i]) for i in nz}
            )
            chains.append(config_to_chain(cfg))
            if len(chains) == count:
                used = int(r) + 1
                break
        draws += used
    if len(chains) < count:
        raise SamplerExhausted(n, draws, len(chains), expected_acceptance_rate(n))
    return ConditionedRun(chains, draws, beta, len(vectors))


def sample_conditioned(n: int, max_draws: int, rng_state, **kw) -> ConvexChain:
    """A uniform random convex chain ending at (n, n)."""
    return sample_conditioned_many(n, 1, max_draws, rng_state, **kw).chains[0]


def limit_curve(x):
    """Parabola arc sqrt(1 - x) + sqrt(y) = 1 through (0, 0) and (1, 1).

    Horizontal tangent at the origin and vertical tangent at (1, 1).
    """
    return (1.0 - np.sqrt(1.0 - np.asarray(x, dtype=np.float64))) ** 2


def limit_shape_deviation(chain: ConvexChain) -> float:
    """Largest vertical gap between the rescaled vertices and the limit curve."""
    n, m = chain.endpoint
    if n != m or n < 1:
        raise ValueError(f"chain must end on the diagonal at (n, n) with n >= 1, got {chain.endpoint}")
    pts = np.array(chain.vertices, dtype=np.float64) / n
    return float(np.max(np.abs(pts[:, 1] - limit_curve(pts[:, 0]))))


def write_chain_csv(chain: ConvexChain, path: str | Path) -> None:
    lines = ["x,y"] + [f"{x},{y}" for x, y in chain.vertices]
    Path(path).write_text("\n".join(lines) + "\n")


def chain_svg(chain: ConvexChain, size: int = 1000, curve_points: int = 200) -> str:
    """SVG of the chain scaled by its endpoint, with the limit curve overlaid."""
    n = max(chain.endpoint) or 1

    def xy(px: float, py: float) -> str:
        return f"{px * size:.3f},{(1 - py) * size:.3f}"

    poly = " ".join(xy(x / n, y / n) for x, y in chain.vertices)
    xs = np.linspace(0.0, 1.0, curve_points)
    curve = " ".join(xy(float(x), float(y)) for x, y in zip(xs, limit_curve(xs)))
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">\n'
        f'  <rect x="0" y="0" width="{size}" height="{size}" fill="white" stroke="black"/>\n'
        f'  <polyline points="{curve}" fill="none" stroke="red" stroke-width="2"/>\n'
        f'  <polyline points="{poly}" fill="none" stroke="blue" stroke-width="3"/>\n'
        f"</svg>\n"
    )


def write_chain_svg(chain: ConvexChain, path: str | Path) -> None:
    Path(path).write_text(chain_svg(chain))
