"""Primitive vectors, totient sieving and the chain <-> configuration bijection.

A convex chain starting at the origin is encoded by the multiplicities
``omega(v)`` it puts on each primitive direction ``v``; the chain is recovered
by stacking the segments ``omega(v) * v`` in increasing slope order.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Mapping, Sequence

import numpy as np

Point = tuple[int, int]


@functools.total_ordering
@dataclass(frozen=True)
class PrimitiveVector:
    """Coprime nonnegative pair, ordered by slope y/x.

    ``(1, 0)`` is the smallest element and ``(0, 1)`` the largest; comparisons
    use integer cross-multiplication only.
    """

    x: int
    y: int

    def __post_init__(self) -> None:
        if self.x < 0 or self.y < 0 or (self.x, self.y) == (0, 0):
            raise ValueError(f"not a primitive vector: ({self.x}, {self.y})")
        if gcd(self.x, self.y) != 1:
            raise ValueError(f"coordinates not coprime: ({self.x}, {self.y})")

    def __lt__(self, other: "PrimitiveVector") -> bool:
        if not isinstance(other, PrimitiveVector):
            return NotImplemented
        return slope_less(self.x, self.y, other.x, other.y)

    def __iter__(self):
        yield self.x
        yield self.y

    @property
    def weight(self) -> int:
        return self.x + self.y


def slope_less(x1: int, y1: int, x2: int, y2: int) -> bool:
    """True iff y1/x1 < y2/x2 for vectors in the closed first quadrant."""
    return y1 * x2 < y2 * x1


class _SlopeKey:
    __slots__ = ("x", "y")

    def __init__(self, x: int, y: int):
        self.x = x
        self.y = y

    def __lt__(self, other: "_SlopeKey") -> bool:
        return self.y * other.x < other.y * self.x

    def __eq__(self, other: object) -> bool:
        return isinstance(other, _SlopeKey) and self.y * other.x == other.y * self.x


def slope_key(v: Point | PrimitiveVector) -> _SlopeKey:
    """Sort key comparing directions by slope, exactly."""
    x, y = v
    return _SlopeKey(x, y)


def primitive_vectors_in_box(n1: int, n2: int) -> list[PrimitiveVector]:
    """All primitive vectors with ``x <= n1`` and ``y <= n2``, sorted by slope."""
    if n1 < 0 or n2 < 0:
        raise ValueError("box dimensions must be nonnegative")
    out = [
        PrimitiveVector(x, y)
        for x in range(n1 + 1)
        for y in range(n2 + 1)
        if gcd(x, y) == 1
    ]
    out.sort(key=slope_key)
    return out


def totients(M: int) -> np.ndarray:
    """Euler's phi for 0..M by a linear sieve (phi[0] = 0)."""
    phi = np.zeros(M + 1, dtype=np.int64)
    if M >= 1:
        phi[1] = 1
    primes: list[int] = []
    composite = bytearray(M + 1)
    for i in range(2, M + 1):
        if not composite[i]:
            primes.append(i)
            phi[i] = i - 1
        for p in primes:
            ip = i * p
            if ip > M:
                break
            composite[ip] = 1
            if i % p == 0:
                phi[ip] = phi[i] * p
                break
            phi[ip] = phi[i] * (p - 1)
    return phi


def squarefree_kernel_product(M: int) -> np.ndarray:
    """``J(m) = prod_{p | m} (1 - p)`` for 0..M (J(1) = 1, J(0) unused)."""
    J = np.ones(M + 1, dtype=np.float64)
    seen = bytearray(M + 1)
    for p in range(2, M + 1):
        if not seen[p]:
            J[p::p] *= 1 - p
            seen[p::p] = b"\x01" * len(range(p, M + 1, p))
    return J


@dataclass(frozen=True)
class LineWeights:
    """``c[m-1]`` is the number of primitive vectors with ``x + y = m``."""

    c: np.ndarray

    @property
    def M(self) -> int:
        return len(self.c)

    def __getitem__(self, m: int) -> int:
        if m < 1:
            raise IndexError("levels start at m = 1")
        return int(self.c[m - 1])


def line_weights(M: int) -> LineWeights:
    if M < 1:
        raise ValueError("M must be positive")
    c = totients(M)[1:].copy()
    c[0] = 2
    return LineWeights(c)


@dataclass(frozen=True)
class ChainConfiguration:
    """Finite-support multiplicity function on primitive vectors."""

    support: Mapping[PrimitiveVector, int]

    def __post_init__(self) -> None:
        for v, k in self.support.items():
            if not isinstance(v, PrimitiveVector):
                raise TypeError(f"support key {v!r} is not a PrimitiveVector")
            if int(k) < 1:
                raise ValueError(f"multiplicity of {v} must be >= 1, got {k}")

    @classmethod
    def from_pairs(cls, items: Mapping[Point, int] | Iterable[tuple[Point, int]]) -> "ChainConfiguration":
        pairs = items.items() if isinstance(items, Mapping) else items
        support: dict[PrimitiveVector, int] = {}
        for (x, y), k in pairs:
            if k:
                v = PrimitiveVector(x, y)
                support[v] = support.get(v, 0) + int(k)
        return cls(support)

    @property
    def endpoint(self) -> Point:
        return (
            sum(k * v.x for v, k in self.support.items()),
            sum(k * v.y for v, k in self.support.items()),
        )

    def as_dict(self) -> dict[Point, int]:
        return {(v.x, v.y): int(k) for v, k in self.support.items()}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChainConfiguration):
            return NotImplemented
        return self.as_dict() == other.as_dict()

    def __hash__(self) -> int:
        return hash(frozenset(self.as_dict().items()))


class InvalidChainError(ValueError):
    def __init__(self, index: int, reason: str):
        super().__init__(f"vertex {index}: {reason}")
        self.index = index
        self.reason = reason


@dataclass(frozen=True)
class ConvexChain:
    vertices: tuple[Point, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple((int(x), int(y)) for x, y in self.vertices))
        validate_chain(self.vertices)

    @property
    def endpoint(self) -> Point:
        return self.vertices[-1]

    @property
    def segments(self) -> list[Point]:
        vs = self.vertices
        return [(vs[i + 1][0] - vs[i][0], vs[i + 1][1] - vs[i][1]) for i in range(len(vs) - 1)]


def validate_chain(vertices: Sequence[Point]) -> None:
    """Raise InvalidChainError at the first vertex breaking convexity or monotonicity."""
    if not vertices:
        raise InvalidChainError(0, "empty vertex sequence")
    if tuple(vertices[0]) != (0, 0):
        raise InvalidChainError(0, "chain must start at the origin")
    prev: Point | None = None
    for i in range(1, len(vertices)):
        dx = vertices[i][0] - vertices[i - 1][0]
        dy = vertices[i][1] - vertices[i - 1][1]
        if dx < 0 or dy < 0 or (dx, dy) == (0, 0):
            raise InvalidChainError(i, f"segment ({dx}, {dy}) is not a nonzero increasing step")
        if prev is not None and not slope_less(prev[0], prev[1], dx, dy):
            raise InvalidChainError(i, "segment slopes are not strictly increasing")
        prev = (dx, dy)


def config_to_chain(config: ChainConfiguration) -> ConvexChain:
    x = y = 0
    vertices = [(0, 0)]
    for v in sorted(config.support):
        k = config.support[v]
        x += k * v.x
        y += k * v.y
        vertices.append((x, y))
    return ConvexChain(tuple(vertices))


def chain_to_config(chain: ConvexChain | Sequence[Point]) -> ChainConfiguration:
    vertices = chain.vertices if isinstance(chain, ConvexChain) else tuple(chain)
    validate_chain(vertices)
    support: dict[PrimitiveVector, int] = {}
    for i in range(len(vertices) - 1):
        dx = vertices[i + 1][0] - vertices[i][0]
        dy = vertices[i + 1][1] - vertices[i][1]
        g = gcd(dx, dy)
        support[PrimitiveVector(dx // g, dy // g)] = g
    return ChainConfiguration(support)
