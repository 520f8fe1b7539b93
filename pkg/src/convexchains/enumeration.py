"""Exact big-integer counts of convex chains and polyomino paths.

``count_table`` fills the coefficient array of
``prod_{v primitive} 1 / (1 - x^{v1} y^{v2})`` over a box with one in-place
unbounded-knapsack sweep per primitive vector.  Cells are Python ints held in
numpy object arrays, so rows can be added with a single vectorised call.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .lattice import ChainConfiguration, PrimitiveVector, primitive_vectors_in_box, totients

DEFAULT_BUDGET_BYTES = 2 * 1024**3
BRUTE_FORCE_LIMIT = 10

# log p(n1, n2) <= 3 * (zeta(3)/zeta(2))**(1/3) * (n1 n2)**(1/3) asymptotically; this
# constant is a deliberately loose cap used only for sizing.
_GROWTH = 3.0


class ResourceBudgetError(MemoryError):
    """Raised when a request would exceed the configured resource budget."""

    def __init__(self, what: str, needed: float, limit: float):
        super().__init__(f"{what}: needs ~{needed:.3g}, limit is {limit:.3g}")
        self.what = what
        self.needed = needed
        self.limit = limit


@dataclass
class CountTable:
    n1: int
    n2: int
    values: np.ndarray  # object dtype, shape (n1 + 1, n2 + 1)

    def __getitem__(self, idx: tuple[int, int]) -> int:
        return int(self.values[idx])

    def diagonal(self) -> list[int]:
        return [int(self.values[k, k]) for k in range(min(self.n1, self.n2) + 1)]


@dataclass
class PolyominoCounts:
    N: int
    values: list[int]

    def __getitem__(self, n: int) -> int:
        return self.values[n]


def estimate_table_bytes(n1: int, n2: int) -> float:
    bits = _GROWTH * (max(n1, 1) * max(n2, 1)) ** (1 / 3) / math.log(2)
    per_cell = 8 + 28 + 4 * math.ceil(bits / 30)
    # x2: one transient row copy per vectorised add
    return 2.0 * (n1 + 1) * (n2 + 1) * per_cell


def count_table(
    n1: int,
    n2: int,
    *,
    order: Sequence[PrimitiveVector] | None = None,
    budget_bytes: float = DEFAULT_BUDGET_BYTES,
) -> CountTable:
    """Number of convex chains ending at every ``(a, b)`` with ``a <= n1, b <= n2``.

    ``order`` overrides the processing order of the primitive vectors (it must be
    a permutation of ``primitive_vectors_in_box(n1, n2)``); the result does not
    depend on it.
    """
    if n1 < 0 or n2 < 0:
        raise ValueError("box dimensions must be nonnegative")
    need = estimate_table_bytes(n1, n2)
    if need > budget_bytes:
        raise ResourceBudgetError(f"count_table({n1}, {n2}) memory", need, budget_bytes)

    T = np.zeros((n1 + 1, n2 + 1), dtype=object)
    T[:, :] = 0
    T[0, 0] = 1
    vectors = primitive_vectors_in_box(n1, n2) if order is None else order
    for v in vectors:
        a, b = v.x, v.y
        if a == 0:
            # vertical step: running sums along each row
            for y in range(b, n2 + 1):
                T[:, y] += T[:, y - b]
            continue
        width = n2 + 1 - b
        for x in range(a, n1 + 1):
            T[x, b:] += T[x - a, :width]
    return CountTable(n1, n2, T)


def chain_count(n1: int, n2: int | None = None, **kw) -> int:
    n2 = n1 if n2 is None else n2
    return count_table(n1, n2, **kw)[n1, n2]


def polyomino_weights(N: int) -> np.ndarray:
    """Level multiplicities of ``P \\ {(1, 0)}``: 1 at m = 1, phi(m) beyond."""
    c = totients(N).astype(object)
    c[0] = 0
    if N >= 1:
        c[1] = 1
    return c


def polyomino_counts(N: int) -> PolyominoCounts:
    """Coefficients of ``prod_m (1 - t^m)^(-c_m)`` for ``n <= N``.

    Uses the logarithmic-derivative recurrence ``n f_n = sum_k s_k f_{n-k}`` with
    ``s_k = sum_{m | k} m c_m``; this is the same product the per-vector knapsack
    passes compute (see ``polyomino_counts_knapsack``) in O(N^2) instead of
    O(N * #vectors).
    """
    if N < 1:
        raise ValueError("N must be positive")
    c = polyomino_weights(N)
    s = [0] * (N + 1)
    for m in range(1, N + 1):
        cm = m * int(c[m])
        if cm:
            for k in range(m, N + 1, m):
                s[k] += cm
    s_arr = np.array(s, dtype=object)
    f = np.zeros(N + 1, dtype=object)
    f[0] = 1
    for n in range(1, N + 1):
        acc = np.dot(s_arr[1 : n + 1], f[n - 1 :: -1][:n]) if n > 1 else s[1] * f[0]
        q, r = divmod(int(acc), n)
        assert r == 0
        f[n] = q
    return PolyominoCounts(N, [int(x) for x in f])


def polyomino_counts_knapsack(N: int) -> PolyominoCounts:
    """Reference: one 1-D unbounded-knapsack pass per vector of ``P \\ {(1, 0)}``."""
    f = [0] * (N + 1)
    f[0] = 1
    c = polyomino_weights(N)
    for m in range(1, N + 1):
        for _ in range(int(c[m])):
            for t in range(m, N + 1):
                f[t] += f[t - m]
    return PolyominoCounts(N, f)


def _configurations(
    target: tuple[int, int], vectors: Sequence[PrimitiveVector]
) -> Iterator[dict[PrimitiveVector, int]]:
    """Depth-first enumeration of multiplicity maps on ``vectors`` summing to ``target``."""
    current: dict[PrimitiveVector, int] = {}

    def rec(i: int, rx: int, ry: int) -> Iterator[dict[PrimitiveVector, int]]:
        if rx == 0 and ry == 0:
            yield dict(current)
            return
        if i == len(vectors):
            return
        v = vectors[i]
        yield from rec(i + 1, rx, ry)
        k = 1
        while k * v.x <= rx and k * v.y <= ry:
            current[v] = k
            yield from rec(i + 1, rx - k * v.x, ry - k * v.y)
            k += 1
        current.pop(v, None)

    yield from rec(0, target[0], target[1])


def enumerate_configurations(n1: int, n2: int) -> Iterator[ChainConfiguration]:
    """Every configuration with endpoint ``(n1, n2)``; exponential, keep n small."""
    if max(n1, n2) > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to n1, n2 <= {BRUTE_FORCE_LIMIT}")
    vectors = primitive_vectors_in_box(n1, n2)
    for support in _configurations((n1, n2), vectors):
        yield ChainConfiguration(support)


def brute_force_count(n1: int, n2: int) -> int:
    if n1 < 0 or n2 < 0:
        raise ValueError("box dimensions must be nonnegative")
    if max(n1, n2) > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to n1, n2 <= {BRUTE_FORCE_LIMIT}")
    return sum(1 for _ in _configurations((n1, n2), primitive_vectors_in_box(n1, n2)))


def brute_force_polyomino(n: int) -> int:
    """Configurations on ``P \\ {(1, 0)}`` of total weight ``x + y = n``."""
    if n > 2 * BRUTE_FORCE_LIMIT:
        raise ValueError("brute force polyomino count limited to n <= 20")
    vectors = [v for v in primitive_vectors_in_box(n, n) if v != PrimitiveVector(1, 0) and v.weight <= n]
    total = 0

    def rec(i: int, rest: int) -> None:
        nonlocal total
        if rest == 0:
            total += 1
            return
        if i == len(vectors):
            return
        w = vectors[i].weight
        k = 0
        while k * w <= rest:
            rec(i + 1, rest - k * w)
            k += 1

    rec(0, n)
    return total


def shuffled_vectors(n1: int, n2: int, seed: int) -> list[PrimitiveVector]:
    vs = primitive_vectors_in_box(n1, n2)
    random.Random(seed).shuffle(vs)
    return vs


class CountCache:
    """Append-only JSON-lines store of exact counts.

    Records look like ``{"kind": "p", "n1": 3, "n2": 3, "value": "13"}``; values
    are decimal strings.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def load(self) -> dict[tuple[str, int, int], int]:
        out: dict[tuple[str, int, int], int] = {}
        if not self.path.exists():
            return out
        with self.path.open() as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                if rec["kind"] not in ("p", "ptilde"):
                    raise ValueError(f"unknown record kind {rec['kind']!r}")
                out[(rec["kind"], int(rec["n1"]), int(rec["n2"]))] = int(rec["value"])
        return out

    def get(self, kind: str, n1: int, n2: int) -> int | None:
        return self.load().get((kind, n1, n2))

    def append(self, kind: str, n1: int, n2: int, value: int) -> None:
        rec = {"kind": kind, "n1": n1, "n2": n2, "value": str(value)}
        with self.path.open("a") as fh:
            fh.write(json.dumps(rec) + "\n")

    def verify(self) -> list[tuple[tuple[str, int, int], int, int]]:
        """Recompute every cached record; return the mismatches as (key, cached, fresh)."""
        records = self.load()
        bad = []
        p_keys = [k for k in records if k[0] == "p"]
        if p_keys:
            table = count_table(max(k[1] for k in p_keys), max(k[2] for k in p_keys))
            for key in p_keys:
                fresh = table[key[1], key[2]]
                if fresh != records[key]:
                    bad.append((key, records[key], fresh))
        t_keys = [k for k in records if k[0] == "ptilde"]
        if t_keys:
            pc = polyomino_counts(max(max(k[1] for k in t_keys), 1))
            for key in t_keys:
                fresh = pc[key[1]]
                if fresh != records[key]:
                    bad.append((key, records[key], fresh))
        return bad
