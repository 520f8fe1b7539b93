from fractions import Fraction
from math import gcd

import numpy as np
import pytest
from hypothesis import given, strategies as st

from convexchains import lattice
from convexchains.lattice import (
    ChainConfiguration,
    ConvexChain,
    InvalidChainError,
    PrimitiveVector,
    chain_to_config,
    config_to_chain,
)


def slope(v):
    return Fraction(v.y, v.x) if v.x else Fraction(10**9)


def test_primitive_vector_rejects_bad_input():
    for bad in [(0, 0), (2, 4), (-1, 1), (3, -2)]:
        with pytest.raises(ValueError):
            PrimitiveVector(*bad)


def test_axis_vectors_are_extremes():
    box = lattice.primitive_vectors_in_box(7, 7)
    assert box[0] == PrimitiveVector(1, 0)
    assert box[-1] == PrimitiveVector(0, 1)


def test_box_is_sorted_by_exact_slope():
    box = lattice.primitive_vectors_in_box(25, 13)
    slopes = [slope(v) for v in box]
    assert slopes == sorted(slopes)
    assert len(set(slopes)) == len(slopes)


def test_box_contents():
    box = set(lattice.primitive_vectors_in_box(9, 4))
    expected = {(x, y) for x in range(10) for y in range(5) if gcd(x, y) == 1}
    assert {(v.x, v.y) for v in box} == expected


@given(st.integers(0, 10**6), st.integers(1, 10**6), st.integers(0, 10**6), st.integers(1, 10**6))
def test_slope_less_matches_fractions(y1, x1, y2, x2):
    assert lattice.slope_less(x1, y1, x2, y2) == (Fraction(y1, x1) < Fraction(y2, x2))


def test_slope_less_near_ties_large_coordinates():
    # 10^12 + 1 over 10^12 vs 10^12 over 10^12 - 1: float division would tie
    a, b = 10**12, 10**12 - 1
    assert lattice.slope_less(a, a + 1, b, a) == (Fraction(a + 1, a) < Fraction(a, b))


def test_totients_against_gcd_count():
    phi = lattice.totients(300)
    naive = [0] + [sum(1 for k in range(1, m + 1) if gcd(k, m) == 1) for m in range(1, 301)]
    assert phi.tolist() == naive


def test_squarefree_kernel_product():
    J = lattice.squarefree_kernel_product(60)
    assert J[1] == 1
    assert J[12] == (1 - 2) * (1 - 3)
    assert J[30] == (1 - 2) * (1 - 3) * (1 - 5)
    assert J[49] == -6


def test_line_weights_census():
    lw = lattice.line_weights(150)
    counts = np.zeros(151, dtype=int)
    for v in lattice.primitive_vectors_in_box(150, 150):
        if v.weight <= 150:
            counts[v.weight] += 1
    assert lw[1] == 2
    assert [lw[m] for m in range(1, 151)] == counts[1:].tolist()


def test_line_weights_index_errors():
    lw = lattice.line_weights(5)
    with pytest.raises(IndexError):
        lw[0]
    with pytest.raises(ValueError):
        lattice.line_weights(0)


configs = st.dictionaries(
    st.tuples(st.integers(0, 12), st.integers(0, 12)).filter(lambda p: gcd(*p) == 1),
    st.integers(1, 6),
    max_size=8,
).map(ChainConfiguration.from_pairs)


@given(configs)
def test_bijection_round_trip(cfg):
    chain = config_to_chain(cfg)
    assert chain_to_config(chain) == cfg
    assert chain.endpoint == cfg.endpoint
    assert len(chain.vertices) == len(cfg.support) + 1


@given(configs)
def test_chain_segments_strictly_increase_in_slope(cfg):
    segs = config_to_chain(cfg).segments
    for (a, b), (c, d) in zip(segs, segs[1:]):
        assert b * c < d * a


def test_empty_configuration_is_single_vertex():
    chain = config_to_chain(ChainConfiguration({}))
    assert chain.vertices == ((0, 0),)
    assert chain.endpoint == (0, 0)


def test_known_chain():
    cfg = ChainConfiguration.from_pairs({(1, 0): 2, (1, 1): 1, (0, 1): 3})
    assert config_to_chain(cfg).vertices == ((0, 0), (2, 0), (3, 1), (3, 4))


def test_invalid_chains_report_first_bad_index():
    with pytest.raises(InvalidChainError) as e:
        ConvexChain(((0, 0), (1, 1), (3, 2)))
    assert e.value.index == 2
    with pytest.raises(InvalidChainError) as e:
        ConvexChain(((0, 0), (2, 0), (1, 3)))
    assert e.value.index == 2
    with pytest.raises(InvalidChainError) as e:
        ConvexChain(((1, 0), (2, 0)))
    assert e.value.index == 0
    with pytest.raises(InvalidChainError) as e:
        ConvexChain(((0, 0), (1, 0), (2, 0)))
    assert e.value.index == 2


def test_configuration_validation():
    with pytest.raises(ValueError):
        ChainConfiguration({PrimitiveVector(1, 0): 0})
    with pytest.raises(TypeError):
        ChainConfiguration({(1, 0): 1})
    merged = ChainConfiguration.from_pairs([((1, 1), 2), ((1, 1), 1), ((2, 1), 0)])
    assert merged.as_dict() == {(1, 1): 3}


def test_box_size_formula():
    phi = lattice.totients(100)
    for n in range(1, 101):
        assert len(lattice.primitive_vectors_in_box(n, n)) == 2 * int(phi[1 : n + 1].sum()) + 1


def test_line_weights_small():
    assert lattice.line_weights(3).c.tolist() == [2, 1, 2]
