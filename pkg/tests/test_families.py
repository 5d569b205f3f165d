"""Instance families: exact structure for small parameters, counts beyond."""

from math import comb

import pytest

from threshlab.families import (
    FAMILIES,
    cliques,
    hamilton_cycles,
    make_family,
    pair_ground_size,
    pair_index,
    perfect_matchings,
    random_uniform,
    singletons,
    sunflower,
    triangles,
)


def edge_lists(h):
    return [list(e.indices()) for e in h.edges]


def test_singletons_smallest():
    h = singletons(1)
    assert h.ground_size == 1
    assert edge_lists(h) == [[0]]


def test_singletons_structure():
    h = singletons(5)
    assert h.ground_size == 5
    assert edge_lists(h) == [[0], [1], [2], [3], [4]]
    with pytest.raises(ValueError):
        singletons(0)


def test_sunflower_with_core():
    h = sunflower(1, 3, 2)
    assert h.ground_size == 7
    assert edge_lists(h) == [[0, 1, 2], [0, 3, 4], [0, 5, 6]]
    # all pairwise intersections equal the core
    for i in range(3):
        for j in range(i + 1, 3):
            assert (h.edges[i] & h.edges[j]).indices() == (0,)


def test_sunflower_disjoint():
    h = sunflower(0, 4, 3)
    assert h.ground_size == 12
    masks = h.masks
    assert all(masks[i] & masks[j] == 0 for i in range(4) for j in range(i + 1, 4))
    assert all(m.bit_count() == 3 for m in masks)


def test_sunflower_validation():
    with pytest.raises(ValueError):
        sunflower(-1, 3, 2)
    with pytest.raises(ValueError):
        sunflower(0, 0, 2)
    with pytest.raises(ValueError):
        sunflower(0, 3, 0)


def test_pair_index_is_lexicographic():
    # K_4 pairs: 01 02 03 12 13 23
    expected = {(0, 1): 0, (0, 2): 1, (0, 3): 2, (1, 2): 3, (1, 3): 4, (2, 3): 5}
    for (i, j), k in expected.items():
        assert pair_index(i, j, 4) == k
        assert pair_index(j, i, 4) == k  # order of endpoints is free
    assert pair_ground_size(4) == 6
    with pytest.raises(ValueError):
        pair_index(0, 0, 4)
    with pytest.raises(ValueError):
        pair_index(0, 4, 4)


def test_triangles_smallest():
    h = triangles(4)
    assert h.ground_size == 6
    assert edge_lists(h) == [[0, 1, 3], [0, 2, 4], [1, 2, 5], [3, 4, 5]]


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_triangles_counts(n):
    h = triangles(n)
    assert h.ground_size == comb(n, 2)
    assert h.edge_count == comb(n, 3)
    assert all(m.bit_count() == 3 for m in h.masks)


def test_cliques_counts():
    h = cliques(5, 4)
    assert h.ground_size == 10
    assert h.edge_count == 5
    assert all(m.bit_count() == 6 for m in h.masks)
    with pytest.raises(ValueError):
        cliques(3, 1)
    with pytest.raises(ValueError):
        cliques(3, 4)


def test_hamilton_smallest():
    assert edge_lists(hamilton_cycles(3)) == [[0, 1, 2]]
    h = hamilton_cycles(4)
    assert edge_lists(h) == [[0, 2, 3, 5], [0, 1, 4, 5], [1, 2, 3, 4]]


@pytest.mark.parametrize("n,count", [(3, 1), (4, 3), (5, 12), (6, 60)])
def test_hamilton_counts(n, count):
    h = hamilton_cycles(n)
    assert h.edge_count == count  # (n-1)!/2
    assert all(m.bit_count() == n for m in h.masks)
    assert len(set(h.masks)) == count


def test_hamilton_needs_three_vertices():
    with pytest.raises(ValueError):
        hamilton_cycles(2)


def test_matchings_smallest():
    assert edge_lists(perfect_matchings(2)) == [[0]]
    h = perfect_matchings(4)
    assert h.ground_size == 6
    assert edge_lists(h) == [[0, 5], [1, 4], [2, 3]]
    # the three matchings of K_4 partition its edge set
    assert h.masks[0] | h.masks[1] | h.masks[2] == (1 << 6) - 1


@pytest.mark.parametrize("n,count", [(2, 1), (4, 3), (6, 15), (8, 105)])
def test_matchings_counts(n, count):
    h = perfect_matchings(n)
    assert h.edge_count == count  # (n-1)!!
    assert all(m.bit_count() == n // 2 for m in h.masks)
    assert len(set(h.masks)) == count


def test_matchings_need_even_n():
    with pytest.raises(ValueError):
        perfect_matchings(3)
    with pytest.raises(ValueError):
        perfect_matchings(0)


def test_random_uniform_is_deterministic():
    a = random_uniform(12, 3, 20, seed=7)
    b = random_uniform(12, 3, 20, seed=7)
    assert a == b
    assert random_uniform(12, 3, 20, seed=8) != a


def test_random_uniform_shape():
    h = random_uniform(10, 4, 15, seed=3)
    assert h.ground_size == 10
    assert h.edge_count == 15
    assert len(set(h.masks)) == 15
    assert all(m.bit_count() == 4 for m in h.masks)
    # edges come out sorted by index tuple, so equality checks are order-stable
    keys = [e.indices() for e in h.edges]
    assert keys == sorted(keys)


def test_random_uniform_validation():
    with pytest.raises(ValueError):
        random_uniform(4, 5, 1, seed=0)
    with pytest.raises(ValueError):
        random_uniform(4, 2, comb(4, 2) + 1, seed=0)


def test_make_family_dispatch():
    assert make_family("singletons", [3]) == singletons(3)
    assert make_family("sunflower", [1, 3, 2]) == sunflower(1, 3, 2)
    assert make_family("triangles", [5]) == triangles(5)
    assert make_family("random-uniform", [12, 3, 20, 7]) == random_uniform(12, 3, 20, 7)


def test_make_family_errors():
    with pytest.raises(ValueError):
        make_family("circles", [3])
    with pytest.raises(ValueError):
        make_family("singletons", [1, 2])
    assert set(FAMILIES) == {
        "singletons", "sunflower", "cliques", "triangles",
        "hamilton", "matchings", "random-uniform",
    }
