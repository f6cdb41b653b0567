import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sautperm.errors import CapacityError
from sautperm.perm import Permutation, commutator, conjugate, is_even
from sautperm.permgroup import (
    PermGroup, alternating_group, are_conjugate_subgroups, centralizer_in_alternating,
    centralizer_in_symmetric, closure_elements, elements, orbits, symmetric_group,
)


def perm_of(images):
    return Permutation(list(images))


@pytest.mark.parametrize("m", range(1, 18))
def test_alternating_and_symmetric_orders(m):
    assert alternating_group(m).order() == max(math.factorial(m) // 2, 1)
    assert symmetric_group(m).order() == math.factorial(m)


def test_chain_order_matches_closure_oracle():
    rng = random.Random(5)
    for _ in range(30):
        m = rng.randint(2, 7)
        gens = []
        for _ in range(rng.randint(1, 3)):
            p = list(range(m))
            rng.shuffle(p)
            gens.append(Permutation(p))
        G = PermGroup(m, gens)
        els = closure_elements(m, gens)
        assert G.order() == len(els)
        for e in list(els)[:20]:
            assert G.contains(Permutation(e, check=False))


def test_membership_rejects_outsiders():
    A = alternating_group(5)
    assert Permutation.from_cycles(5, (0, 1, 2)) in A
    assert Permutation.from_cycles(5, (0, 1)) not in A


def test_orbits():
    assert orbits(6, [Permutation.from_cycles(6, (0, 2), (3, 4, 5))]) == [[0, 2], [1], [3, 4, 5]]


def test_element_batches_enumerate_the_group_once():
    G = PermGroup(6, [Permutation.from_cycles(6, (0, 1, 2, 3)), Permutation.from_cycles(6, (0, 4), (1, 5))])
    whole = np.concatenate(list(G.element_batches(batch=7)))
    assert len(whole) == G.order()
    assert {tuple(r) for r in whole.tolist()} == closure_elements(6, G.generators)
    # an arbitrary slice lines up with the whole enumeration
    part = np.concatenate(list(G.element_batches(13, 41, batch=5)))
    assert (part == whole[13:41]).all()
    assert tuple(whole[0].tolist()) == tuple(range(6))  # index 0 is the identity


def test_trivial_group_batches():
    G = PermGroup(3, [])
    (b,) = list(G.element_batches())
    assert b.tolist() == [[0, 1, 2]]


def test_elements_bound():
    with pytest.raises(CapacityError):
        elements(symmetric_group(8), bound=100)


def brute_centralizer(m, H, ambient):
    return [g for g in ambient if all(g * h == h * g for h in H)]


ALL5 = [Permutation(p) for p in itertools.permutations(range(5))]
ALL6 = [Permutation(p) for p in itertools.permutations(range(6))]


@pytest.mark.parametrize("H", [
    [],
    [Permutation.from_cycles(6, (0, 1), (2, 3))],
    [Permutation.from_cycles(6, (0, 1, 2)), Permutation.from_cycles(6, (3, 4, 5))],
    [Permutation.from_cycles(6, (0, 1, 2), (3, 4, 5))],
    [Permutation.from_cycles(6, (0, 1)), Permutation.from_cycles(6, (2, 3)), Permutation.from_cycles(6, (4, 5))],
    [Permutation.from_cycles(6, (0, 1, 2, 3, 4, 5))],
])
def test_centralizers_against_brute_force(H):
    sym = brute_centralizer(6, H, ALL6)
    gens, order = centralizer_in_symmetric(6, H)
    assert order == len(sym)
    assert PermGroup(6, gens).order() == len(sym)
    alt = [g for g in sym if is_even(g)]
    C = centralizer_in_alternating(6, H)
    assert C.order() == len(alt)
    assert all(g in C for g in alt)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.permutations(range(5)).map(perm_of), max_size=2))
def test_random_centralizers(H):
    assert centralizer_in_alternating(5, H).order() == sum(
        1 for g in ALL5 if is_even(g) and all(g * h == h * g for h in H)
    )


def test_conjugacy_of_subgroups():
    H1 = PermGroup(5, [Permutation.from_cycles(5, (0, 1, 2))])
    H2 = PermGroup(5, [Permutation.from_cycles(5, (2, 3, 4))])
    g = are_conjugate_subgroups(None, H1, H2)
    assert g is not None
    assert all(conjugate(h, g) in H2 for h in H1.generators)
    # a double transposition group is not conjugate to a 4-cycle group
    K1 = PermGroup(4, [Permutation.from_cycles(4, (0, 1), (2, 3)), Permutation.from_cycles(4, (0, 2), (1, 3))])
    K2 = PermGroup(4, [Permutation.from_cycles(4, (0, 1, 2, 3))])
    assert are_conjugate_subgroups(None, K1, K2) is None


def test_conjugacy_inside_an_ambient_group():
    # <(0 1)(2 3)> and <(0 2)(1 3)> are conjugate in A_4
    H1 = PermGroup(4, [Permutation.from_cycles(4, (0, 1), (2, 3))])
    H2 = PermGroup(4, [Permutation.from_cycles(4, (0, 2), (1, 3))])
    g = are_conjugate_subgroups(alternating_group(4), H1, H2)
    assert g is not None and is_even(g)
    # S_3 on three points versus a copy whose transpositions move five
    T1 = PermGroup(5, [Permutation.from_cycles(5, (0, 1)), Permutation.from_cycles(5, (0, 1, 2))])
    T2 = PermGroup(5, [Permutation.from_cycles(5, (0, 1), (3, 4)), Permutation.from_cycles(5, (0, 1, 2))])
    assert are_conjugate_subgroups(None, T1, T2) is None
