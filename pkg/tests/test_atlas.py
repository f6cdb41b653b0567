import pytest

from sautperm.atlas import (
    alternating_small_group, core, coset_action, cyclic_group, dprime_group, signed_perm_to_aut,
    subgroup_classes, symmetric_small_group, trivial_group,
)
from sautperm.errors import InputError
from sautperm.freegroup import signed_perm_rep
from sautperm.perm import Permutation
from sautperm.permgroup import PermGroup


@pytest.mark.parametrize("make,count", [
    (trivial_group, 1),
    (lambda: cyclic_group(2), 2),
    (lambda: cyclic_group(6), 4),
    (lambda: symmetric_small_group(3), 4),
    (lambda: alternating_small_group(4), 5),
    (lambda: symmetric_small_group(4), 11),
    (lambda: alternating_small_group(5), 9),
    (lambda: alternating_small_group(6), 22),
])
def test_number_of_subgroup_classes(make, count):
    assert len(subgroup_classes(make())) == count


def test_classes_are_subgroups_and_sorted():
    G = symmetric_small_group(4)
    classes = subgroup_classes(G)
    assert [c.order for c in classes] == sorted(c.order for c in classes)
    for c in classes:
        els = set(c.elements)
        assert 0 in els
        assert all(int(G.mult[a, b]) in els for a in els for b in els)
        assert c.index * c.order == G.order
        assert set(G.subgroup_generated(c.generators)) == els


def test_multiplication_table_matches_permutations():
    G = dprime_group(3)
    for a in range(G.order):
        for b in range(G.order):
            assert G.elements[G.mult[a, b]] == G.elements[a] * G.elements[b]
        assert G.elements[G.inv[a]] == G.elements[a].inverse()


def test_extend_and_homomorphism_check():
    G = symmetric_small_group(3)
    # generators are a transposition and a 3-cycle
    sign = [Permutation.from_cycles(2, (0, 1)), Permutation.identity(2)]
    assert G.is_homomorphism(sign)
    full = G.extend(sign)
    for k, p in enumerate(G.elements):
        assert (full[k].tolist() == [1, 0]) == (p.order() == 2)
    bogus = [Permutation.identity(3), Permutation.from_cycles(3, (0, 1))]  # c^3 would map to (0 1)
    assert not G.is_homomorphism(bogus)


def test_coset_action_is_transitive_of_degree_index():
    G = alternating_small_group(5)
    for c in subgroup_classes(G):
        imgs = coset_action(G, c)
        assert G.is_homomorphism(imgs)
        assert len(imgs[0].images) == c.index
        assert len(PermGroup(c.index, imgs).orbits()) == 1


def test_coset_action_rejects_non_subgroups():
    G = symmetric_small_group(3)
    three = next(k for k, p in enumerate(G.elements) if p.order() == 3)
    with pytest.raises(InputError):
        coset_action(G, [0, three])


def test_core():
    G = symmetric_small_group(4)
    orders = {c.order: len(core(G, c.elements)) for c in subgroup_classes(G)}
    assert orders[24] == 24 and orders[12] == 12 and orders[1] == 1
    # a point stabilizer S_3 has trivial core
    assert orders[6] == 1


def test_dprime_group_shape():
    for n, order, s in [(3, 12, 1), (4, 96, 2), (5, 960, 12)]:
        G = dprime_group(n)
        assert G.order == order
        assert len(G.s_indices) == s
        assert G.restrict_positions == list(range(2, n))
    G = dprime_group(4)
    for p in G.elements[:20]:
        assert signed_perm_rep(signed_perm_to_aut(p, 4)) == p


def test_alternating_restriction_positions():
    A = alternating_small_group(6)
    assert A.restrict_positions == [0, 1, 2]
    assert A.generator_perms[0] == Permutation.from_cycles(6, (0, 1, 2))
