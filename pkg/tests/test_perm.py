import pytest
from hypothesis import given, strategies as st

from sautperm import Permutation, commutator, compose, conjugate, parity
from sautperm.errors import InputError
from sautperm.perm import cycle_type, cycle_type_census, is_even


def perms(max_degree=9):
    return st.integers(1, max_degree).flatmap(
        lambda d: st.permutations(range(d)).map(Permutation)
    )


def same_degree(k, max_degree=9):
    return st.integers(1, max_degree).flatmap(
        lambda d: st.tuples(*[st.permutations(range(d)).map(Permutation)] * k)
    )


def test_composition_applies_left_factor_first():
    p = Permutation.from_cycles(3, (0, 1))
    q = Permutation.from_cycles(3, (1, 2))
    # 0 -p-> 1 -q-> 2
    assert (p * q)(0) == 2
    assert compose(p, q) == p * q


def test_from_cycles_and_cycles_roundtrip():
    p = Permutation.from_cycles(6, (0, 3, 1), (4, 5))
    assert p.cycles() == [(0, 3, 1), (4, 5)]
    assert p.cycle_type() == (3, 2, 1)
    assert p.order() == 6


def test_rejects_non_permutations():
    with pytest.raises(InputError):
        Permutation([0, 0, 1])
    with pytest.raises(InputError):
        Permutation([0, 2])


def test_mismatched_degrees():
    with pytest.raises(InputError):
        compose(Permutation.identity(2), Permutation.identity(3))


def test_parity_examples():
    assert parity(Permutation.identity(4)) == "even"
    assert parity(Permutation.from_cycles(4, (0, 1))) == "odd"
    assert parity(Permutation.from_cycles(5, (0, 1, 2))) == "even"
    assert parity(Permutation.from_cycles(4, (0, 1, 2, 3))) == "odd"


def test_cycle_type_census():
    c = cycle_type_census([Permutation.identity(3), Permutation.from_cycles(3, (0, 1))])
    assert c[(1, 1, 1)] == 1 and c[(2, 1)] == 1


@given(same_degree(3))
def test_associative(t):
    a, b, c = t
    assert (a * b) * c == a * (b * c)


@given(perms())
def test_inverse(p):
    assert (p * p.inverse()).is_identity()
    assert (~p * p).is_identity()
    assert p ** p.order() == Permutation.identity(p.degree)
    assert p ** -1 == p.inverse()


@given(same_degree(2))
def test_conjugation_is_g_inverse_p_g(t):
    p, g = t
    assert conjugate(p, g) == g.inverse() * p * g
    assert cycle_type(conjugate(p, g)) == cycle_type(p)


@given(same_degree(2))
def test_commutator_definition(t):
    a, b = t
    assert commutator(a, b) == a * b * a.inverse() * b.inverse()
    assert is_even(commutator(a, b))


@given(same_degree(2))
def test_parity_is_a_homomorphism(t):
    a, b = t
    assert is_even(a * b) == (is_even(a) == is_even(b))
