import random

import numpy as np
import pytest

from sautperm.atlas import dprime_group
from sautperm.controls import (
    SL2_ID, SL2_S, SL2_T, SL2Mat, chi, elementary_gf2, gf2_vector_action, psi_chi, psl_action,
    psl_restriction,
)
from sautperm.errors import InputError
from sautperm.perm import is_even
from sautperm.search import classify, verify_certificate


def test_chi_values():
    assert chi(SL2_ID) == 0
    assert chi(SL2_T) == 1
    assert psi_chi(SL2_ID) == 0
    assert psi_chi(SL2_T) == 1
    assert psi_chi(SL2_T @ SL2_T) == 0


def test_chi_orders_of_generators():
    # S has order 4 and ST has order 6, so their images have orders dividing those
    assert (4 * chi(SL2_S)) % 12 == 0
    assert (6 * chi(SL2_S @ SL2_T)) % 12 == 0


def test_sl2_rejects_bad_determinant():
    with pytest.raises(InputError):
        SL2Mat(1, 1, 1, 1)


def random_word(rng, max_len=30):
    m = SL2_ID
    for _ in range(rng.randint(0, max_len)):
        m = m @ rng.choice([SL2_S, SL2_T])
    return m


def test_chi_is_multiplicative():
    rng = random.Random(2024)
    for _ in range(1000):
        a, b = random_word(rng), random_word(rng)
        assert chi(a @ b) == (chi(a) + chi(b)) % 12
        assert psi_chi(a @ b) == (psi_chi(a) + psi_chi(b)) % 2


def test_gf2_action_rejects_singular_matrices():
    with pytest.raises(InputError):
        gf2_vector_action(np.array([[1, 1], [1, 1]]))


@pytest.mark.parametrize("n", [3, 4, 5])
def test_psl_action_passes_the_audit(n):
    T = psl_action(n)
    assert T.degree == 2 ** n - 1
    audit = verify_certificate(T)
    assert audit.passed, audit.failures[:3]
    assert classify(T) == "nontrivial"
    assert all(is_even(p) for p in T.rho.values())
    assert T.rho == T.lam


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_rho12_fixed_point_count(n):
    p = psl_action(n).rho[(1, 2)]
    fixed = sum(1 for x in range(p.degree) if p(x) == x)
    assert fixed == 2 ** (n - 1) - 1
    # those are exactly the vectors with zero second coordinate
    assert all((p(x) == x) == (((x + 1) >> 1) & 1 == 0) for x in range(p.degree))


def test_elementary_matrix_shape():
    assert elementary_gf2(3, 1, 2).tolist() == [[1, 0, 0], [1, 1, 0], [0, 0, 1]]


def test_psl_restriction_is_a_homomorphism():
    for n in (3, 4):
        assert dprime_group(n).is_homomorphism(psl_restriction(n))


def test_psl_action_needs_rank_three():
    with pytest.raises(InputError):
        psl_action(2)
