import itertools

import pytest
from hypothesis import given, settings, strategies as st

from sautperm.errors import InputError
from sautperm.freegroup import (
    FreeAutomorphism, FreeWord, abelianize, apply, brute_force_centralizer, check_gersten,
    closure, commutator_aut, compose_aut, conjugate_aut, determinant, dprime_elements,
    dprime_membership_by_parity, eps, in_saut, lam, letter_point, make_generator,
    parse_automorphism, permutation_aut, point_letter, reduce, rho, sigma, sigma_last,
    signed_perm_rep, stabilizer_s, bn_elements,
)
from sautperm.perm import Permutation
from sautperm.relations import gersten_relations

N = 3
letters = st.integers(1, N).flatmap(lambda k: st.sampled_from([k, -k]))
words = st.lists(letters, max_size=12)


def random_aut(draw_indices):
    """Product of transvections and sign changes from index triples."""
    out = FreeAutomorphism.identity(N)
    for kind, i, j in draw_indices:
        if kind == "epsilon":
            g = eps(i, N)
        else:
            g = make_generator(kind, i, j, N)
        out = compose_aut(out, g)
    return out


pairs = st.tuples(st.integers(1, N), st.integers(1, N)).filter(lambda t: t[0] != t[1])
gen_steps = st.lists(
    st.tuples(st.sampled_from(["rho", "lambda", "sigma", "epsilon"]), pairs).map(lambda t: (t[0], *t[1])),
    max_size=5,
)


def test_reduce_cancels_adjacent_inverses():
    assert reduce([1, 2, -2, -1, 3]) == (3,)
    assert reduce([1, -1]) == ()
    with pytest.raises(InputError):
        reduce([0])
    with pytest.raises(InputError):
        reduce([4], n=3)


@given(words)
def test_word_times_inverse_is_empty(w):
    fw = FreeWord.of(w)
    assert len(fw * fw.inverse()) == 0
    assert FreeWord.of(fw.letters).letters == fw.letters  # reduction is idempotent


def test_generators_act_as_named():
    assert rho(1, 2, 3).images == ((1, 2), (2,), (3,))
    assert lam(1, 2, 3).images == ((2, 1), (2,), (3,))
    assert eps(2, 3).images == ((1,), (-2,), (3,))
    assert sigma(1, 3, 3).images == ((3,), (2,), (1,))
    assert sigma_last(1, 2).images == ((-1,), (2, -1))


def test_make_generator_validates_indices():
    for bad in [("rho", 1, 1), ("rho", 0, 1), ("rho", 1, 4), ("nonsense", 1, 2)]:
        with pytest.raises(InputError):
            make_generator(*bad, n=3)


def test_parse_automorphism():
    f = parse_automorphism("a1 -> a1 a2^-1; a3 -> a3", 3)
    assert f.images == ((1, -2), (2,), (3,))
    assert f == rho(1, 2, 3).inverse()


def test_non_invertible_images_are_rejected():
    with pytest.raises(InputError):
        FreeAutomorphism(2, [(1,), (1,)])


def test_product_is_function_composition():
    f, g = rho(1, 2, 3), sigma(1, 2, 3)
    w = (1, 3, -2)
    assert apply(compose_aut(f, g), w) == apply(f, apply(g, w))


@given(gen_steps, words)
def test_inverse_undoes(steps, w):
    f = random_aut(steps)
    assert compose_aut(f, f.inverse()).is_identity()
    assert apply(f.inverse(), apply(f, w)) == reduce(w)


@given(gen_steps, gen_steps)
def test_abelianization_is_multiplicative(s1, s2):
    f, g = random_aut(s1), random_aut(s2)
    assert (abelianize(compose_aut(f, g)) == abelianize(f).dot(abelianize(g))).all()


def test_determinant_and_saut():
    assert determinant([[2, 1], [1, 1]]) == 1
    assert determinant([[0, 1], [1, 0]]) == -1
    assert determinant([[1, 2, 3], [4, 5, 6], [7, 8, 9]]) == 0
    assert in_saut(rho(1, 2, 4))
    assert not in_saut(eps(1, 4))
    assert in_saut(compose_aut(eps(1, 4), eps(2, 4)))


def test_signed_points():
    for x in (1, -1, 2, -3):
        assert point_letter(letter_point(x)) == x


@given(gen_steps.map(lambda s: [t for t in s if t[0] in ("sigma", "epsilon")]),
       gen_steps.map(lambda s: [t for t in s if t[0] in ("sigma", "epsilon")]))
def test_signed_rep_is_homomorphism(s1, s2):
    f, g = random_aut(s1), random_aut(s2)
    assert signed_perm_rep(compose_aut(f, g)) == signed_perm_rep(f) * signed_perm_rep(g)


def test_permutation_aut_is_homomorphism_on_s4():
    n = 3
    elems = [Permutation(p) for p in itertools.permutations(range(n + 1))]
    for a in elems:
        for b in elems:
            assert permutation_aut(a * b, n) == compose_aut(permutation_aut(a, n), permutation_aut(b, n))


def test_permutation_aut_sends_transpositions_to_sigmas():
    assert permutation_aut(Permutation.from_cycles(4, (0, 2)), 3) == sigma(1, 3, 3)
    assert permutation_aut(Permutation.from_cycles(4, (1, 3)), 3) == sigma_last(2, 3)


@pytest.mark.parametrize("n,order", [(3, 12), (4, 96), (5, 960)])
def test_dprime_order(n, order):
    # 2^(n-1) even sign patterns times n!/2 even permutations
    assert len(dprime_elements(n)) == order


def test_dprime_is_the_parity_subgroup_of_bn():
    n = 4
    members = {e for e in bn_elements(n) if dprime_membership_by_parity(e)}
    assert members == set(dprime_elements(n))


def test_s_centralizes_rho12():
    n = 5
    els = dprime_elements(n)
    S = stabilizer_s(els)
    r = rho(1, 2, n)
    assert all(conjugate_aut(r, s) == r for s in S)
    assert set(S) <= set(brute_force_centralizer(els, r))


def test_closure_of_a_transposition():
    assert len(closure([sigma(1, 2, 3)], 3)) == 2


def test_commutator_of_transvections():
    n = 3
    # [rho12^-1, rho23^-1] = rho13^-1
    c = commutator_aut(rho(1, 2, n).inverse(), rho(2, 3, n).inverse())
    assert c == rho(1, 3, n).inverse()


@pytest.mark.parametrize("n,counts", [
    (3, {"r1": 72, "r2": 12, "r3": 24, "r4": 12}),
    (4, {"r1": 576, "r2": 48, "r3": 144, "r4": 24}),
])
def test_relation_instance_counts(n, counts):
    rels = gersten_relations(n)
    got = {}
    for r in rels:
        got[r.family] = got.get(r.family, 0) + 1
    assert got == counts


def test_relations_hold_and_a_broken_generator_is_caught():
    assert check_gersten(3).ok
    from sautperm.relations import failures

    n = 3

    def lookup(kind, i, j):
        if (kind, i, j) == ("rho", 1, 2):
            return lam(1, 2, n)  # deliberately wrong
        return make_generator(kind, i, j, n)

    bad = list(failures(gersten_relations(n), lookup, lambda f: f.inverse(), compose_aut,
                        FreeAutomorphism.identity(n)))
    assert bad and any(r.family == "r2" for r in bad)


def test_check_gersten_rejects_small_rank():
    with pytest.raises(InputError):
        check_gersten(2)
