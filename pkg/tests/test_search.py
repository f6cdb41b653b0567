import json
from itertools import permutations

import numpy as np
import pytest

from sautperm.atlas import signed_perm_to_aut
from sautperm.controls import psl_action, psl_restriction
from sautperm.errors import CapacityError, InputError
from sautperm.freegroup import compose_aut, conjugate_aut, eps, lam, rho
from sautperm.homs import HomClass, enumerate_hom_classes
from sautperm.perm import Permutation, commutator, is_even
from sautperm.search import (
    Certificate, TransvectionImages, build_context, check_r2, classify, make_tasks, passes_screen,
    plan_alpha, run_shard, search_degree, tau_at, transvection_images, verify_certificate,
)
from tests.conftest import context


def psl_alpha(n):
    return HomClass(f"D{n}'", 2 ** n - 1, tuple(psl_restriction(n)), (), True)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_pair_conjugators_move_rho12(n):
    ctx = context(n)
    G = ctx.dprime
    for (i, j), k in ctx.pair_conjugators.items():
        s = signed_perm_to_aut(G.elements[k], n)
        assert all(w[0] > 0 for w in s.images)  # no sign changes
        assert is_even(G.elements[k])
        assert conjugate_aut(rho(1, 2, n), s) == rho(i, j, n)
    expected = n * (n - 1) if n >= 4 else 3
    assert len(ctx.pair_conjugators) == expected


@pytest.mark.parametrize("n", [3, 4])
def test_sign_pairs_turn_rho_into_lambda(n):
    ctx = context(n)
    for (i, j), k in ctx.eps_pairs.items():
        s = signed_perm_to_aut(ctx.dprime.elements[k], n)
        assert s == compose_aut(eps(i, n), eps(j, n))
        assert conjugate_aut(rho(i, j, n), s) == lam(i, j, n)


@pytest.mark.parametrize("n,order", [(3, 1), (4, 2), (5, 12)])
def test_s_generators_generate_the_stabilizer(n, order):
    ctx = context(n)
    G = ctx.dprime
    assert int(G.closure_mask(ctx.s_generators).sum()) == order
    for k in ctx.s_generators:
        s = signed_perm_to_aut(G.elements[k], n)
        assert s.images[0] == (1,) and s.images[1] == (2,)


def test_rank_three_synthesizes_the_missing_pairs(ctx3):
    assert sorted((i, k) for i, _, k in ctx3.synthesized) == [(1, 3), (2, 1), (3, 2)]
    assert sorted(ctx3.screen_triples) == [(1, 3, 2), (2, 1, 3), (3, 2, 1)]


@pytest.mark.parametrize("n", [3, 4])
def test_images_reproduce_the_psl_control(n):
    ctx = context(n)
    P = psl_action(n)
    T = transvection_images(psl_alpha(n), P.rho[(1, 2)], ctx)
    assert T.rho == P.rho and T.lam == P.lam
    assert check_r2(T)


def test_transvection_images_preconditions(ctx3):
    alpha = psl_alpha(3)
    with pytest.raises(InputError):
        transvection_images(alpha, Permutation.from_cycles(7, (0, 1)), ctx3)
    with pytest.raises(InputError):
        transvection_images(alpha, Permutation.identity(6), ctx3)
    # for n = 5 the image of S is nontrivial, so some 3-cycle fails to commute with it
    ctx5 = context(5)
    alpha5 = psl_alpha(5)
    full = ctx5.dprime.extend(list(alpha5.generator_images))
    s_imgs = [Permutation(full[k].tolist()) for k in ctx5.s_generators]
    three_cycles = (Permutation.from_cycles(31, c) for c in permutations(range(31), 3))
    bad = next(t for t in three_cycles if any(not commutator(t, s).is_identity() for s in s_imgs))
    with pytest.raises(InputError):
        transvection_images(alpha5, bad, ctx5)


def test_trivial_images_classify_trivial():
    ident = Permutation.identity(4)
    pairs = list(permutations(range(1, 4), 2))
    T = TransvectionImages(3, 4, {p: ident for p in pairs}, {p: ident for p in pairs})
    assert verify_certificate(T).passed
    assert classify(T) == "trivial"


def test_audit_names_the_broken_relation():
    T = psl_action(3)
    T.rho[(1, 2)] = Permutation.identity(7)
    audit = verify_certificate(T)
    assert not audit.passed
    assert any(f.startswith("r2") for f in audit.failures)
    assert not check_r2(T)


@pytest.mark.parametrize("n,m", [(3, 6), (3, 7), (4, 6)])
def test_vectorized_screen_matches_scalar(n, m):
    ctx = context(n)
    alphas = enumerate_hom_classes(ctx.dprime, m, ctx.dprime_classes, alternating_only=True)
    for alpha in alphas[:4]:
        plan = plan_alpha(alpha, ctx, 10**6)
        (task,) = make_tasks(plan, ctx, shard_size=10**7, batch=97)
        res = run_shard(task)
        assert res.tested == plan.order
        scalar = []
        ident = 0
        for idx in range(plan.order):
            tau = tau_at(plan, idx)
            T = transvection_images(alpha, tau, ctx)
            if passes_screen(T, ctx.screen_triples):
                if tau.is_identity():
                    ident += 1
                else:
                    scalar.append(idx)
        assert res.passers == scalar
        assert res.identity_passes == ident == 1


def test_certificate_roundtrip(ctx3):
    alphas = enumerate_hom_classes(ctx3.dprime, 7, ctx3.dprime_classes, alternating_only=True)
    cert = search_degree(3, 7, alphas, ctx3)
    rec = json.loads(json.dumps(cert.to_record()))
    back = Certificate.from_record(rec)
    assert back.to_record() == cert.to_record()
    assert verify_certificate(back.images).passed
    with pytest.raises(InputError):
        Certificate.from_record({**rec, "format": "other"})
    broken = json.loads(json.dumps(rec))
    del broken["images"]["rho"]["1,2"]
    with pytest.raises(InputError):
        Certificate.from_record(broken)


def test_search_outcomes_rank_three(ctx3):
    outcomes = {}
    for m in (5, 6, 7):
        alphas = enumerate_hom_classes(ctx3.dprime, m, ctx3.dprime_classes, alternating_only=True)
        cert = search_degree(3, m, alphas, ctx3)
        outcomes[m] = cert.kind
        if cert.kind == "nontrivial":
            assert cert.audit.passed
            assert classify(cert.images) == "nontrivial"
    assert outcomes == {5: "exhausted", 6: "exhausted", 7: "nontrivial"}


def test_counts_do_not_depend_on_shards_or_threads(ctx3):
    alphas = enumerate_hom_classes(ctx3.dprime, 7, ctx3.dprime_classes, alternating_only=True)
    ref = search_degree(3, 7, alphas, ctx3).to_record()
    assert search_degree(3, 7, alphas, ctx3, shard_size=111).to_record() == ref
    assert search_degree(3, 7, alphas, ctx3, shard_size=500, threads=2).to_record() == ref


def test_broader_screen_gives_the_same_answer():
    ctx = build_context(3, screen="all")
    alphas = enumerate_hom_classes(ctx.dprime, 7, ctx.dprime_classes, alternating_only=True)
    a = search_degree(3, 7, alphas, ctx)
    b = search_degree(3, 7, alphas, context(3))
    assert a.kind == b.kind == "nontrivial"
    assert a.images.rho == b.images.rho


def test_budget_turns_into_capacity_error(ctx3):
    alphas = enumerate_hom_classes(ctx3.dprime, 7, ctx3.dprime_classes, alternating_only=True)
    with pytest.raises(CapacityError) as err:
        search_degree(3, 7, alphas, ctx3, budget_tau=100)
    assert err.value.context["centralizer_order"] > 100


def test_context_rejects_small_rank():
    with pytest.raises(InputError):
        build_context(2)
