"""Extend a restriction alpha: D_n' -> A_m to SAut(F_n) by choosing the image of rho_12.

Every candidate tau lies in the centralizer of alpha(S) in A_m, where S is
the subgroup of D_n' fixing a_1 and a_2 (S commutes with rho_12).  The
other transvection images are conjugates of tau:

    rho_ij = tau^{alpha(sigma)}        sigma in A_n with rho_12^sigma = rho_ij
    lambda_ij = rho_ij^{alpha(eps_i eps_j)}

For n = 3 the group A_3 only reaches rho_12, rho_23 and rho_31; the other
three come from the commutator relation.  Candidates are screened with
the commutator relation alone; anything nontrivial that survives is then
audited against the whole presentation before it is reported.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable, Iterable, Sequence

import numpy as np

from .atlas import SmallGroup, alternating_small_group, dprime_group, signed_perm_to_aut, subgroup_classes
from .errors import CapacityError, InputError
from .freegroup import compose_aut, conjugate_aut, eps, rho, signed_perm_rep
from .homs import HomClass
from .perm import Permutation, commutator, conjugate, is_even
from .permgroup import PermGroup, centralizer_in_alternating
from .relations import failures, gersten_relations

Pair = tuple[int, int]


@dataclass
class TransvectionImages:
    n: int
    degree: int
    rho: dict[Pair, Permutation]
    lam: dict[Pair, Permutation]

    def lookup(self, kind: str, i: int, j: int) -> Permutation:
        return (self.rho if kind == "rho" else self.lam)[(i, j)]

    def to_record(self) -> dict:
        def enc(d):
            return {f"{i},{j}": d[(i, j)].to_list() for (i, j) in sorted(d)}

        return {"n": self.n, "degree": self.degree, "rho": enc(self.rho), "lambda": enc(self.lam)}

    @classmethod
    def from_record(cls, rec: dict) -> TransvectionImages:
        def dec(d):
            out = {}
            for k, v in d.items():
                i, j = (int(x) for x in k.split(","))
                out[(i, j)] = Permutation(v)
            return out

        T = cls(rec["n"], rec["degree"], dec(rec["rho"]), dec(rec["lambda"]))
        expected = {(i, j) for i, j in permutations(range(1, T.n + 1), 2)}
        if set(T.rho) != expected or set(T.lam) != expected:
            raise InputError("transvection images must cover every ordered pair")
        for p in list(T.rho.values()) + list(T.lam.values()):
            if p.degree != T.degree:
                raise InputError("image of the wrong degree")
        return T


# -- context shared by every degree of one rank -------------------------------

@dataclass
class SearchContext:
    n: int
    dprime: SmallGroup
    alt: SmallGroup  # A_{n+1}
    dprime_classes: list
    alt_classes: list
    pair_conjugators: dict[Pair, int]  # element index of sigma in D_n'
    eps_pairs: dict[Pair, int]  # element index of eps_i eps_j
    s_generators: list[int]
    synthesized: list[tuple[int, int, int]] = field(default_factory=list)  # (i, j, k): rho_ik from rho_ij, rho_jk
    screen_triples: list[tuple[int, int, int]] = field(default_factory=list)


def build_context(n: int, screen: str = "single") -> SearchContext:
    """Construct D_n', A_{n+1}, S and the conjugating elements used by the search.

    ``screen="single"`` tests the one commutator relation on (1, 2, 3) per
    candidate; ``"all"`` tests every rho instance of it, which is still a
    necessary condition but rejects more candidates before the audit.
    """
    if n < 3:
        raise InputError("the search needs n >= 3")
    if screen not in ("single", "all"):
        raise InputError("screen must be 'single' or 'all'")
    G = dprime_group(n)
    A = alternating_small_group(n + 1)
    r12 = rho(1, 2, n)
    targets = {rho(i, j, n): (i, j) for i, j in permutations(range(1, n + 1), 2)}
    conj: dict[Pair, int] = {}
    for k, p in enumerate(G.elements):
        aut = signed_perm_to_aut(p, n)
        if any(w[0] < 0 for w in aut.images):
            continue  # sign changes are not needed to move rho_12
        pair = targets.get(conjugate_aut(r12, aut))
        if pair is not None and pair not in conj:
            conj[pair] = k
    eps_pairs = {}
    for i, j in permutations(range(1, n + 1), 2):
        eps_pairs[(i, j)] = G.index[signed_perm_rep(compose_aut(eps(i, n), eps(j, n)))]
    s_gens: list[int] = []
    mask = G.closure_mask(s_gens)
    for k in G.s_indices:
        if not mask[k]:
            s_gens.append(k)
            mask = G.closure_mask(s_gens)
    synthesized = []
    known = set(conj)
    missing = [p for p in permutations(range(1, n + 1), 2) if p not in known]
    while missing:
        progress = False
        for i, k in list(missing):
            for j in range(1, n + 1):
                if j not in (i, k) and (i, j) in known and (j, k) in known:
                    synthesized.append((i, j, k))
                    known.add((i, k))
                    missing.remove((i, k))
                    progress = True
                    break
        if not progress:
            raise InputError("cannot reach every transvection")
    used = set(synthesized)
    if screen == "all":
        triples = [t for t in permutations(range(1, n + 1), 3) if t not in used]
    elif n >= 4:
        triples = [(1, 2, 3)]
    else:
        # the synthesized images satisfy their defining instances by construction
        triples = [t for t in permutations(range(1, n + 1), 3) if t not in used]
    return SearchContext(
        n=n,
        dprime=G,
        alt=A,
        dprime_classes=subgroup_classes(G),
        alt_classes=subgroup_classes(A),
        pair_conjugators=conj,
        eps_pairs=eps_pairs,
        s_generators=s_gens,
        synthesized=synthesized,
        screen_triples=triples,
    )


# -- single-candidate operations -------------------------------------------------

def alpha_s_images(alpha: HomClass, ctx: SearchContext) -> list[Permutation]:
    full = ctx.dprime.extend(list(alpha.generator_images))
    return [Permutation(full[s].tolist(), check=False) for s in ctx.s_generators]


def transvection_images(alpha: HomClass, tau: Permutation, ctx: SearchContext, check: bool = True) -> TransvectionImages:
    n, m = ctx.n, alpha.degree
    if tau.degree != m:
        raise InputError("tau has the wrong degree")
    full = ctx.dprime.extend(list(alpha.generator_images))

    def img(k):
        return Permutation(full[k].tolist(), check=False)

    if check:
        if not is_even(tau):
            raise InputError("tau must be even")
        for s in ctx.s_generators:
            if not commutator(tau, img(s)).is_identity():
                raise InputError("tau does not centralize alpha(S)")
    rho_imgs = {pair: conjugate(tau, img(k)) for pair, k in ctx.pair_conjugators.items()}
    for i, j, k in ctx.synthesized:
        rho_imgs[(i, k)] = commutator(rho_imgs[(i, j)].inverse(), rho_imgs[(j, k)].inverse()).inverse()
    lam_imgs = {pair: conjugate(r, img(ctx.eps_pairs[pair])) for pair, r in rho_imgs.items()}
    return TransvectionImages(n, m, rho_imgs, lam_imgs)


def check_r2(T: TransvectionImages) -> bool:
    lhs = commutator(T.rho[(1, 2)].inverse(), T.rho[(2, 3)].inverse())
    return lhs == T.rho[(1, 3)].inverse()


def passes_screen(T: TransvectionImages, triples: Iterable[tuple[int, int, int]]) -> bool:
    return all(
        commutator(T.rho[(i, j)].inverse(), T.rho[(j, k)].inverse()) == T.rho[(i, k)].inverse()
        for i, j, k in triples
    )


@dataclass
class Audit:
    checked: dict[str, int]
    failures: list[str]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_record(self) -> dict:
        return {"checked": dict(sorted(self.checked.items())), "failures": self.failures, "passed": self.passed}


def verify_certificate(T: TransvectionImages, max_failures: int | None = None) -> Audit:
    """Check every instance of (r1)-(r4) on the images."""
    rels = gersten_relations(T.n)
    checked: dict[str, int] = {}
    for r in rels:
        checked[r.family] = checked.get(r.family, 0) + 1
    bad = []
    for r in failures(rels, T.lookup, lambda p: p.inverse(), lambda a, b: a * b, Permutation.identity(T.degree)):
        bad.append(r.describe())
        if max_failures is not None and len(bad) >= max_failures:
            break
    return Audit(checked, bad)


def classify(T: TransvectionImages) -> str:
    trivial = all(p.is_identity() for p in T.rho.values()) and all(p.is_identity() for p in T.lam.values())
    return "trivial" if trivial else "nontrivial"


# -- vectorized screening ---------------------------------------------------------

def _b_inv(P: np.ndarray) -> np.ndarray:
    out = np.empty_like(P)
    rows = np.arange(P.shape[0])[:, None]
    out[rows, P] = np.arange(P.shape[1], dtype=P.dtype)[None, :]
    return out


def _b_mul(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """P then Q, row by row."""
    return np.take_along_axis(Q, P.astype(np.intp), axis=1)


def _b_conj(P: np.ndarray, g: np.ndarray) -> np.ndarray:
    ginv = np.argsort(g)
    return g[P[:, ginv]]


def _b_comm_inv(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """[a^-1, b^-1] = a^-1 b^-1 a b."""
    ai, bi = _b_inv(a), _b_inv(b)
    return _b_mul(_b_mul(_b_mul(ai, bi), a), b)


@dataclass
class ShardTask:
    alpha_index: int
    lo: int
    hi: int
    degree: int
    reps: list  # coset arrays of the centralizer chain
    radices: list
    conjugators: dict  # pair -> perm array
    synthesized: list
    screen: list
    s_images: list  # arrays
    batch: int = 1 << 16


@dataclass
class ShardResult:
    alpha_index: int
    lo: int
    hi: int
    tested: int
    identity_passes: int
    passers: list[int]  # tau indices of nontrivial candidates passing the screen

    def to_record(self) -> dict:
        return {
            "alpha": self.alpha_index, "lo": self.lo, "hi": self.hi, "tested": self.tested,
            "identity_passes": self.identity_passes, "passers": self.passers,
        }

    @classmethod
    def from_record(cls, rec: dict) -> ShardResult:
        return cls(rec["alpha"], rec["lo"], rec["hi"], rec["tested"], rec["identity_passes"], list(rec["passers"]))


class _ChainView(PermGroup):
    """A PermGroup whose chain is given by precomputed coset arrays."""

    def __init__(self, degree, reps, radices):
        super().__init__(degree, [])
        self._reps = reps
        self._radices = radices

        class _C:
            pass

        c = _C()
        c.coset_arrays = lambda: reps
        c.radices = lambda: radices
        c.order = lambda: math.prod(radices)
        self._chain = c


def run_shard(task: ShardTask) -> ShardResult:
    view = _ChainView(task.degree, task.reps, task.radices)
    ident = np.arange(task.degree, dtype=np.int16)
    tested = 0
    identity_passes = 0
    passers: list[int] = []
    pos = task.lo
    for T in view.element_batches(task.lo, task.hi, task.batch):
        k = T.shape[0]
        for s in task.s_images:
            if not np.array_equal(s[T.astype(np.intp)], T[:, s.astype(np.intp)]):
                raise AssertionError("candidate does not centralize alpha(S)")
        R = {(1, 2): T}
        for pair, g in task.conjugators.items():
            if pair != (1, 2):
                R[pair] = _b_conj(T, g)
        for i, j, l in task.synthesized:
            R[(i, l)] = _b_inv(_b_comm_inv(R[(i, j)], R[(j, l)]))
        ok = np.ones(k, dtype=bool)
        for i, j, l in task.screen:
            ok &= (_b_comm_inv(R[(i, j)], R[(j, l)]) == _b_inv(R[(i, l)])).all(axis=1)
        hits = np.flatnonzero(ok)
        if len(hits):
            is_id = (T[hits] == ident).all(axis=1)
            identity_passes += int(is_id.sum())
            passers.extend((pos + hits[~is_id]).tolist())
        tested += k
        pos += k
    return ShardResult(task.alpha_index, task.lo, task.hi, tested, identity_passes, passers)


# -- certificates -------------------------------------------------------------------

@dataclass
class Certificate:
    kind: str  # "nontrivial" or "exhausted"
    n: int
    m: int
    counts: dict
    filters: dict
    alpha: dict | None = None
    tau_index: int | None = None
    images: TransvectionImages | None = None
    audit: Audit | None = None

    def to_record(self) -> dict:
        rec = {
            "format": "sautperm-certificate/1",
            "points": "0-based; a permutation is its image array, x -> images[x], acting on the right",
            "kind": self.kind,
            "n": self.n,
            "m": self.m,
            "counts": dict(sorted(self.counts.items())),
            "filters": self.filters,
        }
        if self.kind == "nontrivial":
            rec["alpha"] = self.alpha
            rec["tau_index"] = self.tau_index
            rec["images"] = self.images.to_record()
            rec["audit"] = self.audit.to_record()
            rec["classification"] = classify(self.images)
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> Certificate:
        if rec.get("format") != "sautperm-certificate/1":
            raise InputError("unknown certificate format")
        kind = rec["kind"]
        if kind not in ("nontrivial", "exhausted"):
            raise InputError(f"unknown certificate kind {kind!r}")
        images = TransvectionImages.from_record(rec["images"]) if kind == "nontrivial" else None
        audit = None
        if "audit" in rec:
            audit = Audit(rec["audit"]["checked"], rec["audit"]["failures"])
        return cls(kind, rec["n"], rec["m"], rec["counts"], rec.get("filters", {}),
                   rec.get("alpha"), rec.get("tau_index"), images, audit)


def images_certificate(T: TransvectionImages, note: str = "") -> Certificate:
    """Wrap a set of transvection images (e.g. a control) as a certificate."""
    return Certificate(
        kind="nontrivial", n=T.n, m=T.degree, counts={}, filters={"note": note} if note else {},
        alpha=None, tau_index=None, images=T, audit=verify_certificate(T),
    )


# -- the degree search -------------------------------------------------------------

@dataclass
class AlphaPlan:
    alpha: HomClass
    centralizer: PermGroup
    order: int
    reps: list
    radices: list


def plan_alpha(alpha: HomClass, ctx: SearchContext, budget: int) -> AlphaPlan:
    C = centralizer_in_alternating(alpha.degree, alpha_s_images(alpha, ctx))
    order = C.order()
    if order > budget:
        raise CapacityError(
            f"centralizer of alpha #{alpha.index} has {order} elements, over the budget of {budget}",
            {"alpha": alpha.index, "centralizer_order": order},
        )
    return AlphaPlan(alpha, C, order, C.chain.coset_arrays(), C.chain.radices())


def make_tasks(plan: AlphaPlan, ctx: SearchContext, shard_size: int, batch: int = 1 << 16) -> list[ShardTask]:
    alpha = plan.alpha
    full = ctx.dprime.extend(list(alpha.generator_images))
    conj = {pair: full[k].copy() for pair, k in sorted(ctx.pair_conjugators.items())}
    s_imgs = [full[s].copy() for s in ctx.s_generators]
    tasks = []
    for lo in range(0, plan.order, shard_size):
        tasks.append(ShardTask(
            alpha.index, lo, min(lo + shard_size, plan.order), alpha.degree, plan.reps, plan.radices,
            conj, list(ctx.synthesized), list(ctx.screen_triples), s_imgs, batch,
        ))
    return tasks


def tau_at(plan: AlphaPlan, index: int) -> Permutation:
    (arr,) = list(plan.centralizer.element_batches(index, index + 1))
    return Permutation(arr[0].tolist(), check=False)


def _map_ordered(tasks: Sequence[ShardTask], threads: int):
    """Results in task order; with threads > 1 a bounded window runs ahead."""
    if threads <= 1 or len(tasks) <= 1:
        for t in tasks:
            yield run_shard(t)
        return
    with ProcessPoolExecutor(max_workers=threads) as ex:
        window = []
        it = iter(tasks)
        for t in it:
            window.append(ex.submit(run_shard, t))
            if len(window) >= 2 * threads:
                break
        try:
            while window:
                fut = window.pop(0)
                yield fut.result()
                nxt = next(it, None)
                if nxt is not None:
                    window.append(ex.submit(run_shard, nxt))
        finally:
            for f in window:
                f.cancel()


def search_degree(
    n: int,
    m: int,
    alphas: Sequence[HomClass],
    ctx: SearchContext,
    budget_tau: int = 10**9,
    shard_size: int = 1 << 20,
    threads: int = 1,
    filters: dict | None = None,
    base_counts: dict | None = None,
    completed: dict | None = None,
    on_shard: Callable[[ShardResult], None] | None = None,
) -> Certificate:
    """Test every alpha and every tau in C_{A_m}(alpha(S)).

    ``completed`` maps (alpha index, lo) to results recovered from a
    checkpoint; those shards are not recomputed.  ``on_shard`` is called
    for every newly finished shard, in order.
    """
    if ctx.n != n:
        raise InputError("context built for a different rank")
    completed = completed or {}
    counts = dict(base_counts or {})
    counts.update({"alphas_searched": 0, "candidates_tested": 0, "identity_passes": 0,
                   "screen_passers": 0, "audit_failures": 0})
    # size every centralizer first so an over-budget alpha fails before any work
    plans = [plan_alpha(alpha, ctx, budget_tau) for alpha in alphas]
    for plan in plans:
        alpha = plan.alpha
        counts["alphas_searched"] += 1
        tasks = make_tasks(plan, ctx, shard_size)
        todo = [t for t in tasks if (t.alpha_index, t.lo) not in completed]
        fresh = _map_ordered(todo, threads)
        for t in tasks:
            key = (t.alpha_index, t.lo)
            if key in completed:
                res = completed[key]
            else:
                res = next(fresh)
            found = None
            audited = 0
            for idx in res.passers:
                audited += 1
                T = transvection_images(alpha, tau_at(plan, idx), ctx)
                audit = verify_certificate(T)
                if audit.passed and classify(T) == "nontrivial":
                    found = (idx, T, audit)
                    break
                counts["audit_failures"] += 1
            # stop counting at the winning candidate so counts do not depend on shard size
            counts["candidates_tested"] += res.tested if found is None else found[0] - res.lo + 1
            counts["identity_passes"] += res.identity_passes
            counts["screen_passers"] += len(res.passers) if found is None else audited
            if key not in completed and on_shard is not None:
                on_shard(res)
            if found is not None:
                fresh.close()
                idx, T, audit = found
                return Certificate(
                    "nontrivial", n, m, counts, filters or {},
                    alpha=alpha.to_record(), tau_index=idx, images=T, audit=audit,
                )
        fresh.close()
    return Certificate("exhausted", n, m, counts, filters or {})
