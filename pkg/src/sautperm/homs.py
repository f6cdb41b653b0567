"""Homomorphisms from a small group into S_m, up to conjugacy in S_m.

A permutation action is a multiset of transitive constituents, and a
transitive constituent is determined up to equivalence by the conjugacy
class of a point stabilizer.  So the S_m-classes of homomorphisms G -> S_m
are the multisets of subgroup classes of index >= 2 whose indices sum to at
most m, padded with fixed points.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .atlas import SmallGroup, SubgroupClass, core, coset_action, subgroup_classes
from .errors import CapacityError
from .perm import Permutation, is_even
from .permgroup import PermGroup, are_conjugate_subgroups, elements, subgroup_invariants


@dataclass
class HomClass:
    source: str
    degree: int
    generator_images: tuple[Permutation, ...]
    constituents: tuple[tuple[int, int], ...]  # (subgroup class id, multiplicity)
    lands_in_alternating: bool
    injective: bool | None = None
    index: int = -1

    def to_record(self) -> dict:
        return {
            "source": self.source,
            "degree": self.degree,
            "index": self.index,
            "constituents": [list(c) for c in self.constituents],
            "generator_images": [p.to_list() for p in self.generator_images],
            "lands_in_alternating": self.lands_in_alternating,
            "injective": self.injective,
        }

    @classmethod
    def from_record(cls, rec: dict) -> HomClass:
        return cls(
            source=rec["source"],
            degree=rec["degree"],
            generator_images=tuple(Permutation(x) for x in rec["generator_images"]),
            constituents=tuple(tuple(c) for c in rec["constituents"]),
            lands_in_alternating=rec["lands_in_alternating"],
            injective=rec["injective"],
            index=rec["index"],
        )

    def is_trivial(self) -> bool:
        return all(p.is_identity() for p in self.generator_images)


def _multisets(items: Sequence[tuple[int, int]], budget: int, bound: int):
    """Multisets of (id, weight) with total weight <= budget, in lexicographic id order."""
    count = 0

    def rec(start, remaining, chosen):
        nonlocal count
        count += 1
        if count > bound:
            raise CapacityError(f"more than {bound} constituent multisets")
        yield tuple(chosen)
        for k in range(start, len(items)):
            cid, w = items[k]
            if w <= remaining:
                chosen.append(cid)
                yield from rec(k, remaining - w, chosen)
                chosen.pop()

    yield from rec(0, budget, [])


def constituent_images(G: SmallGroup, classes: Sequence[SubgroupClass]) -> dict[int, list[Permutation]]:
    return {c.id: coset_action(G, c) for c in classes}


def assemble(G: SmallGroup, m: int, multiset: Sequence[int], actions: dict[int, list[Permutation]]) -> list[Permutation]:
    """Generator images of the direct sum of the given constituents, padded to degree m."""
    out = []
    for pos in range(len(G.generators)):
        img = []
        for cid in multiset:
            off = len(img)
            img.extend(off + x for x in actions[cid][pos].images)
        img.extend(range(len(img), m))
        out.append(Permutation(img, check=False))
    return out


def enumerate_hom_classes(
    G: SmallGroup,
    m: int,
    classes: Sequence[SubgroupClass] | None = None,
    alternating_only: bool = False,
    multiset_bound: int = 10**6,
) -> list[HomClass]:
    """One representative per S_m-class of homomorphisms G -> S_m.

    Sorted by moved degree and then by constituent ids; the trivial class comes first.
    """
    if classes is None:
        classes = subgroup_classes(G)
    usable = [c for c in classes if 2 <= c.index <= m]
    actions = constituent_images(G, usable)
    items = [(c.id, c.index) for c in usable]
    cores = {c.id: set(core(G, c.elements)) for c in usable}
    by_id = {c.id: c for c in usable}
    found = []
    for ms in _multisets(items, m, multiset_bound):
        imgs = assemble(G, m, ms, actions)
        even = all(is_even(p) for p in imgs)
        if alternating_only and not even:
            continue
        if G.order == 1:
            injective = True
        elif not ms:
            injective = False
        else:
            ker = set.intersection(*(cores[c] for c in ms))
            injective = ker == {0}
        counts = sorted((c, ms.count(c)) for c in set(ms))
        found.append((sum(by_id[c].index for c in ms), tuple(sorted(ms)), HomClass(
            source=G.name,
            degree=m,
            generator_images=tuple(imgs),
            constituents=tuple(counts),
            lands_in_alternating=even,
            injective=injective,
        )))
    found.sort(key=lambda t: (t[0], t[1]))
    out = []
    for k, (_, _, h) in enumerate(found):
        h.index = k
        out.append(h)
    return out


def is_injective(h: HomClass, G: SmallGroup) -> bool:
    return PermGroup(h.degree, list(h.generator_images)).order() == G.order


def restriction_images(h: HomClass, G: SmallGroup) -> list[Permutation]:
    """Images of the generators of the common A_n."""
    return [h.generator_images[p] for p in G.restrict_positions]


def injectivity_justified(n: int, m: int) -> bool:
    """Non-injective restrictions force a trivial action only for n = 5, m < 31."""
    return n == 5 and m < 31


@dataclass
class FilterLog:
    kept: list[int] = field(default_factory=list)
    removed: dict[int, str] = field(default_factory=dict)


def compatibility_filter(
    alphas: Sequence[HomClass],
    betas: Sequence[HomClass],
    m: int,
    G_alpha: SmallGroup,
    G_beta: SmallGroup,
    node_budget: int = 10**8,
    log: FilterLog | None = None,
) -> list[HomClass]:
    """Keep the alphas whose A_n-image is S_m-conjugate to the A_n-image of some beta."""
    beta_groups = []
    for b in betas:
        if b.degree != m:
            raise ValueError("beta at the wrong degree")
        H = PermGroup(m, restriction_images(b, G_beta))
        el = elements(H, 10**6)
        beta_groups.append((subgroup_invariants(H, el), H))
    kept = []
    for a in alphas:
        if a.degree != m:
            raise ValueError("alpha at the wrong degree")
        Ha = PermGroup(m, restriction_images(a, G_alpha))
        inv = subgroup_invariants(Ha)
        match = None
        for k, (binv, Hb) in enumerate(beta_groups):
            if binv != inv:
                continue
            if are_conjugate_subgroups(None, Ha, Hb, node_budget) is not None:
                match = k
                break
        if match is None:
            if log is not None:
                log.removed[a.index] = f"no beta with A_n image conjugate (order {inv[0]}, orbits {list(inv[1])})"
        else:
            kept.append(a)
            if log is not None:
                log.kept.append(a.index)
    return kept


# -- brute-force oracle -------------------------------------------------------

def _extends(G: SmallGroup, positions: Sequence[int], images: Sequence[tuple]) -> bool:
    """Does g_pos -> image extend to a homomorphism of <g_pos : pos in positions>?"""
    M = G.mult
    gens = [G.generators[p] for p in positions]
    m = len(images[0])
    assigned = {0: tuple(range(m))}
    queue = [0]
    while queue:
        x = queue.pop()
        px = assigned[x]
        for s, img in zip(gens, images):
            y = int(M[x, s])
            py = tuple(img[v] for v in px)
            prev = assigned.get(y)
            if prev is None:
                assigned[y] = py
                queue.append(y)
            elif prev != py:
                return False
    return True


def all_permutations(m: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(m))), dtype=np.int16).reshape(-1, m)


def canonical_tuple_key(images: Sequence[Permutation], perms: np.ndarray | None = None) -> tuple:
    """Lexicographically least S_m-conjugate of a tuple of permutations (small m only)."""
    m = images[0].degree
    if perms is None:
        perms = all_permutations(m)
    inv = np.argsort(perms, axis=1)
    parts = []
    for t in images:
        ta = np.array(t.images, dtype=np.intp)
        # (t^g)[y] = g[t[g^-1[y]]]
        parts.append(np.take_along_axis(perms, ta[inv], axis=1))
    allc = np.concatenate(parts, axis=1)
    best = np.lexsort(allc.T[::-1])[0]
    return tuple(allc[best].tolist())


def brute_force_homs(G: SmallGroup, m: int, limit: int = 10**6) -> list[HomClass]:
    """All homomorphisms by direct search over generator images, reduced to S_m-classes."""
    if m > 7:
        raise CapacityError("brute force limited to m <= 7")
    perms = all_permutations(m)
    tuples = [tuple(r) for r in perms.tolist()]
    orders = []
    for g in G.generator_perms:
        orders.append(g.order())

    def perm_order(p):
        return Permutation(p, check=False).order()

    cand = [[p for p in tuples if o % perm_order(p) == 0] for o in orders]
    homs = []
    count = 0

    def rec(k, chosen):
        nonlocal count
        if k == len(cand):
            homs.append(list(chosen))
            return
        for p in cand[k]:
            count += 1
            if count > limit:
                raise CapacityError("brute-force search space exceeded")
            chosen.append(p)
            if _extends(G, range(k + 1), chosen):
                rec(k + 1, chosen)
            chosen.pop()

    rec(0, [])
    classes: dict[tuple, list[Permutation]] = {}
    for h in homs:
        imgs = [Permutation(p, check=False) for p in h]
        key = canonical_tuple_key(imgs, perms)
        classes.setdefault(key, imgs)
    out = []
    for k, key in enumerate(sorted(classes)):
        imgs = classes[key]
        out.append(HomClass(
            source=G.name,
            degree=m,
            generator_images=tuple(imgs),
            constituents=(),
            lands_in_alternating=all(is_even(p) for p in imgs),
            injective=PermGroup(m, imgs).order() == G.order,
            index=k,
        ))
    return out
