"""Permutation groups: stabilizer chains, centralizers and subgroup conjugacy."""
from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import CapacityError, InputError
from .perm import Permutation, conjugate, cycle_type, is_even

Images = tuple  # raw image tuple, used inside hot loops


def _mul(p: Images, q: Images) -> Images:
    return tuple([q[x] for x in p])


def _inv(p: Images) -> Images:
    out = [0] * len(p)
    for x, y in enumerate(p):
        out[y] = x
    return tuple(out)


def _is_id(p: Images) -> bool:
    return all(x == y for x, y in enumerate(p))


def _first_moved(p: Images) -> int | None:
    for x, y in enumerate(p):
        if x != y:
            return x
    return None


@dataclass
class Level:
    base_point: int
    gens: list  # strong generators fixing all earlier base points
    transversal: dict = field(default_factory=dict)  # point -> coset rep u with base^u = point

    def rebuild(self, degree: int) -> None:
        ident = tuple(range(degree))
        t = {self.base_point: ident}
        queue = deque([self.base_point])
        while queue:
            p = queue.popleft()
            u = t[p]
            for s in self.gens:
                q = s[p]
                if q not in t:
                    t[q] = _mul(u, s)
                    queue.append(q)
        self.transversal = t


class StabilizerChain:
    """Deterministic Schreier-Sims; new base points are smallest moved points."""

    def __init__(self, degree: int, generators: Sequence[Images]):
        self.degree = degree
        self.levels: list[Level] = []
        gens = [g for g in generators if not _is_id(g)]
        base: list[int] = []
        for g in gens:
            if all(g[b] == b for b in base):
                base.append(_first_moved(g))
        for k, b in enumerate(base):
            lvl = Level(b, [g for g in gens if all(g[c] == c for c in base[:k])])
            lvl.rebuild(degree)
            self.levels.append(lvl)
        self._complete()

    @property
    def base(self) -> list[int]:
        return [lvl.base_point for lvl in self.levels]

    def strip(self, g: Images, start: int = 0) -> tuple[Images, int]:
        for k in range(start, len(self.levels)):
            lvl = self.levels[k]
            x = g[lvl.base_point]
            u = lvl.transversal.get(x)
            if u is None:
                return g, k
            g = _mul(g, _inv(u))
        return g, len(self.levels)

    def _complete(self) -> None:
        i = len(self.levels) - 1
        while i >= 0:
            restart = False
            lvl = self.levels[i]
            for beta in sorted(lvl.transversal):
                u_beta = lvl.transversal[beta]
                for s in list(lvl.gens):
                    u_next = lvl.transversal[s[beta]]
                    g1 = _mul(u_beta, s)
                    if g1 == u_next:
                        continue
                    h, j = self.strip(_mul(g1, _inv(u_next)), i + 1)
                    if j == len(self.levels) and _is_id(h):
                        continue
                    if j == len(self.levels):
                        self.levels.append(Level(_first_moved(h), []))
                    for k in range(i + 1, j + 1):
                        self.levels[k].gens.append(h)
                        self.levels[k].rebuild(self.degree)
                    i = j
                    restart = True
                    break
                if restart:
                    break
            if not restart:
                i -= 1

    def order(self) -> int:
        return math.prod(len(lvl.transversal) for lvl in self.levels)

    def contains(self, g: Images) -> bool:
        h, j = self.strip(g)
        return j == len(self.levels) and _is_id(h)

    def radices(self) -> list[int]:
        return [len(lvl.transversal) for lvl in self.levels]

    def coset_arrays(self) -> list[np.ndarray]:
        """Per level, the coset representatives: the base point (identity) first, then by point."""
        out = []
        for lvl in self.levels:
            order = sorted(lvl.transversal, key=lambda p: (p != lvl.base_point, p))
            reps = [lvl.transversal[p] for p in order]
            out.append(np.array(reps, dtype=np.int16).reshape(len(reps), self.degree))
        return out


class PermGroup:
    """A finitely generated permutation group of a fixed degree."""

    def __init__(self, degree: int, generators: Sequence[Permutation] = ()):
        self.degree = degree
        gens = []
        for g in generators:
            if g.degree != degree:
                raise InputError(f"generator of degree {g.degree} in a group of degree {degree}")
            gens.append(g)
        self.generators = gens
        self._chain: StabilizerChain | None = None

    def build_chain(self) -> PermGroup:
        if self._chain is None:
            self._chain = StabilizerChain(self.degree, [g.images for g in self.generators])
        return self

    @property
    def chain(self) -> StabilizerChain:
        self.build_chain()
        return self._chain

    def order(self) -> int:
        return self.chain.order()

    def contains(self, p: Permutation) -> bool:
        if p.degree != self.degree:
            return False
        return self.chain.contains(p.images)

    def __contains__(self, p: Permutation) -> bool:
        return self.contains(p)

    def orbits(self) -> list[list[int]]:
        return orbits(self.degree, self.generators)

    def is_subgroup_of(self, other: PermGroup) -> bool:
        return all(other.contains(g) for g in self.generators)

    def elements(self, bound: int = 100_000) -> list[Permutation]:
        return elements(self, bound)

    def element_batches(self, start: int = 0, stop: int | None = None, batch: int = 1 << 16) -> Iterator[np.ndarray]:
        """Elements in chain order as int16 arrays of shape (k, degree).

        Element number ``i`` has mixed-radix digits over the chain levels
        (level 0 most significant) and equals ``u_last * ... * u_1 * u_0``
        with ``u_l`` the digit-th coset representative of level ``l``.
        """
        chain = self.chain
        reps = chain.coset_arrays()
        radices = chain.radices()
        total = chain.order()
        stop = total if stop is None else min(stop, total)
        if start >= stop:
            return
        if not reps:
            yield np.arange(self.degree, dtype=np.int16)[None, :]
            return
        # split: the deep levels are materialized once, the top levels per block
        split = len(reps)
        deep_size = 1
        while split > 0 and deep_size * radices[split - 1] <= max(batch, radices[-1]):
            split -= 1
            deep_size *= radices[split]
        deep = np.arange(self.degree, dtype=np.int16)[None, :]
        for lev in range(len(reps) - 1, split - 1, -1):
            # d * u for each coset rep u (outer index) and deeper element d
            deep = reps[lev][:, deep.astype(np.intp)].reshape(-1, self.degree)
        top_radices = radices[:split]
        for block in range(start // deep_size, (stop - 1) // deep_size + 1):
            top = np.arange(self.degree, dtype=np.int16)
            rem = block
            digits = []
            for r in reversed(top_radices):
                digits.append(rem % r)
                rem //= r
            digits.reverse()
            for lev in range(split - 1, -1, -1):
                top = reps[lev][digits[lev]][top.astype(np.intp)]
            lo = max(start - block * deep_size, 0)
            hi = min(stop - block * deep_size, deep_size)
            yield top[deep[lo:hi].astype(np.intp)]

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, gens={len(self.generators)})"


def build_chain(G: PermGroup) -> PermGroup:
    return G.build_chain()


def orbits(degree: int, generators: Sequence[Permutation]) -> list[list[int]]:
    seen = [False] * degree
    out = []
    for start in range(degree):
        if seen[start]:
            continue
        orb = [start]
        seen[start] = True
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for g in generators:
                y = g.images[x]
                if not seen[y]:
                    seen[y] = True
                    orb.append(y)
                    queue.append(y)
        out.append(sorted(orb))
    return out


def elements(G: PermGroup, bound: int = 100_000) -> list[Permutation]:
    """All elements sorted lexicographically by image array."""
    order = G.order()
    if order > bound:
        raise CapacityError(f"group order {order} exceeds element bound {bound}")
    out = []
    for arr in G.element_batches():
        out.extend(Permutation(row.tolist(), check=False) for row in arr)
    out.sort()
    return out


def closure_elements(degree: int, generators: Sequence[Permutation], limit: int = 1_000_000) -> set:
    """Plain breadth-first closure; independent of the stabilizer chain."""
    ident = tuple(range(degree))
    seen = {ident}
    queue = deque([ident])
    gens = [g.images for g in generators]
    while queue:
        x = queue.popleft()
        for g in gens:
            y = _mul(x, g)
            if y not in seen:
                seen.add(y)
                if len(seen) > limit:
                    raise CapacityError(f"closure exceeded {limit} elements")
                queue.append(y)
    return seen


def symmetric_group(m: int) -> PermGroup:
    gens = []
    if m >= 2:
        gens.append(Permutation.from_cycles(m, (0, 1)))
    if m >= 3:
        gens.append(Permutation.from_cycles(m, tuple(range(m))))
    return PermGroup(m, gens)


def alternating_group(m: int) -> PermGroup:
    return PermGroup(m, [Permutation.from_cycles(m, (t, t + 1, t + 2)) for t in range(m - 2)])


# -- centralizers -----------------------------------------------------------------

def _equivariant_map(gens: Sequence[Images], src: Sequence[int], x: int, y: int) -> dict | None:
    """The unique map f on the orbit of x with f(x) = y commuting with every generator."""
    f = {x: y}
    used = {y}
    queue = deque([x])
    while queue:
        p = queue.popleft()
        fp = f[p]
        for g in gens:
            q, fq = g[p], g[fp]
            if q in f:
                if f[q] != fq:
                    return None
            else:
                if fq in used:
                    return None
                f[q] = fq
                used.add(fq)
                queue.append(q)
    if len(f) != len(src):
        return None
    return f


def centralizer_in_symmetric(m: int, H: Sequence[Permutation]) -> tuple[list[Permutation], int]:
    """Generators and order of the centralizer of <H> in S_m.

    The centralizer is the direct product over isomorphism types of
    H-orbits of (orbit centralizer) wr S_k.
    """
    gens = [h.images for h in H]
    for h in H:
        if h.degree != m:
            raise InputError("all elements must have degree m")
    orbs = orbits(m, H)
    # group orbits by H-isomorphism, keeping the first orbit of each class
    classes: list[tuple[list[int], list[tuple[list[int], dict]]]] = []
    for orb in orbs:
        for first, members in classes:
            if len(first) != len(orb):
                continue
            iso = None
            for y in orb:
                iso = _equivariant_map(gens, first, first[0], y)
                if iso is not None:
                    break
            if iso is not None:
                members.append((orb, iso))
                break
        else:
            classes.append((orb, []))
    out: list[Permutation] = []
    order = 1
    ident = list(range(m))
    for first, members in classes:
        local = []
        for y in first:
            f = _equivariant_map(gens, first, first[0], y)
            if f is not None:
                local.append(f)
        order *= len(local) ** (1 + len(members)) * math.factorial(1 + len(members))
        for f in local:
            if all(f[p] == p for p in f):
                continue
            img = list(ident)
            for p, q in f.items():
                img[p] = q
            out.append(Permutation(img, check=False))
        for orb, iso in members:
            img = list(ident)
            for p, q in iso.items():
                img[p] = q
                img[q] = p
            out.append(Permutation(img, check=False))
    return out, order


def centralizer_in_alternating(m: int, H: Sequence[Permutation]) -> PermGroup:
    """The full centralizer of <H> inside A_m."""
    gens, _ = centralizer_in_symmetric(m, H)
    even = [g for g in gens if is_even(g)]
    odd = [g for g in gens if not is_even(g)]
    if odd:
        o1 = odd[0]
        o1inv = o1.inverse()
        extra = [o1 * o for o in odd] + [o * o1inv for o in odd[1:]]
        extra += [o1 * e * o1inv for e in even]
        even = even + [g for g in extra if not g.is_identity()]
    seen = set()
    uniq = []
    for g in even:
        if g not in seen:
            seen.add(g)
            uniq.append(g)
    return PermGroup(m, uniq)


# -- subgroup conjugacy -------------------------------------------------------

def _small_generating_set(G: PermGroup, elems: Sequence[Permutation]) -> list[Permutation]:
    target = len(elems)
    best: list[Permutation] = []
    cur = 1
    for g in sorted(elems, key=lambda e: (-e.order(), e.images)):
        if cur == target:
            break
        trial = PermGroup(G.degree, best + [g])
        o = trial.order()
        if o > cur:
            best.append(g)
            cur = o
    return best


def subgroup_invariants(G: PermGroup, elems: Sequence[Permutation] | None = None):
    if elems is None:
        elems = elements(G, 10**6)
    return (
        len(elems),
        tuple(sorted(len(o) for o in orbits(G.degree, G.generators))),
        tuple(sorted(Counter(cycle_type(e) for e in elems).items())),
    )


def _conjugate_tuple(src: Sequence[Images], dst: Sequence[Images], m: int, budget: list) -> Iterator[Images]:
    """All g with src[i]^g == dst[i] for every i."""
    src_orbs = orbits(m, [Permutation(s, check=False) for s in src])
    dst_orbs = orbits(m, [Permutation(d, check=False) for d in dst])

    def equiv(x, y):
        f = {x: y}
        used = {y}
        queue = deque([x])
        while queue:
            p = queue.popleft()
            fp = f[p]
            for s, d in zip(src, dst):
                q, fq = s[p], d[fp]
                if q in f:
                    if f[q] != fq:
                        return None
                elif fq in used:
                    return None
                else:
                    f[q] = fq
                    used.add(fq)
                    queue.append(q)
        return f

    def rec(k, g, free):
        budget[0] -= 1
        if budget[0] < 0:
            raise CapacityError("conjugacy backtrack node budget exhausted")
        if k == len(src_orbs):
            yield tuple(g)
            return
        orb = src_orbs[k]
        for t, dorb in enumerate(dst_orbs):
            if t not in free or len(dorb) != len(orb):
                continue
            for y in dorb:
                f = equiv(orb[0], y)
                if f is None or len(f) != len(orb):
                    continue
                for p, q in f.items():
                    g[p] = q
                yield from rec(k + 1, g, free - {t})

    yield from rec(0, [0] * m, frozenset(range(len(dst_orbs))))


def are_conjugate_subgroups(
    ambient: PermGroup | None,
    H1: PermGroup,
    H2: PermGroup,
    node_budget: int = 10**8,
) -> Permutation | None:
    """A g in ``ambient`` with H1^g == H2, or None.  ``ambient=None`` means S_m."""
    m = H1.degree
    if H2.degree != m:
        raise InputError("degree mismatch")
    e1 = elements(H1, 10**6)
    e2 = elements(H2, 10**6)
    if subgroup_invariants(H1, e1) != subgroup_invariants(H2, e2):
        return None
    if set(e1) == set(e2):
        return Permutation.identity(m)
    gens = _small_generating_set(H1, e1)
    if not gens:
        return Permutation.identity(m)
    set2 = set(e2)
    by_type: dict = {}
    for e in e2:
        by_type.setdefault(cycle_type(e), []).append(e)
    budget = [node_budget]
    src = [g.images for g in gens]

    def choose(k, chosen):
        if k == len(gens):
            yield chosen
            return
        for t in by_type.get(cycle_type(gens[k]), ()):
            yield from choose(k + 1, chosen + [t.images])

    for dst in choose(0, []):
        for g in _conjugate_tuple(src, dst, m, budget):
            gp = Permutation(g, check=False)
            if ambient is not None and not ambient.contains(gp):
                continue
            if all(conjugate(h, gp) in set2 for h in H1.generators):
                return gp
    return None
