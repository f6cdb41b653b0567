"""Small finite groups given by a faithful permutation representation.

Elements are indexed 0..N-1 in lexicographic order of their image arrays,
so index 0 is the identity.  Multiplication and conjugation tables are
materialized; everything here is meant for groups of order <= 10^4.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import CapacityError, InputError
from .perm import Permutation
from .permgroup import closure_elements

MAX_SMALL_ORDER = 10_000


@dataclass
class SmallGroup:
    name: str
    degree: int
    elements: list[Permutation]
    generators: list[int]  # element indices, fixed order
    generator_labels: list[str]
    restrict_positions: list[int] = field(default_factory=list)
    s_indices: list[int] = field(default_factory=list)
    _mult: np.ndarray | None = None
    _inv: np.ndarray | None = None
    _conj: np.ndarray | None = None
    _tree: tuple | None = None

    def __post_init__(self):
        self.index = {p: k for k, p in enumerate(self.elements)}

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def generator_perms(self) -> list[Permutation]:
        return [self.elements[g] for g in self.generators]

    @property
    def mult(self) -> np.ndarray:
        """mult[a, b] = index of a*b (a first)."""
        if self._mult is None:
            E = np.array([p.images for p in self.elements], dtype=np.int64)
            codes = _codes(E, self.degree)
            order = np.argsort(codes)
            sorted_codes = codes[order]
            N = self.order
            table = np.empty((N, N), dtype=np.int32)
            for a in range(N):
                prod = E[:, E[a]]  # row b: (a*b)[x] = b[a[x]]
                pos = np.searchsorted(sorted_codes, _codes(prod, self.degree))
                table[a] = order[pos]
            self._mult = table
        return self._mult

    @property
    def inv(self) -> np.ndarray:
        if self._inv is None:
            self._inv = np.argmax(self.mult == 0, axis=1).astype(np.int32)
        return self._inv

    @property
    def conj(self) -> np.ndarray:
        """conj[x, h] = index of x^-1 h x."""
        if self._conj is None:
            self._conj = self._conj_table()
        return self._conj

    def _conj_table(self) -> np.ndarray:
        M, inv = self.mult, self.inv
        N = self.order
        out = np.empty((N, N), dtype=np.int32)
        for x in range(N):
            # x^-1 h x for all h: first m1 = x^-1 * h, then m1 * x
            out[x] = M[M[inv[x]], x]
        return out

    def closure_mask(self, gens: Sequence[int]) -> np.ndarray:
        M = self.mult
        mask = np.zeros(self.order, dtype=bool)
        mask[0] = True
        gens = np.asarray(list(gens), dtype=np.intp)
        frontier = np.array([0], dtype=np.intp)
        while len(frontier) and len(gens):
            nxt = M[np.ix_(frontier, gens)].ravel()
            nxt = np.unique(nxt[~mask[nxt]])
            mask[nxt] = True
            frontier = nxt
        return mask

    def spanning_tree(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """BFS order, parent and generator position: g = parent[g] * gen[g]."""
        if self._tree is None:
            N = self.order
            parent = np.full(N, -1, dtype=np.int64)
            via = np.full(N, -1, dtype=np.int64)
            seen = np.zeros(N, dtype=bool)
            seen[0] = True
            order = [0]
            queue = deque([0])
            M = self.mult
            while queue:
                x = queue.popleft()
                for pos, s in enumerate(self.generators):
                    y = int(M[x, s])
                    if not seen[y]:
                        seen[y] = True
                        parent[y], via[y] = x, pos
                        order.append(y)
                        queue.append(y)
            if len(order) != N:
                raise InputError(f"generators of {self.name} do not generate the group")
            self._tree = (np.array(order), parent, via)
        return self._tree

    def extend(self, gen_images: Sequence[Permutation]) -> np.ndarray:
        """Images of all elements along the spanning tree (not checked)."""
        m = gen_images[0].degree if gen_images else 1
        imgs = np.array([p.images for p in gen_images], dtype=np.int16).reshape(len(gen_images), m)
        order, parent, via = self.spanning_tree()
        out = np.empty((self.order, m), dtype=np.int16)
        out[0] = np.arange(m)
        for g in order[1:]:
            out[g] = imgs[via[g]][out[parent[g]]]
        return out

    def is_homomorphism(self, gen_images: Sequence[Permutation]) -> bool:
        """True iff the generator images extend to a homomorphism of the whole group."""
        if len(gen_images) != len(self.generators):
            raise InputError("need one image per generator")
        if not gen_images:
            return True
        full = self.extend(gen_images)
        M = self.mult
        for pos, s in enumerate(self.generators):
            img = full[s]
            lhs = full[M[:, s]]
            rhs = img[full.astype(np.intp)]
            if not np.array_equal(lhs, rhs):
                return False
        return True

    def subgroup_generated(self, idx: Sequence[int]) -> list[int]:
        return np.flatnonzero(self.closure_mask(idx)).tolist()


def _codes(E: np.ndarray, d: int) -> np.ndarray:
    if d ** d >= 2 ** 62:
        raise CapacityError("faithful degree too large for table encoding")
    weights = d ** np.arange(d, dtype=np.int64)
    return (E.astype(np.int64) * weights).sum(axis=-1)


def small_group(name: str, generators: Sequence[Permutation], labels: Sequence[str] | None = None,
                restrict_positions=(), s_predicate=None) -> SmallGroup:
    if not generators:
        raise InputError("a small group needs at least one generator (possibly the identity)")
    degree = generators[0].degree
    elems = closure_elements(degree, generators, limit=MAX_SMALL_ORDER)
    elements = sorted(Permutation(e, check=False) for e in elems)
    index = {p: k for k, p in enumerate(elements)}
    G = SmallGroup(
        name=name,
        degree=degree,
        elements=elements,
        generators=[index[g] for g in generators],
        generator_labels=list(labels) if labels else [f"g{k}" for k in range(len(generators))],
        restrict_positions=list(restrict_positions),
    )
    if s_predicate is not None:
        G.s_indices = [k for k, p in enumerate(elements) if s_predicate(p)]
    return G


def cyclic_group(k: int) -> SmallGroup:
    deg = max(k, 1)
    g = Permutation.from_cycles(deg, tuple(range(k))) if k > 1 else Permutation.identity(1)
    return small_group(f"C{k}", [g], ["c"])


def symmetric_small_group(k: int) -> SmallGroup:
    gens = [Permutation.from_cycles(k, (0, 1)), Permutation.from_cycles(k, tuple(range(k)))]
    return small_group(f"S{k}", gens, ["t", "c"])


def trivial_group() -> SmallGroup:
    return small_group("1", [Permutation.identity(1)], ["e"])


def alternating_small_group(k: int) -> SmallGroup:
    """A_k on k points with generators (0 1 2), (1 2 3), ...; the first k-3 generate A_{k-1}."""
    from .freegroup import alternating_generators

    gens = alternating_generators(k)
    labels = [f"({t} {t + 1} {t + 2})" for t in range(k - 2)]
    return small_group(f"A{k}", gens, labels, restrict_positions=range(k - 3))


def dprime_group(n: int) -> SmallGroup:
    """D_n' acting on the 2n signed letters, with S = the stabilizer of a_1 and a_2.

    Generators: eps1 eps2, eps2 eps3 and the A_n 3-cycles (positions 2..n-1).
    """
    from .freegroup import dprime_generators, signed_perm_rep

    gens = [signed_perm_rep(a) for a in dprime_generators(n)]
    labels = ["eps1eps2", "eps2eps3"] + [f"({t + 1} {t + 2} {t + 3})" for t in range(n - 2)]
    return small_group(
        f"D{n}'",
        gens,
        labels,
        restrict_positions=range(2, n),
        s_predicate=lambda p: p.images[0] == 0 and p.images[2] == 2,
    )


def signed_perm_to_aut(p: Permutation, n: int):
    """Inverse of ``signed_perm_rep`` on signed permutations."""
    from .freegroup import FreeAutomorphism, point_letter

    inv_images = [(point_letter(p.images[2 * k]),) for k in range(n)]
    images = [None] * n
    for k, (y,) in enumerate(inv_images, start=1):
        images[abs(y) - 1] = (k if y > 0 else -k,)
    return FreeAutomorphism(n, images, inv_images, check=False)


# -- subgroup classes -----------------------------------------------------------

@dataclass(frozen=True)
class SubgroupClass:
    id: int
    elements: tuple[int, ...]  # sorted indices into the parent's element list
    generators: tuple[int, ...]
    order: int
    index: int

    @property
    def key(self) -> tuple[int, ...]:
        return self.elements


def _canonical(G: SmallGroup, idx: np.ndarray) -> tuple[tuple[int, ...], int]:
    conjs = np.sort(G.conj[:, idx], axis=1)
    best = np.lexsort(conjs.T[::-1])[0]
    return tuple(conjs[best].tolist()), int(best)


def _greedy_generators(G: SmallGroup, idx: Sequence[int]) -> list[int]:
    gens: list[int] = []
    mask = G.closure_mask(gens)
    for g in idx:
        if not mask[g]:
            gens.append(int(g))
            mask = G.closure_mask(gens)
    return gens


def subgroup_classes(G: SmallGroup) -> list[SubgroupClass]:
    """One subgroup per conjugacy class, ordered by (order, canonical key).

    Subgroups are reached by repeated joins ``<H, g>`` from the trivial
    group, keeping one representative per class; g runs over one element
    per orbit of (left multiplication by H) x (conjugation by N_G(H)).
    The representative of a class is its lexicographically least conjugate.
    """
    if G.order > MAX_SMALL_ORDER:
        raise CapacityError(f"group order {G.order} exceeds {MAX_SMALL_ORDER}")
    N = G.order
    conj, mult = G.conj, G.mult
    found: dict[tuple[int, ...], tuple[int, ...]] = {}
    seen_masks: set[bytes] = set()
    trivial = (0,)
    found[trivial] = ()
    queue = deque([trivial])
    ar = np.arange(N)
    while queue:
        key = queue.popleft()
        H = np.array(key, dtype=np.intp)
        hmask = np.zeros(N, dtype=bool)
        hmask[H] = True
        hgens = list(found[key])
        normal = hmask[conj[:, H]].all(axis=1)
        ngens = _greedy_generators(G, np.flatnonzero(normal))
        rows, cols = [], []
        for h in hgens:
            rows.append(ar)
            cols.append(mult[h, :])
        for x in ngens:
            rows.append(ar)
            cols.append(conj[x, :])
        if rows:
            r = np.concatenate(rows)
            c = np.concatenate(cols)
            graph = coo_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(N, N))
            _, labels = connected_components(graph, directed=True, connection="weak")
        else:
            labels = ar
        first = {}
        for g in range(N):
            if not hmask[g] and labels[g] not in first:
                first[labels[g]] = g
        for g in first.values():
            gens = hgens + [g]
            kmask = G.closure_mask(gens)
            b = kmask.tobytes()
            if b in seen_masks:
                continue
            seen_masks.add(b)
            kidx = np.flatnonzero(kmask)
            ckey, x = _canonical(G, kidx)
            if ckey in found:
                continue
            cgens = tuple(sorted({int(conj[x, s]) for s in gens}))
            found[ckey] = cgens
            queue.append(ckey)
    keys = sorted(found, key=lambda k: (len(k), k))
    out = []
    for cid, k in enumerate(keys):
        gens = found[k] or ()
        out.append(SubgroupClass(cid, k, tuple(gens), len(k), N // len(k)))
    return out


def core(G: SmallGroup, elements: Sequence[int]) -> list[int]:
    idx = np.asarray(elements, dtype=np.intp)
    mask = np.zeros(G.order, dtype=bool)
    mask[idx] = True
    inside = mask[G.conj[:, idx]].all(axis=0)
    return idx[inside].tolist()


def coset_action(G: SmallGroup, H) -> list[Permutation]:
    """Right-coset action of G on G/H, one permutation per fixed generator.

    Coset 0 is H itself; cosets are numbered by their smallest element index.
    """
    elems = list(H.elements) if isinstance(H, SubgroupClass) else list(H)
    idx = np.asarray(sorted(set(elems)), dtype=np.intp)
    mult = G.mult
    mask = np.zeros(G.order, dtype=bool)
    mask[idx] = True
    if not mask[0] or not mask[mult[np.ix_(idx, idx)]].all():
        raise InputError("not a subgroup")
    label = np.full(G.order, -1, dtype=np.int64)
    reps = []
    for g in range(G.order):
        if label[g] < 0:
            label[mult[idx, g]] = len(reps)
            reps.append(g)
    reps_arr = np.array(reps, dtype=np.intp)
    return [Permutation(label[mult[reps_arr, s]].tolist(), check=False) for s in G.generators]
