"""The free group F_n and the automorphisms used throughout the search.

Letters are signed basis indices: ``k`` is ``a_k`` and ``-k`` is ``a_k^-1``
(1-based, as in the usual notation for the basis ``a_1, ..., a_n``).

Automorphisms multiply as functions: ``compose_aut(f, g)`` is ``f o g``,
i.e. ``g`` is applied to a word first.  This is the product in which
Gersten's relations hold as written, and it makes :func:`abelianize`
multiplicative with the usual column convention.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError
from .perm import Permutation, compose, parity

MAX_WORD_LENGTH = 1 << 20


def reduce(letters: Iterable[int], n: int | None = None) -> tuple[int, ...]:
    """Freely reduce a sequence of signed letters."""
    out: list[int] = []
    for x in letters:
        if x == 0 or (n is not None and abs(x) > n):
            raise InputError(f"letter {x} outside +-1..+-{n}")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert_word(w: Sequence[int]) -> tuple[int, ...]:
    return tuple(-x for x in reversed(w))


@dataclass(frozen=True)
class FreeWord:
    letters: tuple[int, ...]

    @classmethod
    def of(cls, letters: Iterable[int], n: int | None = None) -> FreeWord:
        return cls(reduce(letters, n))

    def __mul__(self, other: FreeWord) -> FreeWord:
        return FreeWord(reduce(self.letters + other.letters))

    def inverse(self) -> FreeWord:
        return FreeWord(invert_word(self.letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(f"a{x}" if x > 0 else f"a{-x}^-1" for x in self.letters)


def _substitute(images: Sequence[tuple[int, ...]], w: Sequence[int], limit: int) -> tuple[int, ...]:
    out: list[int] = []
    for x in w:
        img = images[x - 1] if x > 0 else invert_word(images[-x - 1])
        for y in img:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
        if len(out) > limit:
            raise InputError(f"word length exceeded guard of {limit} letters")
    return tuple(out)


class FreeAutomorphism:
    """An automorphism of F_n stored with the basis images of itself and of its inverse.

    Carrying the inverse explicitly keeps every product exact: the
    generators below have short, known inverses and
    ``(f o g)^-1 = g^-1 o f^-1``.
    """

    __slots__ = ("rank", "images", "inverse_images", "_hash")

    def __init__(self, rank: int, images, inverse_images=None, check: bool = True):
        self.rank = rank
        self.images = tuple(reduce(w, rank) for w in images) if check else tuple(images)
        if len(self.images) != rank:
            raise InputError(f"need {rank} basis images, got {len(self.images)}")
        if inverse_images is not None and check:
            inverse_images = tuple(reduce(w, rank) for w in inverse_images)
        self.inverse_images = None if inverse_images is None else tuple(inverse_images)
        self._hash = None
        if check:
            self._check_invertible()

    def _check_invertible(self) -> None:
        if self.inverse_images is not None:
            basis = tuple((k,) for k in range(1, self.rank + 1))
            for a, b in ((self.images, self.inverse_images), (self.inverse_images, self.images)):
                if tuple(_substitute(a, w, MAX_WORD_LENGTH) for w in b) != basis:
                    raise InputError("given inverse images do not invert the map")
        elif determinant(abelianize(self)) not in (1, -1):
            # necessary condition only; a full test would need Whitehead's algorithm
            raise InputError("map is not invertible on the abelianization")

    @classmethod
    def identity(cls, n: int) -> FreeAutomorphism:
        basis = tuple((k,) for k in range(1, n + 1))
        return cls(n, basis, basis, check=False)

    def __call__(self, w) -> tuple[int, ...]:
        return apply(self, w)

    def __mul__(self, other: FreeAutomorphism) -> FreeAutomorphism:
        return compose_aut(self, other)

    def inverse(self) -> FreeAutomorphism:
        if self.inverse_images is None:
            raise InputError("inverse not known for this automorphism")
        return FreeAutomorphism(self.rank, self.inverse_images, self.images, check=False)

    def is_identity(self) -> bool:
        return all(w == (k,) for k, w in enumerate(self.images, start=1))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FreeAutomorphism)
            and self.rank == other.rank
            and self.images == other.images
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rank, self.images))
        return self._hash

    def __lt__(self, other: FreeAutomorphism) -> bool:
        return self.images < other.images

    def describe(self) -> str:
        return "; ".join(
            f"a{k} -> {FreeWord(w)}" for k, w in enumerate(self.images, start=1)
        )

    def __repr__(self) -> str:
        return f"FreeAutomorphism({self.describe()})"


def parse_automorphism(text: str, n: int) -> FreeAutomorphism:
    """Parse ``"a1 -> a1 a2; a2 -> a2"`` (unlisted generators are fixed)."""
    images = [(k,) for k in range(1, n + 1)]
    for clause in filter(None, (c.strip() for c in text.split(";"))):
        lhs, rhs = (s.strip() for s in clause.split("->"))
        k = int(lhs.lstrip("a"))
        word = []
        for tok in rhs.split():
            if tok == "1":
                continue
            inv = tok.endswith("^-1")
            idx = int(tok[1:-3] if inv else tok[1:])
            word.append(-idx if inv else idx)
        images[k - 1] = tuple(word)
    return FreeAutomorphism(n, images)


def _check_rank(f: FreeAutomorphism, g: FreeAutomorphism) -> None:
    if f.rank != g.rank:
        raise InputError(f"rank mismatch: {f.rank} vs {g.rank}")


def apply(aut: FreeAutomorphism, w, limit: int = MAX_WORD_LENGTH) -> tuple[int, ...]:
    letters = w.letters if isinstance(w, FreeWord) else reduce(w)
    for x in letters:
        if abs(x) > aut.rank:
            raise InputError(f"letter {x} not in F_{aut.rank}")
    return _substitute(aut.images, letters, limit)


def compose_aut(f: FreeAutomorphism, g: FreeAutomorphism) -> FreeAutomorphism:
    """The product ``f o g`` (apply ``g``, then ``f``)."""
    _check_rank(f, g)
    images = tuple(_substitute(f.images, w, MAX_WORD_LENGTH) for w in g.images)
    inv = None
    if f.inverse_images is not None and g.inverse_images is not None:
        inv = tuple(_substitute(g.inverse_images, w, MAX_WORD_LENGTH) for w in f.inverse_images)
    return FreeAutomorphism(f.rank, images, inv, check=False)


def product(auts: Sequence[FreeAutomorphism], n: int) -> FreeAutomorphism:
    out = FreeAutomorphism.identity(n)
    for a in auts:
        out = compose_aut(out, a)
    return out


def conjugate_aut(x: FreeAutomorphism, g: FreeAutomorphism) -> FreeAutomorphism:
    """``x^g = g^-1 x g``."""
    return compose_aut(compose_aut(g.inverse(), x), g)


def commutator_aut(a: FreeAutomorphism, b: FreeAutomorphism) -> FreeAutomorphism:
    return product([a, b, a.inverse(), b.inverse()], a.rank)


# -- generators -------------------------------------------------------------

GENERATOR_KINDS = ("sigma", "epsilon", "sigma_last", "rho", "lambda")


def make_generator(kind: str, i: int, j: int | None = None, n: int | None = None) -> FreeAutomorphism:
    """Build one of the named automorphisms (indices are 1-based).

    sigma(i, j) swaps a_i and a_j; epsilon(i) inverts a_i; sigma_last(i)
    sends a_i to a_i^-1 and every other a_k to a_k a_i^-1; rho(i, j) sends
    a_i to a_i a_j and lambda(i, j) sends a_i to a_j a_i.
    """
    if n is None:
        raise InputError("rank n is required")
    if kind not in GENERATOR_KINDS:
        raise InputError(f"unknown generator kind {kind!r}")
    if not 1 <= i <= n:
        raise InputError(f"index {i} outside 1..{n}")
    needs_j = kind in ("sigma", "rho", "lambda")
    if needs_j and (j is None or not 1 <= j <= n or j == i):
        raise InputError(f"{kind} needs a second index distinct from {i} in 1..{n}")
    basis = [(k,) for k in range(1, n + 1)]
    img, inv = list(basis), list(basis)
    if kind == "sigma":
        img[i - 1], img[j - 1] = (j,), (i,)
        inv = img
    elif kind == "epsilon":
        img[i - 1] = (-i,)
        inv = img
    elif kind == "sigma_last":
        img = [(-i,) if k == i else (k, -i) for k in range(1, n + 1)]
        inv = img
    elif kind == "rho":
        img[i - 1] = (i, j)
        inv[i - 1] = (i, -j)
    else:
        img[i - 1] = (j, i)
        inv[i - 1] = (-j, i)
    return FreeAutomorphism(n, img, inv, check=False)


def rho(i, j, n):
    return make_generator("rho", i, j, n)


def lam(i, j, n):
    return make_generator("lambda", i, j, n)


def eps(i, n):
    return make_generator("epsilon", i, None, n)


def sigma(i, j, n):
    return make_generator("sigma", i, j, n)


def sigma_last(i, n):
    return make_generator("sigma_last", i, None, n)


def transposition_aut(i: int, j: int, n: int) -> FreeAutomorphism:
    """The automorphism attached to the transposition (i j) of {1..n+1}."""
    i, j = sorted((i, j))
    if j == n + 1:
        return sigma_last(i, n)
    return sigma(i, j, n)


def permutation_aut(c: Permutation, n: int) -> FreeAutomorphism:
    """Image of an element of S_{n+1} (acting on 0-based points 0..n).

    The map sends the transposition (i j) to sigma_ij (or sigma_i(n+1)) and
    is extended multiplicatively from the right-action product of
    permutations to the function-composition product of automorphisms.
    On S_n it reads a_i -> a_{c^-1(i)}.
    """
    if c.degree not in (n, n + 1):
        raise InputError(f"expected degree {n} or {n + 1}, got {c.degree}")
    # right action: (x0 x1 ... xk) = (x0 x1)(x0 x2)...(x0 xk)
    out = FreeAutomorphism.identity(n)
    for cyc in c.cycles():
        for y in cyc[1:]:
            out = compose_aut(out, transposition_aut(cyc[0] + 1, y + 1, n))
    return out


# -- abelianization ---------------------------------------------------------

def abelianize(aut: FreeAutomorphism) -> np.ndarray:
    """Integer matrix of the induced map on Z^n; column k counts letters of the image of a_k."""
    n = aut.rank
    mat = np.zeros((n, n), dtype=object)
    for k, w in enumerate(aut.images):
        for x in w:
            mat[abs(x) - 1, k] += 1 if x > 0 else -1
    return mat


def determinant(mat) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    a = [[int(x) for x in row] for row in mat]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def in_saut(aut: FreeAutomorphism) -> bool:
    return determinant(abelianize(aut)) == 1


# -- signed permutations ------------------------------------------------------

def letter_point(x: int) -> int:
    """Point 2k is a_{k+1}, point 2k+1 is a_{k+1}^-1."""
    return 2 * (x - 1) if x > 0 else 2 * (-x - 1) + 1


def point_letter(p: int) -> int:
    k = p // 2 + 1
    return k if p % 2 == 0 else -k


def is_signed_permutation(aut: FreeAutomorphism) -> bool:
    return all(len(w) == 1 for w in aut.images)


def signed_perm_rep(aut: FreeAutomorphism) -> Permutation:
    """Permutation of the 2n signed letters realizing ``aut``.

    The point ``x`` goes to ``aut^-1(x)``; with that choice the map is a
    homomorphism from function composition to the right-action product,
    ``rep(f o g) = rep(f) * rep(g)``.
    """
    if not is_signed_permutation(aut):
        raise InputError("not a signed permutation of the basis")
    inv = aut.inverse_images
    if inv is None:
        # recover the inverse of a signed permutation directly
        table = {}
        for k, (x,) in enumerate(aut.images, start=1):
            table[x], table[-x] = k, -k
        inv = tuple((table[k],) for k in range(1, aut.rank + 1))
    n = aut.rank
    images = [0] * (2 * n)
    for k in range(1, n + 1):
        (y,) = inv[k - 1]
        images[letter_point(k)] = letter_point(y)
        images[letter_point(-k)] = letter_point(-y)
    return Permutation(images, check=False)


# -- finite subgroups ---------------------------------------------------------

def closure(generators: Sequence[FreeAutomorphism], n: int, limit: int = 100_000) -> list[FreeAutomorphism]:
    """All elements of the (finite) group generated, sorted by basis images."""
    ident = FreeAutomorphism.identity(n)
    seen = {ident}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in generators:
            y = compose_aut(x, g)
            if y not in seen:
                seen.add(y)
                if len(seen) > limit:
                    raise InputError(f"closure exceeded {limit} elements")
                queue.append(y)
    return sorted(seen)


def three_cycle(i: int, j: int, k: int, degree: int) -> Permutation:
    """The 3-cycle (i j k) on 0-based points."""
    return Permutation.from_cycles(degree, (i, j, k))


def alternating_generators(k: int) -> list[Permutation]:
    """(0 1 2), (1 2 3), ..., (k-3 k-2 k-1) on k points."""
    return [three_cycle(t, t + 1, t + 2, k) for t in range(k - 2)]


def dprime_generators(n: int) -> list[FreeAutomorphism]:
    """eps1 eps2, eps2 eps3, then the automorphisms of the A_n 3-cycle generators."""
    if n < 3:
        raise InputError("D_n' generators need n >= 3")
    signs = [compose_aut(eps(1, n), eps(2, n)), compose_aut(eps(2, n), eps(3, n))]
    return signs + [permutation_aut(c, n) for c in alternating_generators(n)]


def bn_generators(n: int) -> list[FreeAutomorphism]:
    return [eps(i, n) for i in range(1, n + 1)] + [sigma(i, i + 1, n) for i in range(1, n)]


def bn_elements(n: int) -> list[FreeAutomorphism]:
    return closure(bn_generators(n), n)


def dprime_elements(n: int) -> list[FreeAutomorphism]:
    return closure(dprime_generators(n), n)


def fixes_basis_elements(aut: FreeAutomorphism, indices: Iterable[int]) -> bool:
    return all(aut.images[k - 1] == (k,) for k in indices)


def stabilizer_s(elements: Sequence[FreeAutomorphism]) -> list[FreeAutomorphism]:
    """Elements fixing a_1 and a_2."""
    return [e for e in elements if fixes_basis_elements(e, (1, 2))]


def brute_force_centralizer(elements: Sequence[FreeAutomorphism], x: FreeAutomorphism) -> list[FreeAutomorphism]:
    return [e for e in elements if compose_aut(e, x) == compose_aut(x, e)]


def dprime_membership_by_parity(aut: FreeAutomorphism) -> bool:
    """For an element of B_n: even number of sign changes and determinant one."""
    return parity(signed_perm_rep(aut)) == "even" and in_saut(aut)


__all__ = [
    "FreeWord",
    "FreeAutomorphism",
    "reduce",
    "apply",
    "compose_aut",
    "conjugate_aut",
    "commutator_aut",
    "make_generator",
    "abelianize",
    "determinant",
    "in_saut",
    "signed_perm_rep",
    "brute_force_centralizer",
    "closure",
    "compose",
]


# -- Gersten's presentation ---------------------------------------------------

@dataclass
class RelationReport:
    n: int
    checked: dict
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures


def check_gersten(n: int, families=("r1", "r2", "r3", "r4")) -> RelationReport:
    """Evaluate every instance of (r1)-(r4) on the automorphisms themselves."""
    from .relations import failures, gersten_relations

    if n < 3:
        raise InputError("Gersten's presentation needs n >= 3")
    rels = gersten_relations(n, families)
    checked: dict[str, int] = {}
    for r in rels:
        checked[r.family] = checked.get(r.family, 0) + 1
    bad = list(failures(
        rels,
        lambda kind, i, j: make_generator(kind, i, j, n),
        lambda f: f.inverse(),
        compose_aut,
        FreeAutomorphism.identity(n),
    ))
    return RelationReport(n, checked, [r.describe() for r in bad])
