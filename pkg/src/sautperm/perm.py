"""Permutations of {0, ..., m-1}.

Points are 0-based and permutations act on the right: ``x^p = p.images[x]``.
The product ``p * q`` applies ``p`` first and then ``q``, so
``x^(p*q) = (x^p)^q``.  Every other module conjugates through
:func:`conjugate` so that this convention lives in one place.
"""
from __future__ import annotations

from collections import Counter
from typing import Iterable, Sequence

from .errors import InputError


class Permutation:
    __slots__ = ("images", "_hash")

    def __init__(self, images: Iterable[int], check: bool = True):
        images = tuple(images)
        if check:
            m = len(images)
            if m == 0:
                raise InputError("a permutation needs a positive degree")
            if sorted(images) != list(range(m)):
                raise InputError(f"not a bijection of 0..{m - 1}: {images}")
        self.images = images
        self._hash = None

    @classmethod
    def identity(cls, degree: int) -> Permutation:
        if degree < 1:
            raise InputError("a permutation needs a positive degree")
        return cls(range(degree), check=False)

    @classmethod
    def from_cycles(cls, degree: int, *cycles: Sequence[int]) -> Permutation:
        images = list(range(degree))
        seen = set()
        for cyc in cycles:
            for k, x in enumerate(cyc):
                if not 0 <= x < degree or x in seen:
                    raise InputError(f"bad cycle {cyc} on {degree} points")
                seen.add(x)
                images[x] = cyc[(k + 1) % len(cyc)]
        return cls(images, check=False)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: Permutation) -> Permutation:
        return compose(self, other)

    def __invert__(self) -> Permutation:
        return self.inverse()

    def __pow__(self, k: int) -> Permutation:
        if k < 0:
            return self.inverse() ** (-k)
        result = Permutation.identity(self.degree)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> Permutation:
        inv = [0] * len(self.images)
        for x, y in enumerate(self.images):
            inv[y] = x
        return Permutation(inv, check=False)

    def is_identity(self) -> bool:
        return all(x == y for x, y in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each starting at its smallest point."""
        seen = [False] * self.degree
        out = []
        for start in range(self.degree):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            x = self.images[start]
            while x != start:
                cyc.append(x)
                seen[x] = True
                x = self.images[x]
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        return cycle_type(self)

    def order(self) -> int:
        from math import lcm

        out = 1
        for c in self.cycles():
            out = lcm(out, len(c))
        return out

    def support(self) -> list[int]:
        return [x for x, y in enumerate(self.images) if x != y]

    def to_list(self) -> list[int]:
        return list(self.images)

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __lt__(self, other: Permutation) -> bool:
        return self.images < other.images

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.images)
        return self._hash

    def __repr__(self) -> str:
        cyc = "".join("(" + " ".join(map(str, c)) + ")" for c in self.cycles())
        return f"Permutation[{self.degree}]{cyc or '()'}"


def _check_degrees(p: Permutation, q: Permutation) -> None:
    if len(p.images) != len(q.images):
        raise InputError(f"degree mismatch: {p.degree} vs {q.degree}")


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Apply ``p`` first, then ``q``."""
    _check_degrees(p, q)
    qi = q.images
    return Permutation([qi[x] for x in p.images], check=False)


def conjugate(p: Permutation, g: Permutation) -> Permutation:
    """Return ``p^g = g^-1 * p * g``; satisfies ``(x^g)^(p^g) = (x^p)^g``."""
    _check_degrees(p, g)
    out = [0] * p.degree
    gi, pi = g.images, p.images
    for x in range(p.degree):
        out[gi[x]] = gi[pi[x]]
    return Permutation(out, check=False)


def commutator(a: Permutation, b: Permutation) -> Permutation:
    """``[a, b] = a b a^-1 b^-1``."""
    _check_degrees(a, b)
    return a * b * a.inverse() * b.inverse()


def cycle_type(p: Permutation) -> tuple[int, ...]:
    """Cycle lengths in decreasing order, fixed points included as 1s."""
    lengths = [len(c) for c in p.cycles()]
    lengths += [1] * (p.degree - sum(lengths))
    return tuple(sorted(lengths, reverse=True))


def parity(p: Permutation) -> str:
    """'even' or 'odd'."""
    cyc = p.cycles()
    transpositions = sum(len(c) - 1 for c in cyc)
    return "even" if transpositions % 2 == 0 else "odd"


def is_even(p: Permutation) -> bool:
    return parity(p) == "even"


def cycle_type_census(perms: Iterable[Permutation]) -> Counter:
    return Counter(cycle_type(p) for p in perms)
