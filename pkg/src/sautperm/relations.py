"""Gersten's relations among the transvections, as explicit word instances.

A relation is ``lhs == rhs`` where both sides are tuples of tokens
``(kind, i, j, exponent)`` with ``kind`` in {"rho", "lambda"} and 1-based
indices.  The same instances are evaluated on automorphisms of F_n and on
candidate permutation images.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product
from typing import Callable, Iterator, TypeVar

T = TypeVar("T")

Token = tuple[str, int, int, int]


@dataclass(frozen=True)
class Relation:
    family: str  # r1..r4
    witness: tuple
    lhs: tuple[Token, ...]
    rhs: tuple[Token, ...] = ()

    def describe(self) -> str:
        def side(tokens):
            if not tokens:
                return "1"
            return " ".join(
                f"{'rho' if k == 'rho' else 'lam'}{i}{j}" + ("^-1" if e < 0 else "")
                for k, i, j, e in tokens
            )

        return f"{self.family} {self.witness}: {side(self.lhs)} = {side(self.rhs)}"


def _inv(tokens):
    return tuple((k, i, j, -e) for k, i, j, e in reversed(tokens))


def _comm(x, y):
    return x + y + _inv(x) + _inv(y)


def _t(kind, i, j, e=1):
    return ((kind, i, j, e),)


def gersten_relations(n: int, families=("r1", "r2", "r3", "r4")) -> list[Relation]:
    """Every instance of (r1)-(r4) over all index tuples and sign choices."""
    rng = range(1, n + 1)
    out: dict[tuple, Relation] = {}

    def add(rel):
        out.setdefault((rel.family, rel.lhs, rel.rhs), rel)

    for i, j, k in permutations(rng, 3):
        for l in rng:
            if l in (i, k):
                continue
            for s, t in product((1, -1), repeat=2):
                if "r1" in families:
                    for a, b in (("rho", "rho"), ("lambda", "lambda"), ("rho", "lambda")):
                        add(Relation("r1", (a, b, i, j, k, l, s, t), _comm(_t(a, i, j, s), _t(b, k, l, t))))
                if "r3" in families:
                    add(Relation("r3", (i, j, l, s, t), _comm(_t("rho", i, j, s), _t("lambda", i, l, t))))
        if "r2" in families:
            for kind in ("rho", "lambda"):
                add(Relation(
                    "r2", (kind, i, j, k),
                    _comm(_t(kind, i, j, -1), _t(kind, j, k, -1)),
                    _t(kind, i, k, -1),
                ))
    if "r4" in families:
        for i, j in permutations(rng, 2):
            a = _t("lambda", i, j) + _t("lambda", j, i, -1) + _t("rho", i, j)
            b = _t("rho", i, j) + _t("rho", j, i, -1) + _t("lambda", i, j)
            add(Relation("r4", ("lambda", i, j), a * 4))
            add(Relation("r4", ("rho", i, j), b * 4))
    order = {"r1": 0, "r2": 1, "r3": 2, "r4": 3}
    return sorted(out.values(), key=lambda r: (order[r.family], r.witness))


def evaluate_side(
    tokens,
    lookup: Callable[[str, int, int], T],
    inverse: Callable[[T], T],
    mul: Callable[[T, T], T],
    one: T,
) -> T:
    acc = one
    for kind, i, j, e in tokens:
        x = lookup(kind, i, j)
        acc = mul(acc, x if e > 0 else inverse(x))
    return acc


def failures(
    relations,
    lookup: Callable[[str, int, int], T],
    inverse: Callable[[T], T],
    mul: Callable[[T, T], T],
    one: T,
) -> Iterator[Relation]:
    cache = {}

    def cached(kind, i, j):
        key = (kind, i, j)
        if key not in cache:
            cache[key] = lookup(kind, i, j)
        return cache[key]

    for rel in relations:
        lhs = evaluate_side(rel.lhs, cached, inverse, mul, one)
        rhs = evaluate_side(rel.rhs, cached, inverse, mul, one)
        if lhs != rhs:
            yield rel
