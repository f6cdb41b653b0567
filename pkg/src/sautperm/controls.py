"""Known nontrivial actions used as positive controls.

* ``psl_action(n)``: SAut(F_n) -> GL_n(F_2) acting on the 2^n - 1 nonzero
  vectors.  Point ``p - 1`` is the vector whose coordinate i is bit i-1 of
  the integer ``p``.  Vectors are rows and matrices act on the right, which
  matches the right action of permutations.
* ``chi`` and ``psi_chi``: the character SL_2(Z) -> Z/12 and its reduction
  to Z/2, giving the action of SAut(F_2) on two points.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .perm import Permutation


def gf2_vector_action(mat: np.ndarray) -> Permutation:
    """Permutation of the nonzero vectors of F_2^n induced by v -> v M."""
    n = mat.shape[0]
    images = []
    for p in range(1, 2 ** n):
        v = np.array([(p >> i) & 1 for i in range(n)], dtype=np.int64)
        w = (v @ (np.asarray(mat, dtype=np.int64) % 2)) % 2
        q = int(sum(int(b) << i for i, b in enumerate(w)))
        if q == 0:
            raise InputError("matrix is singular over GF(2)")
        images.append(q - 1)
    return Permutation(images)


def elementary_gf2(n: int, i: int, j: int) -> np.ndarray:
    """Mod-2 abelianization of rho_ij: identity plus a 1 in row j, column i (1-based)."""
    mat = np.eye(n, dtype=np.int64)
    mat[j - 1, i - 1] = 1
    return mat


def psl_action(n: int):
    """Transvection images of SAut(F_n) -> PSL_n(F_2) on 2^n - 1 points."""
    from .search import TransvectionImages

    if n < 3:
        raise InputError("psl_action needs n >= 3")
    rho = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                rho[(i, j)] = gf2_vector_action(elementary_gf2(n, i, j))
    return TransvectionImages(n=n, degree=2 ** n - 1, rho=rho, lam=dict(rho))


def psl_restriction(n: int) -> list[Permutation]:
    """Images of the fixed D_n' generators under the mod-2 action."""
    from .freegroup import abelianize, dprime_generators

    return [gf2_vector_action(np.array(abelianize(g), dtype=np.int64) % 2) for g in dprime_generators(n)]


@dataclass(frozen=True)
class SL2Mat:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise InputError(f"determinant of {self} is not 1")

    def __matmul__(self, o: SL2Mat) -> SL2Mat:
        return SL2Mat(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )


SL2_S = SL2Mat(0, -1, 1, 0)
SL2_T = SL2Mat(1, 1, 0, 1)
SL2_ID = SL2Mat(1, 0, 0, 1)


def chi(M: SL2Mat) -> int:
    """Exponent k in Z/12 with chi(M) = exp(2 pi i k / 12)."""
    a, b, c, d = M.a, M.b, M.c, M.d
    if a * d - b * c != 1:
        raise InputError("matrix not in SL_2(Z)")
    return ((1 - c * c) * (b * d + 3 * (c - 1) * d + c + 3) + c * (a + d - 3)) % 12


def psi_chi(M: SL2Mat) -> int:
    """chi followed by z -> z^6, written additively in Z/2."""
    return (6 * chi(M)) % 12 // 6
