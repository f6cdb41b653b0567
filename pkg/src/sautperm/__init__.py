"""Exhaustive search for small permutation actions of SAut(F_n).

The pipeline restricts a putative action to the finite subgroups D_n' and
A_{n+1}, enumerates those restrictions up to conjugacy, and then tests every
admissible image of the transvection rho_12 against Gersten's relations.
"""

from .perm import Permutation, compose, conjugate, commutator, parity

__all__ = ["Permutation", "compose", "conjugate", "commutator", "parity"]
__version__ = "0.1.0"
