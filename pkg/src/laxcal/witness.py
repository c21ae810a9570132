"""Witness records for lax centrality: the quadruple and SP-membership certificates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FiniteAlgebra, Homomorphism
from .congruences import Congruence
from .errors import MismatchedCarriers


@dataclass(frozen=True)
class SPEmbedding:
    """An explicit embedding of `algebra` into a product of class members.

    `rows[q]` is the coordinate vector of element q; coordinate c lives in
    `factors[c]`.  The product itself is never materialized.
    """

    algebra: FiniteAlgebra
    factors: tuple
    rows: np.ndarray

    def verify(self):
        """Raise unless this is an injective homomorphism into the product."""
        rows = np.asarray(self.rows)
        if rows.shape != (self.algebra.size, len(self.factors)):
            raise MismatchedCarriers("certificate rows have the wrong shape")
        if len({rows[i].tobytes() for i in range(rows.shape[0])}) != rows.shape[0]:
            raise MismatchedCarriers("certificate is not injective")
        for c, factor in enumerate(self.factors):
            # coordinate projection must be a homomorphism into the factor
            Homomorphism(self.algebra, factor, rows[:, c])
        return True


@dataclass(frozen=True)
class LaxWitness:
    """A candidate quadruple (C, pi, beta, gamma); validity is checked, not assumed."""

    C: FiniteAlgebra
    pi: Homomorphism
    beta: Congruence
    gamma: Congruence
    sp_beta: SPEmbedding | None = None
    sp_gamma: SPEmbedding | None = None

    def __post_init__(self):
        if self.pi.source != self.C:
            raise MismatchedCarriers("pi does not start at C")
        if self.beta.algebra != self.C or self.gamma.algebra != self.C:
            raise MismatchedCarriers("beta/gamma do not live on C")

    def with_certificates(self, sp_beta, sp_gamma) -> "LaxWitness":
        return LaxWitness(self.C, self.pi, self.beta, self.gamma, sp_beta, sp_gamma)
