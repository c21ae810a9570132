"""Relatively free algebras, the free intersection, the term-condition
commutator, and the pair-algebra constructions underlying the modular witness.

A free algebra on n generators over a class K is realized as the subalgebra of
the product over A in K of A^(A^n) generated by the n projection tuples; rows
of that product are the elements, so equality is equality of term functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .congruences import Congruence, cg_pairs_arrays, push_forward
from .core import (
    ClosedSubproduct,
    FiniteAlgebra,
    Homomorphism,
    close_in_product,
    direct_product,
)
from .errors import BudgetExceeded, MismatchedCarriers, NotAHomomorphism, NotInVariety, SignatureMismatch
from .options import Budgets
from .witness import LaxWitness, SPEmbedding


class TermWord:
    """A term over the signature with generator ordinals at the leaves."""

    __slots__ = ("symbol", "children", "generator")

    def __init__(self, symbol=None, children=(), generator=None):
        self.symbol = symbol
        self.children = tuple(children)
        self.generator = generator

    @classmethod
    def leaf(cls, generator: int) -> "TermWord":
        return cls(generator=generator)

    def render(self, names) -> str:
        if self.generator is not None:
            return names[self.generator]
        if not self.children:
            return self.symbol
        return f"{self.symbol}({','.join(c.render(names) for c in self.children)})"

    def evaluate(self, algebra: FiniteAlgebra, assignment) -> int:
        if self.generator is not None:
            return int(assignment[self.generator])
        args = tuple(c.evaluate(algebra, assignment) for c in self.children)
        return algebra.evaluate(self.symbol, args)

    def __repr__(self):
        return self.render([f"x{i}" for i in range(64)])


@dataclass(frozen=True)
class Refutation:
    """Two terms equal in the free algebra but with distinct images in the target."""

    lhs: TermWord
    rhs: TermWord
    lhs_value: int
    rhs_value: int

    def render(self, names):
        return f"{self.lhs.render(names)} = {self.rhs.render(names)}"


class FreePresentation:
    """A free algebra together with generator names, term words and evaluation."""

    def __init__(self, K, generators, closed: ClosedSubproduct):
        self.K = tuple(K)
        self.generators = tuple(generators)
        self.closed = closed
        self.algebra = closed.algebra
        self.gen_indices = closed.seed_idx
        self._terms = {}

    @property
    def size(self) -> int:
        return self.algebra.size

    def term_word(self, element: int) -> TermWord:
        got = self._terms.get(element)
        if got is not None:
            return got
        op = int(self.closed.parent_op[element])
        if op < 0:
            term = TermWord.leaf(int(self.closed.parent_args[element, 0]))
        else:
            name, arity = self.algebra.signature.symbols[op]
            kids = tuple(self.term_word(int(self.closed.parent_args[element, j]))
                         for j in range(arity))
            term = TermWord(symbol=name, children=kids)
        self._terms[element] = term
        return term

    def values(self, assignment, target: FiniteAlgebra):
        """Image of each element under the parent-recursion extension of the
        generator assignment, plus a refutation if the generators collapse."""
        if target.signature != self.algebra.signature:
            raise SignatureMismatch("target signature differs from the free algebra's")
        m = self.size
        vals = np.empty(m, dtype=np.int32)
        for i in range(m):
            op = int(self.closed.parent_op[i])
            if op < 0:
                vals[i] = assignment[int(self.closed.parent_args[i, 0])]
            else:
                arity = self.algebra.signature.arities[op]
                args = tuple(int(vals[self.closed.parent_args[i, j]]) for j in range(arity))
                vals[i] = target.evaluate(op, args)
        for j, e in enumerate(self.gen_indices):
            if vals[int(e)] != assignment[j]:
                first = int(self.closed.parent_args[int(e), 0])
                refutation = Refutation(TermWord.leaf(first), TermWord.leaf(j),
                                        int(vals[int(e)]), int(assignment[j]))
                return vals, refutation
        return vals, None

    def hom_or_refute(self, assignment, target: FiniteAlgebra):
        """(Homomorphism, None) when the assignment extends; (None, Refutation) when
        the target breaks an identity of the class."""
        vals, refutation = self.values(assignment, target)
        if refutation is not None:
            return None, refutation
        try:
            return Homomorphism(self.algebra, target, vals), None
        except NotAHomomorphism as err:
            t = self.algebra.signature.index(err.symbol)
            e = self.algebra.evaluate(t, err.args_tuple)
            lhs = self.term_word(e)
            rhs = TermWord(symbol=err.symbol,
                           children=tuple(self.term_word(a) for a in err.args_tuple))
            return None, Refutation(lhs, rhs, int(vals[e]),
                                    rhs.evaluate(target, assignment))

    def eval(self, assignment, target: FiniteAlgebra) -> Homomorphism:
        hom, refutation = self.hom_or_refute(assignment, target)
        if hom is None:
            raise NotInVariety(
                f"target violates {refutation.render(self.generators)} "
                f"({refutation.lhs_value} vs {refutation.rhs_value})")
        return hom

    def embedding(self) -> SPEmbedding:
        """The realization itself: an injective map into a product of K-members."""
        factors = tuple(self.closed.factors[int(f)] for f in self.closed.coord_factor)
        return SPEmbedding(self.algebra, factors, self.closed.rows)


def free_algebra(K, n: int, names=None, budgets: Budgets | None = None) -> FreePresentation:
    """Free algebra of HSP(K) on n generators, term words recorded breadth-first.

    Ties between equally deep terms are broken by signature order, then by
    argument tuples lexicographically.
    """
    budgets = budgets or Budgets()
    K = list(K)
    signature = K[0].signature if K else None
    for a in K[1:]:
        if a.signature != signature:
            raise SignatureMismatch("class members have different signatures")
    if signature is None:
        raise MismatchedCarriers("free_algebra needs a nonempty class for its signature")
    if names is None:
        names = [f"x{j}" for j in range(n)]
    # empty members satisfy every identity, so they contribute no coordinates
    members = [a for a in K if a.size > 0]
    total_coords = 0
    for a in members:
        total_coords += a.size ** n
        if total_coords > budgets.max_free_coords:
            raise BudgetExceeded(
                f"free algebra needs more than {budgets.max_free_coords} product coordinates")
    if total_coords == 0:
        # no constraints: the free algebra is trivial (or empty without constants)
        trivial = direct_product([], signature=signature)
        closed = close_in_product([trivial], [[0]] * n, order="bfs",
                                  max_rows=2, budgets=budgets)
        return FreePresentation(K, names, closed)
    coord_factor = np.concatenate([np.full(a.size ** n, i, dtype=np.int32)
                                   for i, a in enumerate(members)])
    seeds = np.zeros((n, total_coords), dtype=np.int32)
    pos = 0
    for a in members:
        block = a.size ** n
        for c in range(block):
            for j in range(n):
                seeds[j, pos + c] = (c // (a.size ** (n - 1 - j))) % a.size
        pos += block
    closed = close_in_product(members, seeds, coord_factor=coord_factor, order="bfs",
                              max_rows=budgets.max_free_elements, budgets=budgets)
    return FreePresentation(K, names, closed)


@dataclass(frozen=True)
class FreeIntersection:
    """free_intersection output with the construction kept for witness building."""

    value: Congruence
    free: FreePresentation
    alpha_bar: Congruence
    beta_bar: Congruence
    zeta: Homomorphism


def free_intersection_full(B: FiniteAlgebra, alpha: Congruence, beta: Congruence, K,
                           budgets: Budgets | None = None) -> FreeIntersection:
    if alpha.algebra != B or beta.algebra != B:
        raise MismatchedCarriers("congruences do not live on B")
    budgets = budgets or Budgets()
    n = B.size
    names = [f"x{b}" for b in range(n)] + [f"y{b}" for b in range(n)]
    free = free_algebra(K, 2 * n, names=names, budgets=budgets)
    gi = free.gen_indices
    alpha_bar = cg_pairs_arrays(free.algebra,
                                gi[np.arange(n)], gi[alpha.labels])
    beta_bar = cg_pairs_arrays(free.algebra,
                               gi[np.arange(n, 2 * n)], gi[beta.labels + n])
    zeta = free.eval(list(range(n)) + list(range(n)), B)
    if push_forward(zeta, alpha_bar) != alpha or push_forward(zeta, beta_bar) != beta:
        raise RuntimeError("free intersection self-check failed: zeta does not push "
                           "the generated congruences back onto the inputs")
    value = push_forward(zeta, alpha_bar.meet(beta_bar))
    return FreeIntersection(value, free, alpha_bar, beta_bar, zeta)


def free_intersection(B: FiniteAlgebra, alpha: Congruence, beta: Congruence, K,
                      budgets: Budgets | None = None) -> Congruence:
    """The free intersection of alpha and beta with respect to HSP(K)."""
    return free_intersection_full(B, alpha, beta, K, budgets).value


def tc_commutator(B: FiniteAlgebra, alpha: Congruence, beta: Congruence,
                  budgets: Budgets | None = None) -> Congruence:
    """Term-condition commutator via the matrix subalgebra of B^4.

    Inside a congruence-modular variety this is the commutator; elsewhere the
    value is reported but decides nothing by itself.
    """
    if alpha.algebra != B or beta.algebra != B:
        raise MismatchedCarriers("congruences do not live on B")
    budgets = budgets or Budgets()
    n = B.size
    if n == 0:
        return Congruence.bottom(B)
    if n ** 4 > budgets.max_free_elements:
        raise BudgetExceeded("matrix subalgebra of B^4 exceeds the element budget")
    seeds = []
    for a in range(n):
        for a2 in range(n):
            if alpha.related(a, a2):
                seeds.append((a, a, a2, a2))
    for b in range(n):
        for b2 in range(n):
            if beta.related(b, b2):
                seeds.append((b, b2, b, b2))
    closed = close_in_product([B], seeds, coord_factor=np.zeros(4, dtype=np.int32),
                              order="bfs", max_rows=n ** 4, build_tables=False,
                              budgets=budgets)
    rows = closed.rows
    eq = rows[:, 0] == rows[:, 1]
    return cg_pairs_arrays(B, rows[eq, 2], rows[eq, 3])


@dataclass(frozen=True)
class PairAlgebra:
    """B(mu): the subalgebra of B x B of mu-related pairs, with its three maps."""

    C: FiniteAlgebra
    pi: Homomorphism
    pi_mu: Homomorphism
    delta: Homomorphism
    pairs: tuple


def b_mu(B: FiniteAlgebra, mu: Congruence, budgets: Budgets | None = None) -> PairAlgebra:
    """pi projects to the second coordinate, pi_mu to the first, delta(b) = (b,b)."""
    if mu.algebra != B:
        raise MismatchedCarriers("mu does not live on B")
    budgets = budgets or Budgets()
    n = B.size
    pairs = [(b, c) for b in range(n) for c in range(n) if mu.related(b, c)]
    closed = close_in_product([B], pairs or np.zeros((0, 2), dtype=np.int32),
                              coord_factor=np.zeros(2, dtype=np.int32),
                              order="ambient", max_rows=max(1, n * n), budgets=budgets)
    C = closed.algebra
    assert C.size == len(pairs), "mu-pairs must already be closed"
    rows = closed.rows
    pi = Homomorphism(C, B, rows[:, 1], _trusted=True)
    pi_mu = Homomorphism(C, B, rows[:, 0], _trusted=True)
    diag = {int(rows[i, 0]): i for i in range(C.size) if rows[i, 0] == rows[i, 1]}
    delta = Homomorphism(B, C, [diag[b] for b in range(n)], _trusted=True)
    return PairAlgebra(C, pi, pi_mu, delta, tuple((int(a), int(b)) for a, b in rows))


def delta_congruence(B: FiniteAlgebra, mu: Congruence, alpha: Congruence,
                     pair_algebra: PairAlgebra | None = None,
                     budgets: Budgets | None = None) -> Congruence:
    """The congruence on B(mu) generated by the diagonal alpha-pairs."""
    if alpha.algebra != B:
        raise MismatchedCarriers("alpha does not live on B")
    bm = pair_algebra or b_mu(B, mu, budgets)
    return cg_pairs_arrays(bm.C, bm.delta.map, bm.delta.map[alpha.labels])


def modular_witness(B: FiniteAlgebra, mu: Congruence, alpha: Congruence,
                    budgets: Budgets | None = None) -> LaxWitness:
    """The pushout-square candidate quadruple on B(mu); callers verify it."""
    bm = b_mu(B, mu, budgets)
    beta = bm.pi_mu.kernel()
    gamma = delta_congruence(B, mu, alpha, pair_algebra=bm, budgets=budgets)
    return LaxWitness(bm.C, bm.pi, beta, gamma)
