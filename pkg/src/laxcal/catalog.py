"""Curated suite of small algebras used by the CLI, the tests and the docs."""

from __future__ import annotations

from functools import cache

from .core import FiniteAlgebra, Signature, make_algebra

GROUP_SIG = Signature([("plus", 2), ("neg", 1), ("zero", 0)])
PERM_GROUP_SIG = Signature([("mul", 2), ("inv", 1), ("e", 0)])
MEET_SIG = Signature([("meet", 2)])
LATTICE_SIG = Signature([("meet", 2), ("join", 2)])
GROUPOID_SIG = Signature([("op", 2)])


@cache
def cyclic_group(n: int) -> FiniteAlgebra:
    plus = [[(i + j) % n for j in range(n)] for i in range(n)]
    neg = [(-i) % n for i in range(n)]
    return make_algebra(GROUP_SIG, n, {"plus": plus, "neg": neg, "zero": [0]})


def _perms3():
    # all permutations of {0,1,2} in lexicographic order
    return [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]


@cache
def s3() -> FiniteAlgebra:
    perms = _perms3()
    index = {p: i for i, p in enumerate(perms)}
    mul = [[index[tuple(p[q[x]] for x in range(3))] for q in perms] for p in perms]
    inv = [index[tuple(sorted(range(3), key=lambda x: p[x]))] for p in perms]
    return make_algebra(PERM_GROUP_SIG, 6, {"mul": mul, "inv": inv, "e": [0]})


# blocks of the congruence corresponding to the alternating subgroup of s3()
S3_A3_BLOCKS = ((0, 3, 4), (1, 2, 5))


@cache
def semilattice(n: int) -> FiniteAlgebra:
    """The n-element chain as a meet semilattice."""
    meet = [[min(i, j) for j in range(n)] for i in range(n)]
    return make_algebra(MEET_SIG, n, {"meet": meet})


@cache
def lattice2() -> FiniteAlgebra:
    meet = [[min(i, j) for j in range(2)] for i in range(2)]
    join = [[max(i, j) for j in range(2)] for i in range(2)]
    return make_algebra(LATTICE_SIG, 2, {"meet": meet, "join": join})


@cache
def klein4() -> FiniteAlgebra:
    """Z2 x Z2 in the group signature, elements in mixed-radix order."""
    plus = [[(i ^ j) for j in range(4)] for i in range(4)]
    neg = list(range(4))
    return make_algebra(GROUP_SIG, 4, {"plus": plus, "neg": neg, "zero": [0]})


@cache
def nm3() -> FiniteAlgebra:
    """First 3-element groupoid (lexicographic on tables) that is subdirectly
    irreducible and whose square has a non-modular congruence lattice; the
    variety it generates is therefore not congruence-modular.  Con A is the
    chain bottom < {0,1}|{2} < top."""
    op = [[0, 0, 0], [0, 0, 0], [0, 0, 1]]
    return make_algebra(GROUPOID_SIG, 3, {"op": op})


CATALOG = {
    "Z2": lambda: cyclic_group(2),
    "Z3": lambda: cyclic_group(3),
    "Z4": lambda: cyclic_group(4),
    "S3": s3,
    "SL2": lambda: semilattice(2),
    "SL3": lambda: semilattice(3),
    "L2": lattice2,
    "V4": klein4,
    "NM3": nm3,
}


def get(name: str) -> FiniteAlgebra:
    try:
        return CATALOG[name]()
    except KeyError:
        raise KeyError(f"unknown catalog algebra {name!r}") from None


def names():
    return tuple(CATALOG)
