"""Congruences as compatible partitions: generation, lattices, push/pull.

A congruence is stored as a label vector sending each element to the least
element of its block, so equality of congruences is array equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import backend
from .core import FiniteAlgebra, Homomorphism
from .errors import BudgetExceeded, InputError, MismatchedCarriers, NotACongruence
from .options import Budgets


def _canonical(labels):
    """Relabel an arbitrary block-id vector by least block member."""
    labels = np.asarray(labels)
    n = labels.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.int32)
    _, inverse = np.unique(labels, return_inverse=True)
    firsts = np.full(inverse.max() + 1, n, dtype=np.int64)
    np.minimum.at(firsts, inverse, np.arange(n))
    return firsts[inverse].astype(np.int32)


def compatibility_witness(algebra: FiniteAlgebra, labels):
    """None if the partition is compatible, else (symbol, args) that breaks it."""
    n = algebra.size
    labels = np.asarray(labels, dtype=np.int64)
    for t, (name, k) in enumerate(algebra.signature.symbols):
        if k == 0 or n == 0:
            continue
        tab = algebra.tables[t]
        grids = np.indices((n,) * k).reshape(k, -1)
        idx_root = reduce(lambda acc, row: acc * n + labels[row], grids,
                          np.zeros(grids.shape[1], dtype=np.int64))
        ok = labels[tab] == labels[tab[idx_root]]
        if not ok.all():
            bad = int(np.flatnonzero(~ok)[0])
            return name, tuple(int(grids[j, bad]) for j in range(k))
    return None


class Congruence:
    """A compatible partition of an algebra's carrier in least-member labels."""

    __slots__ = ("algebra", "labels", "_hash")

    def __init__(self, algebra: FiniteAlgebra, labels, *, _trusted=False):
        labels = np.ascontiguousarray(np.asarray(labels, dtype=np.int32))
        if labels.shape != (algebra.size,):
            raise MismatchedCarriers("label vector does not match the carrier")
        if not _trusted:
            canon = _canonical(labels)
            if not np.array_equal(canon, labels):
                # accept any block-id labelling from callers, canonicalize here
                labels = canon
            witness = compatibility_witness(algebra, labels)
            if witness is not None:
                raise NotACongruence(f"partition not compatible with {witness[0]} at {witness[1]}")
        labels.setflags(write=False)
        self.algebra = algebra
        self.labels = labels
        self._hash = None

    @classmethod
    def bottom(cls, algebra: FiniteAlgebra) -> "Congruence":
        return cls(algebra, np.arange(algebra.size, dtype=np.int32), _trusted=True)

    @classmethod
    def top(cls, algebra: FiniteAlgebra) -> "Congruence":
        return cls(algebra, np.zeros(algebra.size, dtype=np.int32), _trusted=True)

    @classmethod
    def from_blocks(cls, algebra: FiniteAlgebra, blocks) -> "Congruence":
        """Blocks may omit singletons; overlaps and out-of-range elements are errors."""
        labels = np.arange(algebra.size, dtype=np.int64)
        seen = set()
        for block in blocks:
            block = sorted(int(x) for x in block)
            if not block:
                raise NotACongruence("empty block")
            for x in block:
                if not 0 <= x < algebra.size:
                    raise NotACongruence(f"element {x} outside the carrier")
                if x in seen:
                    raise NotACongruence(f"element {x} appears in two blocks")
                seen.add(x)
                labels[x] = block[0]
        return cls(algebra, labels)

    def blocks(self):
        out = {}
        for i, l in enumerate(self.labels):
            out.setdefault(int(l), []).append(i)
        return tuple(tuple(b) for _, b in sorted(out.items()))

    @property
    def num_blocks(self) -> int:
        return len(np.unique(self.labels)) if self.algebra.size else 0

    def is_bottom(self) -> bool:
        return bool(np.array_equal(self.labels, np.arange(self.algebra.size)))

    def is_top(self) -> bool:
        return self.algebra.size == 0 or bool((self.labels == 0).all())

    def related(self, a: int, b: int) -> bool:
        return int(self.labels[a]) == int(self.labels[b])

    def _check_same(self, other: "Congruence"):
        if self.algebra != other.algebra:
            raise MismatchedCarriers("congruences live on different algebras")

    def leq(self, other: "Congruence") -> bool:
        """self refines other, i.e. self <= other as relations."""
        self._check_same(other)
        return bool(np.array_equal(other.labels[self.labels], other.labels))

    __le__ = leq

    def meet(self, other: "Congruence") -> "Congruence":
        self._check_same(other)
        n = self.algebra.size
        pair = self.labels.astype(np.int64) * max(n, 1) + other.labels
        return Congruence(self.algebra, _canonical(pair), _trusted=True)

    def join(self, other: "Congruence") -> "Congruence":
        """cg of the union of the two partitions."""
        self._check_same(other)
        n = self.algebra.size
        idx = np.arange(n, dtype=np.int32)
        seed_a = np.concatenate([idx, idx])
        seed_b = np.concatenate([self.labels, other.labels])
        return cg_pairs_arrays(self.algebra, seed_a, seed_b)

    def __eq__(self, other):
        return (isinstance(other, Congruence) and self.algebra == other.algebra
                and np.array_equal(self.labels, other.labels))

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.algebra, self.labels.tobytes()))
        return self._hash

    def __repr__(self):
        return f"Congruence({self.blocks()})"


def format_blocks(cong: Congruence) -> str:
    """Canonical block notation, e.g. `{0,2},{1,3}`; the CLI literal syntax."""
    return ",".join("{" + ",".join(str(x) for x in b) + "}" for b in cong.blocks())


def cg_pairs_arrays(algebra: FiniteAlgebra, seed_a, seed_b) -> Congruence:
    arities, offsets, flat = algebra.pack()
    k = backend.kernels()
    labels = k.cg_closure(algebra.size, arities, offsets, flat,
                          np.asarray(seed_a, dtype=np.int32),
                          np.asarray(seed_b, dtype=np.int32))
    return Congruence(algebra, labels, _trusted=True)


def cg(algebra: FiniteAlgebra, pairs) -> Congruence:
    """Least congruence containing the given element pairs."""
    seed_a = []
    seed_b = []
    for a, b in pairs:
        a, b = int(a), int(b)
        if not (0 <= a < algebra.size and 0 <= b < algebra.size):
            raise InputError(f"pair ({a},{b}) outside the carrier")
        seed_a.append(a)
        seed_b.append(b)
    return cg_pairs_arrays(algebra, seed_a, seed_b)


def push_forward(f: Homomorphism, alpha: Congruence) -> Congruence:
    """The congruence of f's target generated by the image pairs of alpha."""
    if alpha.algebra != f.source:
        raise MismatchedCarriers("congruence does not live on the map's source")
    return cg_pairs_arrays(f.target, f.map, f.map[alpha.labels])


def pull_back(f: Homomorphism, beta: Congruence) -> Congruence:
    """a ~ a' iff f(a) beta f(a'); always a congruence."""
    if beta.algebra != f.target:
        raise MismatchedCarriers("congruence does not live on the map's target")
    return Congruence(f.source, _canonical(beta.labels[f.map]), _trusted=True)


class CongruenceLattice:
    """All congruences of one algebra, canonically sorted."""

    def __init__(self, algebra: FiniteAlgebra, elements):
        self.algebra = algebra
        self.elements = tuple(sorted(elements,
                                     key=lambda c: (-c.num_blocks, tuple(c.labels))))
        self._index = {c.labels.tobytes(): i for i, c in enumerate(self.elements)}
        self._leq = None
        self._meet = None
        self._join = None

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def index(self, c: Congruence) -> int:
        got = self._index.get(c.labels.tobytes())
        if got is None:
            raise InputError("congruence is not an element of this lattice")
        return got

    @property
    def bottom(self) -> Congruence:
        return self.elements[0]

    @property
    def top(self) -> Congruence:
        return self.elements[-1]

    def leq_matrix(self):
        if self._leq is None:
            m = len(self.elements)
            leq = np.zeros((m, m), dtype=bool)
            for i, a in enumerate(self.elements):
                for j, b in enumerate(self.elements):
                    leq[i, j] = a.leq(b)
            self._leq = leq
        return self._leq

    def meet_table(self):
        if self._meet is None:
            self._meet = self._binary_table(lambda a, b: a.meet(b))
        return self._meet

    def join_table(self):
        if self._join is None:
            self._join = self._binary_table(lambda a, b: a.join(b))
        return self._join

    def _binary_table(self, fn):
        m = len(self.elements)
        out = np.zeros((m, m), dtype=np.int32)
        for i in range(m):
            out[i, i] = i
            for j in range(i + 1, m):
                r = self.index(fn(self.elements[i], self.elements[j]))
                out[i, j] = out[j, i] = r
        return out

    def upper_covers(self, i: int):
        """Indices of elements covering element i."""
        leq = self.leq_matrix()
        m = len(self.elements)
        above = [j for j in range(m) if j != i and leq[i, j]]
        return [j for j in above
                if not any(k != j and leq[k, j] for k in above)]

    def atoms(self):
        b = self.index(self.bottom)
        return [self.elements[j] for j in self.upper_covers(b)]

    def coatoms(self):
        t = self.index(self.top)
        leq = self.leq_matrix()
        m = len(self.elements)
        below = [j for j in range(m) if j != t and leq[j, t]]
        return [self.elements[j] for j in below
                if not any(k != j and leq[j, k] for k in below)]


_LATTICE_CACHE: dict = {}
_LATTICE_CACHE_MAX = 512


def con_lattice(algebra: FiniteAlgebra, budgets: Budgets | None = None) -> CongruenceLattice:
    """All principal congruences, then closure under join."""
    budgets = budgets or Budgets()
    if algebra.size > budgets.max_lattice_algebra:
        raise BudgetExceeded(
            f"congruence lattice limited to algebras of size {budgets.max_lattice_algebra}")
    cached = _LATTICE_CACHE.get(algebra)
    if cached is not None and len(cached) <= budgets.max_lattice_size:
        return cached
    n = algebra.size
    bottom = Congruence.bottom(algebra)
    found = {bottom.labels.tobytes(): bottom}
    queue = []
    for a in range(n):
        for b in range(a + 1, n):
            c = cg(algebra, [(a, b)])
            key = c.labels.tobytes()
            if key not in found:
                found[key] = c
                queue.append(c)
    known = [bottom] + queue[:]
    while queue:
        x = queue.pop(0)
        for y in list(known):
            j = x.join(y)
            key = j.labels.tobytes()
            if key not in found:
                if len(found) >= budgets.max_lattice_size:
                    raise BudgetExceeded(
                        f"congruence lattice exceeded {budgets.max_lattice_size} elements")
                found[key] = j
                known.append(j)
                queue.append(j)
    lattice = CongruenceLattice(algebra, found.values())
    if len(_LATTICE_CACHE) >= _LATTICE_CACHE_MAX:
        _LATTICE_CACHE.pop(next(iter(_LATTICE_CACHE)))
    _LATTICE_CACHE[algebra] = lattice
    return lattice


def monolith_and_si(algebra: FiniteAlgebra, budgets: Budgets | None = None):
    """(is_si, monolith): SI iff the lattice has a unique atom (size >= 2)."""
    if algebra.size <= 1:
        return False, None
    lattice = con_lattice(algebra, budgets)
    atoms = lattice.atoms()
    if len(atoms) != 1:
        return False, None
    atom = atoms[0]
    for c in lattice.elements:
        if not c.is_bottom() and not atom.leq(c):
            return False, None
    return True, atom


@dataclass(frozen=True)
class QuotientResult:
    algebra: FiniteAlgebra
    nat: Homomorphism


def quotient(algebra: FiniteAlgebra, theta: Congruence) -> QuotientResult:
    """A/theta with blocks indexed by least representative, plus the natural map."""
    if theta.algebra != algebra:
        raise MismatchedCarriers("congruence does not live on this algebra")
    n = algebra.size
    reps = np.unique(theta.labels)
    m = reps.shape[0]
    block_of = np.zeros(max(n, 1), dtype=np.int64)
    block_of[reps] = np.arange(m)
    tables = []
    for t, (_, k) in enumerate(algebra.signature.symbols):
        tab = algebra.tables[t]
        if n == 0:
            tables.append(np.empty(0, dtype=np.int32))
            continue
        shaped = tab.reshape((n,) * k) if k else tab
        if k:
            shaped = shaped[np.ix_(*([reps] * k))]
            tables.append(block_of[theta.labels[shaped.ravel()]])
        else:
            tables.append(block_of[theta.labels[tab]])
    quot = FiniteAlgebra(algebra.signature, m, tables)
    nat = Homomorphism(algebra, quot, block_of[theta.labels] if n else [], _trusted=True)
    return QuotientResult(quot, nat)


class FiniteLattice:
    """A plain finite lattice given by a <= matrix; synthetic test inputs."""

    def __init__(self, leq):
        leq = np.asarray(leq, dtype=bool)
        if leq.ndim != 2 or leq.shape[0] != leq.shape[1]:
            raise InputError("leq must be a square matrix")
        self.size = leq.shape[0]
        self.leq = leq
        m = self.size
        meet = np.full((m, m), -1, dtype=np.int32)
        join = np.full((m, m), -1, dtype=np.int32)
        for i in range(m):
            for j in range(m):
                lower = [k for k in range(m) if leq[k, i] and leq[k, j]]
                glb = [k for k in lower if all(leq[l, k] for l in lower)]
                upper = [k for k in range(m) if leq[i, k] and leq[j, k]]
                lub = [k for k in upper if all(leq[k, l] for l in upper)]
                if len(glb) != 1 or len(lub) != 1:
                    raise InputError("leq matrix is not a lattice order")
                meet[i, j] = glb[0]
                join[i, j] = lub[0]
        self._meet = meet
        self._join = join

    def meet_table(self):
        return self._meet

    def join_table(self):
        return self._join

    def __len__(self):
        return self.size


def is_modular_lattice(lattice) -> bool:
    """Modular law over all triples; advisory only, says nothing about a variety."""
    meet = lattice.meet_table()
    join = lattice.join_table()
    m = len(lattice)
    for x in range(m):
        for z in range(m):
            if meet[x, z] != x:  # need x <= z
                continue
            for y in range(m):
                if join[x, meet[y, z]] != meet[join[x, y], z]:
                    return False
    return True
