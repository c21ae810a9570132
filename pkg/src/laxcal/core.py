"""Finite algebras as operation tables, homomorphisms, products and subalgebras.

Carriers are always {0..n-1}; any external naming is an I/O-layer concern.
All objects are immutable after construction, so sharing them across threads
is safe; every function here is a pure function of its arguments.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import backend
from .errors import (
    BudgetExceeded,
    EmptyWithConstant,
    InputError,
    MismatchedCarriers,
    NotAHomomorphism,
    OutOfRangeEntry,
    SignatureMismatch,
    WrongTableLength,
)
from .options import Budgets

MAX_ARITY = 12  # kernel scratch buffers assume this


class Signature:
    """Ordered operation symbols with arities; arity 0 is a constant."""

    __slots__ = ("symbols", "_index")

    def __init__(self, symbols):
        symbols = tuple((str(name), int(arity)) for name, arity in symbols)
        names = [name for name, _ in symbols]
        if len(set(names)) != len(names):
            raise InputError("duplicate operation names in signature")
        for name, arity in symbols:
            if arity < 0 or arity > MAX_ARITY:
                raise InputError(f"arity of {name} out of supported range 0..{MAX_ARITY}")
        self.symbols = symbols
        self._index = {name: i for i, (name, _) in enumerate(symbols)}

    @property
    def names(self):
        return tuple(name for name, _ in self.symbols)

    @property
    def arities(self):
        return tuple(arity for _, arity in self.symbols)

    def index(self, name) -> int:
        return self._index[name]

    def has_constant(self) -> bool:
        return any(arity == 0 for _, arity in self.symbols)

    def __len__(self):
        return len(self.symbols)

    def __eq__(self, other):
        return isinstance(other, Signature) and self.symbols == other.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        return f"Signature({list(self.symbols)!r})"


class FiniteAlgebra:
    """An algebra on {0..size-1} with one flat row-major table per symbol.

    Table entries are indexed with the rightmost argument varying fastest.
    """

    def __init__(self, signature: Signature, size: int, tables):
        if size < 0:
            raise InputError("negative size")
        if size == 0 and signature.has_constant():
            raise EmptyWithConstant("size 0 with an arity-0 symbol")
        self.signature = signature
        self.size = int(size)
        flat = []
        for (name, arity), table in zip(signature.symbols, tables):
            arr = np.ascontiguousarray(np.asarray(table, dtype=np.int64).ravel())
            want = size ** arity
            if arr.size != want:
                raise WrongTableLength(f"table for {name} has {arr.size} entries, expected {want}")
            if arr.size and (arr.min() < 0 or arr.max() >= size):
                raise OutOfRangeEntry(f"table for {name} has an entry outside 0..{size - 1}")
            arr = arr.astype(np.int32)
            arr.setflags(write=False)
            flat.append(arr)
        self.tables = tuple(flat)
        self._hash = None
        self._pack = None

    def table(self, op: int | str) -> np.ndarray:
        if isinstance(op, str):
            op = self.signature.index(op)
        return self.tables[op]

    def evaluate(self, op: int | str, args=()) -> int:
        if isinstance(op, str):
            op = self.signature.index(op)
        idx = 0
        for a in args:
            idx = idx * self.size + int(a)
        return int(self.tables[op][idx])

    def pack(self):
        """(arities, offsets, flat_tables) consumed by the kernels."""
        if self._pack is None:
            arities = np.asarray(self.signature.arities, dtype=np.int32)
            sizes = [t.size for t in self.tables]
            offsets = np.zeros(len(self.tables), dtype=np.int64)
            if sizes:
                offsets[1:] = np.cumsum(sizes[:-1])
            flat = (np.concatenate(self.tables).astype(np.int32)
                    if self.tables else np.empty(0, dtype=np.int32))
            self._pack = (arities, offsets, flat)
        return self._pack

    def __eq__(self, other):
        return (isinstance(other, FiniteAlgebra)
                and self.signature == other.signature
                and self.size == other.size
                and all(np.array_equal(a, b) for a, b in zip(self.tables, other.tables)))

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.signature, self.size,
                               tuple(t.tobytes() for t in self.tables)))
        return self._hash

    def __repr__(self):
        return f"FiniteAlgebra(size={self.size}, ops={list(self.signature.names)})"


def make_algebra(signature, size, tables) -> FiniteAlgebra:
    """Validating constructor; `tables` maps symbol name to (nested) table data."""
    if not isinstance(signature, Signature):
        signature = Signature(signature)
    if isinstance(tables, dict):
        missing = [name for name in signature.names if name not in tables]
        if missing:
            raise WrongTableLength(f"no table supplied for {missing[0]}")
        tables = [tables[name] for name in signature.names]
    return FiniteAlgebra(signature, size, tables)


class Homomorphism:
    """A total map between carriers commuting with every operation."""

    def __init__(self, source: FiniteAlgebra, target: FiniteAlgebra, mapping, *,
                 _trusted=False):
        if source.signature != target.signature:
            raise SignatureMismatch("homomorphism endpoints have different signatures")
        mapping = np.asarray(mapping, dtype=np.int32)
        if mapping.shape != (source.size,):
            raise MismatchedCarriers(
                f"map has length {mapping.size}, source has size {source.size}")
        if mapping.size and (mapping.min() < 0 or mapping.max() >= target.size):
            raise MismatchedCarriers("map value outside the target carrier")
        mapping = np.ascontiguousarray(mapping)
        mapping.setflags(write=False)
        self.source = source
        self.target = target
        self.map = mapping
        if not _trusted:
            self.revalidate()

    def revalidate(self):
        """Full table scan; raises NotAHomomorphism with the first failing cell."""
        n = self.source.size
        if n == 0:
            return
        f = self.map
        for t, (name, k) in enumerate(self.source.signature.symbols):
            ts = self.source.tables[t]
            tt = self.target.tables[t]
            if k == 0:
                if int(f[ts[0]]) != int(tt[0]):
                    raise NotAHomomorphism(name, ())
                continue
            grids = np.indices((n,) * k).reshape(k, -1)
            idx_t = reduce(lambda acc, row: acc * self.target.size + f[row], grids,
                           np.zeros(grids.shape[1], dtype=np.int64))
            ok = f[ts] == tt[idx_t]
            if not ok.all():
                bad = int(np.flatnonzero(~ok)[0])
                args = tuple(int(grids[j, bad]) for j in range(k))
                raise NotAHomomorphism(name, args)

    def __call__(self, x: int) -> int:
        return int(self.map[x])

    def is_onto(self) -> bool:
        return len(np.unique(self.map)) == self.target.size

    def is_injective(self) -> bool:
        return len(np.unique(self.map)) == self.source.size

    def kernel(self):
        from .congruences import Congruence

        n = self.source.size
        if n == 0:
            return Congruence.bottom(self.source)
        _, inverse = np.unique(self.map, return_inverse=True)
        firsts = np.full(inverse.max() + 1, n, dtype=np.int64)
        np.minimum.at(firsts, inverse, np.arange(n))
        return Congruence(self.source, firsts[inverse].astype(np.int32), _trusted=True)

    def compose(self, inner: "Homomorphism") -> "Homomorphism":
        """self after inner."""
        if inner.target != self.source:
            raise MismatchedCarriers("composition endpoints do not match")
        return Homomorphism(inner.source, self.target, self.map[inner.map], _trusted=True)

    @classmethod
    def identity(cls, algebra: FiniteAlgebra) -> "Homomorphism":
        return cls(algebra, algebra, np.arange(algebra.size, dtype=np.int32), _trusted=True)

    def __eq__(self, other):
        return (isinstance(other, Homomorphism) and self.source == other.source
                and self.target == other.target and np.array_equal(self.map, other.map))

    def __hash__(self):
        return hash((self.source, self.target, self.map.tobytes()))

    def __repr__(self):
        return f"Homomorphism({self.source.size}->{self.target.size}, {list(self.map)})"


def make_homomorphism(source, target, mapping) -> Homomorphism:
    return Homomorphism(source, target, mapping)


class ProductAlgebra(FiniteAlgebra):
    """Direct product with mixed-radix integer elements (rightmost factor fastest)."""

    def __init__(self, factors, signature, size, tables):
        super().__init__(signature, size, tables)
        self.factors = tuple(factors)
        strides = [1] * len(self.factors)
        for i in range(len(self.factors) - 2, -1, -1):
            strides[i] = strides[i + 1] * self.factors[i + 1].size
        self.strides = tuple(strides)

    def decode(self, element: int):
        return tuple((element // s) % f.size for s, f in zip(self.strides, self.factors))

    def encode(self, coords) -> int:
        return sum(int(c) * s for c, s in zip(coords, self.strides))

    @property
    def projections(self):
        maps = _decode_matrix([f.size for f in self.factors])
        return tuple(Homomorphism(self, f, maps[:, i], _trusted=True)
                     for i, f in enumerate(self.factors))


def _decode_matrix(sizes):
    """(prod(sizes), len(sizes)) coordinate matrix in mixed-radix order."""
    n = int(np.prod(sizes, dtype=np.int64)) if sizes else 1
    out = np.zeros((n, len(sizes)), dtype=np.int32)
    stride = 1
    for i in range(len(sizes) - 1, -1, -1):
        out[:, i] = (np.arange(n) // stride) % sizes[i]
        stride *= sizes[i]
    return out


def direct_product(factors, signature=None, *, budgets: Budgets | None = None) -> ProductAlgebra:
    """Direct product with pointwise operations; empty products need an explicit signature."""
    factors = list(factors)
    if factors:
        signature = factors[0].signature
        for f in factors[1:]:
            if f.signature != signature:
                raise SignatureMismatch("product factors have different signatures")
    elif signature is None:
        raise InputError("empty product needs an explicit signature")
    budgets = budgets or Budgets()
    sizes = [f.size for f in factors]
    n = int(np.prod(sizes, dtype=np.int64)) if factors else 1
    cells = sum(n ** arity for arity in signature.arities)
    if cells > budgets.max_table_cells:
        raise BudgetExceeded(f"product would materialize {cells} table cells")
    coords = _decode_matrix(sizes)
    tables = []
    for t, (name, k) in enumerate(signature.symbols):
        if n == 0:
            tables.append(np.empty(0, dtype=np.int32))
            continue
        grids = np.indices((n,) * k).reshape(k, -1) if k else None
        res = np.zeros(n ** k, dtype=np.int64)
        stride = 1
        for i in range(len(factors) - 1, -1, -1):
            fac = factors[i]
            s = fac.size
            if k == 0:
                val = fac.tables[t][0]
            else:
                idx = np.zeros(n ** k, dtype=np.int64)
                for row in grids:
                    idx = idx * s + coords[row, i]
                val = fac.tables[t][idx]
            res += val * stride
            stride *= s
        tables.append(res)
    return ProductAlgebra(factors, signature, n, tables)


@dataclass(frozen=True)
class ClosedSubproduct:
    """A subuniverse of a (virtual) product, with the induced algebra.

    `rows[i]` is element i's coordinate vector; coordinate c lives in
    `factors[coord_factor[c]]`.  `parent_op`/`parent_args` record one witnessing
    application per element (-1 op = seed).
    """

    factors: tuple
    coord_factor: np.ndarray
    rows: np.ndarray
    parent_op: np.ndarray
    parent_args: np.ndarray
    seed_idx: np.ndarray
    algebra: FiniteAlgebra | None

    @property
    def size(self) -> int:
        return self.rows.shape[0]

    def index_of(self, row) -> int:
        key = np.ascontiguousarray(np.asarray(row, dtype=np.int32)).tobytes()
        return self._index().get(key, -1)

    def _index(self):
        cache = self.__dict__.get("_row_index")
        if cache is None:
            cache = {np.ascontiguousarray(self.rows[i]).tobytes(): i
                     for i in range(self.rows.shape[0])}
            object.__setattr__(self, "_row_index", cache)
        return cache


def _product_pack(factors):
    signature = factors[0].signature
    for f in factors[1:]:
        if f.signature != signature:
            raise SignatureMismatch("closure factors have different signatures")
    arities = np.asarray(signature.arities, dtype=np.int32)
    n_ops = len(signature)
    fact_offsets = np.zeros((len(factors), n_ops), dtype=np.int64)
    chunks = []
    pos = 0
    for i, f in enumerate(factors):
        for t in range(n_ops):
            fact_offsets[i, t] = pos
            chunks.append(f.tables[t])
            pos += f.tables[t].size
    flat = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int32)
    factor_sizes = np.asarray([f.size for f in factors], dtype=np.int32)
    return arities, fact_offsets, flat.astype(np.int32), factor_sizes


def close_in_product(factors, seeds, *, coord_factor=None, max_rows=None,
                     build_tables=True, max_table_cells=None, order="bfs",
                     budgets: Budgets | None = None) -> ClosedSubproduct:
    """Generate the least subuniverse of a product containing the seed rows.

    `order="ambient"` renumbers the result by ascending coordinate vectors,
    `"bfs"` keeps discovery order (needed wherever term words matter).
    """
    budgets = budgets or Budgets()
    factors = tuple(factors)
    if not factors:
        raise InputError("closure needs at least one factor")
    if coord_factor is None:
        coord_factor = np.arange(len(factors), dtype=np.int32)
    else:
        coord_factor = np.asarray(coord_factor, dtype=np.int32)
    n_coords = coord_factor.shape[0]
    if n_coords == 0:
        raise InputError("closure needs at least one coordinate")
    seeds = np.asarray(seeds, dtype=np.int32).reshape(-1, n_coords)
    if max_rows is None:
        max_rows = budgets.max_free_elements
    max_rows = min(max_rows, max(1, budgets.max_free_cells // n_coords))
    if max_table_cells is None:
        max_table_cells = budgets.max_table_cells
    arities, fact_offsets, flat, factor_sizes = _product_pack(factors)
    k = backend.kernels()
    rows, parent_op, parent_args, seed_idx, out_tables, out_offsets, status = k.close_product(
        coord_factor, factor_sizes, arities, fact_offsets, flat, seeds,
        max_rows, build_tables, max_table_cells)
    if status == 1:
        raise BudgetExceeded(f"subuniverse closure exceeded {max_rows} elements")
    if status == 2:
        raise BudgetExceeded("induced tables would exceed the table cell budget")
    m = rows.shape[0]
    algebra = None
    if build_tables:
        tables = [out_tables[out_offsets[t]:out_offsets[t + 1]]
                  for t in range(len(arities))]
        algebra = FiniteAlgebra(factors[0].signature, m, tables)
    if order == "ambient" and m:
        perm = np.lexsort(rows.T[::-1])
        inv = np.empty(m, dtype=np.int64)
        inv[perm] = np.arange(m)
        rows = np.ascontiguousarray(rows[perm])
        seed_idx = inv[seed_idx].astype(np.int32)
        pa = parent_args[perm].astype(np.int64)
        po = parent_op[perm]
        # seed rows keep their ordinal in slot 0; op rows get their args renumbered
        remap = (pa >= 0) & (po >= 0)[:, None]
        parent_args = np.where(remap, inv[np.clip(pa, 0, None)], pa).astype(np.int32)
        parent_op = po
        if algebra is not None:
            tables = []
            for t, arity in enumerate(algebra.signature.arities):
                tab = algebra.tables[t]
                if arity == 0:
                    tables.append(inv[tab])
                    continue
                shaped = tab.reshape((m,) * arity)
                shaped = shaped[np.ix_(*([perm] * arity))]
                tables.append(inv[shaped.ravel()])
            algebra = FiniteAlgebra(algebra.signature, m, tables)
    return ClosedSubproduct(factors, coord_factor, rows, parent_op, parent_args,
                            seed_idx, algebra)


@dataclass(frozen=True)
class Subalgebra:
    """subalgebra_generated output: subuniverse, induced algebra, inclusion."""

    elements: tuple
    algebra: FiniteAlgebra
    inclusion: Homomorphism


def subalgebra_generated(algebra: FiniteAlgebra, seed) -> Subalgebra:
    """Least subuniverse containing `seed` (and every constant), with its algebra."""
    seed = tuple(sorted(set(int(x) for x in seed)))
    for x in seed:
        if not 0 <= x < algebra.size:
            raise InputError(f"seed element {x} outside the carrier")
    cached = _SUBALGEBRA_CACHE.get((algebra, seed))
    if cached is not None:
        return cached
    if algebra.size == 0:
        empty = FiniteAlgebra(algebra.signature, 0, [[] for _ in algebra.signature.symbols])
        return Subalgebra((), empty, Homomorphism(empty, algebra, [], _trusted=True))
    closed = close_in_product([algebra], [[x] for x in seed], order="ambient",
                              max_rows=algebra.size)
    elements = tuple(int(x) for x in closed.rows[:, 0])
    inclusion = Homomorphism(closed.algebra, algebra,
                             closed.rows[:, 0].astype(np.int32), _trusted=True)
    out = Subalgebra(elements, closed.algebra, inclusion)
    if len(_SUBALGEBRA_CACHE) >= _CACHE_MAX:
        _SUBALGEBRA_CACHE.pop(next(iter(_SUBALGEBRA_CACHE)))
    _SUBALGEBRA_CACHE[(algebra, seed)] = out
    return out


_SUBUNIVERSE_CACHE: dict = {}
_SUBALGEBRA_CACHE: dict = {}
_CACHE_MAX = 512


def _subuniverses_capped(algebra: FiniteAlgebra, cap: int):
    """All subuniverses as sorted element tuples, plus a truncation flag.

    Worklist closure: start from the subuniverse generated by the constants and
    repeatedly extend each known subuniverse by one element.
    """
    n = algebra.size
    if n == 0:
        return [()], False
    cached = _SUBUNIVERSE_CACHE.get((algebra, cap))
    if cached is not None:
        return cached
    closure_cache = {}

    def closure(elems):
        key = tuple(elems)
        got = closure_cache.get(key)
        if got is None:
            got = subalgebra_generated(algebra, key).elements
            closure_cache[key] = got
        return got

    first = closure(())
    found = {first}
    ordered = [first]
    queue = [first]
    truncated = False
    while queue:
        s = queue.pop(0)
        base = set(s)
        for x in range(n):
            if x in base:
                continue
            t = closure(tuple(sorted(base | {x})))
            if t not in found:
                if len(found) >= cap:
                    truncated = True
                    queue.clear()
                    break
                found.add(t)
                ordered.append(t)
                queue.append(t)
    out = sorted(found, key=lambda s: (len(s), s))
    if len(_SUBUNIVERSE_CACHE) >= _CACHE_MAX:
        _SUBUNIVERSE_CACHE.pop(next(iter(_SUBUNIVERSE_CACHE)))
    _SUBUNIVERSE_CACHE[(algebra, cap)] = (out, truncated)
    return out, truncated


def enumerate_subuniverses(algebra: FiniteAlgebra, budgets: Budgets | None = None):
    """Complete list of subuniverses, sorted by size then lexicographically."""
    budgets = budgets or Budgets()
    if algebra.size > budgets.max_subuniverse_algebra:
        raise BudgetExceeded(
            f"subuniverse enumeration limited to size {budgets.max_subuniverse_algebra}")
    out, truncated = _subuniverses_capped(algebra, budgets.max_subuniverses)
    if truncated:
        raise BudgetExceeded(f"more than {budgets.max_subuniverses} subuniverses")
    return out


def generating_set(algebra: FiniteAlgebra, minimal=True):
    """A small generating set; exact minimum for carriers up to 12 elements."""
    n = algebra.size
    full = tuple(range(n))
    if minimal and n <= 12:
        for k in range(n + 1):
            for combo in itertools.combinations(range(n), k):
                if subalgebra_generated(algebra, combo).elements == full:
                    return list(combo)
    gens = []
    have = set(subalgebra_generated(algebra, ()).elements)
    for x in range(n):
        if x not in have:
            gens.append(x)
            have = set(subalgebra_generated(algebra, gens).elements)
    return gens


def _extension_order(algebra: FiniteAlgebra, gens):
    """Closure of the generators with parent records, for extending maps off gens."""
    if algebra.size == 0:
        return None
    closed = close_in_product([algebra], [[g] for g in gens], order="bfs",
                              max_rows=algebra.size, build_tables=False)
    if closed.size != algebra.size:
        raise InputError("generating set does not generate")
    return closed


def _extend_assignment(closed: ClosedSubproduct, target: FiniteAlgebra, images):
    """Map each closure element through its parent term evaluated in `target`."""
    m = closed.size
    vals = np.empty(m, dtype=np.int32)
    for i in range(m):
        op = int(closed.parent_op[i])
        if op < 0:
            vals[i] = images[int(closed.parent_args[i, 0])]
        else:
            k = int(target.signature.arities[op])
            args = tuple(int(vals[closed.parent_args[i, j]]) for j in range(k))
            vals[i] = target.evaluate(op, args)
    out = np.empty(m, dtype=np.int32)
    out[closed.rows[:, 0]] = vals
    return out


def enumerate_homomorphisms(source: FiniteAlgebra, target: FiniteAlgebra, *,
                            onto=False, budgets: Budgets | None = None,
                            first_only=False):
    """All homomorphisms source -> target, lexicographic on map sequences.

    Backtracks over a generating set of the source; the result set equals the
    brute-force enumeration over all target^|source| maps.
    """
    budgets = budgets or Budgets()
    if source.signature != target.signature:
        raise SignatureMismatch("homomorphism endpoints have different signatures")
    if source.size == 0:
        hom = Homomorphism(source, target, [], _trusted=True)
        return [hom] if (target.size == 0 or not onto) else []
    if target.size == 0:
        return []
    if onto and target.size > source.size:
        return []
    gens = generating_set(source)
    n_assign = target.size ** len(gens)
    if n_assign > budgets.max_onto_assignments:
        raise BudgetExceeded(f"{n_assign} generator assignments exceed the budget")
    closed = _extension_order(source, gens)
    found = []
    for images in itertools.product(range(target.size), repeat=len(gens)):
        mapping = _extend_assignment(closed, target, images)
        try:
            hom = Homomorphism(source, target, mapping)
        except NotAHomomorphism:
            continue
        if onto and not hom.is_onto():
            continue
        found.append(hom)
        if first_only:
            return found
    found.sort(key=lambda h: tuple(h.map))
    return found


def enumerate_onto_maps(source: FiniteAlgebra, target: FiniteAlgebra,
                        budgets: Budgets | None = None):
    """All onto homomorphisms, deterministic lexicographic order."""
    return enumerate_homomorphisms(source, target, onto=True, budgets=budgets)


def find_onto_map(source: FiniteAlgebra, target: FiniteAlgebra,
                  budgets: Budgets | None = None):
    """First onto homomorphism in generator-assignment order, or None."""
    got = enumerate_homomorphisms(source, target, onto=True, budgets=budgets,
                                  first_only=True)
    return got[0] if got else None
