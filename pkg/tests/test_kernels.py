"""The numba kernels and the numpy fallback must agree bit for bit."""

import numpy as np
import pytest

from laxcal import backend
from laxcal.catalog import get
from laxcal.core import _product_pack


def _cg_inputs(algebra, pairs):
    arities, offsets, flat = algebra.pack()
    a = np.asarray([p[0] for p in pairs], dtype=np.int32)
    b = np.asarray([p[1] for p in pairs], dtype=np.int32)
    return algebra.size, arities, offsets, flat, a, b


CG_CASES = [
    ("Z4", [(0, 2)]),
    ("Z4", [(0, 1)]),
    ("Z4", []),
    ("S3", [(0, 3)]),
    ("S3", [(0, 1)]),
    ("SL3", [(0, 2)]),
    ("NM3", [(0, 1), (1, 2)]),
    ("V4", [(0, 1)]),
]


@pytest.mark.parametrize("name,pairs", CG_CASES)
def test_cg_backends_agree(name, pairs):
    nb = backend.kernels_for("numba")
    py = backend.kernels_for("python")
    args = _cg_inputs(get(name), pairs)
    assert np.array_equal(nb.cg_closure(*args), py.cg_closure(*args))


CLOSborder = [
    # (factors, coord_factor, seeds)
    (["Z4"], [0], [[1]]),
    (["Z4"], [0], [[2]]),
    (["Z4", "Z4"], [0, 1], [[0, 2], [2, 0]]),
    (["S3"], [0, 0, 0, 0], [[0, 0, 3, 3], [1, 1, 1, 1]]),
    (["SL2"], [0] * 4, [[0, 1, 0, 1], [1, 1, 0, 0]]),
    (["Z2"], [0] * 4, [[0, 1, 0, 1], [0, 0, 1, 1]]),
]


@pytest.mark.parametrize("factors,coord_factor,seeds", CLOSborder)
def test_close_product_backends_agree(factors, coord_factor, seeds):
    nb = backend.kernels_for("numba")
    py = backend.kernels_for("python")
    algs = [get(n) for n in factors]
    arities, fact_offsets, flat, sizes = _product_pack(algs)
    cf = np.asarray(coord_factor, dtype=np.int32)
    sd = np.asarray(seeds, dtype=np.int32)
    out_nb = nb.close_product(cf, sizes, arities, fact_offsets, flat, sd,
                              10_000, True, 1 << 22)
    out_py = py.close_product(cf, sizes, arities, fact_offsets, flat, sd,
                              10_000, True, 1 << 22)
    names = ["rows", "parent_op", "parent_args", "seed_idx", "tables", "offsets", "status"]
    for name, a, b in zip(names, out_nb, out_py):
        if name == "status":
            assert a == b
        else:
            assert np.array_equal(np.asarray(a), np.asarray(b)), name


def test_close_product_budget_status_matches():
    nb = backend.kernels_for("numba")
    py = backend.kernels_for("python")
    algs = [get("Z4")]
    arities, fact_offsets, flat, sizes = _product_pack(algs)
    cf = np.asarray([0], dtype=np.int32)
    sd = np.asarray([[1]], dtype=np.int32)
    for impl in (nb, py):
        *_, status = impl.close_product(cf, sizes, arities, fact_offsets, flat, sd,
                                        2, True, 1 << 22)
        assert status == impl.STATUS_ROW_BUDGET
        *_, status = impl.close_product(cf, sizes, arities, fact_offsets, flat, sd,
                                        10, True, 3)
        assert status == impl.STATUS_TABLE_BUDGET


def test_free_style_closure_agrees_on_many_coordinates(sl2):
    # free semilattice on 3 generators: realized inside SL2^(2^3)
    nb = backend.kernels_for("numba")
    py = backend.kernels_for("python")
    arities, fact_offsets, flat, sizes = _product_pack([sl2])
    n = 3
    coords = 2 ** n
    cf = np.zeros(coords, dtype=np.int32)
    seeds = np.zeros((n, coords), dtype=np.int32)
    for c in range(coords):
        for j in range(n):
            seeds[j, c] = (c >> (n - 1 - j)) & 1
    a = nb.close_product(cf, sizes, arities, fact_offsets, flat, seeds, 10_000, True, 1 << 22)
    b = py.close_product(cf, sizes, arities, fact_offsets, flat, seeds, 10_000, True, 1 << 22)
    assert a[0].shape[0] == 2 ** n - 1  # free semilattice has 2^n - 1 elements
    for x, y in zip(a, b):
        assert np.array_equal(np.asarray(x), np.asarray(y))
