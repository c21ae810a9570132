import itertools
import random

import numpy as np
import pytest

import oracles
from laxcal import (
    Budgets,
    Congruence,
    FiniteLattice,
    Homomorphism,
    cg,
    con_lattice,
    is_modular_lattice,
    make_algebra,
    make_homomorphism,
    monolith_and_si,
    pull_back,
    push_forward,
    quotient,
)
from laxcal.catalog import GROUPOID_SIG, S3_A3_BLOCKS
from laxcal.errors import BudgetExceeded, MismatchedCarriers, NotACongruence


def theta2(z4):
    return Congruence.from_blocks(z4, [(0, 2), (1, 3)])


def test_cg_examples(z4):
    assert cg(z4, [(0, 2)]).blocks() == ((0, 2), (1, 3))
    assert cg(z4, []).is_bottom()
    assert cg(z4, [(0, 1)]).is_top()


def test_cg_matches_bruteforce_on_principal_pairs(curated):
    for name in ["Z2", "Z3", "Z4", "SL2", "SL3", "NM3", "V4"]:
        a = curated[name]
        for x in range(a.size):
            for y in range(x + 1, a.size):
                got = tuple(cg(a, [(x, y)]).labels)
                assert got == oracles.cg_oracle(a, [(x, y)]), (name, x, y)


def test_cg_matches_matrix_oracle_on_random_pairs(curated):
    rng = random.Random(11)
    for name in ["Z4", "S3", "SL3", "NM3"]:
        a = curated[name]
        for _ in range(10):
            pairs = [(rng.randrange(a.size), rng.randrange(a.size))
                     for _ in range(rng.randrange(0, 4))]
            assert tuple(cg(a, pairs).labels) == oracles.cg_matrix_oracle(a, pairs)


def test_cg_is_closure_operator(z4, s3):
    rng = random.Random(3)
    for a in [z4, s3]:
        for _ in range(10):
            pairs = [(rng.randrange(a.size), rng.randrange(a.size)) for _ in range(2)]
            more = pairs + [(rng.randrange(a.size), rng.randrange(a.size))]
            c1 = cg(a, pairs)
            assert all(c1.related(x, y) for x, y in pairs)  # extensive
            assert c1.leq(cg(a, more))  # monotone
            regen = cg(a, [(i, int(l)) for i, l in enumerate(c1.labels)])
            assert regen == c1  # idempotent


def test_con_lattice_z4(z4):
    lat = con_lattice(z4)
    assert [c.blocks() for c in lat] == [
        ((0,), (1,), (2,), (3,)),
        ((0, 2), (1, 3)),
        ((0, 1, 2, 3),),
    ]


def test_con_lattice_klein(v4):
    lat = con_lattice(v4)
    assert len(lat) == 5
    assert len(lat.atoms()) == 3


def test_con_lattice_one_element():
    from laxcal import direct_product
    from laxcal.catalog import GROUP_SIG

    one = direct_product([], signature=GROUP_SIG)
    assert len(con_lattice(one)) == 1


def test_con_lattice_matches_bruteforce(curated):
    for name in ["Z2", "Z3", "Z4", "SL2", "SL3", "NM3", "V4"]:
        a = curated[name]
        got = sorted(tuple(c.labels) for c in con_lattice(a))
        want = sorted(oracles.congruence_labels_oracle(a))
        assert got == want, name


def test_con_lattice_budget(z4):
    with pytest.raises(BudgetExceeded):
        con_lattice(z4, Budgets(max_lattice_algebra=3))


def test_join_meet_against_oracle(curated):
    for name in ["Z4", "SL3", "NM3"]:
        a = curated[name]
        lat = con_lattice(a)
        all_labels = oracles.congruence_labels_oracle(a)
        for c1, c2 in itertools.product(lat.elements, repeat=2):
            j = c1.join(c2)
            uppers = [p for p in all_labels
                      if oracles.refines(tuple(c1.labels), p)
                      and oracles.refines(tuple(c2.labels), p)]
            least = [p for p in uppers if all(oracles.refines(p, q) for q in uppers)]
            assert tuple(j.labels) == least[0]
            m = c1.meet(c2)
            assert all(m.related(x, y) == (c1.related(x, y) and c2.related(x, y))
                       for x in range(a.size) for y in range(a.size))


def test_congruence_from_blocks_errors(z4):
    with pytest.raises(NotACongruence):
        Congruence.from_blocks(z4, [(0, 1), (1, 2)])  # overlap
    with pytest.raises(NotACongruence):
        Congruence.from_blocks(z4, [(0, 1), (2,), (3,)])  # incompatible with plus
    with pytest.raises(NotACongruence):
        Congruence.from_blocks(z4, [(0, 7)])


def test_congruence_requires_same_algebra(z4, z2):
    with pytest.raises(MismatchedCarriers):
        Congruence.top(z4).meet(Congruence.top(z2))


def test_push_forward_examples(z4, z2):
    f = make_homomorphism(z4, z2, [0, 1, 0, 1])
    assert push_forward(f, theta2(z4)).is_bottom()
    assert push_forward(f, Congruence.top(z4)).is_top()


def test_push_forward_onto_formula(z4, z2):
    # Theorem 2(1): for onto f, the push-forward is the image of alpha v ker f
    f = make_homomorphism(z4, z2, [0, 1, 0, 1])
    for alpha in con_lattice(z4):
        joined = alpha.join(f.kernel())
        want = oracles.image_partition(list(f.map), list(joined.labels), z2.size)
        assert tuple(push_forward(f, alpha).labels) == want


def test_pull_back_examples(z4, z2):
    f = make_homomorphism(z4, z2, [0, 1, 0, 1])
    assert pull_back(f, Congruence.bottom(z2)) == f.kernel()
    assert pull_back(f, Congruence.top(z2)).is_top()


def test_galois_adjunction(z4, z2):
    # Theorem 2(2) on one pair of lattices
    f = make_homomorphism(z4, z2, [0, 1, 0, 1])
    for alpha in con_lattice(z4):
        for beta in con_lattice(z2):
            assert push_forward(f, alpha).leq(beta) == alpha.leq(pull_back(f, beta))


def test_push_forward_composes(z4, z2):
    # Theorem 2(3)
    f = make_homomorphism(z4, z2, [0, 1, 0, 1])
    g = Homomorphism.identity(z2)
    for alpha in con_lattice(z4):
        assert push_forward(g.compose(f), alpha) == push_forward(g, push_forward(f, alpha))


def test_monolith_examples(z4, v4, sl2, s3):
    si, mono = monolith_and_si(z4)
    assert si and mono.blocks() == ((0, 2), (1, 3))
    assert monolith_and_si(v4) == (False, None)
    si, mono = monolith_and_si(sl2)
    assert si and mono.is_top()
    si, mono = monolith_and_si(s3)
    assert si and mono.blocks() == S3_A3_BLOCKS


def test_monolith_below_every_nontrivial(curated):
    for a in curated.values():
        si, mono = monolith_and_si(a)
        if not si:
            continue
        for c in con_lattice(a):
            if not c.is_bottom():
                assert mono.leq(c)


def test_is_modular_lattice(z4, v4):
    assert is_modular_lattice(con_lattice(z4))  # 3-chain
    assert is_modular_lattice(con_lattice(v4))  # M3
    # pentagon: 0 < a < b < 1 on one side, 0 < c < 1 on the other
    leq = np.zeros((5, 5), dtype=bool)
    order = {(0, 0), (1, 1), (2, 2), (3, 3), (4, 4),
             (0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 4), (2, 4), (3, 4)}
    for i, j in order:
        leq[i, j] = True
    n5 = FiniteLattice(leq)
    assert not is_modular_lattice(n5)


def test_nm3_square_refutes_modularity(nm3):
    from laxcal import direct_product

    lat = con_lattice(direct_product([nm3, nm3]),
                      Budgets(max_lattice_algebra=9, max_lattice_size=5000))
    assert not is_modular_lattice(lat)


def test_quotient_examples(z4, z2):
    q = quotient(z4, theta2(z4))
    assert q.algebra == z2
    assert q.nat.kernel() == theta2(z4)
    q0 = quotient(z4, Congruence.bottom(z4))
    assert q0.algebra == z4
    q1 = quotient(z4, Congruence.top(z4))
    assert q1.algebra.size == 1


def test_quotient_nat_kernel_is_theta(curated):
    for a in curated.values():
        for theta in con_lattice(a):
            q = quotient(a, theta)
            assert q.nat.is_onto()
            assert q.nat.kernel() == theta


def test_empty_algebra_congruences():
    a = make_algebra(GROUPOID_SIG, 0, {"op": []})
    assert len(con_lattice(a)) == 1
    assert Congruence.bottom(a) == Congruence.top(a)
    assert monolith_and_si(a) == (False, None)
