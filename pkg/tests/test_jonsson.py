import itertools

import pytest

import oracles
from laxcal import (
    Budgets,
    Congruence,
    DecideOptions,
    con_lattice,
    direct_product,
    enumerate_subuniverses,
    make_homomorphism,
    monolith_and_si,
    quotient,
    subalgebra_generated,
)
from laxcal.catalog import S3_A3_BLOCKS
from laxcal.errors import NotInHSP, NotSubdirectlyIrreducible, SignatureMismatch
from laxcal.jonsson import (
    hs_membership,
    hsp_membership,
    jonsson_check,
    si_quotients,
)


def test_hsp_positive_z2_in_vz4(z2, z4):
    cert = hsp_membership(z2, [z4])
    assert cert.positive
    cert.verify()


def test_hsp_negative_z3_in_vz4(z3, z4):
    cert = hsp_membership(z3, [z4])
    assert not cert.positive
    cert.verify_against(z3, [z4])


def test_hsp_trivial_algebra(z4):
    from laxcal.catalog import GROUP_SIG

    one = direct_product([], signature=GROUP_SIG)
    cert = hsp_membership(one, [z4])
    assert cert.positive
    cert.verify()


def test_hsp_klein_in_vz4(v4, z4):
    cert = hsp_membership(v4, [z4])
    assert cert.positive
    cert.verify()


def test_hsp_sl3_in_v_sl2(sl3, sl2):
    cert = hsp_membership(sl3, [sl2])
    assert cert.positive
    cert.verify()


def _hsp_oracle_two_factors(b, K):
    """Quotients of subalgebras of products of <= 2 factors of K, up to iso."""
    import laxcal

    products = [direct_product([a]) for a in K]
    products += [direct_product([a1, a2]) for a1, a2 in
                 itertools.combinations_with_replacement(K, 2)]
    for p in products:
        for elements in enumerate_subuniverses(p, Budgets(max_subuniverse_algebra=64)):
            if len(elements) < b.size:
                continue
            sub = subalgebra_generated(p, elements).algebra
            for theta in con_lattice(sub, Budgets(max_lattice_algebra=64)):
                q = quotient(sub, theta).algebra
                if q.size != b.size:
                    continue
                for mapping in oracles.naive_homs(q, b, onto=True):
                    if len(set(mapping)) == q.size:  # bijective onto = isomorphism
                        return True
    return False


def test_hsp_agrees_with_bruteforce_oracle(z2, z3, z4, sl2, sl3):
    cases = [(z2, [z4], True), (z3, [z4], False), (sl3, [sl2], True), (sl2, [sl3], True)]
    for b, K, expect in cases:
        assert hsp_membership(b, K).positive == expect
        assert _hsp_oracle_two_factors(b, K) == expect


def test_hs_membership_examples(z2, z3, z4):
    cert = hs_membership(z2, z4)
    assert cert.positive
    assert cert.subuniverse == (0, 2)  # smallest witnessing subalgebra comes first
    cert.verify()
    neg = hs_membership(z3, z4)
    assert not neg.positive
    assert neg.kind == "exhaustion"
    ident = hs_membership(z4, z4)
    assert ident.positive
    assert ident.subuniverse == (0, 1, 2, 3)
    ident.verify()


def test_hs_membership_signature_mismatch(z2, sl2):
    with pytest.raises(SignatureMismatch):
        hs_membership(z2, sl2)


def test_si_quotients_z4(z4):
    out = si_quotients(z4)
    assert [(theta.blocks(), q.size) for theta, q in out] == [
        (((0,), (1,), (2,), (3,)), 4),
        (((0, 2), (1, 3)), 2),
    ]
    for _, q in out:
        assert monolith_and_si(q)[0]


def test_si_quotients_klein(v4):
    out = si_quotients(v4)
    assert len(out) == 3
    assert all(q.size == 2 for _, q in out)
    assert all(theta.num_blocks == 2 for theta, _ in out)


def test_si_quotients_trivial():
    from laxcal.catalog import GROUP_SIG

    one = direct_product([], signature=GROUP_SIG)
    assert si_quotients(one) == []


def test_si_quotients_cover_all_si_images(curated):
    for name in ["Z4", "S3", "SL3", "NM3", "V4"]:
        a = curated[name]
        got = {theta for theta, _ in si_quotients(a)}
        for theta in con_lattice(a):
            q = quotient(a, theta).algebra
            assert monolith_and_si(q)[0] == (theta in got)


MODULAR = DecideOptions(modular_assert=True)


def test_jonsson_s3(s3):
    report = jonsson_check(s3, [s3], MODULAR, algebra_label="S3", class_labels=("S3",))
    assert report.outcome == "PASS"
    assert report.monolith.blocks() == S3_A3_BLOCKS
    assert [c.blocks() for c in report.maxcent.maximal] == [S3_A3_BLOCKS]
    entry = report.conclusions[0]
    assert entry.status == "PASS"
    assert entry.certificate.subuniverse == (0, 1)  # two-element subgroup
    entry.certificate.verify()


def test_jonsson_z4(z4):
    report = jonsson_check(z4, [z4], MODULAR)
    assert report.outcome == "PASS"
    assert report.maxcent.maximal[0].is_top()
    report.conclusions[0].certificate.verify()


def test_jonsson_z2_over_vz4(z2, z4):
    report = jonsson_check(z2, [z4])
    assert report.outcome == "PASS"
    assert report.maxcent.maximal[0].is_top()


def test_jonsson_lattice2(l2):
    report = jonsson_check(l2, [l2], MODULAR)
    assert report.outcome == "PASS"
    assert report.maxcent.maximal[0].is_bottom()
    assert report.maxcent.complete


def test_jonsson_semilattice_nonmodular_route(sl2):
    # no modularity assertion: the free-intersection stage settles top
    report = jonsson_check(sl2, [sl2])
    assert report.outcome == "PASS"
    assert report.maxcent.maximal[0].is_top()


def test_jonsson_not_si(v4, z4):
    with pytest.raises(NotSubdirectlyIrreducible):
        jonsson_check(v4, [z4])


def test_jonsson_not_in_hsp(z3, z4):
    with pytest.raises(NotInHSP):
        jonsson_check(z3, [z4])


def test_jonsson_inconclusive_with_strangled_budgets(sl2):
    opts = DecideOptions(use_free_intersection=False, use_search=False)
    report = jonsson_check(sl2, [sl2], opts)
    assert report.outcome == "NO-COMPLETE-MAXIMAL"
    assert not report.maxcent.complete
    assert report.conclusions[0].status == "INCONCLUSIVE"


def test_jonsson_report_text_is_deterministic(s3):
    r1 = jonsson_check(s3, [s3], MODULAR, algebra_label="S3", class_labels=("S3",))
    r2 = jonsson_check(s3, [s3], MODULAR, algebra_label="S3", class_labels=("S3",))
    assert r1.to_text() == r2.to_text()
    assert "elapsed" not in r1.to_text()
    assert "elapsed_seconds" in r1.to_text(include_timing=True)
