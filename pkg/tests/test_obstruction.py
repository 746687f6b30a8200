from dataclasses import replace
from fractions import Fraction
from math import gcd

import pytest

from gfl.exact import rank_exact
from gfl.obstruction import (
    CertificateError,
    ObstructionCertificate,
    a_range,
    a_samples,
    a_sn_closed,
    a_sn_direct,
    a_tilde_closed,
    a_tilde_direct,
    alpha_of,
    b_of,
    beta_of,
    build_A,
    build_A_tilde,
    cardinality_floor_sum,
    cardinality_lattice_sums,
    certify_conj1,
    certify_conj2,
    check_family2,
    i_sets,
    is_coprime_family1,
    phi_entry,
    phi_entry_closed,
    s_sets,
    verify_certificate,
    x_sn,
    x_sn_tilde,
    y_of,
)

from oracles import a_brute

F = Fraction


def family1_pairs(m_max):
    return [(m, k) for m in range(1, m_max + 1) for k in range(m + 1, 2 * m + 1)]


def test_x_sn_examples():
    assert x_sn(1, 2, 1, 1) == F(-1, 30)
    assert x_sn(4, 6, 0, 0) == 0
    assert x_sn(1, 2, 3, 0) == F(1, 2)
    with pytest.raises(ValueError):
        x_sn(1, 2, 6, 0)
    with pytest.raises(ValueError):
        x_sn(1, 2, 0, 5)


def test_x_sn_tilde_examples():
    assert x_sn_tilde(2, 3, 1, 1) == F(-1, 56)
    assert x_sn_tilde(2, 3, 3, 6) == F(-27, 56)
    for n in range(1, 7):
        assert x_sn_tilde(2, 3, 4, n) == -x_sn_tilde(2, 3, 4, 7 - n)
    with pytest.raises(ValueError):
        x_sn_tilde(2, 3, 8, 1)


def test_y_of():
    assert y_of(F(1, 3), 1) == F(1, 2)
    for m, k in family1_pairs(5):
        lo, hi = a_range(m, k)
        assert y_of(lo, m) == F(4 * k * m + 3 * k + m + 1, 2 * (2 * m + 1) * (2 * k + 1))
        for a in a_samples(m, k, 5):
            y = y_of(a, m)
            assert y * 2 * a * (2 * m + 1) == 1
            assert 0 < y < 1


def test_a_range_small_case():
    lo, hi = a_range(1, 2)
    assert (lo, hi) == (F(5, 16), F(5, 14))
    # the b-interval of the smallest instance is [7/3, 8/3]
    assert (b_of(1, 2, hi), b_of(1, 2, lo)) == (F(7, 3), F(8, 3))
    assert F(7, 3) <= b_of(1, 2, (lo + hi) / 2) <= F(8, 3)


def test_a_range_endpoints_are_alpha_beta():
    for m, k in family1_pairs(6):
        lo, hi = a_range(m, k)
        assert lo < F(1, 2 * m + 1) < hi
        assert 1 / hi == alpha_of(m, k) and 1 / lo == beta_of(m, k)


@pytest.mark.parametrize("m,k", [(0, 1), (2, 2), (2, 5)])
def test_a_range_rejects(m, k):
    with pytest.raises(ValueError):
        a_range(m, k)


def test_phi_entry_closed_examples():
    assert phi_entry_closed(1, 2, F(1, 3), 1, 1) == F(14, 15)
    assert phi_entry_closed(1, 2, F(1, 3), 5, 4) == F(14, 15)


def test_phi_entry_closed_matches_direct():
    for m, k in family1_pairs(5):
        if not is_coprime_family1(m, k):
            continue
        for a in a_samples(m, k, 3):
            for s in range(1, 4 * m + 2):
                for n in range(1, 2 * k + 1):
                    assert phi_entry_closed(m, k, a, s, n) == phi_entry(m, k, a, s, n)


def test_a_sn_direct_examples():
    a = F(1, 3)
    assert a_sn_direct(1, 2, a, 0, 1) == 0
    assert a_sn_direct(1, 2, a, 1, 1) == F(2, 3) == 2 * a * 1
    assert a_sn_direct(1, 2, a, 2, 2) == F(2, 5)


def test_a_sn_direct_matches_brute_force():
    for m, k in family1_pairs(3):
        for a in a_samples(m, k, 3):
            for s in range(0, 4 * m + 2):
                for n in range(1, k + 1):
                    assert a_sn_direct(m, k, a, s, n) == a_brute(m, k, a, s, n)


def test_a_sn_closed_middle_row():
    m, k = 5, 8
    for a in a_samples(m, k, 4):
        b = b_of(m, k, a)
        for n in range(1, k // 2):
            assert a_sn_closed(m, k, a, m, n) == 2 * n / b
        assert a_sn_closed(m, k, a, m, k // 2) == 2 * a * m


def test_a_sn_closed_refuses_unsupported():
    with pytest.raises(ValueError, match="no closed form"):
        a_sn_closed(1, 2, F(1, 3), 1, 1)
    with pytest.raises(ValueError, match="no closed form"):
        a_sn_closed(3, 5, F(1, 7), 1, 1)


@pytest.mark.parametrize("m,k", [(m, k) for m, k in family1_pairs(8)
                                 if k % 2 == 0 and m >= 2 and is_coprime_family1(m, k)])
def test_a_sn_closed_equals_direct(m, k):
    for a in a_samples(m, k, 9):
        for s in range(0, 4 * m + 2):
            for n in range(1, k + 1):
                assert a_sn_closed(m, k, a, s, n) == a_sn_direct(m, k, a, s, n), (a, s, n)


def test_a_sn_closed_non_coprime_has_gaps():
    # (7, 10) reduces to a smaller family member; X[s, n] can vanish and the
    # case split does not cover every entry.
    assert not is_coprime_family1(7, 10)
    with pytest.raises(ValueError, match="no closed form"):
        for a in a_samples(7, 10, 9):
            for s in range(4 * 7 + 2):
                for n in range(1, 11):
                    assert a_sn_closed(7, 10, a, s, n) == a_sn_direct(7, 10, a, s, n)


def test_build_A_small():
    A = build_A(1, 2, F(1, 3))
    assert A.to_rows() == [[F(2, 3), F(2, 5)], [F(2, 3), F(2, 5)]]
    assert rank_exact(A) == 1


@pytest.mark.parametrize("m,k", family1_pairs(5))
def test_build_A_structure(m, k):
    for a in a_samples(m, k, 3):
        A = build_A(m, k, a)
        assert A.row(m - 1) == A.row(m)
        assert rank_exact(A) <= k - 1


def test_i_sets():
    assert i_sets(5, 8) == (frozenset(), frozenset(), frozenset({5}), frozenset())
    with pytest.raises(ValueError):
        i_sets(3, 5)


def test_s_sets_at_alpha():
    m, k = 5, 8
    rep = s_sets(m, k, 1 / alpha_of(m, k))
    assert rep.V == F(k - m, 2 * k + 1)
    assert len(rep.S) == 3
    assert not rep.T
    assert rep.W[0] == F(2 * (2 * m + 1), 2 * k + 1)


def test_s_sets_negative_v_has_empty_s():
    for m, k in family1_pairs(6):
        if k % 2 or not is_coprime_family1(m, k):
            continue
        for a in a_samples(m, k, 9):
            rep = s_sets(m, k, a)
            assert not (rep.S1a & rep.S2a) and not (rep.S3a & rep.S4a) and not (rep.S & rep.T)
            if -1 < rep.V < 0:
                assert not rep.S
            if 0 <= rep.V < 1:
                assert not rep.T


def test_cardinality_examples():
    assert cardinality_floor_sum(5, 8) == 3
    assert cardinality_floor_sum(1, 2) == 1


def test_cardinality_identity_coprime():
    for m in range(1, 11):
        for k in range(m + 1, 2 * m + 1):
            if k % 2 or not is_coprime_family1(m, k):
                continue
            enum = len(s_sets(m, k, 1 / alpha_of(m, k)).S)
            assert enum == cardinality_floor_sum(m, k) == sum(cardinality_lattice_sums(m, k)) == k - m


def test_cardinality_identity_needs_coprimality():
    # (7, 10): gcd(21, 30) = 3, and the count no longer equals k - m
    assert not is_coprime_family1(7, 10)
    assert cardinality_floor_sum(7, 10) != 3


def test_build_A_tilde_small():
    At = build_A_tilde(2, 3)
    assert (At.rows, At.cols) == (3, 3)
    assert At.row(0) == At.row(2)
    assert rank_exact(At) <= 2
    assert all(a_tilde_direct(2, 3, 4, n) == 0 for n in range(1, 4))
    assert all(a_tilde_direct(2, 3, 0, n) == 0 for n in range(1, 4))


def family2_pairs(m_max):
    return [(m, k) for m in range(2, m_max + 1) for k in range(m + 1, 2 * m)
            if 2 * k + 1 < 4 * m and gcd(4 * m, 2 * k + 1) == 1]


@pytest.mark.parametrize("m,k", family2_pairs(8))
def test_a_tilde_identities(m, k):
    for s in range(1, 2 * m):
        for n in range(1, k + 1):
            assert a_tilde_direct(m, k, s, n) == -a_tilde_direct(m, k, 4 * m - s, n)
            assert a_tilde_direct(m, k, s, n) == a_tilde_direct(m, k, 2 * m - s, n)
    assert rank_exact(build_A_tilde(m, k)) <= k - 1
    if k % 2 == 0:
        for s in range(0, 4 * m):
            if s in (m, 3 * m):
                continue
            for n in range(1, k + 1):
                assert a_tilde_closed(m, k, s, n) == a_tilde_direct(m, k, s, n)


def test_family2_rejects_non_coprime():
    with pytest.raises(ValueError, match="coprimality"):
        check_family2(3, 4)
    with pytest.raises(ValueError, match="coprimality"):
        build_A_tilde(3, 4)
    with pytest.raises(ValueError, match="coprimality"):
        certify_conj2(3, 4)


def test_certify_small_instance():
    cert = certify_conj1(1, 2, F(1, 3))
    assert cert.verified and cert.rank == 4 and (cert.p, cert.q) == (5, 6)
    assert cert.gamma == (0, 3, -5, 5, -3)
    assert verify_certificate(cert)


def test_certify_interval_end_and_center():
    lo, hi = a_range(1, 2)
    for a in (lo, hi):
        cert = certify_conj1(1, 2, a)
        assert cert.verified and cert.rank <= 4
    assert certify_conj1(2, 3, F(1, 5)).verified


def test_certify_outside_interval_rejected():
    with pytest.raises(ValueError):
        certify_conj1(1, 2, F(5, 13))


def test_certify_non_coprime_reduces():
    # (4, 7): ab = 15/18 = 5/6
    cert = certify_conj1(4, 7, F(1, 9))
    assert (cert.p, cert.q) == (5, 6)
    assert cert.verified


def test_certify_conj2():
    cert = certify_conj2(2, 3)
    assert (cert.phi_matrix.rows, cert.phi_matrix.cols) == (8, 7)
    assert cert.rank <= 6 and cert.verified
    cert = certify_conj2(3, 5)
    assert (cert.a, cert.b) == (F(1, 6), F(11, 2)) and cert.verified


def test_verify_rejects_tampering():
    cert = certify_conj1(1, 2, F(1, 3))
    g = list(cert.gamma)
    g[1] += 1
    assert not verify_certificate(replace(cert, gamma=tuple(g)))
    assert not verify_certificate(replace(cert, gamma=(0,) * 5))
    assert not verify_certificate(replace(cert, gamma=(0, 3, -5, 5)))
    other = certify_conj1(1, 2, F(5, 14))
    assert not verify_certificate(replace(cert, phi_matrix=other.phi_matrix))


def test_certificate_json_round_trip():
    cert = certify_conj2(2, 3)
    obj = cert.to_json()
    assert set(obj) == {"conjecture", "m", "k", "a", "b", "p", "q", "rank", "gamma", "matrix", "verified"}
    assert obj["a"] == "1/4" and obj["b"] == "7/2"
    back = ObstructionCertificate.from_json(obj)
    assert back == cert and verify_certificate(back)


def test_certificate_error_carries_matrix():
    err = CertificateError("boom", matrix="M")
    assert err.matrix == "M" and "boom" in str(err)
