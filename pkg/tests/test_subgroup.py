from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from charsub import subgroup as S
from charsub.circle import RationalElem, add_elements, from_support, norm_best, parse_element, parse_seq
from charsub.density import NULL, POSITIVE
from charsub.errors import CertificateInvalid, DomainError, StructureError
from charsub.funcs import modulus, weight
from charsub.nset import Finite, IntervalFamily, Prog, parse_nset

ID, LOG = modulus("x"), modulus("log(1+x)")
N_, SQRT = weight("n"), weight("sqrt(n)")
BASE2, BASE3 = parse_seq("const-ratio 2"), parse_seq("const-ratio 3")
EXAMPLE_SUPPORT = "union k in 1.. : [(2*k-1)^(2*k-1), (2*k)^(2*k)]"


def _modular_norm(x: Fraction, seq, n):
    v = Fraction((seq.a(n) * x.numerator) % x.denominator, x.denominator)
    return min(v, 1 - v)


# ---------------------------------------------------------------- exception sets

def test_exception_set_examples():
    x = parse_element("rational 1/8")
    assert list(S.exception_set(x, BASE3, Fraction(1, 5), 10).members.members(1, 10)) == [1, 3, 5, 7, 9]
    assert list(S.exception_set(x, BASE3, Fraction(1, 10), 10).members.members(1, 10)) == list(range(1, 11))
    assert S.exception_set(parse_element("zero"), BASE3, Fraction(1, 10), 100).members.count(100) == 0


def test_eps_must_be_below_half():
    with pytest.raises(DomainError):
        S.exception_set(parse_element("zero"), BASE2, Fraction(1, 2), 10)


@given(st.integers(min_value=2, max_value=500), st.data(), st.sampled_from(["const-ratio 2", "const-ratio 3",
                                                                             "ratio n+1"]))
def test_rational_exception_sets_match_modular_oracle(den, data, text):
    num = data.draw(st.integers(min_value=0, max_value=den - 1))
    eps = data.draw(st.fractions(min_value=Fraction(1, 100), max_value=Fraction(49, 100)))
    x, seq = Fraction(num, den), parse_seq(text)
    E = S.exception_set(RationalElem(x), seq, eps, 60)
    assert not E.indeterminate
    assert set(E.members.members(1, 60)) == {n for n in range(1, 61) if _modular_norm(x, seq, n) >= eps}


@given(st.frozensets(st.integers(min_value=1, max_value=400), max_size=30),
       st.fractions(min_value=Fraction(1, 64), max_value=Fraction(2, 5)))
def test_sparse_and_dense_modes_agree(points, eps):
    x = from_support(BASE2, Finite(points), "max")
    dense = S.exception_set(x, BASE2, eps, 400, "dense")
    sparse = S.exception_set(x, BASE2, eps, 400, "sparse")
    assert list(dense.members.members(1, 400)) == list(sparse.members.members(1, 400))


@given(st.frozensets(st.integers(min_value=1, max_value=200), max_size=30))
def test_exception_sets_antitone_in_eps(points):
    x = from_support(BASE3, Finite(points), "half")
    sets = [set(S.exception_set(x, BASE3, e, 200).members.members(1, 200))
            for e in (Fraction(2, 5), Fraction(1, 5), Fraction(1, 20))]
    assert sets[0] <= sets[1] <= sets[2]


# ---------------------------------------------------------------- convergence reports

def test_zero_is_member_at_scale():
    rep = S.convergence_report(parse_element("zero"), BASE2, LOG, SQRT, [Fraction(1, 10)], 1000)
    assert rep.overall == S.MEMBER


def test_one_eighth_is_non_member_evidence():
    rep = S.convergence_report(parse_element("rational 1/8"), BASE3, LOG, SQRT, [Fraction(1, 10)], 10 ** 4)
    assert rep.overall == S.NONMEMBER
    assert rep.entries[0].exceptions.members.count(10 ** 4) == 10 ** 4


def test_example_element_null_per_eps_at_scale():
    x = from_support(BASE2, parse_nset(EXAMPLE_SUPPORT), "max")
    eps = [Fraction(1, 2 ** m) for m in (2, 6)]
    rep = S.convergence_report(x, BASE2, LOG, SQRT, eps, 2 ** 2048)
    assert all(e.verdict.verdict == NULL and not e.exceptions.indeterminate for e in rep.entries)
    assert rep.overall == S.MEMBER


# ---------------------------------------------------------------- certificates

def test_membership_by_support_powers_of_two():
    x = from_support(BASE2, parse_nset("points k in 0.. : 2^k"), "max")
    cert = S.membership_by_support(x, BASE2, ID, N_, 5, 10 ** 4)
    assert cert.bound == Fraction(1, 32)
    assert cert.density_verdict == NULL
    for n in range(1, 2000):
        if not parse_nset(cert.witness).contains(n):
            assert norm_best(x, BASE2, n, 60).hi <= Fraction(1, 32)


def test_membership_vacuous_for_zero():
    cert = S.membership_by_support(parse_element("zero"), BASE2, ID, N_, 3, 500)
    assert cert.checked == 500 and parse_nset(cert.witness).count(500) == 0


def test_lemma39_witness_cases():
    x, cert = S.lemma39_witness(BASE2, IntervalFamily("2^(2^j)"), 5, 10 ** 4)
    assert cert.params["r0"] == 2
    assert any(note.startswith("case (a)") for note in cert.notes)
    a = int(cert.notes[0].split(": ")[1])
    b = int(cert.notes[1].split(": ")[1])
    assert a > 0 and b > 0 and a + b == cert.checked


def test_qbounded_examples():
    cert = S.qbounded_nonmembership(parse_element("rational 1/8"), BASE3, ID, N_, 200)
    assert cert.band == (Fraction(1, 9), Fraction(1, 2))
    B = list(parse_nset(cert.witness).members(1, 200))
    assert B == list(range(2, 201, 2))
    assert all(RationalElem(Fraction(1, 8)).frac_exact(BASE3, n) == Fraction(1, 8) for n in B)
    assert cert.density_verdict == POSITIVE
    seventh = RationalElem(Fraction(1, 7))
    cert = S.qbounded_nonmembership(seventh, BASE2, ID, N_, 200)
    B = list(parse_nset(cert.witness).members(1, 200))
    assert B == list(range(1, 200, 3))
    assert all(seventh.frac_exact(BASE2, n) == Fraction(2, 7) for n in B)
    with pytest.raises(StructureError):
        S.qbounded_nonmembership(parse_element("zero"), BASE2, ID, N_, 100)


def test_ratio_band_examples():
    q4 = parse_seq("const-ratio 4")
    x = from_support(q4, Prog(1, 1), ("const", 1))
    cert = S.ratio_band_nonmembership(x, q4, Fraction(1, 4), Fraction(1, 4), ID, N_, 300)
    assert cert.band == (Fraction(1, 4), Fraction(1, 2))
    q5 = parse_seq("const-ratio 5")
    y = from_support(q5, Prog(1, 1), ("const", 2))
    cert = S.ratio_band_nonmembership(y, q5, Fraction(2, 5), Fraction(2, 5), ID, N_, 300)
    assert cert.band == (Fraction(2, 5), Fraction(4, 5))
    half = from_support(q4, Prog(1, 1), "half")
    with pytest.raises(DomainError):
        S.ratio_band_nonmembership(half, q4, Fraction(1, 4), Fraction(1, 2), ID, N_, 300)
    with pytest.raises(DomainError):
        S.ratio_band_nonmembership(x, q4, Fraction(1, 5), Fraction(1, 5), ID, N_, 300)


def test_probe_branches():
    q4 = parse_seq("const-ratio 4")
    pos = S.corollary319_probe(q4, Prog(1, 1), ID, N_, 2000)
    assert pos.verdict == S.NONMEMBER and pos.certificate.band == (Fraction(1, 4), Fraction(1, 2))
    null = S.corollary319_probe(q4, parse_nset("points k in 1.. : 2^k"), ID, N_, 4000, k=2)
    assert null.verdict == S.MEMBER and null.certificate.kind == "membership-by-support"
    fin = S.corollary319_probe(q4, Finite([3, 9]), ID, N_, 4000)
    assert fin.verdict == S.MEMBER
    cap = S.corollary319_probe(parse_seq("ratio 2"), Prog(1, 1), ID, N_, 1000)
    assert cap.certificate is None and "capability" in cap.note


def test_thinned_half_rule_witness():
    x, B, cert = S.thm313_witness(parse_seq("ratio n+1"), ID, N_, 10, 3000)
    assert cert.kind == "membership-by-support"
    assert any("cited, not verified" in note for note in cert.notes)
    S.verify_certificate(cert.serialize())


def test_certificates_replay_and_detect_tampering():
    x = from_support(BASE2, parse_nset("points k in 0.. : 2^k"), "max")
    certs = [
        S.membership_by_support(x, BASE2, ID, N_, 4, 3000),
        S.lemma39_witness(BASE2, IntervalFamily("2^(2^j)"), 4, 3000)[1],
        S.qbounded_nonmembership(parse_element("rational 1/8"), BASE3, ID, N_, 500),
        S.corollary319_probe(parse_seq("const-ratio 4"), Prog(1, 1), ID, N_, 500).certificate,
    ]
    for cert in certs:
        text = cert.serialize()
        assert text.startswith("charsub-certificate v1\n")
        again = S.verify_certificate(text)
        assert again.serialize() == text
        bad = text.replace(f"checked: {cert.checked}", f"checked: {cert.checked + 1}")
        with pytest.raises(CertificateInvalid):
            S.verify_certificate(bad)
    with pytest.raises(CertificateInvalid):
        S.verify_certificate("not a certificate\n")


# ---------------------------------------------------------------- closure

MEMBER_SUPPORTS = ["points k in 0.. : 2^k", "points k in 1.. : k^3", "{1, 2, 3, 10}",
                   EXAMPLE_SUPPORT]


@pytest.mark.parametrize("text", ["const-ratio 2", "ratio n+1"])
def test_sums_of_members_are_members(text):
    seq = parse_seq(text)
    eps = [Fraction(1, 8)]
    members = [from_support(seq, parse_nset(s), "max") for s in MEMBER_SUPPORTS]
    members.append(RationalElem(Fraction(3, 8) if text == "const-ratio 2" else Fraction(5, 7)))
    for x in members:
        assert S.convergence_report(x, seq, ID, N_, eps, 4096).overall == S.MEMBER
    x, y = members[0], members[-1]
    assert S.convergence_report(add_elements(x, y), seq, ID, N_, eps, 4096).overall == S.MEMBER
