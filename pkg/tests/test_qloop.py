from fractions import Fraction

import pytest

from rttdegen.coeffring import QM1, QQI, Q, RatFun
from rttdegen.freealg import Gen, NCPoly, NotInSpan, span_membership
from rttdegen.qloop import (
    EvalRep,
    NonintegralDivision,
    S,
    T,
    Tbar,
    _quads,
    check_lemma_srm,
    check_rs_identity,
    check_tt_expansion,
    diagonal_relations,
    embed_raw,
    embed_twisted_qloop,
    embU_image,
    embU_relations,
    lemma_rhs,
    qloop_relation_component,
    raw_component,
    rep_check,
    rs_identity,
    srm_expand,
    stilde_expand,
    tau,
    taubar,
    to_tau,
    trm_expand,
    twisted_constant_relations,
    twisted_qloop_relations,
    twisted_quaternary_component,
    twisted_zero_pattern,
)
from rttdegen.report import CheckFailed

ONE = RatFun(1)
POINTS = (Fraction(2), Fraction(-3, 5))


def test_tt_family_matches_componentwise_display():
    assert check_tt_expansion(2, 3)


def test_tt_expansion_control():
    with pytest.raises(CheckFailed):
        check_tt_expansion(2, 1, control=True)


def test_scalar_tt_relation_uses_one_index():
    for r in range(3):
        for s in range(3):
            e = raw_component("TT", 1, 1, 1, 1, r, s, 1)
            assert all(g.i == g.j == 1 and g.family == "T" for w in e.terms for g in w)
    e = raw_component("TT", 1, 1, 1, 1, 1, 0, 1)
    want = (T(1, 1, 2) * T(1, 1, 0) - T(1, 1, 0) * T(1, 1, 2)).scale(Q.inverse())
    assert e == want


def test_diagonal_level_zero_is_compatible_with_inverse_pair():
    raw = raw_component("TbarT", 1, 1, 1, 1, 0, 0, 2)
    level1 = (T(1, 1, 1) * Tbar(1, 1, 1) - Tbar(1, 1, 1) * T(1, 1, 1)).scale(Q)
    rest = to_tau(raw - level1)
    cert = span_membership(rest, diagonal_relations(2))
    assert cert.verified


def test_trm_first_step_lower_triangle():
    assert trm_expand("T", 2, 1, 0, 1) == tau(2, 1, 1) - tau(2, 1, 0)
    assert trm_expand("T", 1, 1, 0, 1) == tau(1, 1, 1) - tau(1, 1, 0)


def test_trm_first_step_upper_triangle():
    assert trm_expand("T", 1, 2, 0, 1) == tau(1, 2, 1) + taubar(1, 2, 0)


def test_trm_binomial_pattern():
    assert trm_expand("T", 2, 1, 0, 2) == tau(2, 1, 2) - tau(2, 1, 1).scale(ONE * 2) + tau(2, 1, 0)


def test_ttilde_ends():
    assert trm_expand("Ttilde", 1, 2, 0, 2) == trm_expand("Tbar", 1, 2, 0, 2)
    assert trm_expand("Ttilde", 1, 2, 2, 2) == -trm_expand("T", 1, 2, 0, 2)


@pytest.mark.parametrize("quad", _quads(2))
def test_rs_identity_level_one(quad):
    cert = check_rs_identity(*quad, 1, 1, 0, 0)
    assert cert.verified


def test_rs_identity_with_one_difference():
    assert check_rs_identity(1, 2, 2, 1, 1, 1, 1, 0).verified


def test_rs_identity_at_m0_n0_is_tt_rearranged():
    # only the four TT components of the same quad are needed
    quad = (2, 1, 1, 2)
    rels = {(a, b): qloop_relation_component("TT", *quad, a, b, 2) for a in (1, 2) for b in (1, 2)}
    assert span_membership(rs_identity(*quad, 1, 1, 0, 0), rels).verified


def test_rs_identity_flip_is_rejected():
    with pytest.raises(NotInSpan):
        check_rs_identity(1, 2, 2, 1, 1, 1, 0, 0, target=rs_identity(1, 2, 2, 1, 1, 1, 0, 0, flip=True))


def test_orthogonal_zero_pattern():
    assert twisted_zero_pattern("o", 2) == [(1, 2)]
    assert twisted_zero_pattern("sp", 2) == []


def test_symplectic_constant_relation():
    (rel,) = twisted_constant_relations("sp", 2)
    want = S(2, 2, 0) * S(1, 1, 0) - (S(2, 1, 0) * S(1, 2, 0)).scale(Q**2) - NCPoly.const(Q**3)
    assert rel == want
    assert rel in twisted_qloop_relations("sp", 2, levels=0)


def test_scalar_orthogonal_quaternary_trivial():
    assert twisted_quaternary_component("o", 1, 1, 1, 1, 0, 0, 1).is_zero()


def test_embedding_level_zero_support():
    assert embed_twisted_qloop("o", 1, 2, 0, 2).is_zero()
    for i in (1, 2):
        want = T(i, i, 0) * Tbar(i, i, 0)
        for k in range(1, i):
            want = want + T(i, k, 0) * Tbar(i, k, 0)
        assert embed_twisted_qloop("o", i, i, 0, 2) == to_tau(want)


def test_symplectic_embedding_carries_q():
    e = embed_raw("sp", 1, 2, 0, 2)
    assert e.coeff((Gen("T", 0, 1, 1), Gen("Tbar", 0, 2, 2))) == Q


def test_srm_recursion():
    for case in ("o", "sp"):
        got = srm_expand(case, 1, 2, 1, 1)
        assert got == srm_expand(case, 1, 2, 2, 0) - srm_expand(case, 1, 2, 1, 0)


def test_srm_orthogonal_level_zero():
    assert srm_expand("o", 2, 1, 0, 0) == embed_twisted_qloop("o", 2, 1, 0, 2).scale(QQI.inverse())
    assert srm_expand("o", 1, 2, 0, 0) == -srm_expand("o", 2, 1, 0, 0)


@pytest.mark.parametrize("ij", [(1, 1), (2, 1), (1, 2)])
def test_srm_symplectic_level_zero_readings(ij):
    i, j = ij
    e = embed_twisted_qloop("sp", i, j, 0, 2) - NCPoly.const(Q if (i, j) == (1, 2) else
                                                            RatFun(-1) if (i, j) == (2, 1) else RatFun(0))
    assert srm_expand("sp", i, j, 0, 0, level0="literal") == e.scale(QQI.inverse())
    assert srm_expand("sp", i, j, 0, 0) == e.scale(QM1.inverse())


def test_symplectic_stilde_sign():
    assert stilde_expand("sp", 1, 2, 0, 1) == -srm_expand("sp", 2, 1, 0, 1)
    assert stilde_expand("sp", 1, 2, 0, 1, level0="literal") == srm_expand("sp", 2, 1, 0, 1, level0="literal")
    assert stilde_expand("o", 1, 2, 0, 1) == srm_expand("o", 2, 1, 0, 1)


@pytest.mark.parametrize("case", ["o", "sp"])
@pytest.mark.parametrize("rm", [(1, 0), (2, 0), (1, 1), (2, 2)])
def test_lemma(case, rm):
    r, m = rm
    for i in (1, 2):
        for j in (1, 2):
            assert check_lemma_srm(case, i, j, r, m)


@pytest.mark.parametrize("case", ["o", "sp"])
def test_lemma_definition_reading_fails(case):
    # reading Tbar_jj^(0,0) in the second level-0 sum as -tau_jj^(0) breaks the identity
    with pytest.raises(CheckFailed):
        check_lemma_srm(case, 1, 1, 1, 0, diagonal="definition")
    diff = lemma_rhs(case, 1, 2, 1, 0, diagonal="definition") - lemma_rhs(case, 1, 2, 1, 0)
    assert diff.max_length() == 2


def test_evaluation_rep_satisfies_defining_families():
    rels, names = [], []
    for kind in ("TT", "TbarTbar", "TbarT"):
        for quad in _quads(2):
            for r in range(3):
                for s in range(3):
                    rels.append(raw_component(kind, *quad, r, s, 2))
    rep = rep_check(rels, [(Fraction(3),)], 2)
    assert rep.all_pass


def test_evaluation_rep_is_not_trivial():
    R = EvalRep(2, POINTS)
    assert any(x for row in R.gen_matrix(Gen("T", 1, 1, 2)) for x in row)


@pytest.mark.parametrize("case", ["o", "sp"])
def test_embedding_images_satisfy_twisted_relations(case):
    rels, names = embU_relations(case, 2, levels=2)
    assert any("constant" in n for n in names) == (case == "sp")
    rep = rep_check(rels, [POINTS], 2, image=embU_image(case, 2), names=names)
    assert rep.all_pass, rep.failures()[:2]


def test_perturbed_embedding_image_fails():
    rels, names = embU_relations("o", 2, levels=1)
    rep = rep_check(rels, [POINTS], 2, image=embU_image("o", 2, flip=(1, 2, 1)), names=names)
    with pytest.raises(CheckFailed):
        rep.raise_on_fail()


def test_level_zero_division_must_be_integral():
    # S^(0) itself (without subtracting b) has a pole after dividing by q - 1
    from rttdegen.qloop import _integral

    with pytest.raises(NonintegralDivision):
        _integral(embed_twisted_qloop("sp", 1, 2, 0, 2).scale(QM1.inverse()), "probe")
