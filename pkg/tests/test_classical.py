from fractions import Fraction

import pytest

from rttdegen.classical import (
    ArityTooSmall,
    E,
    NotLieElement,
    RankDeficient,
    classical_limit_check,
    classical_limit_component,
    closed_form,
    expand_family,
    km_test,
    laurent,
    loop_normalize,
    monomial_independence_check,
    ordered_monomials,
    psi_apply,
    psi_closed_form_check,
    require_full_rank,
    s_poly,
    separation_probe,
    sigma_membership,
)
from rttdegen.coeffring import QM1, RatFun
from rttdegen.freealg import NCPoly
from rttdegen.qloop import _quads, diagonal_relations, tau, taubar
from rttdegen.report import CheckFailed

ONE = RatFun(1)


def mat(rows):
    return [[Fraction(x) for x in row] for row in rows]


def zero(n):
    return mat([[0] * n for _ in range(n)])


def test_loop_reorder_with_bracket():
    got = loop_normalize(E(2, 1, 1) * E(1, 2, 1))
    # [E21 s, E12 s] = (E22 - E11) s^2
    assert got == E(1, 2, 1) * E(2, 1, 1) + E(2, 2, 2) - E(1, 1, 2)


def test_loop_commuting_pair_is_sorted():
    assert loop_normalize(E(2, 2, 1) * E(1, 1, 0)) == E(1, 1, 0) * E(2, 2, 1)


def test_loop_normalize_strategies_agree():
    e = E(2, 1, 1) * E(1, 2, -1) * E(2, 1, 0)
    assert loop_normalize(e, "left") == loop_normalize(e, "right")


def test_psi_on_generators():
    assert psi_apply(tau(1, 2, 3)) == E(1, 2, 3)
    assert psi_apply(taubar(2, 1, 2)) == -E(2, 1, -2)
    assert psi_apply(tau(1, 1, 1).scale(QM1)).is_zero()


def test_psi_on_product_reorders():
    got = psi_apply(tau(2, 1, 1) * tau(1, 2, 1))
    assert got == loop_normalize(E(2, 1, 1) * E(1, 2, 1))


def test_closed_forms_at_small_levels():
    assert closed_form("T", 1, 2, 0, 1) == E(1, 2, 1) - E(1, 2, 0)
    assert closed_form("Tbar", 1, 2, 0, 0) == -E(1, 2, 0)
    assert closed_form("S", 1, 2, 1, 0, "o") == E(1, 2, 1) - E(2, 1, -1)


@pytest.mark.parametrize("family", ["T", "Tbar", "Ttilde"])
@pytest.mark.parametrize("m", [0, 1, 2])
def test_psi_closed_form_untwisted(family, m):
    for i, j in [(1, 1), (1, 2), (2, 1)]:
        rs = range(m + 1) if family == "Ttilde" else range(3)
        for r in rs:
            assert psi_closed_form_check(family, i, j, r, m)


@pytest.mark.parametrize("case", ["o", "sp"])
@pytest.mark.parametrize("family", ["S", "Stilde"])
def test_psi_closed_form_twisted(case, family):
    for i, j in [(1, 1), (1, 2), (2, 1), (2, 2)]:
        for m in range(3):
            for r in (range(m + 1) if family == "Stilde" else range(3)):
                assert psi_closed_form_check(family, i, j, r, m, case)


def test_psi_closed_form_control():
    with pytest.raises(CheckFailed):
        psi_closed_form_check("T", 1, 2, 1, 1, control=True)


@pytest.mark.parametrize("ij", [(1, 2), (2, 1)])
def test_symplectic_level_zero_literal_reading_is_half(ij):
    i, j = ij
    with pytest.raises(CheckFailed):
        psi_closed_form_check("S", i, j, 0, 0, "sp", level0="literal")
    lit = psi_apply(expand_family("S", i, j, 0, 0, "sp", 2, "literal"))
    assert lit.scale(Fraction(2)) == loop_normalize(closed_form("S", i, j, 0, 0, "sp"))


def test_km_examples():
    assert km_test(laurent(1, 2, s_poly(0, 2)), 2)
    assert not km_test(laurent(1, 2, {1: 1, 0: -1}), 2)
    assert km_test(laurent(1, 2, {1: 1, 0: -1}), 1)
    assert km_test(E(1, 1, 3), 0)


def test_km_twisted_example():
    e = laurent(1, 2, s_poly(1, 1)) - laurent(2, 1, s_poly(-1, 1, inverse=True))
    assert km_test(e, 1, twisted="o")
    assert not km_test(E(1, 2, 1) - E(1, 2, 0), 1, twisted="o")


def test_km_rejects_non_lie_elements():
    with pytest.raises(NotLieElement):
        km_test(E(1, 2, 1) * E(2, 1, 0), 1)


def test_sigma_membership_examples():
    x = E(1, 2, 1) - E(2, 1, -1)
    assert sigma_membership("o", x)
    assert not sigma_membership("o", E(1, 2, 1) + E(2, 1, -1))
    assert sigma_membership("sp", E(1, 1, 0) - E(2, 2, 0))
    assert not sigma_membership("sp", E(1, 1, 0) + E(2, 2, 0))


def test_sigma_current_variant():
    assert sigma_membership("o", E(1, 2, 1) + E(2, 1, 1), variant="current")
    assert not sigma_membership("o", E(1, 2, 1) + E(2, 1, 1))


@pytest.mark.parametrize("kind", ["TT", "TbarTbar", "TbarT"])
def test_classical_limit_components(kind):
    for quad in _quads(2):
        for r in range(3):
            for s in range(3):
                assert classical_limit_component(kind, *quad, r, s)


def test_classical_limit_of_diagonal_relations():
    for rel in diagonal_relations(2):
        assert classical_limit_check(rel)
    for i in (1, 2):
        assert psi_apply(tau(i, i, 0) + taubar(i, i, 0)).is_zero()


def test_classical_limit_detects_surviving_term():
    with pytest.raises(CheckFailed):
        classical_limit_check(tau(1, 2, 1))


def test_separation_probe_linear_element():
    e = E(1, 1, 1) - E(1, 1, 0)
    assert separation_probe(e, 1, (1,)) == mat([[1, 0], [0, 0]])
    assert separation_probe(e, 1, (0,)) == zero(2)


def test_separation_probe_kills_deeper_element():
    # E12 (s-1)^2 E21 s lies in K_2; derivatives of total order 1 vanish
    e = laurent(1, 2, s_poly(0, 2)) * E(2, 1, 1)
    for alpha in [(1, 0), (0, 1)]:
        assert separation_probe(e, 2, alpha) == zero(4)
    assert separation_probe(e, 2, (2, 0)) != zero(4)


def test_separation_probe_arity_guard():
    with pytest.raises(ArityTooSmall):
        separation_probe(E(1, 1, 0), 0, ())
    with pytest.raises(ValueError):
        separation_probe(E(1, 1, 0), 2, (1,))


@pytest.mark.parametrize("m", [0, 1, 2])
def test_monomial_independence(m):
    rep = require_full_rank(monomial_independence_check(m))
    (rec,) = rep.checks
    assert rec.params["rank"] == rec.params["monomials"]


@pytest.mark.parametrize("arity", [2, 3])
def test_single_arity_loses_rank(arity):
    assert not monomial_independence_check(1, arities=(arity,)).all_pass


def test_duplicated_monomial_is_rank_deficient():
    mons = ordered_monomials(1, 2, 2)
    with pytest.raises(RankDeficient):
        require_full_rank(monomial_independence_check(1, monomials=mons + [mons[3]]))


def test_unit_is_an_ordered_monomial_only_at_m0():
    assert ((), NCPoly.const(Fraction(1))) in ordered_monomials(0, 2, 2)
    assert all(w for w, _ in ordered_monomials(1, 2, 2))
