from fractions import Fraction

import pytest
import sympy as sp

from rttdegen.coeffring import HBAR, QQI, HbarPoly, Q, RatFun, TruncatedSeries, inverse_linear_series
from rttdegen.rmat import (
    InvalidDimension,
    OpMat,
    ScalarMat,
    SubstitutionOutsideDomain,
    SymplecticOddN,
    b_matrix,
    build_r,
    check_ybe,
    g_matrix,
    transpose_first,
    ybe_defect,
)
from rttdegen.yangian import check_rtt_expansion, displayed_relation, rtt_family

u, v, w, h, q = sp.symbols("u v w hbar q")
VARS, GRADING = ("u", "v"), (2, 1)


def one(series_like):
    return TruncatedSeries(VARS, GRADING, {(0, 0): series_like}, None)


# -- sympy oracle -------------------------------------------------------------


def E(N, i, j):
    m = sp.zeros(N)
    m[i - 1, j - 1] = 1
    return m


def kron(*ms):
    out = ms[0]
    for m in ms[1:]:
        out = sp.kronecker_product(out, m)
    return out


def P(N):
    return sum((kron(E(N, i, j), E(N, j, i)) for i in range(1, N + 1) for j in range(1, N + 1)), sp.zeros(N * N))


def yangian_R(N, x):
    return sp.eye(N * N) - h / x * P(N)


def quantum_R(N, a, b):
    R = sp.zeros(N * N)
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            if i == j:
                R += (a / q - b * q) * kron(E(N, i, i), E(N, i, i))
            else:
                R += (a - b) * kron(E(N, i, i), E(N, j, j))
                R -= (q - 1 / q) * (a if i > j else b) * kron(E(N, i, j), E(N, j, i))
    return R


def legs(N, R, which):
    """Place a two-leg operator on legs (0,1), (0,2) or (1,2) of the triple tensor power."""
    I = sp.eye(N)
    if which == (0, 1):
        return kron(R, I)
    if which == (1, 2):
        return kron(I, R)
    swap = kron(I, P(N))
    return swap * kron(R, I) * swap


@pytest.mark.parametrize("N", [1, 2])
def test_sympy_oracle_yangian_ybe(N):
    A = legs(N, yangian_R(N, u - v), (0, 1)) * legs(N, yangian_R(N, u - w), (0, 2)) * legs(N, yangian_R(N, v - w), (1, 2))
    B = legs(N, yangian_R(N, v - w), (1, 2)) * legs(N, yangian_R(N, u - w), (0, 2)) * legs(N, yangian_R(N, u - v), (0, 1))
    assert sp.simplify(A - B) == sp.zeros(N**3)


@pytest.mark.parametrize("N", [1, 2])
def test_sympy_oracle_quantum_ybe(N):
    A = legs(N, quantum_R(N, u, v), (0, 1)) * legs(N, quantum_R(N, u, w), (0, 2)) * legs(N, quantum_R(N, v, w), (1, 2))
    B = legs(N, quantum_R(N, v, w), (1, 2)) * legs(N, quantum_R(N, u, w), (0, 2)) * legs(N, quantum_R(N, u, v), (0, 1))
    assert sp.expand(A - B) == sp.zeros(N**3)


def _ratfun_to_sympy(c: RatFun):
    num = sum(sp.Rational(int(x.p), int(x.q)) * q**k for k, x in enumerate(c.num.coeffs()))
    den = sum(sp.Rational(int(x.p), int(x.q)) * q**k for k, x in enumerate(c.den.coeffs()))
    return num / den


def test_quantum_entries_match_oracle():
    N = 2
    R = build_r("quantum", N)
    ref = quantum_R(N, u, v)
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            for k in range(1, N + 1):
                for l in range(1, N + 1):
                    s = R.entry(i, j, k, l)
                    got = 0
                    if s is not None:
                        for (a, b), c in s.terms.items():
                            got += _ratfun_to_sympy(c) * u**a * v**b
                    want = ref[(i - 1) * N + (k - 1), (j - 1) * N + (l - 1)]
                    assert sp.simplify(got - want) == 0


# -- worked examples -----------------------------------------------------------


def test_yangian_scalar_case():
    R = build_r("yangian", 1, order=8)
    want = one(HbarPoly(1)) + inverse_linear_series(VARS, GRADING, (1, -1), 8, coeff_one=-HBAR)
    assert R.entry(1, 1, 1, 1) == want


def test_quantum_scalar_case():
    R = build_r("quantum", 1)
    want = TruncatedSeries(VARS, GRADING, {(1, 0): Q.inverse(), (0, 1): -Q}, None)
    assert R.entry(1, 1, 1, 1) == want


def test_yangian_permutation_entry():
    R = build_r("yangian", 2, order=8)
    assert R.entry(1, 2, 2, 1) == inverse_linear_series(VARS, GRADING, (1, -1), 8, coeff_one=-HBAR)
    assert R.entry(1, 2, 1, 2) is None


def test_transpose_moves_permutation_entry():
    R = build_r("yangian", 2, order=6)
    Rt = transpose_first(R)
    assert Rt.entry(2, 1, 2, 1) == R.entry(1, 2, 2, 1)
    assert Rt.entry(1, 2, 2, 1) is None


def test_transpose_of_identity():
    N = 2
    op = OpMat(N * N)
    for x in range(N * N):
        op.set(x, x, one(1))
    I = ScalarMat(N, op, {})
    It = transpose_first(I)
    assert all(It.op.get(x, x) == one(1) for x in range(N * N))
    assert sum(1 for _ in It.op.entries()) == N * N


def test_transposed_reflection_at_minus_u_minus_v():
    R = build_r("yangian", 1, order=8)
    got = transpose_first(R, ("linear", "u", (-1, 0))).entry(1, 1, 1, 1)
    want = one(HbarPoly(1)) + inverse_linear_series(VARS, GRADING, (1, 1), 8, coeff_one=HBAR)
    assert got == want


def test_inverting_a_truncated_series_is_refused():
    R = build_r("yangian", 1, order=4)
    with pytest.raises(SubstitutionOutsideDomain):
        transpose_first(R, ("invert", "u"))


@pytest.mark.parametrize("kind", ["yangian", "quantum"])
@pytest.mark.parametrize("N", [1, 2, 3])
def test_ybe(kind, N):
    assert check_ybe(kind, N)
    assert ybe_defect(kind, N) is None


@pytest.mark.parametrize("kind", ["yangian", "quantum"])
def test_ybe_control_fails_with_defect(kind):
    assert not check_ybe(kind, 2, control=True)
    r, c, x = ybe_defect(kind, 2, control=True)
    assert not x.is_zero()


def test_invalid_dimension():
    with pytest.raises(InvalidDimension):
        build_r("yangian", 0)


def test_matrices_g_and_b():
    assert g_matrix("sp", 2) == [[0, 1], [-1, 0]]
    B = b_matrix("sp", 2)
    assert B[0][1] == Q and B[1][0] == RatFun(-1)
    assert (B[0][1] - g_matrix("sp", 2)[0][1]) / (Q - 1) == RatFun(1)
    with pytest.raises(SymplecticOddN):
        g_matrix("sp", 3)


def test_rtt_expansion_matches_bracket_family():
    assert check_rtt_expansion(2, 4)


def test_rtt_expansion_scalar_case():
    fam = rtt_family(1, 3)
    for m in range(-1, 4):
        for n in range(-1, 4):
            assert fam.get(1, 1, 1, 1, (-m, -n)) == displayed_relation(1, 1, 1, 1, m, n)
