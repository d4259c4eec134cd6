"""The quantum loop algebra U_q(L(gl_N)) in tau-form and its twisted subalgebras."""

from __future__ import annotations

from functools import lru_cache

from .coeffring import QM1, QQI, Q, RatFun, TruncatedSeries, binomial, div_qqi_power, q1_valuation
from .freealg import Certificate, Gen, NCPoly, NotInSpan, prime, span_membership, substitute_constants
from .report import CheckFailed, Report, record
from .rmat import (
    SymplecticOddN,
    b_matrix,
    build_r,
    expand_matrix_relation,
    generator_matrix,
    transpose_first,
)

ONE = RatFun(1)
HALF_Q = Q / (Q + 1)  # (q - 1)/(q - q^{-1})


class IndexOutOfRange(ValueError):
    pass


class NonintegralDivision(ArithmeticError):
    pass


class SelfCertificationFailed(AssertionError):
    pass


def _qd(a, b, sign=1) -> RatFun:
    return Q ** sign if a == b else ONE


def _case(case: str) -> str:
    aliases = {"o": "o", "AI": "o", "orthogonal": "o", "sp": "sp", "AII": "sp", "symplectic": "sp"}
    try:
        return aliases[case]
    except KeyError:
        raise ValueError(f"unknown case {case!r}") from None


# ---------------------------------------------------------------------------
# generators


def T(i, j, r) -> NCPoly:
    return NCPoly.gen(Gen("T", r, i, j), ONE)


def Tbar(i, j, r) -> NCPoly:
    return NCPoly.gen(Gen("Tbar", r, i, j), ONE)


def tau(i, j, r) -> NCPoly:
    if r == 0 and i < j:
        raise IndexOutOfRange(f"tau_{i}{j}^(0) is not a generator")
    return NCPoly.gen(Gen("tau", r, i, j), ONE)


def taubar(i, j, r) -> NCPoly:
    if r == 0 and i > j:
        raise IndexOutOfRange(f"taubar_{i}{j}^(0) is not a generator")
    return NCPoly.gen(Gen("taubar", r, i, j), ONE)


def _t_image(g: Gen):
    """T and Tbar as macros in tau-form."""
    i, j, r = g.i, g.j, g.level
    if g.family == "T":
        if r == 0:
            if i < j:
                return NCPoly()
            if i == j:
                return NCPoly.const(ONE) + tau(i, i, 0).scale(QM1)
        return tau(i, j, r).scale(QQI)
    if g.family == "Tbar":
        if r == 0:
            if i > j:
                return NCPoly()
            if i == j:
                return NCPoly.const(ONE) + taubar(i, i, 0).scale(QM1)
        return taubar(i, j, r).scale(QQI)
    return None


def to_tau(e: NCPoly) -> NCPoly:
    return e.map_coeffs(RatFun.coerce).substitute(_t_image)


def strip_qqi(e: NCPoly) -> tuple[NCPoly, int]:
    """Divide by the largest power of q - q^{-1} that keeps every coefficient pole-free at q=1."""
    if e.is_zero():
        return e, 0
    k = min(q1_valuation(c) for c in e.terms.values())
    if k <= 0:
        return e, 0
    return e.map_coeffs(lambda c: div_qqi_power(c, k)), k


# ---------------------------------------------------------------------------
# relation families (2)(3)(4)


def displayed_tt(i, j, k, l, r, s) -> NCPoly:
    """LHS - RHS of the componentwise TT family, in raw T symbols."""
    lhs = (T(i, j, r + 1) * T(k, l, s)).scale(_qd(i, k, -1)) - (T(i, j, r) * T(k, l, s + 1)).scale(_qd(i, k))
    lhs = lhs - (T(k, l, s) * T(i, j, r + 1)).scale(_qd(j, l, -1)) + (T(k, l, s + 1) * T(i, j, r)).scale(_qd(j, l))
    rhs = NCPoly()
    if i > k:
        rhs = rhs + T(k, j, r + 1) * T(i, l, s)
    if i < k:
        rhs = rhs + T(k, j, r) * T(i, l, s + 1)
    if l > j:
        rhs = rhs - T(k, j, s) * T(i, l, r + 1)
    if l < j:
        rhs = rhs - T(k, j, s + 1) * T(i, l, r)
    return lhs - rhs.scale(QQI)


_KINDS = {
    # kind: (first family, its sign, second family, its sign, grading)
    "TT": ("T", -1, "T", -1, (1, 1)),
    "TbarTbar": ("Tbar", 1, "Tbar", 1, (-1, -1)),
    "TbarT": ("Tbar", 1, "T", -1, (-1, 1)),
}


def _member_exps(kind, r, s):
    if kind == "TT":
        return (-r, -s)
    if kind == "TbarTbar":
        return (r + 1, s + 1)
    return (r + 1, -s)


@lru_cache(maxsize=None)
def raw_family(kind: str, N: int, L: int):
    """Components of R_q(u,v) X1(u) Y2(v) - Y2(v) X1(u) R_q(u,v) for levels <= L.

    Member (r, s) of TT is the coefficient of u^{-r} v^{-s}; of TbarTbar the
    coefficient of u^{r+1} v^{s+1}; of TbarT the coefficient of u^{r+1} v^{-s}.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    f1, e1, f2, e2, grading = _KINDS[kind]
    vars = ("u", "v")
    order = 2 * L + 4
    R = build_r("quantum", N, vars=vars, grading=grading).op
    X1 = generator_matrix(f1, N, vars=vars, grading=grading, var="u", sign=e1, order=order, coeff_one=ONE).leg(1)
    Y2 = generator_matrix(f2, N, vars=vars, grading=grading, var="v", sign=e2, order=order, coeff_one=ONE).leg(2)
    exps = [_member_exps(kind, r, s) for r in range(L + 1) for s in range(L + 1)]
    return expand_matrix_relation([R, X1, Y2], [Y2, X1, R], N, exps, source=kind, algebra="qloop")


def raw_component(kind, i, j, k, l, r, s, N=2) -> NCPoly:
    return raw_family(kind, N, max(r, s)).get(i, j, k, l, _member_exps(kind, r, s))


def qloop_relation_component(kind, i, j, k, l, r, s, N=2) -> NCPoly:
    """Component relation in tau-form, divided by the maximal uniform power of q - q^{-1}."""
    return strip_qqi(to_tau(raw_component(kind, i, j, k, l, r, s, N)))[0]


def check_tt_expansion(N: int, L: int, *, control: bool = False) -> bool:
    """The expanded TT family equals the displayed componentwise family for levels <= L."""
    first = True
    for quad in _quads(N):
        for r in range(L + 1):
            for s in range(L + 1):
                a, b = raw_component("TT", *quad, r, s, N), displayed_tt(*quad, r, s)
                if control and first and b:
                    b, first = -b, False
                if a != b:
                    raise CheckFailed(f"TT{quad} ({r},{s}) differs from the displayed relation", (a - b).format())
    return True


def diagonal_relations(N: int) -> list:
    """T_ii^(0) Tbar_ii^(0) - 1 and Tbar_ii^(0) T_ii^(0) - 1 in tau-form, divided by (q - 1)."""
    out = []
    for i in range(1, N + 1):
        for a, b in ((T(i, i, 0), Tbar(i, i, 0)), (Tbar(i, i, 0), T(i, i, 0))):
            e = to_tau(a * b - NCPoly.const(ONE))
            out.append(e.scale(QM1.inverse()))
    return out


# ---------------------------------------------------------------------------
# T^(r,m), Tbar^(r,m), Ttilde^(r,m)


def _level0(family, i, j, r) -> NCPoly:
    if family == "T":
        if r == 0 and i < j:
            return -taubar(i, j, 0)
        return tau(i, j, r)
    if r == 0 and i >= j:
        return -tau(i, j, 0)
    return taubar(i, j, r)


@lru_cache(maxsize=None)
def trm_expand(family: str, i, j, r, m) -> NCPoly:
    """T^(r,m), Tbar^(r,m) or Ttilde^(r,m) as a linear combination of tau, taubar."""
    if r < 0 or m < 0:
        raise IndexOutOfRange((family, r, m))
    if family in ("T", "Tbar"):
        out = NCPoly()
        for a in range(m + 1):
            out = out + _level0(family, i, j, r + a).scale(ONE * (binomial(m, a) * (-1) ** (m - a)))
        return out
    if family == "Ttilde":
        if r > m:
            raise IndexOutOfRange(f"Ttilde^({r},{m}) needs r <= m")
        if r == 0:
            return trm_expand("Tbar", i, j, 0, m)
        if r == m:
            return trm_expand("T", i, j, 0, m).scale(ONE * (-1) ** (m + 1))
        return trm_expand("Ttilde", i, j, r - 1, m - 1) - trm_expand("Ttilde", i, j, r, m - 1)
    raise ValueError(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# the rs identity


def rs_identity(i, j, k, l, r, s, m, n, *, flip: bool = False) -> NCPoly:
    """LHS - RHS of the (r, s) identity in tau-form; ``flip`` reverses the sign of its first product."""
    X = lambda a, b, rr, mm: trm_expand("T", a, b, rr, mm)  # noqa: E731
    qik, qjl = _qd(i, k), _qd(j, l)
    first = X(i, j, r, m + 1) * X(k, l, s, n)
    lhs = ((-first if flip else first) - X(i, j, r, m) * X(k, l, s, n + 1)).scale(qik.inverse())
    lhs = lhs - (X(i, j, r, m) * X(k, l, s + 1, n)).scale(qik - qik.inverse())
    lhs = lhs - (X(k, l, s, n) * X(i, j, r, m + 1) - X(k, l, s, n + 1) * X(i, j, r, m)).scale(qjl.inverse())
    lhs = lhs + (X(k, l, s + 1, n) * X(i, j, r, m)).scale(qjl - qjl.inverse())
    rhs = NCPoly()
    if i > k:
        rhs = rhs + X(k, j, r + 1, m) * X(i, l, s, n)
    if i < k:
        rhs = rhs + X(k, j, r, m) * X(i, l, s + 1, n)
    if l > j:
        rhs = rhs - X(k, j, s, n) * X(i, l, r + 1, m)
    if l < j:
        rhs = rhs - X(k, j, s + 1, n) * X(i, l, r, m)
    return lhs - rhs.scale(QQI)


def check_rs_identity(i, j, k, l, r, s, m, n, N=2, *, target=None) -> Certificate:
    """Certificate that the rs identity lies in the span of tau-form TT components."""
    if r < 1 or s < 1:
        raise IndexOutOfRange("r, s >= 1 required")
    tgt = rs_identity(i, j, k, l, r, s, m, n) if target is None else target
    rels = {}
    for a in range(r, r + m + 2):
        for b in range(s, s + n + 2):
            rels[f"TT({i}{j}{k}{l};{a},{b})"] = qloop_relation_component("TT", i, j, k, l, a, b, N)
    tid = f"rs({i}{j}{k}{l};r={r},s={s},m={m},n={n})"
    try:
        return span_membership(tgt, rels, target_id=tid)
    except NotInSpan:
        pass
    for a in range(r, r + m + 2):
        for b in range(s, s + n + 2):
            for quad in _quads(N):
                rels[f"TT({''.join(map(str, quad))};{a},{b})"] = qloop_relation_component("TT", *quad, a, b, N)
    return span_membership(tgt, rels, target_id=tid)


def _quads(N):
    rng = range(1, N + 1)
    return [(a, b, c, d) for a in rng for b in rng for c in rng for d in rng]


# ---------------------------------------------------------------------------
# twisted quantum loop algebras


def _check_case(case, N):
    case = _case(case)
    if case == "sp" and N % 2:
        raise SymplecticOddN(f"the symplectic case needs even N, got {N}")
    return case


def S(i, j, r) -> NCPoly:
    return NCPoly.gen(Gen("S", r, i, j), ONE)


@lru_cache(maxsize=None)
def _twisted_family(N: int, L: int):
    vars, grading = ("u", "v"), (1, 1)
    order = 2 * L + 4
    A = build_r("quantum", N, vars=vars, grading=grading).op
    B = transpose_first(build_r("quantum", N, vars=vars, grading=grading, x_exp=(-1, 0), y_exp=(0, 1))).op
    S1 = generator_matrix("S", N, vars=vars, grading=grading, var="u", sign=-1, order=order, coeff_one=ONE).leg(1)
    S2 = generator_matrix("S", N, vars=vars, grading=grading, var="v", sign=-1, order=order, coeff_one=ONE).leg(2)
    exps = [(1 - r, 2 - s) for r in range(L + 1) for s in range(L + 1)]
    return expand_matrix_relation([A, S1, B, S2], [S2, B, S1, A], N, exps, source="twisted", algebra="twisted_qloop")


def twisted_quaternary_component(case, i, j, k, l, r, s, N=2, substitute=True) -> NCPoly:
    """Coefficient of u^{1-r} v^{2-s}: first factor at levels r-2..r, second at s-2..s."""
    case = _check_case(case, N)
    raw = _twisted_family(N, max(r, s)).get(i, j, k, l, (1 - r, 2 - s))
    return substitute_constants(raw, ("twisted_qloop", case)) if substitute else raw


def twisted_constant_relations(case, N=2) -> list:
    case = _check_case(case, N)
    out = []
    if case == "sp":
        for i in range(1, N, 2):
            ip = prime(i)
            out.append(S(ip, ip, 0) * S(i, i, 0) - (S(ip, i, 0) * S(i, ip, 0)).scale(Q ** 2)
                       - NCPoly.const(Q ** 3))
    return out


def twisted_qloop_relations(case, N=2, levels=2, substitute=True) -> list:
    """Quaternary components with both levels <= ``levels`` plus the level-0 constant relations."""
    out = []
    for r in range(levels + 1):
        for s in range(levels + 1):
            for quad in _quads(N):
                e = twisted_quaternary_component(case, *quad, r, s, N, substitute)
                if e:
                    out.append(e)
    out.extend(twisted_constant_relations(case, N))
    return out


def twisted_zero_pattern(case, N=2) -> list:
    case = _check_case(case, N)
    out = []
    for i in range(1, N + 1):
        for j in range(i + 1, N + 1):
            if case == "o" or j != prime(i):
                out.append((i, j))
    return out


def embed_raw(case, i, j, r, N=2) -> NCPoly:
    """sum_{k,l} sum_p b_kl T_ik^(p) Tbar_jl^(r-p) in raw T symbols."""
    case = _check_case(case, N)
    B = b_matrix(case, N)
    out = NCPoly()
    for k in range(1, N + 1):
        for l in range(1, N + 1):
            b = B[k - 1][l - 1]
            if not b:
                continue
            for p in range(r + 1):
                out = out + (T(i, k, p) * Tbar(j, l, r - p)).scale(b)
    return out


@lru_cache(maxsize=None)
def embed_twisted_qloop(case, i, j, r, N=2) -> NCPoly:
    return to_tau(embed_raw(case, i, j, r, N))


def _integral(e: NCPoly, what: str) -> NCPoly:
    for c in e.terms.values():
        if q1_valuation(c) < 0:
            raise NonintegralDivision(f"{what} has a pole at q=1")
    return e


LEVEL0_NORMALIZATIONS = ("consistent", "literal")


@lru_cache(maxsize=None)
def _s00(case, i, j, N, level0) -> NCPoly:
    B = b_matrix(case, N)
    if case == "o":
        if i > j:
            return _integral(embed_twisted_qloop(case, i, j, 0, N).scale(QQI.inverse()), "S^(0,0)")
        return -_s00(case, j, i, N, level0) if i != j else NCPoly()
    if i >= j or j == prime(i):
        e = embed_twisted_qloop(case, i, j, 0, N) - NCPoly.const(B[i - 1][j - 1])
        den = QQI if level0 == "literal" else QM1
        return _integral(e.scale(den.inverse()), "S^(0,0)")
    return -_s00(case, j, i, N, level0)


@lru_cache(maxsize=None)
def srm_expand(case, i, j, r, m, N=2, level0="consistent") -> NCPoly:
    """S_ij^(r,m) through the embedding, in tau-form.

    For r > 0 the level-(r,0) element is S^(r)/(q - q^{-1}).  In the
    symplectic case the level-0 elements built from S^(0) - b are divided by
    q - 1 under ``level0="consistent"`` and by q - q^{-1} under
    ``"literal"``; the latter specializes to half of the spanning element of
    the twisted ideal (see the classical module).
    """
    case = _check_case(case, N)
    if level0 not in LEVEL0_NORMALIZATIONS:
        raise ValueError(f"unknown level-0 normalization {level0!r}")
    if r < 0 or m < 0:
        raise IndexOutOfRange((r, m))
    if m == 0:
        if r == 0:
            return _s00(case, i, j, N, level0)
        return _integral(embed_twisted_qloop(case, i, j, r, N).scale(QQI.inverse()), "S^(r,0)")
    return srm_expand(case, i, j, r + 1, m - 1, N, level0) - srm_expand(case, i, j, r, m - 1, N, level0)


@lru_cache(maxsize=None)
def stilde_expand(case, i, j, r, m, N=2, level0="consistent") -> NCPoly:
    """Stilde_ij^(r,m) for 0 <= r <= m.

    Stilde^(0,m) is +S_ji^(0,m) in the orthogonal case.  In the symplectic
    case ``level0="consistent"`` takes -S_ji^(0,m), the sign that makes the
    two ends of the recursion agree for an antisymmetric G; ``"literal"``
    keeps +S_ji^(0,m).
    """
    if not 0 <= r <= m:
        raise IndexOutOfRange(f"Stilde^({r},{m}) needs 0 <= r <= m")
    if r == 0:
        e = srm_expand(case, j, i, 0, m, N, level0)
        return -e if _case(case) == "sp" and level0 == "consistent" else e
    if r == m:
        return srm_expand(case, i, j, 0, m, N, level0).scale(ONE * (-1) ** (m + 1))
    return stilde_expand(case, i, j, r - 1, m - 1, N, level0) - stilde_expand(case, i, j, r, m - 1, N, level0)


def lemma_rhs(case, i, j, r, m, N=2, *, diagonal="proof") -> NCPoly:
    """Right-hand side of the S^(r,m) expansion lemma.

    ``diagonal`` fixes the reading of the factor Tbar_jj^(0,0) in the second
    level-0 sum: ``"proof"`` uses taubar_jj^(0) (as in the derivation),
    ``"definition"`` uses the recursion's convention -tau_jj^(0).
    """
    case = _check_case(case, N)
    B = b_matrix(case, N)
    Tm = lambda a, b, rr, mm: trm_expand("T", a, b, rr, mm)  # noqa: E731
    Tb = lambda a, b, rr, mm: trm_expand("Tbar", a, b, rr, mm)  # noqa: E731
    out = NCPoly()
    rng = range(1, N + 1)
    for k in rng:
        if B[k - 1][j - 1]:
            out = out + Tm(i, k, r, m).scale(B[k - 1][j - 1])
        if B[i - 1][k - 1]:
            out = out + Tb(j, k, r, m).scale(B[i - 1][k - 1])
    tail = NCPoly()
    for k in rng:
        for l in rng:
            b = B[k - 1][l - 1]
            if not b:
                continue
            for p in range(1, r):
                tail = tail + (Tm(i, k, p, 0) * Tb(j, l, r - p, m)).scale(b)
            if k <= i:
                c = b * (HALF_Q if k == i else ONE)
                tail = tail + (Tm(i, k, 0, 0) * Tb(j, l, r, m)).scale(c)
            if l >= j:
                c = b * (HALF_Q if l == j else ONE)
                if l == j and diagonal == "proof":
                    t00 = taubar(j, j, 0)
                else:
                    t00 = Tb(j, l, 0, 0)
                tail = tail + (Tm(i, k, r, m) * t00).scale(c)
            for a in range(m):
                tail = tail + (Tm(i, k, r, a) * Tb(j, l, 1, m - 1 - a)).scale(b)
    return out + tail.scale(QQI)


def check_lemma_srm(case, i, j, r, m, N=2, *, diagonal="proof") -> bool:
    if r < 1:
        raise IndexOutOfRange("r >= 1 required")
    diff = srm_expand(case, i, j, r, m, N) - lemma_rhs(case, i, j, r, m, N, diagonal=diagonal)
    if diff:
        raise CheckFailed(f"lemma fails at {case} ({i},{j}) r={r} m={m}", diff.format())
    return True


# ---------------------------------------------------------------------------
# evaluation representations


Matrix = list  # dense list of rows of RatFun


def _zeros(d):
    return [[RatFun(0) for _ in range(d)] for _ in range(d)]


def _eye(d):
    m = _zeros(d)
    for a in range(d):
        m[a][a] = RatFun(1)
    return m


def _mm(A, B):
    d = len(A)
    out = _zeros(d)
    for a in range(d):
        Aa = A[a]
        row = out[a]
        for b in range(d):
            x = Aa[b]
            if not x:
                continue
            Bb = B[b]
            for c in range(d):
                if Bb[c]:
                    row[c] = row[c] + x * Bb[c]
    return out


def _madd(A, B, c=None):
    d = len(A)
    return [[A[a][b] + (B[a][b] if c is None else c * B[a][b]) for b in range(d)] for a in range(d)]


def _mscale(A, c):
    return [[c * x for x in row] for row in A]


def _kron(A, B):
    da, db = len(A), len(B)
    out = _zeros(da * db)
    for a in range(da):
        for b in range(da):
            x = A[a][b]
            if not x:
                continue
            for c in range(db):
                for d in range(db):
                    if B[c][d]:
                        out[a * db + c][b * db + d] = x * B[c][d]
    return out


def _is_zero(A):
    return all(not x for row in A for x in row)


class EvalRep:
    """Representation on (C^N)^{(x)k} from R_q(u, a_1), ..., R_q(u, a_k) and the matrix coproduct.

    On one factor, T(u) = u^{-1} R_q(u, a) and Tbar(u) = -a^{-1} R_q(u, a),
    read with the first tensor leg as the matrix index.  The construction is
    checked against the TT, TbarTbar and TbarT families on creation.
    """

    def __init__(self, N: int, points, *, certify: bool = True, certify_levels: int = 2):
        self.N = N
        self.points = [RatFun.coerce(a) for a in points]
        self.dim = N ** len(self.points)
        single = [self._single(a) for a in self.points]
        T_img, Tb_img = single[0]
        for nxt in single[1:]:
            T_img = self._coproduct(T_img, nxt[0])
            Tb_img = self._coproduct(Tb_img, nxt[1])
        self.T, self.Tbar = T_img, Tb_img
        self._cache: dict = {}
        if certify:
            self.self_certify(certify_levels)

    def _single(self, a):
        N = self.N
        T0, T1, B0, B1 = ({} for _ in range(4))
        d = N
        for i in range(1, N + 1):
            for j in range(1, N + 1):
                for X in (T0, T1, B0, B1):
                    X[(i, j)] = _zeros(d)
        ainv = a.inverse()
        for i in range(1, N + 1):
            for j in range(1, N + 1):
                # E_ii (x) E_jj
                T0[(i, i)][j - 1][j - 1] = Q.inverse() if i == j else ONE
                T1[(i, i)][j - 1][j - 1] = -a * (Q if i == j else ONE)
                B0[(i, i)][j - 1][j - 1] = Q if i == j else ONE
                B1[(i, i)][j - 1][j - 1] = -ainv * (Q.inverse() if i == j else ONE)
                if i > j:  # E_ij (x) E_ji, coefficient -(q-q^{-1}) u
                    T0[(i, j)][j - 1][i - 1] = -QQI
                    B1[(i, j)][j - 1][i - 1] = ainv * QQI
                elif i < j:  # coefficient -(q-q^{-1}) a
                    T1[(i, j)][j - 1][i - 1] = -a * QQI
                    B0[(i, j)][j - 1][i - 1] = QQI
        return [T0, T1], [B0, B1]

    def _coproduct(self, X, Y):
        """Levels of Delta(X(u)) = sum_k X_ik(u) (x) Y_kj(u)."""
        N = self.N
        out = []
        for lev in range(len(X) + len(Y) - 1):
            blk = {}
            for i in range(1, N + 1):
                for j in range(1, N + 1):
                    acc = None
                    for p in range(len(X)):
                        q_ = lev - p
                        if not 0 <= q_ < len(Y):
                            continue
                        for k in range(1, N + 1):
                            term = _kron(X[p][(i, k)], Y[q_][(k, j)])
                            acc = term if acc is None else _madd(acc, term)
                    blk[(i, j)] = acc
            out.append(blk)
        return out

    def gen_matrix(self, g: Gen):
        key = g
        if key in self._cache:
            return self._cache[key]
        fam, r, i, j = g.family, g.level, g.i, g.j
        d = self.dim
        if fam in ("T", "Tbar"):
            src = self.T if fam == "T" else self.Tbar
            m = src[r][(i, j)] if r < len(src) else _zeros(d)
        elif fam in ("tau", "taubar"):
            raw = self.gen_matrix(Gen("T" if fam == "tau" else "Tbar", r, i, j))
            if r == 0 and i == j:
                m = _mscale(_madd(raw, _eye(d), RatFun(-1)), QM1.inverse())
            else:
                m = _mscale(raw, QQI.inverse())
        else:
            raise KeyError(f"no image for {g}")
        self._cache[key] = m
        return m

    def evaluate(self, e: NCPoly, image=None):
        """Matrix of ``e``; ``image(g)`` may supply NCPoly images for extra families."""
        d = self.dim
        total = _zeros(d)
        for w, c in e.terms.items():
            acc = _mscale(_eye(d), RatFun.coerce(c))
            for g in w:
                if g.family in ("T", "Tbar", "tau", "taubar"):
                    acc = _mm(acc, self.gen_matrix(g))
                else:
                    acc = _mm(acc, self._extra(g, image))
            total = _madd(total, acc)
        return total

    def _extra(self, g, image):
        key = ("extra", g, id(image))
        if key not in self._cache:
            if image is None:
                raise KeyError(f"no image for {g}")
            self._cache[key] = self.evaluate(image(g))
        return self._cache[key]

    def self_certify(self, levels: int):
        N = self.N
        for kind in _KINDS:
            for r in range(levels + 1):
                for s in range(levels + 1):
                    for quad in _quads(N):
                        rel = raw_component(kind, *quad, r, s, N)
                        if not _is_zero(self.evaluate(rel)):
                            raise SelfCertificationFailed(f"{kind}{quad} ({r},{s})")
        for i in range(1, N + 1):
            prod = _mm(self.gen_matrix(Gen("T", 0, i, i)), self.gen_matrix(Gen("Tbar", 0, i, i)))
            if not _is_zero(_madd(prod, _eye(self.dim), RatFun(-1))):
                raise SelfCertificationFailed(f"T_{i}{i}^(0) Tbar_{i}{i}^(0) != 1")


def embU_image(case, N, flip=None):
    """Generator map S_ij^(r) -> embedding image; ``flip=(i, j, r)`` negates one image (negative control)."""
    def image(g):
        if g.family == "S":
            e = embed_raw(case, g.i, g.j, g.level, N)
            return -e if flip == (g.i, g.j, g.level) else e
        return None
    return image


def embU_relations(case, N=2, levels=2):
    """Relations the embedding images must satisfy, with names.

    Raw quaternary components with both levels <= ``levels``, the level-0
    zero pattern, S_ii^(0) = 1 in the orthogonal case and the level-0
    constant relations in the symplectic case.
    """
    case = _check_case(case, N)
    rels, names = [], []
    for r in range(levels + 1):
        for s in range(levels + 1):
            for quad in _quads(N):
                e = twisted_quaternary_component(case, *quad, r, s, N, substitute=False)
                if e:
                    rels.append(e)
                    names.append(f"quaternary({''.join(map(str, quad))};{r},{s})")
    for i, j in twisted_zero_pattern(case, N):
        rels.append(S(i, j, 0))
        names.append(f"zero(S_{i}{j}^(0))")
    if case == "o":
        for i in range(1, N + 1):
            rels.append(S(i, i, 0) - NCPoly.const(ONE))
            names.append(f"diag(S_{i}{i}^(0))")
    for n, e in enumerate(twisted_constant_relations(case, N)):
        rels.append(e)
        names.append(f"constant[{n}]")
    return rels, names


def rep_check(relations, points_list, N=2, *, image=None, names=None, suite="rep-check") -> Report:
    """Evaluate each relation in every representation; each must be the zero matrix.

    ``points_list`` is a list of point tuples, one representation per tuple.
    """
    rep = Report(suite=suite, config=dict(N=N, points=[[str(p) for p in pts] for pts in points_list]))
    reps = [EvalRep(N, pts) for pts in points_list]
    for idx, rel in enumerate(relations):
        name = names[idx] if names else f"relation[{idx}]"
        bad = None
        for pts, R in zip(points_list, reps):
            if not _is_zero(R.evaluate(rel, image)):
                bad = f"nonzero at points {[str(p) for p in pts]}"
                break
        rep.add(record(name, dict(index=idx), bad is None, detail=bad, method="representation"))
    return rep
