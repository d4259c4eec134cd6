"""R-matrices, tensor legs, and expansion of matrix relations into components."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .coeffring import (
    HBAR,
    QQI,
    HbarPoly,
    Q,
    QINV,
    RatFun,
    TruncatedSeries,
    TruncationInsufficient,
    inverse_linear_series,
)
from .freealg import Gen, NCPoly


class InvalidDimension(ValueError):
    pass


class SubstitutionOutsideDomain(ValueError):
    pass


class SymplecticOddN(ValueError):
    pass


def g_matrix(case: str, N: int):
    """G: identity (orthogonal) or sum of E_{2k-1,2k} - E_{2k,2k-1} (symplectic)."""
    if case == "o":
        return [[1 if a == b else 0 for b in range(N)] for a in range(N)]
    if case == "sp":
        if N % 2:
            raise SymplecticOddN(f"symplectic case needs even N, got {N}")
        G = [[0] * N for _ in range(N)]
        for k in range(N // 2):
            G[2 * k][2 * k + 1] = 1
            G[2 * k + 1][2 * k] = -1
        return G
    raise ValueError(f"unknown case {case!r}")


def b_matrix(case: str, N: int):
    """B: identity (orthogonal) or sum of q E_{2k-1,2k} - E_{2k,2k-1}."""
    if case == "o":
        return [[RatFun(1) if a == b else RatFun(0) for b in range(N)] for a in range(N)]
    if case == "sp":
        if N % 2:
            raise SymplecticOddN(f"symplectic case needs even N, got {N}")
        B = [[RatFun(0)] * N for _ in range(N)]
        for k in range(N // 2):
            B[2 * k][2 * k + 1] = Q
            B[2 * k + 1][2 * k] = RatFun(-1)
        return B
    raise ValueError(f"unknown case {case!r}")


def _idx(N, a, b):
    """Flat index of the basis vector e_a (x) e_b (1-based a, b)."""
    return (a - 1) * N + (b - 1)


def _unidx(N, x):
    return x // N + 1, x % N + 1


class OpMat:
    """Sparse square matrix over TruncatedSeries; rows are dicts col -> series."""

    __slots__ = ("dim", "rows")

    def __init__(self, dim: int, rows=None):
        self.dim = dim
        self.rows = rows or {}

    def get(self, r, c):
        return self.rows.get(r, {}).get(c)

    def set(self, r, c, s):
        if s is None or s.is_zero() and s.order is None:
            self.rows.get(r, {}).pop(c, None)
            return
        self.rows.setdefault(r, {})[c] = s

    def __matmul__(self, other: "OpMat") -> "OpMat":
        if self.dim != other.dim:
            raise InvalidDimension("dimension mismatch")
        out = {}
        for r, row in self.rows.items():
            acc = {}
            for b, x in row.items():
                orow = other.rows.get(b)
                if not orow:
                    continue
                for c, y in orow.items():
                    p = x * y
                    acc[c] = acc[c] + p if c in acc else p
            if acc:
                out[r] = acc
        return OpMat(self.dim, out)

    def __sub__(self, other: "OpMat") -> "OpMat":
        out = {r: dict(row) for r, row in self.rows.items()}
        for r, row in other.rows.items():
            tgt = out.setdefault(r, {})
            for c, y in row.items():
                tgt[c] = tgt[c] - y if c in tgt else -y
        return OpMat(self.dim, out)

    def scale(self, s: TruncatedSeries) -> "OpMat":
        return OpMat(self.dim, {r: {c: s * x for c, x in row.items()} for r, row in self.rows.items()})

    def entries(self):
        for r, row in self.rows.items():
            for c, x in row.items():
                yield r, c, x


@dataclass
class ScalarMat:
    """Scalar N^2 x N^2 matrix (an R-matrix) with series entries.

    ``recipe`` records how the matrix was built so that spectral
    substitutions can be redone exactly instead of on truncated data.
    """

    N: int
    op: OpMat
    recipe: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.op.dim

    def entry(self, i, j, k, l):
        """Coefficient of E_ij (x) E_kl."""
        return self.op.get(_idx(self.N, i, k), _idx(self.N, j, l))


def _const(vars, grading, c):
    return TruncatedSeries(vars, grading, {(0,) * len(vars): c}, None)


def _mono(vars, grading, exps, c):
    return TruncatedSeries(vars, grading, {tuple(exps): c}, None)


def _yangian_op(N, vars, grading, form, order, cleared):
    dim = N * N
    one = HbarPoly(1)
    op = OpMat(dim)
    if cleared:
        lin = TruncatedSeries(vars, grading, {}, None)
        for k, a in enumerate(form):
            if a:
                e = [0] * len(vars)
                e[k] = 1
                lin = lin + _mono(vars, grading, e, one * Fraction(a))
        diag, perm = lin, _const(vars, grading, -HBAR)
    else:
        diag = _const(vars, grading, one)
        perm = inverse_linear_series(vars, grading, form, order, coeff_one=-HBAR)
    for a in range(1, N + 1):
        for b in range(1, N + 1):
            x = _idx(N, a, b)
            if a == b:
                s = diag + perm
                op.set(x, x, s)
            else:
                op.set(x, x, diag)
                op.set(x, _idx(N, b, a), perm)
    return op


def _quantum_op(N, vars, grading, x_exp, y_exp):
    dim = N * N
    op = OpMat(dim)
    xm = lambda c: _mono(vars, grading, x_exp, c)  # noqa: E731
    ym = lambda c: _mono(vars, grading, y_exp, c)  # noqa: E731
    for a in range(1, N + 1):
        for b in range(1, N + 1):
            r = _idx(N, a, b)
            if a == b:
                op.set(r, r, xm(QINV) + ym(-Q))
            else:
                op.set(r, r, xm(RatFun(1)) + ym(RatFun(-1)))
                # E_ab (x) E_ba sends e_b (x) e_a to e_a (x) e_b
                s = xm(-QQI) if a > b else ym(-QQI)
                op.set(r, _idx(N, b, a), s)
    return op


def build_r(kind: str, N: int, *, vars=("u", "v"), grading=(2, 1), form=(1, -1), order=8,
            cleared=False, x_exp=(1, 0), y_exp=(0, 1)) -> ScalarMat:
    """R(x) = 1 - hbar x^{-1} P with x = form . vars, or R_q(x, y) for monomials x, y.

    For ``kind="yangian"`` the inverse of the linear form is expanded as a
    geometric series in the heaviest variable up to weight ``order``; with
    ``cleared=True`` the scalar x is multiplied through, giving x - hbar P.
    For ``kind="quantum"`` the entries are exact polynomials.
    """
    if N < 1:
        raise InvalidDimension(f"N must be positive, got {N}")
    vars, grading = tuple(vars), tuple(grading)
    if kind == "yangian":
        op = _yangian_op(N, vars, grading, tuple(form), order, cleared)
        recipe = dict(kind=kind, vars=vars, grading=grading, form=tuple(form), order=order, cleared=cleared)
    elif kind == "quantum":
        op = _quantum_op(N, vars, grading, tuple(x_exp), tuple(y_exp))
        recipe = dict(kind=kind, vars=vars, grading=grading, x_exp=tuple(x_exp), y_exp=tuple(y_exp))
    else:
        raise ValueError(f"unknown R-matrix kind {kind!r}")
    return ScalarMat(N, op, recipe)


def _transpose_op(N, op: OpMat) -> OpMat:
    out = OpMat(op.dim)
    for r, c, x in op.entries():
        a, b = _unidx(N, r)
        cc, d = _unidx(N, c)
        out.set(_idx(N, cc, b), _idx(N, a, d), x)
    return out


def transpose_first(M: ScalarMat, subst=None) -> ScalarMat:
    """Transpose in the first tensor leg, then apply a spectral substitution.

    ``subst`` is ``None``, ``("linear", var, coeffs)`` replacing ``var`` by
    the linear form ``coeffs . vars``, or ``("invert", var)``.
    """
    recipe = dict(M.recipe)
    if subst is None:
        return ScalarMat(M.N, _transpose_op(M.N, M.op), dict(recipe, transposed=not recipe.get("transposed", False)))
    kind = subst[0]
    if kind == "linear":
        _, var, coeffs = subst
        if recipe.get("kind") != "yangian":
            raise SubstitutionOutsideDomain("linear substitution is supported for the rational R-matrix")
        vars = recipe["vars"]
        k = vars.index(var)
        form = recipe["form"]
        new = [Fraction(0)] * len(vars)
        for m, a in enumerate(form):
            if m == k:
                for n, b in enumerate(coeffs):
                    new[n] += Fraction(a) * Fraction(b)
            else:
                new[m] += Fraction(a)
        rebuilt = build_r("yangian", M.N, vars=vars, grading=recipe["grading"], form=tuple(new),
                          order=recipe["order"], cleared=recipe["cleared"])
        return transpose_first(rebuilt) if not recipe.get("transposed") else rebuilt
    if kind == "invert":
        _, var = subst
        out = OpMat(M.op.dim)
        for r, c, x in M.op.entries():
            if x.order is not None:
                raise SubstitutionOutsideDomain("inverting a variable of a truncated series")
            out.set(r, c, x.substitute_inverse(var))
        tr = _transpose_op(M.N, out)
        return ScalarMat(M.N, tr, dict(recipe, inverted=var, transposed=not recipe.get("transposed", False)))
    raise SubstitutionOutsideDomain(f"unknown substitution {subst!r}")


def regrade(M: ScalarMat, grading, order=None) -> ScalarMat:
    out = OpMat(M.op.dim)
    for r, c, x in M.op.entries():
        out.set(r, c, x.regrade(grading, order))
    return ScalarMat(M.N, out, dict(M.recipe, grading=tuple(grading)))


# ---------------------------------------------------------------------------
# Yang-Baxter


def _place3(N, M: ScalarMat, legs) -> OpMat:
    """Embed a two-leg operator into legs (a, b) of the three-fold tensor power."""
    dim = N ** 3
    out = OpMat(dim)
    a, b = legs
    c = ({0, 1, 2} - {a, b}).pop()
    for r, col, x in M.op.entries():
        i, k = _unidx(N, r)
        j, l = _unidx(N, col)
        for m in range(1, N + 1):
            ri = [0, 0, 0]
            ci = [0, 0, 0]
            ri[a], ri[b], ri[c] = i, k, m
            ci[a], ci[b], ci[c] = j, l, m
            rr = ((ri[0] - 1) * N + ri[1] - 1) * N + ri[2] - 1
            cc = ((ci[0] - 1) * N + ci[1] - 1) * N + ci[2] - 1
            out.set(rr, cc, x)
    return out


def _opmat_equal(A: OpMat, B: OpMat) -> bool:
    D = A - B
    for _, _, x in D.entries():
        if not x.is_zero():
            return False
    return True


def _ybe_sides(kind: str, N: int, control: bool):
    if N < 1:
        raise InvalidDimension(f"N must be positive, got {N}")
    vars, grading = ("u", "v", "w"), (3, 2, 1)
    if kind == "yangian":
        mk = lambda form: build_r("yangian", N, vars=vars, grading=grading, form=form, cleared=True)  # noqa: E731
        r12, r13, r23 = mk((1, -1, 0)), mk((1, 0, -1)), mk((0, -1, 1) if control else (0, 1, -1))
    elif kind == "quantum":
        mk = lambda x, y: build_r("quantum", N, vars=vars, grading=grading, x_exp=x, y_exp=y)  # noqa: E731
        r12, r13 = mk((1, 0, 0), (0, 1, 0)), mk((1, 0, 0), (0, 0, 1))
        r23 = mk((0, 0, 1), (0, 1, 0)) if control else mk((0, 1, 0), (0, 0, 1))
    else:
        raise ValueError(f"unknown R-matrix kind {kind!r}")
    A12, A13, A23 = _place3(N, r12, (0, 1)), _place3(N, r13, (0, 2)), _place3(N, r23, (1, 2))
    return A12 @ A13 @ A23, A23 @ A13 @ A12


def check_ybe(kind: str, N: int, *, control: bool = False) -> bool:
    """R12 R13 R23 = R23 R13 R12 as an exact polynomial identity.

    The rational R-matrix is used in the cleared form x - hbar P, which
    differs from R(x) by the scalar x; scalars commute with everything, so
    the identity for the cleared matrices is equivalent to the original one.
    ``control=True`` reverses the spectral argument of R23 (a negative
    control: the identity must then fail).
    """
    return _opmat_equal(*_ybe_sides(kind, N, control))


def ybe_defect(kind: str, N: int, *, control: bool = False):
    """First nonzero entry (row, col, series) of the Yang-Baxter difference, or None."""
    lhs, rhs = _ybe_sides(kind, N, control)
    for r, c, x in sorted((lhs - rhs).entries(), key=lambda e: e[:2]):
        if not x.is_zero():
            return r, c, x
    return None


# ---------------------------------------------------------------------------
# matrices of generators


@dataclass
class NCMat:
    """N x N matrix of generating series with NCPoly coefficients."""

    N: int
    entries: dict  # (i, j) -> TruncatedSeries

    def leg(self, which: int) -> OpMat:
        N = self.N
        out = OpMat(N * N)
        for (i, j), s in self.entries.items():
            for m in range(1, N + 1):
                if which == 1:
                    out.set(_idx(N, i, m), _idx(N, j, m), s)
                else:
                    out.set(_idx(N, m, i), _idx(N, m, j), s)
        return out


def generator_matrix(family: str, N: int, *, vars, grading, var: str, sign: int, order: int,
                     coeff_one=1) -> NCMat:
    """sum_r X_ij^(r) var^(sign*r) truncated to weight ``order``."""
    k = vars.index(var)
    probe = TruncatedSeries(vars, grading, {}, None)
    entries = {}
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            terms = {}
            r = 0
            while True:
                e = [0] * len(vars)
                e[k] = sign * r
                if probe.weight(e) > order:
                    break
                terms[tuple(e)] = NCPoly.gen(Gen(family, r, i, j), coeff_one)
                r += 1
            entries[(i, j)] = TruncatedSeries(vars, grading, terms, order)
    return NCMat(N, entries)


@dataclass
class RelationFamily:
    """Component relations: (i, j, k, l, exponents) -> LHS - RHS."""

    members: dict
    source: str
    algebra: str
    vars: tuple = ()
    order: int | None = None

    def get(self, i, j, k, l, exps):
        return self.members[(i, j, k, l, tuple(exps))]


def expand_matrix_relation(lhs, rhs, N: int, exponents, *, source="", algebra="",
                           scalar: TruncatedSeries | None = None) -> RelationFamily:
    """Coefficients of E_ij (x) E_kl * monomial in prod(lhs) - prod(rhs).

    ``lhs`` and ``rhs`` are lists of OpMat factors (already placed on legs),
    multiplied left to right.  ``scalar`` optionally multiplies the
    difference (used to clear a denominator).  Raises
    TruncationInsufficient if a requested monomial lies outside the
    validity window of the product.
    """
    def prod(fs):
        acc = fs[0]
        for f in fs[1:]:
            acc = acc @ f
        return acc

    D = prod(lhs) - prod(rhs)
    if scalar is not None:
        D = D.scale(scalar)
    members = {}
    exponents = [tuple(e) for e in exponents]
    vars = None
    order = None
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            for k in range(1, N + 1):
                for l in range(1, N + 1):
                    s = D.get(_idx(N, i, k), _idx(N, j, l))
                    for e in exponents:
                        if s is None:
                            members[(i, j, k, l, e)] = NCPoly()
                            continue
                        vars, order = s.vars, s.order
                        c = s.coeff(e)
                        members[(i, j, k, l, e)] = c if c is not None else NCPoly()
    return RelationFamily(members, source, algebra, vars or (), order)
