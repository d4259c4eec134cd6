"""The Yangian Y(gl_N) and the twisted Yangians of orthogonal and symplectic type."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .coeffring import HBAR, HbarPoly, TruncatedSeries
from .freealg import Certificate, Gen, NCPoly, PBWNormalizer, span_membership, substitute_constants
from .report import CheckFailed, Report, record
from .rmat import (
    RelationFamily,
    build_r,
    expand_matrix_relation,
    g_matrix,
    generator_matrix,
    transpose_first,
)

ONE = HbarPoly(1)
_HALF = Fraction(1, 2)


def t(i, j, r) -> Gen:
    return Gen("t", r, i, j)


def tgen(i, j, r) -> NCPoly:
    """t_ij^(r) with t^(0) = delta already applied."""
    if r == 0:
        return NCPoly.const(ONE) if i == j else NCPoly()
    return NCPoly.gen(t(i, j, r), ONE)


def _raw(i, j, r) -> NCPoly:
    if r < 0:
        return NCPoly()
    return NCPoly.gen(t(i, j, r), ONE)


def displayed_relation(i, j, k, l, m, n) -> NCPoly:
    """LHS - RHS of the bracket family, raw (t^(0) kept as a symbol, t^(-1) = 0)."""
    A = lambda a, b, r: _raw(a, b, r)  # noqa: E731
    lhs = (A(i, j, m + 1) * A(k, l, n) - A(k, l, n) * A(i, j, m + 1)
           - A(i, j, m) * A(k, l, n + 1) + A(k, l, n + 1) * A(i, j, m))
    rhs = (A(k, j, m) * A(i, l, n) - A(k, j, n) * A(i, l, m)).scale(HBAR)
    return lhs - rhs


def yangian_relation(i, j, k, l, m, n) -> NCPoly:
    return substitute_constants(displayed_relation(i, j, k, l, m, n), "yangian")


def rtt_family(N: int, L: int) -> RelationFamily:
    """Components of R(u-v) t1(u) t2(v) - t2(v) t1(u) R(u-v), times (u - v).

    R(u-v) is expanded as a series in u^{-1}; the difference is multiplied by
    the scalar u - v so that each component is a single member of the
    bracket family.  Member (i, j, k, l, (-m, -n)) for -1 <= m, n <= L.
    """
    vars, grading = ("u", "v"), (2, 1)
    order = 2 * L + L + 4
    R = build_r("yangian", N, vars=vars, grading=grading, form=(1, -1), order=order)
    T1 = generator_matrix("t", N, vars=vars, grading=grading, var="u", sign=-1, order=order, coeff_one=ONE).leg(1)
    T2 = generator_matrix("t", N, vars=vars, grading=grading, var="v", sign=-1, order=order, coeff_one=ONE).leg(2)
    uv = TruncatedSeries(vars, grading, {(1, 0): ONE, (0, 1): -ONE}, None)
    exps = [(-m, -n) for m in range(-1, L + 1) for n in range(-1, L + 1)]
    return expand_matrix_relation([R.op, T1, T2], [T2, T1, R.op], N, exps, source="RTT", algebra="yangian",
                                  scalar=uv)


def check_rtt_expansion(N: int, L: int, *, control: bool = False) -> bool:
    """The expanded RTT family equals the bracket family, member by member and as sets.

    ``control=True`` negates one displayed member (the comparison must fail).
    """
    fam = rtt_family(N, L)
    rng = range(1, N + 1)
    got, want = set(), set()
    first = True
    for i in rng:
        for j in rng:
            for k in rng:
                for l in rng:
                    for m in range(-1, L + 1):
                        for n in range(-1, L + 1):
                            a = fam.get(i, j, k, l, (-m, -n))
                            b = displayed_relation(i, j, k, l, m, n)
                            if control and first and b:
                                b, first = -b, False
                            if a != b:
                                raise CheckFailed(f"member ({i}{j}{k}{l};{m},{n}) differs",
                                                  (a - b).format("h"))
                            if a:
                                got.add(a)
                            if b:
                                want.add(b)
    if got != want:
        raise CheckFailed("relation sets differ")
    return True


# ---------------------------------------------------------------------------
# commutators and normal form


def commutator_rule(i, j, r, k, l, s) -> NCPoly:
    """Closed form of [t_ij^(r), t_kl^(s)] for r, s >= 1."""
    out = NCPoly()
    for p in range(1, min(r, s) + 1):
        out = out + tgen(k, j, p - 1) * tgen(i, l, r + s - p) - tgen(k, j, r + s - p) * tgen(i, l, p - 1)
    return out.scale(HBAR)


def commutator_target(i, j, r, k, l, s) -> NCPoly:
    a, b = tgen(i, j, r), tgen(k, l, s)
    return a * b - b * a - commutator_rule(i, j, r, k, l, s)


def certify_commutator_rule(N, i, j, r, k, l, s, *, control: bool = False) -> Certificate:
    """Certificate that [t_ij^(r), t_kl^(s)] - rule lies in the relation span.

    Relations are the family members homogeneous of the same degree
    (t^(r) of degree r, hbar of degree 1): m + n + 1 = r + s.
    ``control=True`` flips the sign of the rule.
    """
    target = commutator_target(i, j, r, k, l, s)
    if control:
        target = target + commutator_rule(i, j, r, k, l, s).scale(ONE * 2)
    rels = {}
    d = r + s
    for m in range(d):
        n = d - 1 - m
        for a in range(1, N + 1):
            for b in range(1, N + 1):
                for c in range(1, N + 1):
                    for e in range(1, N + 1):
                        rel = yangian_relation(a, b, c, e, m, n)
                        if rel:
                            rels[f"Y({a}{b}{c}{e};{m},{n})"] = rel
    return span_membership(target, rels, target_id=f"[t{i}{j}^({r}),t{k}{l}^({s})]", var="h")


def _bracket(a: Gen, b: Gen) -> dict:
    return commutator_rule(a.i, a.j, a.level, b.i, b.j, b.level).terms


class Normalizer(PBWNormalizer):
    """PBW reduction with the commutator rule; ascending (level, i, j) order."""

    def __init__(self, strategy: str = "left"):
        super().__init__(_bracket, ONE, strategy)


_DEFAULT_NORMALIZER = Normalizer("left")


def normalize(e: NCPoly, strategy: str = "left") -> NCPoly:
    if strategy == "left":
        return _DEFAULT_NORMALIZER(e)
    return Normalizer(strategy)(e)


def is_normal(e: NCPoly) -> bool:
    return all(all(w[p] <= w[p + 1] for p in range(len(w) - 1)) for w in e.terms)


def random_product(rng, N: int, max_len: int = 3, max_level: int = 3) -> NCPoly:
    n = rng.randint(1, max_len)
    out = NCPoly.const(ONE)
    for _ in range(n):
        out = out * tgen(rng.randint(1, N), rng.randint(1, N), rng.randint(1, max_level))
    return out


def check_confluence(N: int, samples: int = 100, seed: int = 0, *, max_len: int = 3, max_level: int = 3) -> bool:
    """Leftmost-first and rightmost-first reduction agree on random products, and the result is ordered."""
    import random

    rng = random.Random(seed)
    left, right = Normalizer("left"), Normalizer("right")
    for n in range(samples):
        e = random_product(rng, N, max_len, max_level)
        a, b = left(e), right(e)
        if a != b or not is_normal(a):
            raise CheckFailed(f"sample {n}: strategies disagree", (a - b).format("h"))
    return True


# ---------------------------------------------------------------------------
# twisted Yangian


def sgen(i, j, r) -> Gen:
    return Gen("s", r, i, j)


def twisted_symmetry_components(case: str, r: int, N: int) -> list:
    """Components of s^t(-u) - (+-s(u)) - hbar (s(u) - s(-u))/(2u) at u^{-r}.

    Computed by series expansion; returns one polynomial per (i, j).
    """
    sign = 1 if case == "o" else -1
    vars, grading = ("u",), (1,)
    order = r + 1

    def series(i, j, flip):
        terms = {}
        for p in range(order + 1):
            c = ONE * ((-1) ** p if flip else 1)
            terms[(-p,)] = NCPoly.gen(sgen(i, j, p), c)
        return TruncatedSeries(vars, grading, terms, order)

    out = []
    uinv_half = TruncatedSeries(vars, grading, {(-1,): HBAR * _HALF}, None)
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            lhs = series(j, i, True)
            rhs = series(i, j, False).scale(ONE * sign) + uinv_half * (series(i, j, False) - series(i, j, True))
            c = (lhs - rhs).coeff((-r,))
            poly = c if c is not None else NCPoly()
            out.append(substitute_constants(poly, ("twisted_yangian", case, N)))
    return out


@lru_cache(maxsize=None)
def _quaternary_family(case: str, N: int, rmax: int) -> RelationFamily:
    vars, grading = ("u", "v"), (1, 1)
    order = rmax + 4
    A = build_r("yangian", N, vars=vars, grading=grading, form=(1, -1), order=order, cleared=True)
    # x R^t(x) at x = -u - v
    B = transpose_first(build_r("yangian", N, vars=vars, grading=grading, form=(-1, -1), order=order,
                                cleared=True))
    S1 = generator_matrix("s", N, vars=vars, grading=grading, var="u", sign=-1, order=order, coeff_one=ONE).leg(1)
    S2 = generator_matrix("s", N, vars=vars, grading=grading, var="v", sign=-1, order=order, coeff_one=ONE).leg(2)
    exps = [(2 - a, -b) for a in range(rmax + 1) for b in range(rmax + 1 - a)]
    return expand_matrix_relation([A.op, S1, B.op, S2], [S2, B.op, S1, A.op], N, exps,
                                  source="quaternary", algebra="twisted_yangian")


def twisted_quaternary_components(case: str, i, j, k, l, r, s, N: int = 2) -> NCPoly:
    """Coefficient of u^{-r} v^{-s} in the quaternary relation, both R-matrices expanded in v/u.

    The family is computed cleared of (u - v)(-u - v) = v^2 - u^2; its
    coefficient C(a, b) at u^{2-a} v^{2-b} is O(a-2, b) - O(a, b-2) in terms
    of the uncleared coefficients O, so O(r, s) = -sum_n C(r-2n, s+2+2n).
    """
    fam = _quaternary_family(case, N, r + s)
    raw = NCPoly()
    for n in range(r // 2 + 1):
        raw = raw - fam.get(i, j, k, l, (2 - r + 2 * n, -s - 2 * n))
    return substitute_constants(raw, ("twisted_yangian", case, N))


def embed_twisted_yangian(case: str, i, j, r, N: int = 2, variant: str = "rtt", *, normal: bool = True) -> NCPoly:
    """Image of s_ij^(r) in Y(gl_N), normalized.

    ``variant="rtt"`` is the coefficient of u^{-r} in t(u) G t^t(-u): the
    quadratic tail carries no hbar.  ``variant="displayed"`` puts a factor
    hbar on the tail; that form belongs to the normalization
    t(u) = 1 + hbar * sum t^(r) u^{-r} and does not respect the symmetry
    relation for the generators used here (see tests).  At r = 0 both give
    g_ij.  ``normal=False`` returns the sum before PBW reduction.
    """
    if variant not in ("rtt", "displayed"):
        raise ValueError(f"unknown variant {variant!r}")
    G = g_matrix(case, N)
    if r == 0:
        return NCPoly.const(ONE * G[i - 1][j - 1])
    tail = HBAR if variant == "displayed" else ONE
    sgn = (-1) ** r
    out = NCPoly()
    for k in range(1, N + 1):
        if G[k - 1][j - 1]:
            out = out + tgen(i, k, r).scale(ONE * G[k - 1][j - 1])
        if G[i - 1][k - 1]:
            out = out + tgen(j, k, r).scale(ONE * (sgn * G[i - 1][k - 1]))
    for k in range(1, N + 1):
        for l in range(1, N + 1):
            g = G[k - 1][l - 1]
            if not g:
                continue
            for p in range(1, r):
                out = out + (tgen(i, k, p) * tgen(j, l, r - p)).scale(tail * ((-1) ** (r - p) * g))
    return normalize(out) if normal else out


def embed_substitute(e: NCPoly, case: str, N: int, image=None, variant: str = "rtt") -> NCPoly:
    if image is None:
        def image(c, i, j, r, n):
            return embed_twisted_yangian(c, i, j, r, n, variant)

    def img(g):
        if g.family == "s":
            return image(case, g.i, g.j, g.level, N)
        return None

    return normalize(e.substitute(img))


def verify_twisted_embedding(case: str, N: int = 2, rmax: int = 4, *, qmax: int | None = None,
                             image=None, variant: str = "rtt") -> Report:
    """Push the twisted relations through the embedding and normalize.

    Symmetry components up to level ``rmax``; quaternary components with
    r + s <= ``qmax`` (defaults to ``rmax``).
    """
    qmax = rmax if qmax is None else qmax
    rep = Report(suite="embed-ytw", config=dict(case=case, N=N, rmax=rmax, qmax=qmax, variant=variant))
    for r in range(rmax + 1):
        comps = twisted_symmetry_components(case, r, N)
        for idx, comp in enumerate(comps):
            i, j = divmod(idx, N)
            nf = embed_substitute(comp, case, N, image, variant)
            rep.add(record("symmetry", dict(case=case, i=i + 1, j=j + 1, r=r), nf.is_zero(),
                           detail=nf.format("h")))
    for r in range(qmax + 1):
        for s in range(qmax + 1 - r):
            for i in range(1, N + 1):
                for j in range(1, N + 1):
                    for k in range(1, N + 1):
                        for l in range(1, N + 1):
                            comp = twisted_quaternary_components(case, i, j, k, l, r, s, N)
                            nf = embed_substitute(comp, case, N, image, variant)
                            rep.add(record("quaternary", dict(case=case, i=i, j=j, k=k, l=l, r=r, s=s),
                                           nf.is_zero(), detail=nf.format("h")))
    return rep
