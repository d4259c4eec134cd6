"""The loop algebra side: U(L(gl_N)), the specialization psi, the ideals K_m and separation functionals."""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb

from flint import fmpq_mat, fmpq_poly

from .coeffring import PoleAtQ1, limit_q1, q1_valuation
from .freealg import Gen, NCPoly, PBWNormalizer
from .qloop import (
    _check_case,
    qloop_relation_component,
    srm_expand,
    stilde_expand,
    strip_qqi,
    trm_expand,
)
from .report import CheckFailed, Report, record
from .rmat import g_matrix


class NotLieElement(ValueError):
    pass


class ArityTooSmall(ValueError):
    pass


class RankDeficient(AssertionError):
    pass


def E(i, j, r=0, c=1) -> NCPoly:
    """E_ij s^r."""
    return NCPoly.gen(Gen("E", r, i, j), Fraction(c))


def _loop_bracket(a: Gen, b: Gen) -> dict:
    out: dict = {}
    r = a.level + b.level
    if a.j == b.i:
        w = (Gen("E", r, a.i, b.j),)
        out[w] = out.get(w, 0) + 1
    if b.j == a.i:
        w = (Gen("E", r, b.i, a.j),)
        out[w] = out.get(w, 0) - 1
    return {w: c for w, c in out.items() if c}


_NORMALIZER = PBWNormalizer(_loop_bracket, Fraction(1))


def loop_normalize(e: NCPoly, strategy: str = "left") -> NCPoly:
    if strategy == "left":
        return _NORMALIZER(e)
    return PBWNormalizer(_loop_bracket, Fraction(1), strategy)(e)


def laurent(i, j, coeffs: dict) -> NCPoly:
    """E_ij times a Laurent polynomial {exponent: coefficient}."""
    out = NCPoly()
    for r, c in coeffs.items():
        out = out + E(i, j, r, c)
    return out


def s_poly(shift: int, m: int, inverse: bool = False) -> dict:
    """s^shift (s - 1)^m, or s^shift (s^{-1} - 1)^m with ``inverse``."""
    out: dict = {}
    for a in range(m + 1):
        e = shift + (-a if inverse else a)
        out[e] = out.get(e, 0) + comb(m, a) * (-1) ** (m - a)
    return {e: Fraction(c) for e, c in out.items() if c}


def _scale_poly(p: dict, c) -> dict:
    return {e: x * c for e, x in p.items()}


# ---------------------------------------------------------------------------
# psi


def psi_apply(e: NCPoly) -> NCPoly:
    """Specialize q -> 1: tau^(r) -> E s^r, taubar^(r) -> -E s^{-r}."""
    out = NCPoly()
    for w, c in e.terms.items():
        if hasattr(c, "num") and c.num != 0 and q1_valuation(c) < 0:
            raise PoleAtQ1(f"coefficient {c} has a pole at q=1")
        v = limit_q1(c)
        if not v:
            continue
        word = []
        sign = 1
        for g in w:
            if g.family == "tau":
                word.append(Gen("E", g.level, g.i, g.j))
            elif g.family == "taubar":
                word.append(Gen("E", -g.level, g.i, g.j))
                sign = -sign
            else:
                raise ValueError(f"psi is not defined on {g}")
        out = out + NCPoly.word(tuple(word), v * sign)
    return loop_normalize(out)


def closed_form(family: str, i, j, r, m, case: str | None = None, N: int = 2) -> NCPoly:
    """Expected psi-image of T, Tbar, Ttilde (untwisted) or S, Stilde (twisted)."""
    sgn = (-1) ** (m + 1)
    if family == "T":
        return laurent(i, j, s_poly(r, m))
    if family == "Tbar":
        return laurent(i, j, _scale_poly(s_poly(-(m + r), m), sgn))
    if family == "Ttilde":
        return laurent(i, j, _scale_poly(s_poly(-(m - r), m), sgn))
    case = _check_case(case, N)
    if family == "S":
        return twisted_spanning(case, i, j, r, m, N)
    if family == "Stilde":
        return twisted_spanning(case, i, j, r - m, m, N).scale(Fraction(sgn))
    raise ValueError(f"unknown family {family!r}")


def twisted_spanning(case, i, j, r, m, N=2) -> NCPoly:
    """sum_k g_kj E_ik s^r (s-1)^m - sum_l g_il E_jl s^{-r} (s^{-1}-1)^m.

    In the orthogonal case this is E_ij s^r(s-1)^m - E_ji s^{-r}(s^{-1}-1)^m;
    in the symplectic case it is (-1)^j times the element
    E_ij' s^r(s-1)^m - (-1)^{i+j+1} E_ji' s^{-r}(s^{-1}-1)^m.
    """
    G = g_matrix(_check_case(case, N), N)
    out = NCPoly()
    for k in range(1, N + 1):
        if G[k - 1][j - 1]:
            out = out + laurent(i, k, _scale_poly(s_poly(r, m), G[k - 1][j - 1]))
        if G[i - 1][k - 1]:
            out = out + laurent(j, k, _scale_poly(s_poly(-r, m, inverse=True), -G[i - 1][k - 1]))
    return out


def expand_family(family, i, j, r, m, case=None, N=2, level0="consistent") -> NCPoly:
    if family in ("T", "Tbar", "Ttilde"):
        return trm_expand(family, i, j, r, m)
    if family == "S":
        return srm_expand(case, i, j, r, m, N, level0)
    if family == "Stilde":
        return stilde_expand(case, i, j, r, m, N, level0)
    raise ValueError(f"unknown family {family!r}")


def psi_closed_form_check(family, i, j, r, m, case=None, N=2, level0="consistent", *,
                          control: bool = False) -> bool:
    """psi of the expanded element equals the closed form (``control`` negates the closed form)."""
    got = psi_apply(expand_family(family, i, j, r, m, case, N, level0))
    want = loop_normalize(closed_form(family, i, j, r, m, case, N))
    if control:
        want = -want
    if got != want:
        raise CheckFailed(f"psi({family}_{i}{j}^({r},{m})) differs from the closed form",
                          f"got {got.format()} ; expected {want.format()}")
    return True


# ---------------------------------------------------------------------------
# Lie elements and the ideals K_m


def lie_components(e: NCPoly) -> dict:
    """{(i, j): {exponent: coeff}} for an element of word length <= 1."""
    out: dict = {}
    for w, c in e.terms.items():
        if len(w) == 0:
            if c:
                raise NotLieElement("constant term")
            continue
        if len(w) > 1:
            raise NotLieElement(f"word of length {len(w)}")
        g = w[0]
        d = out.setdefault((g.i, g.j), {})
        d[g.level] = d.get(g.level, 0) + c
    return {k: {e: c for e, c in v.items() if c} for k, v in out.items() if any(v.values())}


def _divisible_by_s_minus_1(p: dict, m: int) -> bool:
    if not p:
        return True
    lo = min(p)
    coeffs = [0] * (max(p) - lo + 1)
    for e, c in p.items():
        coeffs[e - lo] = c
    poly = fmpq_poly([fmpq_from(c) for c in coeffs])
    div = fmpq_poly([-1, 1]) ** m
    return poly % div == 0


def fmpq_from(c):
    from flint import fmpq

    c = Fraction(c)
    return fmpq(c.numerator, c.denominator)


def km_test(e: NCPoly, m: int, twisted: str | None = None, N: int = 2) -> bool:
    """Membership of a Lie element in K_m, or in the twisted K_m for ``twisted`` in {o, sp}."""
    comps = lie_components(e)
    if twisted is None:
        return all(_divisible_by_s_minus_1(p, m) for p in comps.values())
    case = _check_case(twisted, N)
    if not comps:
        return True
    exps = [x for p in comps.values() for x in p]
    lo, hi = min(exps) - m - 1, max(exps) + m + 1
    span = [lie_components(twisted_spanning(case, i, j, r, m, N))
            for i in range(1, N + 1) for j in range(1, N + 1) for r in range(lo, hi + 1)]
    keys = sorted({(ij, x) for c in span + [comps] for ij, p in c.items() for x in p})
    index = {k: n for n, k in enumerate(keys)}
    if not span:
        return False
    A = fmpq_mat(len(keys), len(span))
    Ab = fmpq_mat(len(keys), len(span) + 1)
    for col, c in enumerate(span):
        for ij, p in c.items():
            for x, v in p.items():
                A[index[(ij, x)], col] = fmpq_from(v)
                Ab[index[(ij, x)], col] = fmpq_from(v)
    for ij, p in comps.items():
        for x, v in p.items():
            Ab[index[(ij, x)], len(span)] = fmpq_from(v)
    return A.rank() == Ab.rank()


def sigma(case: str, i, j, N: int = 2) -> tuple:
    """sigma(E_ij) as (coefficient, (k, l))."""
    case = _check_case(case, N)
    if case == "o":
        return -1, (j, i)
    from .freealg import prime

    return (-1) ** (i + j - 1), (prime(j), prime(i))


def sigma_membership(case: str, e: NCPoly, variant: str = "loop", N: int = 2) -> bool:
    """Fixed points of A(s) -> sigma(A)(-s) (current) or sigma(A)(s^{-1}) (loop)."""
    comps = lie_components(e)
    image: dict = {}
    for (i, j), p in comps.items():
        c, kl = sigma(case, i, j, N)
        d = image.setdefault(kl, {})
        for x, v in p.items():
            d[x] = d.get(x, 0) + c * v
    if variant == "loop":
        target = {ij: {-x: v for x, v in p.items()} for ij, p in comps.items()}
    elif variant == "current":
        target = {ij: {x: v * (-1) ** x for x, v in p.items()} for ij, p in comps.items()}
    else:
        raise ValueError(f"unknown variant {variant!r}")
    clean = lambda d: {k: {x: v for x, v in p.items() if v} for k, p in d.items() if any(p.values())}  # noqa: E731
    return clean(image) == clean(target)


# ---------------------------------------------------------------------------
# classical limit of relations


def classical_limit_component(kind, i, j, k, l, r, s, N=2) -> bool:
    return classical_limit_check(qloop_relation_component(kind, i, j, k, l, r, s, N))


def classical_limit_check(relation: NCPoly) -> bool:
    """Strip the maximal power of q - q^{-1}, specialize with psi, require zero."""
    stripped, _ = strip_qqi(relation)
    img = psi_apply(stripped)
    if img:
        raise CheckFailed("classical limit is not zero", img.format())
    return True


# ---------------------------------------------------------------------------
# separation functionals


def _falling(t: int, a: int) -> int:
    out = 1
    for k in range(a):
        out *= t - k
    return out


def _matE(N, i, j):
    m = [[Fraction(0)] * N for _ in range(N)]
    m[i - 1][j - 1] = Fraction(1)
    return m


def _matmul(A, B):
    n = len(A)
    return [[sum((A[a][k] * B[k][b] for k in range(n) if A[a][k]), Fraction(0)) for b in range(n)]
            for a in range(n)]


def _kron_all(mats):
    out = [[Fraction(1)]]
    for M in mats:
        n, d = len(out), len(M)
        new = [[Fraction(0)] * (n * d) for _ in range(n * d)]
        for a in range(n):
            for b in range(n):
                x = out[a][b]
                if not x:
                    continue
                for c in range(d):
                    for e in range(d):
                        if M[c][e]:
                            new[a * d + c][b * d + e] = x * M[c][e]
        out = new
    return out


def separation_probe(e: NCPoly, r: int, alpha, N: int = 2):
    """(d_alpha o f^{(x)r} o Delta)(e) as an N^r x N^r rational matrix."""
    alpha = tuple(alpha)
    if len(alpha) != r:
        raise ValueError("alpha must have r entries")
    if r < 1:
        raise ArityTooSmall("r >= 1 required")
    eye = [[Fraction(int(a == b)) for b in range(N)] for a in range(N)]
    dim = N ** r
    total = [[Fraction(0)] * dim for _ in range(dim)]
    for w, c in e.terms.items():
        for legs in itertools.product(range(r), repeat=len(w)):
            mats = [eye] * r
            exps = [0] * r
            for g, a in zip(w, legs):
                mats[a] = _matmul(mats[a], _matE(N, g.i, g.j))
                exps[a] += g.level
            coef = Fraction(c)
            for a in range(r):
                coef *= _falling(exps[a], alpha[a])
            if not coef:
                continue
            K = _kron_all(mats)
            for x in range(dim):
                for y in range(dim):
                    if K[x][y]:
                        total[x][y] += coef * K[x][y]
    return total


def _compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for a in range(total + 1):
        for rest in _compositions(total - a, parts - 1):
            yield (a,) + rest


def ordered_monomials(m: int, N: int, max_len: int) -> list:
    """Nondecreasing words in symbols (m_d, i, j) with sum m_d = m, as NCPoly in U(L(gl_N))."""
    symbols = [(md, i, j) for md in range(m + 1) for i in range(1, N + 1) for j in range(1, N + 1)]
    out = []
    for length in range(max_len + 1):
        for word in itertools.combinations_with_replacement(symbols, length):
            if sum(s[0] for s in word) != m:
                continue
            poly = NCPoly.const(Fraction(1))
            for md, i, j in word:
                poly = poly * laurent(i, j, s_poly(0, md))
            out.append((word, poly))
    return out


def monomial_independence_check(m: int, N: int = 2, max_len: int = 2, *, monomials=None,
                                arities=None) -> Report:
    """Stack separation probes with |alpha| = m for every ordered monomial; require full column rank.

    Probes of a single arity r cannot separate everything: the identity
    matrix acts on the r-fold tensor power as the scalar r, so (I - r) x is
    invisible, and so is any polynomial in I vanishing at the chosen arities.
    The default stacks the max_len + 1 arities max_len, ..., 2 max_len.
    """
    mons = ordered_monomials(m, N, max_len) if monomials is None else monomials
    if arities is None:
        lo = max(1, max_len)
        arities = tuple(range(lo, lo + max_len + 1))
    columns = []
    for _, poly in mons:
        col = []
        for r in arities:
            for a in _compositions(m, r):
                M = separation_probe(poly, r, a, N)
                col.extend(x for row in M for x in row)
        columns.append(col)
    rep = Report(suite="separation", config=dict(m=m, N=N, max_len=max_len, arities=list(arities)))
    if not columns:
        return rep
    A = fmpq_mat(len(columns[0]), len(columns))
    for j, col in enumerate(columns):
        for i, x in enumerate(col):
            if x:
                A[i, j] = fmpq_from(x)
    rank = A.rank()
    ok = rank == len(columns)
    rep.add(record("full-rank", dict(m=m, N=N, max_len=max_len, monomials=len(columns), rank=rank), ok,
                   detail=f"rank {rank} < {len(columns)}", method="exact-rank"))
    return rep


def require_full_rank(rep: Report) -> Report:
    if not rep.all_pass:
        raise RankDeficient(rep.failures()[0].detail)
    return rep


__all__ = [
    "ArityTooSmall", "E", "NotLieElement", "RankDeficient", "classical_limit_check", "classical_limit_component", "closed_form",
    "km_test", "laurent", "loop_normalize", "monomial_independence_check", "ordered_monomials",
    "psi_apply", "psi_closed_form_check", "require_full_rank", "s_poly", "separation_probe", "sigma",
    "sigma_membership", "twisted_spanning",
]
