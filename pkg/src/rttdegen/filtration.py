"""Filtration degrees for the ideals K_m of the A-form and certified congruences modulo K_M.

A congruence X = 0 mod K_M is certified by writing

    X = sum_a c_a R_a + sum_b d_b H_b

with R_a relation instances of U_q(L(gl_N)) (any coefficients in Q(q)) and
H_b products of adapted elements whose filtration degree plus the
valuation of d_b at q = 1 is at least M.

The adapted elements are, for each index pair (i, j) and level caps R, Rb,

    B_a = Tbar^(Rb-a, a)  (a <= Rb),   B_a = Ttilde^(a-Rb, a)  (a > Rb),

whose psi-images are +-s^{-Rb}(s-1)^a, together with Z_i = tau_ii^(0) +
taubar_ii^(0), which lies in every K_m.  In this basis the degree of a
linear element is read off term by term.  Whether X lies in the span of the
relations plus the admissible lattice is decided exactly at the given
bounds by elimination over the local ring at q = 1.

A failed search is not a refutation.  A refutation comes from the
separation functionals: d_alpha o f^r o Delta with |alpha| < M annihilates
psi(K_M), so a nonzero value on psi(X) proves X is not in K_M.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from flint import fmpq, fmpq_mat

from .classical import _compositions, km_test, psi_apply, separation_probe
from .coeffring import QM1, QQI, HbarPoly, PoleAtQ1, RatFun, q1_valuation
from .freealg import Certificate, Gen, Inconclusive, NCPoly, SparseEliminator
from .qloop import (
    _case,
    _check_case,
    _quads,
    diagonal_relations,
    qloop_relation_component,
    srm_expand,
    stilde_expand,
    trm_expand,
)
from .report import FAIL, INCONCLUSIVE, PASS, CheckFailed, CheckRecord
from .rmat import b_matrix, g_matrix

ONE = RatFun(1)
FAMILIES = ("T", "Tbar", "Ttilde", "S", "Stilde")
INFINITE = float("inf")


class IntegralityFailed(Exception):
    """Only decompositions with a pole at q = 1 in the high-degree part exist at these bounds."""

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail


class Refuted(Exception):
    """A separation functional of order below the threshold is nonzero on psi(target)."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


# ---------------------------------------------------------------------------
# filtered terms


class Marker(NamedTuple):
    family: str
    i: int
    j: int
    r: int
    m: int
    case: str | None = None

    def __str__(self):
        tag = f"[{self.case}]" if self.case else ""
        return f"{self.family}{tag}_{self.i}{self.j}^({self.r},{self.m})"


def marker(family, i, j, r, m, case=None) -> Marker:
    if family not in FAMILIES:
        raise ValueError(f"unknown marker family {family!r}")
    if family in ("S", "Stilde"):
        if case is None:
            raise ValueError("twisted markers need a case")
        case = _case(case)
    return Marker(family, i, j, r, m, case)


def _coeff_valuation(c) -> int:
    if not c:
        return INFINITE
    return q1_valuation(RatFun.coerce(c))


@dataclass(frozen=True)
class FilteredTerm:
    coefficient: RatFun
    markers: tuple = ()

    @property
    def degree(self):
        return filt_degree(self)

    def __mul__(self, other: "FilteredTerm") -> "FilteredTerm":
        return FilteredTerm(self.coefficient * other.coefficient, self.markers + other.markers)

    def expand(self, N=2, level0="consistent") -> NCPoly:
        out = NCPoly.const(ONE)
        for mk in self.markers:
            out = out * expand_marker(mk, N, level0)
        return out.scale(self.coefficient)

    def __str__(self):
        body = "*".join(map(str, self.markers)) or "1"
        return f"({self.coefficient.format()}) {body}"


def filt_degree(t: FilteredTerm):
    """Valuation of the coefficient at q = 1 plus the sum of the marker filtration indices."""
    return _coeff_valuation(t.coefficient) + sum(mk.m for mk in t.markers)


def expand_marker(mk: Marker, N=2, level0="consistent") -> NCPoly:
    if mk.family in ("T", "Tbar", "Ttilde"):
        return trm_expand(mk.family, mk.i, mk.j, mk.r, mk.m)
    if mk.family == "S":
        return srm_expand(mk.case, mk.i, mk.j, mk.r, mk.m, N, level0)
    return stilde_expand(mk.case, mk.i, mk.j, mk.r, mk.m, N, level0)


@dataclass
class FilteredExpr:
    terms: list = field(default_factory=list)
    N: int = 2
    level0: str = "consistent"

    @classmethod
    def of(cls, *markers, coeff=1, N=2) -> "FilteredExpr":
        return cls([FilteredTerm(RatFun.coerce(coeff), tuple(markers))], N)

    @classmethod
    def const(cls, c, N=2) -> "FilteredExpr":
        return cls([FilteredTerm(RatFun.coerce(c))], N)

    def _like(self, terms):
        return FilteredExpr(terms, self.N, self.level0)

    def __add__(self, other):
        return self._like(self.terms + other.terms)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, FilteredExpr):
            return self._like([a * b for a in self.terms for b in other.terms])
        return self.scale(other)

    def scale(self, c):
        c = RatFun.coerce(c)
        return self._like([FilteredTerm(t.coefficient * c, t.markers) for t in self.terms if c])

    __rmul__ = scale

    @property
    def degree(self):
        """Minimum term degree (a lower bound for the filtration degree)."""
        degs = [filt_degree(t) for t in self.terms if t.coefficient]
        return min(degs) if degs else INFINITE

    def expand(self) -> NCPoly:
        out = NCPoly()
        for t in self.terms:
            out = out + t.expand(self.N, self.level0)
        return out

    def flip(self, index: int = 0) -> "FilteredExpr":
        """Copy with the sign of one term reversed (negative controls)."""
        terms = list(self.terms)
        t = terms[index]
        terms[index] = FilteredTerm(-t.coefficient, t.markers)
        return self._like(terms)

    def __str__(self):
        return " + ".join(map(str, self.terms)) or "0"


# ---------------------------------------------------------------------------
# adapted basis


class Adapted(NamedTuple):
    kind: str  # "B" or "Z"
    i: int
    j: int
    a: int  # filtration index; -1 for Z

    @property
    def degree(self):
        return INFINITE if self.kind == "Z" else self.a


def _gen_ranges(i, j, R, Rb):
    tau = [Gen("tau", r, i, j) for r in range(0 if i >= j else 1, R + 1)]
    taubar = [Gen("taubar", r, i, j) for r in range(0 if i <= j else 1, Rb + 1)]
    return tau + taubar


@lru_cache(maxsize=None)
def adapted_basis(i, j, R, Rb):
    """(elements, labels, inverse) for the pair (i, j) with tau levels <= R, taubar levels <= Rb.

    ``inverse[g]`` is the expansion {Adapted: Fraction} of the generator g.
    """
    coords = _gen_ranges(i, j, R, Rb)
    index = {g: n for n, g in enumerate(coords)}
    D = R + Rb + 1
    elems, labels = {}, {}
    for a in range(D):
        if a <= Rb:
            e, lab = trm_expand("Tbar", i, j, Rb - a, a), f"Tbar_{i}{j}^({Rb - a},{a})"
        else:
            e, lab = trm_expand("Ttilde", i, j, a - Rb, a), f"Ttilde_{i}{j}^({a - Rb},{a})"
        elems[Adapted("B", i, j, a)] = e
        labels[Adapted("B", i, j, a)] = lab
    if i == j:
        z = Adapted("Z", i, i, -1)
        elems[z] = NCPoly.gen(Gen("tau", 0, i, i), ONE) + NCPoly.gen(Gen("taubar", 0, i, i), ONE)
        labels[z] = f"Z_{i}"
    keys = list(elems)
    if len(keys) != len(coords):
        raise AssertionError("adapted basis has the wrong size")
    M = fmpq_mat(len(coords), len(keys))
    for col, k in enumerate(keys):
        for w, c in elems[k].terms.items():
            if len(w) != 1 or w[0] not in index:
                raise AssertionError(f"{labels[k]} leaves the coordinate range")
            x = c.constant_value() if isinstance(c, RatFun) else Fraction(c)
            M[index[w[0]], col] = fmpq(x.numerator, x.denominator)
    Minv = M.inv()
    inverse = {}
    for g, row in index.items():
        exp = {}
        for col, k in enumerate(keys):
            x = Minv[col, row]
            if x != 0:
                exp[k] = Fraction(int(x.p), int(x.q))
        inverse[g] = exp
    return elems, labels, inverse


class AdaptedFrame:
    """Coordinates of tau-form elements in words of adapted elements."""

    def __init__(self, polys, N):
        self.N = N
        caps = {}
        for e in polys:
            for w in e.terms:
                for g in w:
                    if g.family not in ("tau", "taubar"):
                        raise ValueError(f"{g} is not a tau-form generator")
                    R, Rb = caps.get((g.i, g.j), (0, 0))
                    caps[(g.i, g.j)] = (max(R, g.level), Rb) if g.family == "tau" else (R, max(Rb, g.level))
        self.caps = caps
        self._gen = {}
        self.labels = {}
        self.elems = {}
        for (i, j), (R, Rb) in caps.items():
            elems, labels, inverse = adapted_basis(i, j, R, Rb)
            self._gen.update(inverse)
            self.labels.update(labels)
            self.elems.update(elems)

    def coords(self, e: NCPoly) -> dict:
        out: dict = {}
        for w, c in e.terms.items():
            c = RatFun.coerce(c)
            for parts in itertools.product(*(self._gen[g].items() for g in w)):
                aw = tuple(p[0] for p in parts)
                x = c
                for p in parts:
                    x = x * p[1]
                y = out.get(aw)
                y = x if y is None else y + x
                if y:
                    out[aw] = y
                else:
                    out.pop(aw, None)
        return out

    def expand_word(self, aw) -> NCPoly:
        out = NCPoly.const(ONE)
        for a in aw:
            out = out * self.elems[a]
        return out

    def label(self, aw) -> str:
        return "*".join(self.labels[a] for a in aw) or "1"


def word_degree(aw):
    return sum(a.degree for a in aw)


# ---------------------------------------------------------------------------
# the valuation eliminator


def _val(x: RatFun):
    return q1_valuation(x) if x else INFINITE


def _qm1_pow(k: int) -> RatFun:
    return QM1 ** k if k >= 0 else (QM1 ** (-k)).inverse()


class _LocalEchelon:
    """Unit-pivot echelon form over the local ring at q = 1, with combination tracking."""

    def __init__(self):
        self.rows = []  # (pivot, vec, hist)

    def reduce(self, vec, hist):
        vec, hist = dict(vec), dict(hist)
        for p, rvec, rhist in self.rows:
            x = vec.get(p)
            if not x:
                continue
            c = x / rvec[p]
            for w, y in rvec.items():
                z = vec.get(w)
                z = -c * y if z is None else z - c * y
                if z:
                    vec[w] = z
                else:
                    vec.pop(w, None)
            for h, y in rhist.items():
                z = hist.get(h)
                z = -c * y if z is None else z - c * y
                if z:
                    hist[h] = z
                else:
                    hist.pop(h, None)
        return vec, hist

    def add(self, vec, hist):
        vec, hist = self.reduce(vec, hist)
        if not vec:
            return
        v = min(_val(x) for x in vec.values())
        if v:
            s = _qm1_pow(-v)
            vec = {w: x * s for w, x in vec.items()}
            hist = {h: x * s for h, x in hist.items()}
        units = [w for w, x in vec.items() if _val(x) == 0]
        p = min(units, key=lambda w: (len(w), w))
        self.rows.append((p, vec, hist))


@dataclass
class CongruenceBounds:
    """Search bounds: relation levels (None: max target level + 1) and which relation kinds."""

    relation_levels: int | None = None
    kinds: tuple = ("TT",)
    all_weights: bool = False
    refute_arity: int | None = None


def _weight(w, N):
    v = [0] * N
    for g in w:
        v[g.i - 1] += 1
        v[g.j - 1] -= 1
    return tuple(v)


def auto_relations(target: NCPoly, N=2, bounds: CongruenceBounds | None = None) -> dict:
    """Relation components of weight matching the target, at levels <= max target level + 1."""
    bounds = bounds or CongruenceBounds()
    L = bounds.relation_levels
    if L is None:
        L = max((g.level for w in target.terms for g in w), default=0) + 1
    weights = {_weight(w, N) for w in target.terms}
    out = {}
    for kind in bounds.kinds:
        for quad in _quads(N):
            i, j, k, l = quad
            wt = [0] * N
            for a, b in ((i, j), (k, l)):
                wt[a - 1] += 1
                wt[b - 1] -= 1
            if not bounds.all_weights and tuple(wt) not in weights:
                continue
            for r in range(L + 1):
                for s in range(L + 1):
                    e = qloop_relation_component(kind, i, j, k, l, r, s, N)
                    if e:
                        out[f"{kind}({i}{j}{k}{l};{r},{s})"] = e
    if tuple([0] * N) in weights:
        for n, e in enumerate(diagonal_relations(N)):
            out[f"diag{n}"] = e
    return out


def _as_poly(target) -> NCPoly:
    return target.expand() if isinstance(target, FilteredExpr) else target


def refutation_witness(target: NCPoly, threshold: int, N=2, arity=None):
    """A separation functional of order < threshold that is nonzero on psi(target), or None."""
    try:
        image = psi_apply(target)
    except PoleAtQ1:
        return None
    if image.is_zero():
        return None
    L = max(1, image.max_length())
    arities = [arity] if arity else range(L, L + 2)
    for r in arities:
        for d in range(threshold):
            for alpha in _compositions(d, r):
                M = separation_probe(image, r, alpha, N)
                if any(x for row in M for x in row):
                    return {"arity": r, "alpha": list(alpha)}
    return None


def _solve(target, threshold, relations, N):
    """One elimination pass.  Returns (certificate data) or raises."""
    frame = AdaptedFrame([target, *relations.values()], N)

    def need(aw):
        d = word_degree(aw)
        return 0 if d >= threshold else threshold - d

    def scaled(vec):
        out = {}
        for w, x in vec.items():
            k = need(w)
            out[w] = x * _qm1_pow(-k) if k else x
        return out

    ech = _LocalEchelon()
    for rid in sorted(relations, key=str):
        vec = frame.coords(relations[rid])
        if vec:
            ech.add(scaled(vec), {rid: ONE})
    tvec = frame.coords(target)
    res, hist = ech.reduce(scaled(tvec), {})
    bad = {w: x for w, x in res.items() if _val(x) < 0}
    return frame, ech, res, hist, bad, need


def congruence_check(target, threshold: int, relations=None, *, bounds: CongruenceBounds | None = None,
                     target_id: str = "target", N: int | None = None) -> Certificate:
    """Certificate that ``target`` lies in K_threshold.

    ``target`` is a FilteredExpr or a tau-form NCPoly.  ``relations`` is a
    dict id -> tau-form NCPoly; None tries no relations first and then the
    default relation bounds.  Raises Refuted, IntegralityFailed or
    Inconclusive.
    """
    if N is None:
        N = target.N if isinstance(target, FilteredExpr) else 2
    bounds = bounds or CongruenceBounds()
    X = _as_poly(target).map_coeffs(RatFun.coerce)
    attempts = [relations] if relations is not None else [{}, None]
    last = None
    for rels in attempts:
        if rels is None:
            rels = auto_relations(X, N, bounds)
        frame, ech, res, hist, bad, need = _solve(X, threshold, rels, N)
        last = (frame, ech, res, bad, need)
        if bad:
            continue
        coeffs = sorted(((rid, -c) for rid, c in hist.items() if c), key=lambda t: str(t[0]))
        high = []
        H = NCPoly()
        for aw in sorted(res, key=lambda w: (len(w), w)):
            k = need(aw)
            d = res[aw] * QM1 ** k if k else res[aw]
            high.append((frame.label(aw), d))
            H = H + frame.expand_word(aw).scale(d)
        acc = H
        for rid, c in coeffs:
            acc = acc + rels[rid].map_coeffs(RatFun.coerce).scale(c)
        cert = Certificate(target_id=target_id, threshold=threshold, relation_part=coeffs,
                           high_degree_part=high, verified=(acc - X).is_zero())
        if not cert.verified:
            raise AssertionError(f"certificate for {target_id} failed re-expansion")
        return cert
    frame, ech, res, bad, need = last
    w = refutation_witness(X, threshold, N, bounds.refute_arity)
    shown = "; ".join(f"{frame.label(a)}: {x.format()}" for a, x in sorted(bad.items())[:4])
    if w is not None:
        raise Refuted(f"{target_id} is not in K_{threshold}: separation functional {w} is nonzero", w)
    if _relaxed_feasible(res, ech, need):
        raise IntegralityFailed(f"{target_id}: every decomposition at these bounds has a pole at q=1", shown)
    raise Inconclusive(f"{target_id}: no decomposition modulo K_{threshold} at these bounds ({shown})")


def _relaxed_feasible(res, ech, need) -> bool:
    """Whether the low-degree part of the residual is in the Q(q)-span of the relations."""
    low = lambda vec: {w: x for w, x in vec.items() if need(w) > 0 and word_degree(w) != INFINITE}  # noqa: E731
    el = SparseEliminator()
    for _, vec, _ in ech.rows:
        v = low(vec)
        if v:
            el.add(v, {})
    r, _ = el.reduce(low(res), {})
    return not r


def outcome_record(name: str, params: dict, fn) -> CheckRecord:
    """Run a certificate-producing check and turn the outcome into a record."""
    try:
        cert = fn()
    except Inconclusive as exc:
        return CheckRecord(name, dict(params), INCONCLUSIVE, detail=str(exc), method="congruence")
    except (Refuted, IntegralityFailed, CheckFailed) as exc:
        detail = str(exc)
        extra = getattr(exc, "witness", None) or getattr(exc, "detail", None)
        if extra:
            detail += f" [{extra}]"
        return CheckRecord(name, dict(params), FAIL, detail=detail, method="congruence")
    cert_json = cert.to_json() if isinstance(cert, Certificate) else None
    return CheckRecord(name, dict(params), PASS, certificate=cert_json, method="congruence")


# ---------------------------------------------------------------------------
# the statements


def phi_image(i, j, m, N=2) -> FilteredExpr:
    """phi(t_ij^(m+1)) as the single marker T_ij^(0,m)."""
    if m < 0:
        raise ValueError("m >= 0 required")
    return FilteredExpr.of(marker("T", i, j, 0, m), N=N)


def _T0(i, j, m, N, coeff=1):
    return FilteredExpr.of(marker("T", i, j, 0, m), coeff=coeff, N=N)


def graded_yangian_expr(i, j, k, l, m, n, N=2) -> FilteredExpr:
    """[xi_ij^(m+1), xi_kl^(n)] - [xi_ij^(m), xi_kl^(n+1)] - hbar(xi_kj^(m) xi_il^(n) - xi_kj^(n) xi_il^(m)).

    xi^(0,p) -> T^(0,p), hbar -> q - q^{-1}.  Term 0 is xi_ij^(m+1) xi_kl^(n).
    """
    a, b = _T0(i, j, m + 1, N), _T0(k, l, n, N)
    c, d = _T0(i, j, m, N), _T0(k, l, n + 1, N)
    out = a * b - b * a - c * d + d * c
    tail = _T0(k, j, m, N) * _T0(i, l, n, N) - _T0(k, j, n, N) * _T0(i, l, m, N)
    return out - tail.scale(QQI)


def graded_yangian_check(i, j, k, l, m, n, N=2, *, target=None, relations=None,
                         bounds=None) -> Certificate:
    tgt = graded_yangian_expr(i, j, k, l, m, n, N) if target is None else target
    return congruence_check(tgt, m + n + 2, relations, bounds=bounds, N=N,
                            target_id=f"graded({i}{j}{k}{l};m={m},n={n})")


def scong_rhs(case, i, j, m, N=2, *, matrix="b") -> FilteredExpr:
    """sum_k (c_kj T_ik^(0,m) + (-1)^{m+1} c_ik T_jk^(0,m)) + (q-q^{-1}) sum (-1)^{m+1-p} c_kl T_ik^(0,p-1) T_jl^(0,m-p).

    ``matrix`` selects c = b (the q-deformed matrix) or c = g.
    """
    case = _check_case(case, N)
    C = b_matrix(case, N) if matrix == "b" else [[RatFun.coerce(x) for x in row] for row in g_matrix(case, N)]
    out = FilteredExpr([], N)
    sgn = (-1) ** (m + 1)
    for k in range(1, N + 1):
        if C[k - 1][j - 1]:
            out = out + _T0(i, k, m, N, C[k - 1][j - 1])
        if C[i - 1][k - 1]:
            out = out + _T0(j, k, m, N, C[i - 1][k - 1] * sgn)
    tail = FilteredExpr([], N)
    for k in range(1, N + 1):
        for l in range(1, N + 1):
            c = C[k - 1][l - 1]
            if not c:
                continue
            for p in range(1, m + 1):
                tail = tail + _T0(i, k, p - 1, N, c * (-1) ** (m + 1 - p)) * _T0(j, l, m - p, N)
    return out + tail.scale(QQI)


def scong_expr(case, i, j, r, m, N=2) -> FilteredExpr:
    """S_ij^(r,m) minus its congruence class representative; term 0 is S_ij^(r,m)."""
    if r < 1:
        raise ValueError("r >= 1 required")
    case = _check_case(case, N)
    return FilteredExpr.of(marker("S", i, j, r, m, case), N=N) - scong_rhs(case, i, j, m, N)


def scong_check(case, i, j, r, m, N=2, *, target=None, relations=None, bounds=None) -> Certificate:
    tgt = scong_expr(case, i, j, r, m, N) if target is None else target
    return congruence_check(tgt, m + 1, relations, bounds=bounds, N=N,
                            target_id=f"scong({_case(case)};{i}{j};r={r},m={m})")


def zeta_expr(case, i, j, m, r1, r2, N=2) -> FilteredExpr:
    case = _check_case(case, N)
    if r1 < 1 or r2 < 1:
        raise ValueError("r1, r2 >= 1 required")
    return (FilteredExpr.of(marker("S", i, j, r1, m, case), N=N)
            - FilteredExpr.of(marker("S", i, j, r2, m, case), N=N))


def zeta_independence_check(case, i, j, m, r1, r2, N=2, *, target=None, relations=None,
                            bounds=None) -> Certificate:
    tgt = zeta_expr(case, i, j, m, r1, r2, N) if target is None else target
    return congruence_check(tgt, m + 1, relations, bounds=bounds, N=N,
                            target_id=f"zeta({_case(case)};{i}{j};m={m},r={r1},{r2})")


def tbar_congruence_check(i, j, m) -> bool:
    """Tbar^(0,m), (-1)^{m+1} T^(0,m) and Ttilde^(0,m) agree modulo the ideal generated in degree m+1."""
    elems = {
        "Tbar": trm_expand("Tbar", i, j, 0, m),
        "T": trm_expand("T", i, j, 0, m).scale(ONE * (-1) ** (m + 1)),
        "Ttilde": trm_expand("Ttilde", i, j, 0, m),
    }
    for a, b in itertools.combinations(elems, 2):
        image = psi_apply(elems[a] - elems[b])
        if not km_test(image, m + 1):
            raise CheckFailed(f"psi({a} - {b}) for ({i},{j}), m={m} is not in K_{m + 1}", image.format())
    return True


def phi_push(e: NCPoly, N=2) -> FilteredExpr:
    """Image under phi of a Yangian element: t^(p) -> T^(0,p-1), hbar -> q - q^{-1}."""
    out = FilteredExpr([], N)
    for w, c in e.terms.items():
        coeff = RatFun(0)
        c = c if isinstance(c, HbarPoly) else HbarPoly(c)
        for k, x in enumerate(c.coefficients):
            if x:
                coeff = coeff + QQI ** k * RatFun.coerce(x)
        if not coeff:
            continue
        mks = []
        for g in w:
            if g.family != "t" or g.level < 1:
                raise ValueError(f"phi is not defined on {g}")
            mks.append(marker("T", g.i, g.j, 0, g.level - 1))
        out = out + FilteredExpr([FilteredTerm(coeff, tuple(mks))], N)
    return out


def twisted_phi_expr(case, i, j, m, N=2) -> FilteredExpr:
    """phi(image of s_ij^(m+1)) - S_ij^(1,m); term 0 is the first linear term of phi(...)."""
    from .yangian import embed_twisted_yangian

    case = _check_case(case, N)
    emb = embed_twisted_yangian(case, i, j, m + 1, N, variant="displayed", normal=False)
    return phi_push(emb, N) - FilteredExpr.of(marker("S", i, j, 1, m, case), N=N)


def twisted_phi_check(case, i, j, m, N=2, *, target=None, relations=None, bounds=None) -> Certificate:
    tgt = twisted_phi_expr(case, i, j, m, N) if target is None else target
    return congruence_check(tgt, m + 1, relations, bounds=bounds, N=N,
                            target_id=f"twisted-phi({_case(case)};{i}{j};m={m})")


__all__ = [
    "AdaptedFrame", "CongruenceBounds", "FilteredExpr", "FilteredTerm", "IntegralityFailed", "Marker",
    "Refuted", "adapted_basis", "auto_relations", "congruence_check", "filt_degree", "graded_yangian_check",
    "graded_yangian_expr", "marker", "outcome_record", "phi_image", "phi_push", "refutation_witness",
    "scong_check", "scong_expr", "scong_rhs", "tbar_congruence_check", "twisted_phi_check", "twisted_phi_expr",
    "zeta_expr", "zeta_independence_check",
]
