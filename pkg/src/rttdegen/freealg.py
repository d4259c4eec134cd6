"""Sparse noncommutative polynomials and exact span certificates."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple

from .coeffring import HbarPoly, RatFun, _is_scalar


class Gen(NamedTuple):
    """Indexed generator.  Tuple order (family, level, i, j) is the word order."""

    family: str
    level: int
    i: int
    j: int

    def __str__(self):
        if self.i == 0 and self.j == 0 and self.level == 0:
            return self.family
        return f"{self.family}[{self.i}{self.j}]^({self.level})"


def symbol(name: str) -> Gen:
    return Gen(name, 0, 0, 0)


Word = tuple


def word_key(w):
    return (len(w), w)


class UnknownAlgebraTag(ValueError):
    pass


class NotInSpan(Exception):
    def __init__(self, residual: "NCPoly"):
        super().__init__(f"target not in span; residual has {len(residual.terms)} terms")
        self.residual = residual


class Inconclusive(Exception):
    pass


def _add_into(d: dict, w, c):
    if w in d:
        s = d[w] + c
        if s:
            d[w] = s
        else:
            del d[w]
    elif c:
        d[w] = c


class NCPoly:
    """Finite sum of coefficient * word, with no stored zeros."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        if terms is None:
            self.terms = {}
        else:
            self.terms = {tuple(w): c for w, c in terms.items() if c}

    @classmethod
    def _raw(cls, terms):
        p = cls.__new__(cls)
        p.terms = terms
        return p

    @classmethod
    def gen(cls, g: Gen, c=1) -> "NCPoly":
        return cls._raw({(g,): c} if c else {})

    @classmethod
    def const(cls, c) -> "NCPoly":
        return cls._raw({(): c} if c else {})

    @classmethod
    def word(cls, w, c=1) -> "NCPoly":
        return cls._raw({tuple(w): c} if c else {})

    # ring structure ------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, NCPoly):
            if _is_scalar(other) or isinstance(other, (RatFun, HbarPoly)):
                other = NCPoly.const(other)
            else:
                return NotImplemented
        out = dict(self.terms)
        for w, c in other.terms.items():
            _add_into(out, w, c)
        return NCPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly._raw({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, NCPoly):
            if _is_scalar(other) or isinstance(other, (RatFun, HbarPoly)):
                other = NCPoly.const(other)
            else:
                return NotImplemented
        out = dict(self.terms)
        for w, c in other.terms.items():
            _add_into(out, w, -c)
        return NCPoly._raw(out)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "NCPoly":
        if not c:
            return NCPoly()
        out = {}
        for w, x in self.terms.items():
            y = c * x
            if y:
                out[w] = y
        return NCPoly._raw(out)

    def __mul__(self, other):
        if isinstance(other, NCPoly):
            out = {}
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    _add_into(out, w1 + w2, c1 * c2)
            return NCPoly._raw(out)
        if _is_scalar(other) or isinstance(other, (RatFun, HbarPoly)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if _is_scalar(other) or isinstance(other, (RatFun, HbarPoly)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int):
        out = NCPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    # inspection ----------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, NCPoly):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: word_key(t[0]))

    def generators(self) -> set:
        return {g for w in self.terms for g in w}

    def max_length(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def max_level(self) -> int:
        return max((g.level for w in self.terms for g in w), default=0)

    def coeff(self, w):
        return self.terms.get(tuple(w), 0)

    def map_coeffs(self, f: Callable) -> "NCPoly":
        out = {}
        for w, c in self.terms.items():
            y = f(c)
            if y:
                out[w] = y
        return NCPoly._raw(out)

    def substitute(self, image: Callable[[Gen], "NCPoly | None"]) -> "NCPoly":
        """Replace each generator g by image(g) (None keeps g)."""
        cache: dict = {}

        def im(g):
            if g not in cache:
                r = image(g)
                cache[g] = NCPoly.gen(g) if r is None else r
            return cache[g]

        out: dict = {}
        for w, c in self.terms.items():
            acc = {(): c}
            for g in w:
                img = im(g).terms
                nxt: dict = {}
                for w1, c1 in acc.items():
                    for w2, c2 in img.items():
                        _add_into(nxt, w1 + w2, c1 * c2)
                acc = nxt
                if not acc:
                    break
            for w2, c2 in acc.items():
                _add_into(out, w2, c2)
        return NCPoly._raw(out)

    def format(self, var: str = "q") -> str:
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.sorted_terms():
            cs = c.format(var) if hasattr(c, "format") else str(c)
            ws = "*".join(str(g) for g in w) or "1"
            parts.append(f"({cs})*{ws}")
        return " + ".join(parts)

    def __repr__(self):
        return f"NCPoly({self.format()})"


def nc_mul(a: NCPoly, b: NCPoly) -> NCPoly:
    return a * b


def nc_commutator(a: NCPoly, b: NCPoly) -> NCPoly:
    return a * b - b * a


# ---------------------------------------------------------------------------
# level-0 constants


def _g_matrix(case: str, N: int):
    from .rmat import g_matrix

    return g_matrix(case, N)


def substitute_constants(a: NCPoly, alg) -> NCPoly:
    """Replace level-0 symbols of the tagged algebra by their defining values.

    Tags: ``"yangian"``; ``"qloop"``; ``("twisted_yangian", case, N)`` and
    ``("twisted_qloop", case)`` with case ``"o"`` or ``"sp"``.
    """
    from .coeffring import QM1

    if alg == "yangian":
        def image(g):
            if g.family == "t" and g.level == 0:
                return NCPoly.const(1 if g.i == g.j else 0)
            return None
    elif alg == "qloop":
        def image(g):
            if g.level != 0:
                return None
            if g.family == "T":
                if g.i < g.j:
                    return NCPoly()
                if g.i == g.j:
                    return NCPoly.const(RatFun(1)) + NCPoly.gen(Gen("tau", 0, g.i, g.i), QM1)
            elif g.family == "Tbar":
                if g.i > g.j:
                    return NCPoly()
                if g.i == g.j:
                    return NCPoly.const(RatFun(1)) + NCPoly.gen(Gen("taubar", 0, g.i, g.i), QM1)
            return None
    elif isinstance(alg, tuple) and alg and alg[0] == "twisted_yangian":
        _, case, N = alg
        G = _g_matrix(case, N)

        def image(g):
            if g.family == "s" and g.level == 0:
                return NCPoly.const(G[g.i - 1][g.j - 1])
            return None
    elif isinstance(alg, tuple) and alg and alg[0] == "twisted_qloop":
        case = alg[1]

        def image(g):
            if g.family != "S" or g.level != 0:
                return None
            if case == "o":
                if g.i < g.j:
                    return NCPoly()
                if g.i == g.j:
                    return NCPoly.const(RatFun(1))
                return None
            if g.i < g.j and g.j != prime(g.i):
                return NCPoly()
            return None
    else:
        raise UnknownAlgebraTag(f"unknown algebra tag {alg!r}")
    return a.substitute(image)


def prime(i: int) -> int:
    """The index involution i' (1-based): even i -> i-1, odd i -> i+1."""
    return i - 1 if i % 2 == 0 else i + 1


# ---------------------------------------------------------------------------
# certificates


def _coeff_str(c, var="q") -> str:
    if hasattr(c, "format"):
        return c.format(var)
    return str(c)


@dataclass
class Certificate:
    target_id: str
    threshold: int | None = None
    relation_part: list = field(default_factory=list)
    high_degree_part: list = field(default_factory=list)
    verified: bool = False
    var: str = "q"

    def to_json(self) -> dict:
        return {
            "target_id": self.target_id,
            "threshold": self.threshold,
            "relation_part": [[str(i), _coeff_str(c, self.var)] for i, c in self.relation_part],
            "high_degree_part": [[str(m), _coeff_str(c, self.var)] for m, c in self.high_degree_part],
            "verified": self.verified,
        }


def _to_field(c):
    if isinstance(c, RatFun):
        return c
    return RatFun.coerce(c)


class SparseEliminator:
    """Gauss-Jordan elimination on sparse vectors with combination tracking.

    Rows are kept fully reduced: each stored row contains exactly one pivot
    column, its own.  Reducing a vector therefore needs a single pass.
    """

    def __init__(self, column_count: dict | None = None, pivot: str = "sparse"):
        self.rows: dict = {}  # pivot column -> (vec, hist)
        self.col_rows: dict = {}  # column -> set of pivot columns of rows containing it
        self.column_count = column_count or {}
        self.pivot_rule = pivot

    def reduce(self, vec: dict, hist: dict):
        vec = dict(vec)
        hist = dict(hist)
        for col in [c for c in vec if c in self.rows]:
            coef = vec.get(col)
            if not coef:
                continue
            rvec, rhist = self.rows[col]
            for w, x in rvec.items():
                _add_into(vec, w, -coef * x)
            for h, x in rhist.items():
                _add_into(hist, h, -coef * x)
        return vec, hist

    def _choose(self, vec: dict):
        if self.pivot_rule == "order":
            return max(vec, key=word_key)
        cc = self.column_count
        return min(vec, key=lambda w: (cc.get(w, 0), word_key(w)))

    def add(self, vec: dict, hist: dict) -> bool:
        vec, hist = self.reduce(vec, hist)
        if not vec:
            return False
        p = self._choose(vec)
        inv = vec[p].inverse()
        vec = {w: x * inv for w, x in vec.items()}
        hist = {h: x * inv for h, x in hist.items()}
        # eliminate the new pivot from existing rows
        for other in list(self.col_rows.get(p, ())):
            ovec, ohist = self.rows[other]
            coef = ovec.get(p)
            if not coef:
                continue
            for w, x in vec.items():
                before = w in ovec
                _add_into(ovec, w, -coef * x)
                after = w in ovec
                if after and not before:
                    self.col_rows.setdefault(w, set()).add(other)
                elif before and not after:
                    self.col_rows[w].discard(other)
            for h, x in hist.items():
                _add_into(ohist, h, -coef * x)
        self.rows[p] = (vec, hist)
        for w in vec:
            self.col_rows.setdefault(w, set()).add(p)
        return True


def _verify_combination(target: NCPoly, relations: dict, coeffs: list) -> bool:
    acc = NCPoly()
    for rid, c in coeffs:
        acc = acc + relations[rid].map_coeffs(_to_field).scale(c)
    return (acc - target.map_coeffs(_to_field)).is_zero()


def span_membership(target: NCPoly, relations, *, target_id: str = "target", pivot: str = "sparse",
                    var: str = "q") -> Certificate:
    """Exact coefficients c with sum c_a R_a = target, or NotInSpan.

    ``relations`` maps identifiers to NCPoly (a list is indexed 0..n-1).
    """
    if not isinstance(relations, dict):
        relations = dict(enumerate(relations))
    rel = {rid: r.map_coeffs(_to_field) for rid, r in relations.items()}
    tgt = target.map_coeffs(_to_field)
    counts: dict = {}
    for r in rel.values():
        for w in r.terms:
            counts[w] = counts.get(w, 0) + 1
    elim = SparseEliminator(counts, pivot=pivot)
    for rid in sorted(rel, key=str):
        if rel[rid]:
            elim.add(rel[rid].terms, {rid: RatFun(1)})
    residual, hist = elim.reduce(tgt.terms, {})
    if residual:
        raise NotInSpan(NCPoly._raw(residual))
    coeffs = sorted(((rid, -c) for rid, c in hist.items() if c), key=lambda t: str(t[0]))
    cert = Certificate(target_id=target_id, relation_part=coeffs, var=var)
    cert.verified = _verify_combination(tgt, rel, coeffs)
    if not cert.verified:
        raise AssertionError("certificate failed re-expansion")
    return cert


def words_upto(alphabet: Iterable[Gen], d: int):
    alphabet = sorted(set(alphabet))
    for n in range(d + 1):
        for w in itertools.product(alphabet, repeat=n):
            yield w


def ideal_membership_bounded(target: NCPoly, relations, multiplier_degree: int, *,
                             alphabet: Iterable[Gen] | None = None, target_id: str = "target",
                             var: str = "q") -> Certificate:
    """Search combinations x*R*y with |x|+|y| <= multiplier_degree.

    Failure raises Inconclusive: the bound was exhausted, nothing is refuted.
    """
    if not isinstance(relations, dict):
        relations = dict(enumerate(relations))
    if alphabet is None:
        alphabet = set(target.generators())
        for r in relations.values():
            alphabet |= r.generators()
    alphabet = sorted(set(alphabet))
    expanded = {}
    for rid, r in relations.items():
        for x in words_upto(alphabet, multiplier_degree):
            for y in words_upto(alphabet, multiplier_degree - len(x)):
                key = (tuple(str(g) for g in x), rid, tuple(str(g) for g in y))
                expanded[key] = NCPoly.word(x, 1) * r * NCPoly.word(y, 1)
    try:
        return span_membership(target, expanded, target_id=target_id, var=var)
    except NotInSpan as exc:
        raise Inconclusive(f"no decomposition with multiplier degree <= {multiplier_degree}") from exc


class PBWNormalizer:
    """Memoized rewriting of words to nondecreasing order.

    ``bracket(a, b)`` returns the terms dict of [a, b] for generators
    a > b; every descent ab is replaced by ba + [a, b].  ``strategy`` picks
    the leftmost or rightmost descent first; both must reach the same
    normal form when the bracket satisfies the Jacobi identity.
    """

    def __init__(self, bracket: Callable, one=1, strategy: str = "left"):
        if strategy not in ("left", "right"):
            raise ValueError(strategy)
        self.bracket = bracket
        self.one = one
        self.strategy = strategy
        self.cache: dict = {}
        self._br: dict = {}

    def _descent(self, w):
        rng = range(len(w) - 1) if self.strategy == "left" else range(len(w) - 2, -1, -1)
        for p in rng:
            if w[p] > w[p + 1]:
                return p
        return None

    def _bracket(self, a, b):
        key = (a, b)
        if key not in self._br:
            self._br[key] = self.bracket(a, b)
        return self._br[key]

    def word(self, w) -> dict:
        cache = self.cache
        if w in cache:
            return cache[w]
        p = self._descent(w)
        if p is None:
            res = {w: self.one}
        else:
            a, b = w[p], w[p + 1]
            pre, post = w[:p], w[p + 2:]
            res = dict(self.word(pre + (b, a) + post))
            for cw, c in self._bracket(a, b).items():
                for w2, c2 in self.word(pre + cw + post).items():
                    _add_into(res, w2, c * c2)
        cache[w] = res
        return res

    def __call__(self, e: NCPoly) -> NCPoly:
        out: dict = {}
        for w, c in e.terms.items():
            for w2, c2 in self.word(w).items():
                _add_into(out, w2, c * c2)
        return NCPoly._raw(out)


def is_ordered(e: NCPoly) -> bool:
    return all(all(w[p] <= w[p + 1] for p in range(len(w) - 1)) for w in e.terms)
