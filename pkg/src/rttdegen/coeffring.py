"""Exact coefficient arithmetic.

Rational numbers are ``fractions.Fraction``.  Polynomials in hbar and rational
functions in q sit on top of FLINT's ``fmpq_poly``.  ``TruncatedSeries`` is a
sparse multivariate Laurent series cut off by a linear weight.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from numbers import Rational as _RationalABC

from flint import fmpq, fmpq_poly

Rational = Fraction


class DivisionByZero(ZeroDivisionError):
    pass


class ZeroInput(ValueError):
    pass


class PoleAtQ1(ValueError):
    pass


class IncompatibleVariables(ValueError):
    pass


class TruncationInsufficient(ValueError):
    pass


def _to_fmpq(x) -> fmpq:
    if isinstance(x, fmpq):
        return x
    if isinstance(x, int):
        return fmpq(x)
    if isinstance(x, _RationalABC):
        return fmpq(int(x.numerator), int(x.denominator))
    raise TypeError(f"not a rational scalar: {x!r}")


def fmpq_to_fraction(c: fmpq) -> Fraction:
    return Fraction(int(c.p), int(c.q))


def _is_scalar(x) -> bool:
    return isinstance(x, (int, fmpq, _RationalABC)) and not isinstance(x, bool)


_ONE = fmpq_poly([1])
_QM1 = fmpq_poly([-1, 1])


def _poly_key(p: fmpq_poly) -> tuple:
    return tuple((int(c.p), int(c.q)) for c in p.coeffs())


def _fmt_poly(p: fmpq_poly, var: str) -> str:
    cs = p.coeffs()
    if not cs:
        return "0"
    parts = []
    for e in range(len(cs) - 1, -1, -1):
        c = fmpq_to_fraction(cs[e])
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if e == 0:
            body = str(a)
        else:
            mono = var if e == 1 else f"{var}^{e}"
            body = mono if a == 1 else f"{a}*{mono}"
        parts.append((sign, body))
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


class RatFun:
    """Element of Q(q) stored as num/den with den monic and gcd 1."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=0, den=None, *, _canonical: bool = False):
        if not isinstance(num, fmpq_poly):
            num = fmpq_poly([_to_fmpq(num)])
        if den is None:
            self.num, self.den = num, _ONE
            self._hash = None
            return
        if not isinstance(den, fmpq_poly):
            den = fmpq_poly([_to_fmpq(den)])
        if not _canonical:
            if den == 0:
                raise DivisionByZero("zero denominator")
            if den != 1:
                g = num.gcd(den)
                if g != 1:
                    num = num / g
                    den = den / g
                lc = den[den.degree()]
                if lc != 1:
                    num = num / lc
                    den = den / lc
        self.num, self.den = num, den
        self._hash = None

    @classmethod
    def q(cls) -> "RatFun":
        return cls(fmpq_poly([0, 1]))

    @classmethod
    def coerce(cls, x) -> "RatFun":
        if isinstance(x, RatFun):
            return x
        if isinstance(x, HbarPoly):
            return cls(x.poly)
        return cls(x)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, RatFun):
            if _is_scalar(other):
                other = RatFun(other)
            else:
                return NotImplemented
        if self.den == 1 and other.den == 1:
            return RatFun(self.num + other.num, _ONE, _canonical=True)
        if self.den == other.den:
            return RatFun(self.num + other.num, self.den)
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        if not isinstance(other, RatFun):
            if _is_scalar(other):
                other = RatFun(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        if _is_scalar(other):
            return RatFun(other) - self
        return NotImplemented

    def __mul__(self, other):
        if not isinstance(other, RatFun):
            if _is_scalar(other):
                c = _to_fmpq(other)
                if c == 0:
                    return RatFun()
                return RatFun(self.num * c, self.den, _canonical=True)
            return NotImplemented
        if self.den == 1 and other.den == 1:
            return RatFun(self.num * other.num, _ONE, _canonical=True)
        return RatFun(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if self.num == 0:
            raise DivisionByZero("inverse of zero")
        return RatFun(self.den, self.num)

    def __truediv__(self, other):
        if not isinstance(other, RatFun):
            if _is_scalar(other):
                other = RatFun(other)
            else:
                return NotImplemented
        if other.num == 0:
            raise DivisionByZero("division by zero rational function")
        return RatFun(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        if _is_scalar(other):
            return RatFun(other) / self
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RatFun(self.num ** n, self.den ** n, _canonical=True)

    # comparison ------------------------------------------------------------
    def __bool__(self):
        return self.num != 0

    def __eq__(self, other):
        if isinstance(other, RatFun):
            return self.num == other.num and self.den == other.den
        if _is_scalar(other):
            return self.den == 1 and self.num == fmpq_poly([_to_fmpq(other)])
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((_poly_key(self.num), _poly_key(self.den)))
        return self._hash

    # evaluation ------------------------------------------------------------
    def __call__(self, x) -> Fraction:
        x = _to_fmpq(x)
        d = self.den(x)
        if d == 0:
            raise DivisionByZero(f"pole at q={x}")
        return fmpq_to_fraction(self.num(x) / d)

    def is_constant(self) -> bool:
        return self.den == 1 and self.num.degree() <= 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        return fmpq_to_fraction(self.num[0])

    def format(self, var: str = "q") -> str:
        n = _fmt_poly(self.num, var)
        if self.den == 1:
            return n
        return f"({n})/({_fmt_poly(self.den, var)})"

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"RatFun({self.format()})"


class HbarPoly:
    """Polynomial in hbar with rational coefficients."""

    __slots__ = ("poly", "_hash")

    def __init__(self, coeffs=0):
        if isinstance(coeffs, fmpq_poly):
            self.poly = coeffs
        elif isinstance(coeffs, (list, tuple)):
            self.poly = fmpq_poly([_to_fmpq(c) for c in coeffs])
        else:
            self.poly = fmpq_poly([_to_fmpq(coeffs)])
        self._hash = None

    @classmethod
    def hbar(cls) -> "HbarPoly":
        return cls(fmpq_poly([0, 1]))

    @property
    def coefficients(self) -> list[Fraction]:
        return [fmpq_to_fraction(c) for c in self.poly.coeffs()]

    def _other(self, other):
        if isinstance(other, HbarPoly):
            return other.poly
        if _is_scalar(other):
            return fmpq_poly([_to_fmpq(other)])
        return None

    def __add__(self, other):
        p = self._other(other)
        if p is None:
            return NotImplemented
        return HbarPoly(self.poly + p)

    __radd__ = __add__

    def __neg__(self):
        return HbarPoly(-self.poly)

    def __sub__(self, other):
        p = self._other(other)
        if p is None:
            return NotImplemented
        return HbarPoly(self.poly - p)

    def __rsub__(self, other):
        p = self._other(other)
        if p is None:
            return NotImplemented
        return HbarPoly(p - self.poly)

    def __mul__(self, other):
        p = self._other(other)
        if p is None:
            return NotImplemented
        return HbarPoly(self.poly * p)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        return HbarPoly(self.poly ** n)

    def __bool__(self):
        return self.poly != 0

    def __eq__(self, other):
        p = self._other(other)
        if p is None:
            return NotImplemented
        return self.poly == p

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("h", _poly_key(self.poly)))
        return self._hash

    def __call__(self, x) -> Fraction:
        return fmpq_to_fraction(self.poly(_to_fmpq(x)))

    def format(self, var: str = "h") -> str:
        return _fmt_poly(self.poly, var)

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"HbarPoly({self.format()})"


def ratfun_arith(a: RatFun, b: RatFun, op: str) -> RatFun:
    if op == "+":
        return a + b
    if op in ("-", "−"):
        return a - b
    if op in ("*", "×"):
        return a * b
    if op in ("/", "÷"):
        return a / b
    raise ValueError(f"unknown operation {op!r}")


Q = RatFun.q()
QINV = RatFun(_ONE, fmpq_poly([0, 1]))
QQI = Q - QINV  # q - q^{-1}
QM1 = RatFun(_QM1)
HBAR = HbarPoly.hbar()


def q_pow(n: int) -> RatFun:
    return Q ** n


def _count_root_one(p: fmpq_poly) -> int:
    v = 0
    while p(1) == 0:
        p = p / _QM1
        v += 1
    return v


def q1_valuation(a) -> int:
    """Order of vanishing of ``a`` at q = 1 (negative for a pole)."""
    if isinstance(a, RatFun):
        if a.num == 0:
            raise ZeroInput("valuation of zero")
        return _count_root_one(a.num) - _count_root_one(a.den)
    if _is_scalar(a):
        if a == 0:
            raise ZeroInput("valuation of zero")
        return 0
    raise TypeError(f"no q-valuation for {type(a).__name__}")


def limit_q1(a) -> Fraction:
    """Value at q = 1 of an element with nonnegative valuation."""
    if _is_scalar(a):
        return Fraction(a)
    if a.num == 0:
        return Fraction(0)
    v = q1_valuation(a)
    if v < 0:
        raise PoleAtQ1(f"{a} has a pole at q=1")
    if v > 0:
        return Fraction(0)
    return a(1)


def div_qqi_power(a: RatFun, k: int) -> RatFun:
    return a / (QQI ** k) if k else a


# ---------------------------------------------------------------------------
# truncated series


class TruncatedSeries:
    """Sparse Laurent series in named variables, exact up to a weight bound.

    A monomial with exponent vector ``e`` has weight ``-sum(g[v] * e[v])``
    where ``g`` is the grading: a positive entry makes the series run in
    negative powers of that variable.  Every coefficient of weight at most
    ``order`` is exact; heavier terms are not stored.  ``order=None`` marks
    an exact (finite) expression.
    """

    __slots__ = ("vars", "grading", "terms", "order")

    def __init__(self, vars, grading, terms=None, order=None):
        self.vars = tuple(vars)
        self.grading = tuple(grading)
        if len(self.vars) != len(self.grading):
            raise IncompatibleVariables("grading length mismatch")
        self.order = order
        ts = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if c is None or not c:
                continue
            if order is not None and self.weight(e) > order:
                continue
            ts[e] = c
        self.terms = ts

    @classmethod
    def _raw(cls, vars, grading, terms, order):
        s = cls.__new__(cls)
        s.vars, s.grading, s.terms, s.order = vars, grading, terms, order
        return s

    def weight(self, e) -> int:
        return -sum(g * x for g, x in zip(self.grading, e))

    def min_weight(self):
        if not self.terms:
            return None
        return min(self.weight(e) for e in self.terms)

    def _check(self, other: "TruncatedSeries"):
        if self.vars != other.vars or self.grading != other.grading:
            raise IncompatibleVariables(f"{self.vars}/{self.grading} vs {other.vars}/{other.grading}")

    def like(self, terms, order="same") -> "TruncatedSeries":
        return TruncatedSeries(self.vars, self.grading, terms, self.order if order == "same" else order)

    @staticmethod
    def _minorder(a, b):
        if a is None:
            return b
        if b is None:
            return a
        return min(a, b)

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = self.like({(0,) * len(self.vars): other}, order=None)
        self._check(other)
        order = self._minorder(self.order, other.order)
        out = dict(self.terms)
        for e, c in other.terms.items():
            if e in out:
                s = out[e] + c
                if s:
                    out[e] = s
                else:
                    del out[e]
            else:
                out[e] = c
        if order is not None:
            out = {e: c for e, c in out.items() if self.weight(e) <= order}
        return TruncatedSeries._raw(self.vars, self.grading, out, order)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries._raw(self.vars, self.grading, {e: -c for e, c in self.terms.items()}, self.order)

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = self.like({(0,) * len(self.vars): other}, order=None)
        return self + (-other)

    def scale(self, c, left=True) -> "TruncatedSeries":
        out = {}
        for e, x in self.terms.items():
            y = c * x if left else x * c
            if y:
                out[e] = y
        return TruncatedSeries._raw(self.vars, self.grading, out, self.order)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(other, left=False)
        self._check(other)
        ma, mb = self.min_weight(), other.min_weight()
        cands = []
        if self.order is not None:
            cands.append(self.order + min(0, mb if mb is not None else 0))
        if other.order is not None:
            cands.append(other.order + min(0, ma if ma is not None else 0))
        order = min(cands) if cands else None
        wt = self.weight
        out = {}
        for ea, ca in self.terms.items():
            wa = wt(ea)
            for eb, cb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                if order is not None and wa + wt(eb) > order:
                    continue
                p = ca * cb
                if not p:
                    continue
                if e in out:
                    s = out[e] + p
                    if s:
                        out[e] = s
                    else:
                        del out[e]
                else:
                    out[e] = p
        return TruncatedSeries._raw(self.vars, self.grading, out, order)

    def __rmul__(self, other):
        return self.scale(other, left=True)

    def coeff(self, e):
        e = tuple(e)
        if self.order is not None and self.weight(e) > self.order:
            raise TruncationInsufficient(f"coefficient {e} lies outside the validity window (order {self.order})")
        return self.terms.get(e)

    def truncate(self, order) -> "TruncatedSeries":
        if self.order is not None and order is not None and order > self.order:
            raise TruncationInsufficient("cannot raise the validity order")
        return self.like(self.terms, order=order)

    def is_zero(self) -> bool:
        return not self.terms

    def substitute_inverse(self, var: str) -> "TruncatedSeries":
        """Exact substitution var -> var^{-1}; only for exact expressions."""
        if self.order is not None:
            raise TruncationInsufficient("inversion of a truncated series")
        k = self.vars.index(var)
        g = list(self.grading)
        g[k] = -g[k]
        out = {}
        for e, c in self.terms.items():
            e2 = list(e)
            e2[k] = -e2[k]
            out[tuple(e2)] = c
        return TruncatedSeries(self.vars, tuple(g), out, None)

    def regrade(self, grading, order=None) -> "TruncatedSeries":
        """View an exact expression under another grading."""
        if self.order is not None:
            raise TruncationInsufficient("regrading a truncated series")
        s = TruncatedSeries(self.vars, grading, {}, None)
        s.terms = dict(self.terms)
        if order is not None:
            s = s.truncate(order)
        return s

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.vars, self.grading, self.order, self.terms) == (
            other.vars, other.grading, other.order, other.terms)

    def __repr__(self):
        body = " + ".join(f"({c})*{dict(zip(self.vars, e))}" for e, c in sorted(self.terms.items()))
        return f"TruncatedSeries[{body or '0'}; order={self.order}]"


def series_arith(a: TruncatedSeries, b: TruncatedSeries, op: str) -> TruncatedSeries:
    if op == "+":
        return a + b
    if op in ("*", "×"):
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def inverse_linear_series(vars, grading, form, order, coeff_one=1):
    """Expand (sum form[v]*v)^{-1} in the direction of the heaviest variable.

    The leading variable is the one with the largest grading entry; the
    remaining variables must have strictly smaller grading so that the
    geometric series runs toward larger weight.
    """
    form = tuple(Fraction(x) for x in form)
    lead = max((k for k in range(len(vars)) if form[k] != 0), key=lambda k: grading[k])
    a0 = form[lead]
    others = [k for k in range(len(vars)) if k != lead and form[k] != 0]
    for k in others:
        if grading[k] >= grading[lead]:
            raise TruncationInsufficient("expansion direction not convergent in this grading")
    # (a0 x)^{-1} * sum_n (-(sum_k a_k x_k)/(a0 x))^n
    terms = {}
    base = [0] * len(vars)
    base[lead] = -1
    frontier = {tuple(base): Fraction(1) / a0}
    probe = TruncatedSeries(vars, grading, {}, None)
    while frontier:
        nxt = {}
        for e, c in frontier.items():
            if probe.weight(e) > order:
                continue
            terms[e] = terms.get(e, 0) + c
            for k in others:
                e2 = list(e)
                e2[k] += 1
                e2[lead] -= 1
                e2 = tuple(e2)
                nxt[e2] = nxt.get(e2, 0) + c * (-form[k] / a0)
        frontier = nxt
    return TruncatedSeries(vars, grading, {e: c * coeff_one for e, c in terms.items() if c}, order)


def binomial(n: int, k: int) -> int:
    if k < 0:
        return 0
    if n >= 0:
        return comb(n, k) if k <= n else 0
    # generalized binomial for negative n
    return (-1) ** k * comb(-n + k - 1, k)
