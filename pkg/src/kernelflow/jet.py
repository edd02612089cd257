"""Truncated bivariate power series with exact rational coefficients.

A :class:`Jet` of order ``N`` stores the Taylor coefficients of a germ at the
origin up to total degree ``N``; everything above is unknown.  Arithmetic
between jets of different orders keeps the smaller order.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Mapping

import numpy as np

Monomial = tuple[int, int]


class JetError(ValueError):
    """Raised for operations that are undefined on the given jets."""


def monomial_key(m: Monomial) -> tuple[int, int]:
    """Sort key for graded-lex order: total degree, then x-power descending."""
    return (m[0] + m[1], -m[0])


def monomials_upto(n: int) -> list[Monomial]:
    """All exponent pairs of total degree <= n, in graded-lex order."""
    return [(d - j, j) for d in range(n + 1) for j in range(d + 1)]


def format_monomial(m: Monomial) -> str:
    i, j = m
    parts = []
    if i:
        parts.append("x" if i == 1 else f"x^{i}")
    if j:
        parts.append("y" if j == 1 else f"y^{j}")
    return "*".join(parts) or "1"


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, float):
        # repr round-trips, so 0.3 becomes 3/10 rather than its binary expansion
        return Fraction(repr(c))
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"cannot use {type(c).__name__} as a jet coefficient")


def _to_integers(terms: Mapping[Monomial, Fraction]) -> tuple[dict[Monomial, int], int]:
    den = 1
    for c in terms.values():
        den = den * c.denominator // math.gcd(den, c.denominator)
    return {m: c.numerator * (den // c.denominator) for m, c in terms.items()}, den


class Jet:
    """Exact truncated power series in ``x`` and ``y`` at the origin.

    ``coeffs`` maps exponent pairs ``(i, j)`` to rational coefficients of
    ``x^i y^j``.  Zero coefficients and terms above ``order`` are dropped on
    construction.  Instances are immutable.
    """

    __slots__ = ("_terms", "_order")

    def __init__(self, coeffs: Mapping[Monomial, object] | None = None, order: int = 0):
        if order < 0:
            raise JetError("jet order must be nonnegative")
        terms = {}
        for (i, j), c in (coeffs or {}).items():
            if i < 0 or j < 0:
                raise JetError(f"negative exponent in monomial {(i, j)}")
            if i + j > order:
                continue
            c = _as_fraction(c)
            if c:
                terms[(int(i), int(j))] = c
        self._terms = terms
        self._order = int(order)

    @classmethod
    def _raw(cls, terms: dict[Monomial, Fraction], order: int) -> "Jet":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._order = order
        return obj

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, order: int) -> "Jet":
        return cls._raw({}, order)

    @classmethod
    def const(cls, c, order: int) -> "Jet":
        return cls({(0, 0): c}, order)

    @classmethod
    def monomial(cls, i: int, j: int, order: int, coeff=1) -> "Jet":
        return cls({(i, j): coeff}, order)

    @classmethod
    def x(cls, order: int) -> "Jet":
        return cls.monomial(1, 0, order)

    @classmethod
    def y(cls, order: int) -> "Jet":
        return cls.monomial(0, 1, order)

    # -- accessors ----------------------------------------------------------

    @property
    def order(self) -> int:
        return self._order

    @property
    def coeffs(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def coeff(self, i: int, j: int) -> Fraction:
        return self._terms.get((i, j), Fraction(0))

    @property
    def constant(self) -> Fraction:
        return self.coeff(0, 0)

    def terms(self) -> list[tuple[Monomial, Fraction]]:
        """Nonzero terms in graded-lex order."""
        return sorted(self._terms.items(), key=lambda t: monomial_key(t[0]))

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Largest total degree of a stored term (-1 for the zero jet)."""
        return max((i + j for i, j in self._terms), default=-1)

    def valuation(self) -> int | None:
        """Lowest total degree with a nonzero coefficient.

        ``None`` means every coefficient up to ``order`` vanishes, i.e. the
        valuation exceeds the truncation order.
        """
        return min((i + j for i, j in self._terms), default=None)

    def homogeneous(self, d: int) -> dict[Monomial, Fraction]:
        return {m: c for m, c in self._terms.items() if m[0] + m[1] == d}

    # -- truncation ---------------------------------------------------------

    def truncate(self, k: int) -> "Jet":
        """The k-jet: drop terms above degree ``k`` and set the order to ``k``."""
        if k < 0:
            raise JetError("truncation degree must be nonnegative")
        if k > self._order:
            raise JetError(f"cannot raise order {self._order} to {k}: coefficients unknown")
        return Jet._raw({m: c for m, c in self._terms.items() if m[0] + m[1] <= k}, k)

    def jet_germ(self, k: int) -> "Jet":
        """The k-jet read as a polynomial germ: higher terms are exactly zero.

        Unlike :meth:`truncate` the order is kept, so downstream computations
        see the polynomial ``j^k f`` rather than an unknown tail.
        """
        return Jet._raw({m: c for m, c in self._terms.items() if m[0] + m[1] <= k}, self._order)

    def with_order(self, k: int) -> "Jet":
        """Lower the order to ``min(k, order)``."""
        return self.truncate(min(k, self._order))

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "Jet | None":
        if isinstance(other, Jet):
            return other
        if isinstance(other, (int, Rational, float)):
            return Jet.const(other, self._order)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        n = min(self._order, other._order)
        out = {m: c for m, c in self._terms.items() if m[0] + m[1] <= n}
        for m, c in other._terms.items():
            if m[0] + m[1] > n:
                continue
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Jet._raw(out, n)

    __radd__ = __add__

    def __neg__(self) -> "Jet":
        return Jet._raw({m: -c for m, c in self._terms.items()}, self._order)

    def __pos__(self) -> "Jet":
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def scale(self, c) -> "Jet":
        c = _as_fraction(c)
        if not c:
            return Jet.zero(self._order)
        return Jet._raw({m: c * v for m, v in self._terms.items()}, self._order)

    def __mul__(self, other):
        if isinstance(other, (int, Rational, float)):
            return self.scale(other)
        if not isinstance(other, Jet):
            return NotImplemented
        n = min(self._order, other._order)
        if not self._terms or not other._terms:
            return Jet.zero(n)
        # integer convolution over a common denominator keeps the inner loop cheap
        a, da = _to_integers(self._terms)
        b, db = _to_integers(other._terms)
        bs = sorted(b.items(), key=lambda t: t[0][0] + t[0][1])
        acc: dict[Monomial, int] = {}
        for (i1, j1), c1 in a.items():
            room = n - i1 - j1
            if room < 0:
                continue
            for (i2, j2), c2 in bs:
                if i2 + j2 > room:
                    break
                key = (i1 + i2, j1 + j2)
                acc[key] = acc.get(key, 0) + c1 * c2
        den = da * db
        return Jet._raw({m: Fraction(v, den) for m, v in acc.items() if v}, n)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        """Multiplicative inverse; needs a nonzero constant term."""
        c0 = self.constant
        if not c0:
            raise JetError("division by a jet with zero constant term")
        n = self._order
        # 1/(c0 (1 + h)) = (1/c0) * sum (-h)^k, and h has valuation >= 1
        h = (self - c0).scale(1 / c0)
        out = Jet.const(1, n)
        p = Jet.const(1, n)
        for _ in range(n):
            p = p * (-h)
            if p.is_zero():
                break
            out = out + p
        return out.scale(1 / c0)

    def __truediv__(self, other):
        if isinstance(other, (int, Rational, float)):
            c = _as_fraction(other)
            if not c:
                raise JetError("division by zero")
            return self.scale(1 / c)
        if not isinstance(other, Jet):
            return NotImplemented
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.reciprocal()

    def __pow__(self, e: int) -> "Jet":
        if not isinstance(e, int):
            raise JetError("only integer powers of jets are defined")
        if e < 0:
            return self.reciprocal() ** (-e)
        out = Jet.const(1, self._order)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    # -- calculus -----------------------------------------------------------

    def diff_x(self) -> "Jet":
        """Partial derivative in x; the result is known to order-1."""
        n = max(self._order - 1, 0)
        return Jet._raw({(i - 1, j): c * i for (i, j), c in self._terms.items()
                         if i and i + j - 1 <= n}, n)

    def diff_y(self) -> "Jet":
        n = max(self._order - 1, 0)
        return Jet._raw({(i, j - 1): c * j for (i, j), c in self._terms.items()
                         if j and i + j - 1 <= n}, n)

    def compose(self, u: "Jet", v: "Jet") -> "Jet":
        """Substitute ``x -> u``, ``y -> v``; both must vanish at the origin."""
        return compose(self, u, v)

    def restrict_x_axis(self) -> list[Fraction]:
        """Coefficients of ``t^k`` in ``f(t, 0)`` for k = 0..order."""
        out = [Fraction(0)] * (self._order + 1)
        for (i, j), c in self._terms.items():
            if j == 0:
                out[i] = c
        return out

    # -- numerics -----------------------------------------------------------

    def polynomial(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Exponent arrays and float coefficients for fast evaluation."""
        items = self.terms()
        ii = np.array([m[0] for m, _ in items], dtype=int)
        jj = np.array([m[1] for m, _ in items], dtype=int)
        cc = np.array([float(c) for _, c in items], dtype=float)
        return ii, jj, cc

    def __call__(self, x, y):
        """Evaluate the stored polynomial in floating point."""
        ii, jj, cc = self.polynomial()
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast(x, y).shape)
        for i, j, c in zip(ii, jj, cc):
            out = out + c * x ** i * y ** j
        return out

    # -- comparison / display ----------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Jet):
            return self._order == other._order and self._terms == other._terms
        if isinstance(other, (int, Rational)):
            return self == Jet.const(other, self._order)
        return NotImplemented

    def __hash__(self):
        return hash((self._order, frozenset(self._terms.items())))

    def equals_upto(self, other: "Jet", order: int | None = None) -> bool:
        """Compare as jets at the smaller of the two orders (or ``order``)."""
        n = min(self._order, other._order)
        if order is not None:
            n = min(n, order)
        return self.truncate(n) == other.truncate(n)

    def __str__(self):
        if not self._terms:
            return "0"
        out = []
        for m, c in self.terms():
            mono = format_monomial(m)
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if mono == "1":
                body = str(a)
            elif a == 1:
                body = mono
            elif a.denominator == 1:
                body = f"{a}*{mono}"
            else:
                body = f"({a})*{mono}"
            out.append((sign, body))
        first_sign, first = out[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in out[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"Jet({self}, order={self._order})"

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {"order": self._order,
                "terms": [[i, j, str(c)] for (i, j), c in self.terms()]}

    @classmethod
    def from_json(cls, data: Mapping) -> "Jet":
        try:
            return cls({(int(i), int(j)): Fraction(c) for i, j, c in data["terms"]},
                       int(data["order"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise JetError(f"malformed jet JSON: {exc}") from exc


def common_order(*jets: Jet) -> int:
    return min(j.order for j in jets)


def compose(f: Jet, u: Jet, v: Jet) -> Jet:
    """``f(u, v)`` truncated at the common order.

    ``u`` and ``v`` must have zero constant term so that the substitution
    fixes the origin and the result is determined by the known coefficients.
    """
    if u.constant or v.constant:
        raise JetError("substitution must fix the origin (nonzero constant term)")
    n = common_order(f, u, v)
    f = f.truncate(n)
    u = u.truncate(n)
    v = v.truncate(n)
    if f.is_zero():
        return Jet.zero(n)
    # group f by x-power, evaluate each y-polynomial at v, then Horner in u
    rows: dict[int, dict[int, Fraction]] = {}
    for (i, j), c in f._terms.items():
        rows.setdefault(i, {})[j] = c
    top_j = max(j for (_, j) in f._terms)
    vpow = [Jet.const(1, n)]
    for _ in range(top_j):
        vpow.append(vpow[-1] * v)
    top_i = max(rows)
    out = Jet.zero(n)
    for i in range(top_i, -1, -1):
        out = out * u
        row = rows.get(i)
        if row:
            acc: dict[Monomial, Fraction] = {}
            for j, c in row.items():
                for m, w in vpow[j]._terms.items():
                    acc[m] = acc.get(m, 0) + c * w
            out = out + Jet._raw({m: w for m, w in acc.items() if w}, n)
    return out
