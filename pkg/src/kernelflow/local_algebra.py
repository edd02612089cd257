"""Codimension of ideals in the local ring of germs, computed on jet spaces.

For an ideal ``I`` generated by jets ``g_1..g_r`` the image of ``I`` in
``J^m`` (polynomials of degree <= m) is spanned by ``x^a y^b g_i`` truncated
above degree ``m``.  ``d_m = dim J^m / image`` is nondecreasing in ``m``; once
every monomial of degree ``m`` lies in the image, Nakayama's lemma gives
``m^m`` inside ``I`` and ``d_m`` is the codimension.

All linear algebra is exact: rows are scaled to primitive integer vectors and
eliminated fraction-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from kernelflow.forms import PlaneField, lie_derivative
from kernelflow.jet import Jet, Monomial, _to_integers, format_monomial, monomials_upto


@dataclass(frozen=True)
class LocalIdeal:
    generators: tuple[Jet, ...]

    def __init__(self, generators: Sequence[Jet]):
        gens = tuple(generators)
        if not gens:
            raise ValueError("an ideal needs at least one generator")
        n = min(g.order for g in gens)
        object.__setattr__(self, "generators", tuple(g.truncate(n) for g in gens))

    @property
    def order(self) -> int:
        return self.generators[0].order


def tangent_ideal(f: Jet, X: PlaneField) -> LocalIdeal:
    """``<f, L_X f>``: the tangent space to the orbit of ``f``."""
    return LocalIdeal([f, lie_derivative(X, f)])


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = math.gcd(g, v)
        if g == 1:
            break
    lead = row[max(row)]
    if lead < 0:
        g = -g
    if g not in (0, 1):
        row = {c: v // g for c, v in row.items()}
    return row


class _Echelon:
    """Row echelon form keyed by leading (largest) column."""

    def __init__(self):
        self.rows: dict[int, dict[int, int]] = {}

    def reduce(self, row: dict[int, int]) -> dict[int, int]:
        while row:
            lead = max(row)
            piv = self.rows.get(lead)
            if piv is None:
                return row
            a = row[lead]
            b = piv[lead]
            new = {c: b * v for c, v in row.items()}
            for c, v in piv.items():
                w = new.get(c, 0) - a * v
                if w:
                    new[c] = w
                else:
                    new.pop(c, None)
            row = _primitive(new) if new else new
        return row

    def copy(self) -> "_Echelon":
        out = _Echelon()
        out.rows = dict(self.rows)
        return out

    def insert(self, row: dict[int, int]) -> bool:
        row = self.reduce(row)
        if not row:
            return False
        row = _primitive(row)
        self.rows[max(row)] = row
        return True


@dataclass
class ImageSpace:
    """Image of an ideal in ``J^m``, in the graded-lex monomial basis."""

    order: int
    monomials: list[Monomial]
    _ech: _Echelon = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self._ech.rows)

    @property
    def ambient_dim(self) -> int:
        return len(self.monomials)

    @property
    def pivots(self) -> list[Monomial]:
        return [self.monomials[c] for c in sorted(self._ech.rows)]

    def cobasis(self) -> list[Monomial]:
        """Monomials completing the image to ``J^m``, smallest first.

        A monomial is chosen exactly when it is not congruent modulo the
        image to a combination of smaller monomials.
        """
        return [m for c, m in enumerate(self.monomials) if c not in self._ech.rows]

    def extended_rank(self, extra: list[Monomial]) -> int | None:
        """Dimension of image + span(extra), or ``None`` if the sum is not direct."""
        index = {m: c for c, m in enumerate(self.monomials)}
        ech = self._ech.copy()
        for mono in extra:
            if mono not in index or not ech.insert({index[mono]: 1}):
                return None
        return len(ech.rows)

    def _vector(self, f: Jet) -> dict[int, int]:
        index = {m: c for c, m in enumerate(self.monomials)}
        f = f.with_order(self.order)
        ints, _ = _to_integers(f.coeffs)
        return {index[m]: v for m, v in ints.items()}

    def contains(self, f: Jet) -> bool:
        """Whether ``f`` truncated to degree ``m`` lies in the image."""
        if f.order < self.order:
            raise ValueError("jet is not known to the order of the image")
        return not self._ech.reduce(self._vector(f))

    def basis(self) -> list[Jet]:
        """Reduced row echelon basis, leading coefficient 1."""
        rows = {p: {c: Fraction(v) for c, v in r.items()} for p, r in self._ech.rows.items()}
        # a row only involves columns <= its pivot, so ascending sweeps suffice
        for p in sorted(rows):
            lead = rows[p][p]
            rows[p] = {c: v / lead for c, v in rows[p].items()}
            for q in rows:
                if q > p and p in rows[q]:
                    t = rows[q][p]
                    for c, v in rows[p].items():
                        w = rows[q].get(c, 0) - t * v
                        if w:
                            rows[q][c] = w
                        else:
                            rows[q].pop(c, None)
        return [Jet({self.monomials[c]: v for c, v in rows[p].items()}, self.order)
                for p in sorted(rows)]


def ideal_image(ideal: LocalIdeal, m: int) -> ImageSpace:
    """Span of ``x^a y^b g`` modulo degree > m over all generators ``g``."""
    if m > ideal.order:
        raise ValueError(f"image order {m} exceeds the ideal's truncation order {ideal.order}")
    monos = monomials_upto(m)
    index = {mono: c for c, mono in enumerate(monos)}
    ech = _Echelon()
    full = len(monos)
    for g in ideal.generators:
        g = g.truncate(m)
        if g.is_zero():
            continue
        ints, _ = _to_integers(g.coeffs)
        low = g.valuation()
        for a, b in monos:
            if a + b + low > m:
                break
            row = {}
            for (i, j), v in ints.items():
                if i + j + a + b <= m:
                    row[index[(i + a, j + b)]] = v
            ech.insert(row)
            if len(ech.rows) == full:
                return ImageSpace(m, monos, ech)
    return ImageSpace(m, monos, ech)


@dataclass(frozen=True)
class CodimResult:
    """Outcome of a codimension computation.

    ``codim`` is ``None`` when the quotient dimension had not stabilized by
    the truncation order; ``lower_bound`` then holds the last computed value.
    """

    codim: int | None
    cobasis: tuple[Monomial, ...]
    stable_at: int | None
    lower_bound: int
    order: int

    @property
    def is_finite(self) -> bool:
        return self.codim is not None

    def cobasis_jets(self, order: int) -> list[Jet]:
        return [Jet.monomial(i, j, order) for i, j in self.cobasis]

    def describe(self) -> str:
        if self.is_finite:
            return f"codim {self.codim} (stable at order {self.stable_at})"
        return f"codim >= {self.lower_bound}, unstable at order {self.order}"

    def to_json(self) -> dict:
        return {"codim": self.codim,
                "cobasis": [format_monomial(m) for m in self.cobasis],
                "stable_at": self.stable_at,
                "lower_bound": self.lower_bound,
                "order": self.order}


def codimension(ideal: LocalIdeal, cap: int | None = None) -> CodimResult:
    """``dim E / I`` with a greedy graded-lex cobasis.

    The value is declared final at the first order ``m >= 1`` where
    ``d_m == d_{m-1}`` and every degree-``m`` monomial lies in the image.  If
    ``cap`` is given the search stops as soon as ``d_m`` exceeds it.
    """
    N = ideal.order
    prev = None
    last = None
    for m in range(N + 1):
        img = ideal_image(ideal, m)
        d = img.ambient_dim - img.dim
        last = img
        if prev is not None and d == prev:
            cob = img.cobasis()
            if all(i + j < m for i, j in cob):
                return CodimResult(d, tuple(cob), m, d, N)
        if cap is not None and d > cap:
            return CodimResult(None, tuple(img.cobasis()), None, d, N)
        prev = d
    return CodimResult(None, tuple(last.cobasis()), None, prev, N)


def codim_of(f: Jet, X: PlaneField, cap: int | None = None) -> CodimResult:
    return codimension(tangent_ideal(f, X), cap=cap)


def finite_determinacy_order(f: Jet, X: PlaneField) -> int | None:
    """Smallest ``k`` for which ``j^k f`` has the same (stable) codimension as ``f``.

    Returns ``None`` when ``f`` itself has no stable codimension or no jet
    up to the truncation order matches.
    """
    target = codim_of(f, X)
    if not target.is_finite:
        return None
    for k in range(f.order + 1):
        res = codim_of(f.jet_germ(k), X, cap=target.codim)
        if res.codim == target.codim:
            return k
    return None
