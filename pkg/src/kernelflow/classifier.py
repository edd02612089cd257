"""Recognize which local model a field ``f X_a`` realizes.

The recognizer only uses computable invariants: the codimension of
``<f, L_{X_a} f>``, the contact order of a regular curve ``{f = 0}`` with the
leaf of ``X_a`` through the origin, and the right-equivalence type of a
singular ``f``.  The catalog itself (which invariants single out which model)
is taken from the classification of simple curves in a foliated plane.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from kernelflow.forms import JetDiffeo, OneForm, PlaneField, field_of_form, lie_derivative
from kernelflow.jet import Jet, JetError, compose
from kernelflow.local_algebra import CodimResult, codim_of, finite_determinacy_order
from kernelflow.parse import parse_expr


class ClassifyError(JetError):
    pass


REGULAR = "Regular"
REGULAR_CURVE = "RegularCurve"
TWO_BRANCH = "TwoBranch"
BEAK = "Beak"
CUSP = "Cusp"
LIOUVILLE_REGULAR_CURVE = "LiouvilleRegularCurve"
CLOSED_MORSE_PLUS = "ClosedMorsePlus"
CLOSED_MORSE_MINUS = "ClosedMorseMinus"
JET_REDUCED = "JetReduced"
NOT_IN_CATALOG = "NotInCatalog"

# forms with a named codimension-1 model, keyed by their field X_a
NAMED_SINGULAR = {
    "liouville": ("0", "-x", "0"),     # a_L = x dy
    "closed_plus": ("x", "-y", "x"),   # a2+ = x dx + y dy
    "closed_minus": ("x", "y", "x"),   # a2- = x dx - y dy
}
_NAMED_CLASS = {
    "liouville": (LIOUVILLE_REGULAR_CURVE, "x + y"),
    "closed_plus": (CLOSED_MORSE_PLUS, "x"),
    "closed_minus": (CLOSED_MORSE_MINUS, "x"),
}


@dataclass(frozen=True)
class NormalForm:
    cls: str
    codim: int | None
    representative: Jet | None
    valid_at_order: int
    k: int | None = None
    sign: str | None = None
    codim_result: CodimResult | None = field(default=None, compare=False, repr=False)
    notes: tuple[str, ...] = field(default=(), compare=False)

    @property
    def label(self) -> str:
        if self.cls in (REGULAR_CURVE, TWO_BRANCH, JET_REDUCED):
            return f"{self.cls}({self.k})"
        if self.cls == BEAK:
            return f"{self.cls}({self.k}, {self.sign})"
        return self.cls

    def to_json(self) -> dict:
        return {"class": self.cls,
                "k": self.k,
                "sign": self.sign,
                "codim": self.codim,
                "representative": None if self.representative is None else self.representative.to_json(),
                "valid_at_order": self.valid_at_order}


# -- rectification ----------------------------------------------------------

def _linear_frame(p: Fraction, q: Fraction) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """Columns (p, q) and a complementary axis vector."""
    if p:
        return p, Fraction(0), q, Fraction(1)
    return p, Fraction(1), q, Fraction(0)


def rectify(X: PlaneField, order: int | None = None) -> JetDiffeo:
    """Flow-box chart: ``phi`` with ``phi^* X = d/dx`` up to order ``N - 1``.

    A linear map first sends ``d/dx`` to ``X(0)``; the flow of the pulled
    back field from the points ``(0, t)`` then straightens it.  The flow is
    summed as a Lie series ``sum s^n/n! (L_Y^n id)(0, t)``.
    """
    if X.is_singular():
        raise ClassifyError("cannot rectify a field that vanishes at the origin")
    N = X.order if order is None else min(order, X.order)
    X = X.truncate(N)
    p, c1, q, c2 = _linear_frame(*X.at_origin())
    det = p * c2 - c1 * q
    xs, ys = Jet.x(N), Jet.y(N)
    lin = JetDiffeo(xs * p + ys * c1, xs * q + ys * c2)
    u, v = lin(X.u), lin(X.v)
    Y = PlaneField((u * c2 - v * c1) * (1 / det), (v * p - u * q) * (1 / det))

    terms: list[dict] = [{}, {}]
    for slot, h in enumerate((Jet.x(N), Jet.y(N))):
        for n in range(N + 1):
            fact = Fraction(1, factorial(n))
            for (i, j), c in h.coeffs.items():
                if i == 0 and n + j <= N:
                    terms[slot][(n, j)] = terms[slot].get((n, j), 0) + c * fact
            if n < N:
                h = lie_derivative(Y, h)
    flow = JetDiffeo(Jet(terms[0], N), Jet(terms[1], N))
    return flow.then(lin)


@dataclass(frozen=True)
class LeafCurve:
    """Leaf of a nonsingular field through the origin, as a graph.

    ``axis == "x"`` means ``t -> (t, gamma(t))``; otherwise ``(gamma(t), t)``.
    ``gamma`` lists Taylor coefficients of ``t^0..t^order``.
    """

    axis: str
    gamma: tuple[Fraction, ...]

    def as_map(self, order: int) -> tuple[Jet, Jet]:
        t = Jet.x(order)
        g = Jet({(n, 0): c for n, c in enumerate(self.gamma)}, order)
        return (t, g) if self.axis == "x" else (g, t)


def leaf_curve(X: PlaneField) -> LeafCurve:
    """Solve ``dy/dx = v/u`` (or ``dx/dy = u/v``) by Picard iteration."""
    if X.is_singular():
        raise ClassifyError("no distinguished leaf through a singular point")
    N = X.order
    axis = "x" if X.u.constant else "y"
    num, den = (X.v, X.u) if axis == "x" else (X.u, X.v)
    t = Jet.x(N)
    gamma = Jet.zero(N)
    for _ in range(N + 1):
        along = (lambda h: compose(h, t, gamma)) if axis == "x" else (lambda h: compose(h, gamma, t))
        slope = along(num) * along(den).reciprocal()
        gamma = Jet({(i + 1, 0): c / (i + 1) for (i, j), c in slope.coeffs.items() if j == 0}, N)
    coeffs = [gamma.coeff(n, 0) for n in range(N + 1)]
    return LeafCurve(axis, tuple(coeffs))


def contact_order(f: Jet, X: PlaneField) -> int | None:
    """Contact order ``k`` of ``{f = 0}`` with the leaf of ``X`` through 0.

    ``0`` means transverse.  ``None`` means no finite contact below the
    truncation order, i.e. the curve agrees with the leaf to that order.
    """
    if f.constant:
        raise ClassifyError("the curve {f = 0} must pass through the origin")
    if not f.coeff(1, 0) and not f.coeff(0, 1):
        raise ClassifyError("the curve {f = 0} must be regular at the origin")
    phi = rectify(X)
    g = phi(f)
    along = g.restrict_x_axis()
    for n, c in enumerate(along):
        if c:
            return n - 1
    return None


# -- right-equivalence type -------------------------------------------------

@dataclass(frozen=True)
class RightType:
    kind: str
    k: int | None = None
    sign: str | None = None

    def __str__(self):
        if self.kind == "A":
            return f"A_{self.k}({self.sign})"
        return self.kind


def right_type(f: Jet) -> RightType:
    """Hessian type of a critical germ; corank 1 via the splitting lemma.

    For corank 1 the nondegenerate variable is eliminated along the curve
    where its partial derivative vanishes, and the valuation ``k + 1`` of the
    restricted germ gives ``A_k``.  The sign is that of ``x^2 +- y^{k+1}``.
    """
    if f.constant:
        raise ClassifyError("right_type expects f(0) = 0")
    if f.coeff(1, 0) or f.coeff(0, 1):
        raise ClassifyError("right_type expects df(0) = 0")
    a, b, c = f.coeff(2, 0), f.coeff(1, 1), f.coeff(0, 2)
    disc = 4 * a * c - b * b
    if disc < 0:
        return RightType("MorseIndefinite", 1)
    if disc > 0:
        return RightType("MorseDefinite", 1)
    if not (a or b or c):
        return RightType("Other")
    N = f.order
    s, t = Jet.x(N), Jet.y(N)
    if a:
        lam = a
        g = compose(f, s - t * (b / (2 * a)), t)
    else:
        lam = c
        g = compose(f, t, s)
    # g = lam s^2 + (higher); eliminate s along g_s = 0
    gs = g.diff_x()
    sigma = Jet.zero(N)
    for _ in range(N):
        sigma = sigma - compose(gs, sigma, t).scale(1 / (2 * lam))
    h = compose(g, sigma, t)
    along = [h.coeff(0, n) for n in range(h.order + 1)]
    for n, coef in enumerate(along):
        if coef:
            k = n - 1
            if k % 2 == 0:
                sign = "+"
            else:
                sign = "+" if coef * lam > 0 else "-"
            return RightType("A", k, sign)
    return RightType("Other")


# -- the decision tree ------------------------------------------------------

def form_kind(a: OneForm) -> str:
    """``"regular"``, one of the named singular forms, or ``"singular"``."""
    X = field_of_form(a)
    if not X.is_singular():
        return "regular"
    N = X.order
    for name, (_, u_text, v_text) in NAMED_SINGULAR.items():
        model = PlaneField(parse_expr(u_text, N), parse_expr(v_text, N))
        # compare up to a nonzero constant factor
        if _constant_ratio(X, model) is not None:
            return name
    return "singular"


def _constant_ratio(X: PlaneField, model: PlaneField) -> Fraction | None:
    lead = next(((m, c, x) for mj, x in ((model.u, X.u), (model.v, X.v))
                 for m, c in mj.terms()), None)
    if lead is None:
        return None
    mono, c, x_jet = lead
    r = x_jet.coeff(*mono) / c
    if r and model * r == X:
        return r
    return None


def is_horizontal(X: PlaneField) -> bool:
    return X.v.is_zero() and bool(X.u.constant)


def _model(text: str, N: int) -> Jet:
    return parse_expr(text, N)


def classify(a: OneForm, f: Jet) -> NormalForm:
    """Match ``f X_a`` against the catalog of local models.

    Every answer carries the codimension of ``<f, L_{X_a} f>`` computed on
    jets and is only claimed up to the common truncation order.
    """
    X = field_of_form(a)
    N = min(f.order, X.order)
    f = f.truncate(N)
    X = X.truncate(N)
    cr = codim_of(f, X)
    notes = [f"valid at order {N} only"]

    def out(cls, rep, k=None, sign=None):
        return NormalForm(cls, cr.codim, rep, N, k=k, sign=sign, codim_result=cr, notes=tuple(notes))

    def abstain(reason):
        notes.append(reason)
        return out(NOT_IN_CATALOG, None)

    if X.is_singular():
        notes.append("X_a is singular at the origin")

    if f.constant:
        return out(REGULAR, Jet.const(1, N))

    if not cr.is_finite:
        return abstain(f"codimension not stable up to order {N} ({cr.describe()})")

    regular_curve = bool(f.coeff(1, 0) or f.coeff(0, 1))
    kind = form_kind(a)

    if kind == "regular":
        if not is_horizontal(X):
            notes.append("representative is written in flow-box coordinates where X_a = d/dx")
        if regular_curve:
            k = contact_order(f, X)
            if k is None:
                return abstain(f"curve agrees with the leaf of X_a up to order {N}")
            if k != cr.codim:
                return abstain(f"contact order {k} disagrees with codimension {cr.codim}")
            return out(REGULAR_CURVE, _model(f"y - x^{k + 1}", N), k=k)
        rt = right_type(f)
        c = cr.codim
        if rt.kind == "MorseIndefinite":
            return out(TWO_BRANCH, _model(f"x*y - x^{c}", N), k=c)
        if rt.kind == "A" and rt.k >= 2 and c == rt.k + 1:
            return out(BEAK, _model(f"x^2 {rt.sign} y^{rt.k + 1}", N), k=rt.k, sign=rt.sign)
        if rt.kind == "A" and rt.k == 2 and c == 4:
            return out(CUSP, _model("y^2 + x^3", N))
        return abstain(f"right type {rt} with codimension {c} matches no simple model")

    if regular_curve and cr.codim == 1 and kind in _NAMED_CLASS:
        cls, text = _NAMED_CLASS[kind]
        if kind == "closed_minus":
            notes.append("codimension 1 read as: {f = 0} transverse to both separatrices x = y, x = -y")
        return out(cls, _model(text, N))

    k = finite_determinacy_order(f, X)
    if k is None:
        return abstain("no jet of f up to the working order reproduces its codimension")
    return out(JET_REDUCED, f.jet_germ(k), k=k)
