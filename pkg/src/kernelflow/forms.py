"""1-forms, vector fields and diffeomorphism germs of the plane at jet level."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from kernelflow.jet import Jet, JetError, compose

# Sign of the form-to-field correspondence: X_{P dx + Q dy} = ORIENTATION * (-Q, P).
# The catalog fields (Darboux, Liouville, closed Morse, dg) all use +1.
ORIENTATION = 1


def _same_order(a: Jet, b: Jet) -> tuple[Jet, Jet]:
    n = min(a.order, b.order)
    return a.truncate(n), b.truncate(n)


@dataclass(frozen=True)
class OneForm:
    """``P dx + Q dy``."""

    P: Jet
    Q: Jet

    def __post_init__(self):
        P, Q = _same_order(self.P, self.Q)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "Q", Q)

    @property
    def order(self) -> int:
        return self.P.order

    @classmethod
    def exact(cls, g: Jet) -> "OneForm":
        """The differential ``dg``."""
        return cls(g.diff_x(), g.diff_y())

    def __add__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.P + other.P, self.Q + other.Q)

    def __sub__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.P - other.P, self.Q - other.Q)

    def __mul__(self, k) -> "OneForm":
        return OneForm(self.P * k, self.Q * k)

    __rmul__ = __mul__

    def __call__(self, X: "PlaneField") -> Jet:
        """Evaluate the form on a field: ``P u + Q v``."""
        return self.P * X.u + self.Q * X.v

    def is_zero(self) -> bool:
        return self.P.is_zero() and self.Q.is_zero()

    def truncate(self, k: int) -> "OneForm":
        return OneForm(self.P.truncate(k), self.Q.truncate(k))

    def equals_upto(self, other: "OneForm") -> bool:
        return self.P.equals_upto(other.P) and self.Q.equals_upto(other.Q)

    def to_json(self) -> dict:
        return {"P": self.P.to_json(), "Q": self.Q.to_json()}

    @classmethod
    def from_json(cls, data: Mapping) -> "OneForm":
        return cls(Jet.from_json(data["P"]), Jet.from_json(data["Q"]))

    def __str__(self):
        return f"({self.P}) dx + ({self.Q}) dy"


@dataclass(frozen=True)
class PlaneField:
    """``u d/dx + v d/dy``."""

    u: Jet
    v: Jet

    def __post_init__(self):
        u, v = _same_order(self.u, self.v)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def order(self) -> int:
        return self.u.order

    def __add__(self, other: "PlaneField") -> "PlaneField":
        return PlaneField(self.u + other.u, self.v + other.v)

    def __sub__(self, other: "PlaneField") -> "PlaneField":
        return PlaneField(self.u - other.u, self.v - other.v)

    def __mul__(self, f) -> "PlaneField":
        """Pointwise multiple ``f X`` by a jet or scalar."""
        return PlaneField(self.u * f, self.v * f)

    __rmul__ = __mul__

    def __neg__(self) -> "PlaneField":
        return PlaneField(-self.u, -self.v)

    def at_origin(self) -> tuple:
        return self.u.constant, self.v.constant

    def is_singular(self) -> bool:
        """True when the field vanishes at the origin."""
        return not self.u.constant and not self.v.constant

    def is_zero(self) -> bool:
        return self.u.is_zero() and self.v.is_zero()

    def truncate(self, k: int) -> "PlaneField":
        return PlaneField(self.u.truncate(k), self.v.truncate(k))

    def equals_upto(self, other: "PlaneField") -> bool:
        return self.u.equals_upto(other.u) and self.v.equals_upto(other.v)

    def linear_part(self) -> tuple[tuple, tuple]:
        """Jacobian matrix at the origin, rows (u_x, u_y), (v_x, v_y)."""
        return ((self.u.coeff(1, 0), self.u.coeff(0, 1)),
                (self.v.coeff(1, 0), self.v.coeff(0, 1)))

    def to_json(self) -> dict:
        return {"u": self.u.to_json(), "v": self.v.to_json()}

    @classmethod
    def from_json(cls, data: Mapping) -> "PlaneField":
        return cls(Jet.from_json(data["u"]), Jet.from_json(data["v"]))

    def __str__(self):
        return f"({self.u}) d/dx + ({self.v}) d/dy"


@dataclass(frozen=True)
class JetDiffeo:
    """Origin-preserving diffeomorphism germ ``(x, y) -> (A, B)``."""

    A: Jet
    B: Jet

    def __post_init__(self):
        A, B = _same_order(self.A, self.B)
        if A.constant or B.constant:
            raise JetError("diffeomorphism must fix the origin")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        if not self.jacobian_det().constant:
            raise JetError("Jacobian of the map is singular at the origin")

    @classmethod
    def identity(cls, order: int) -> "JetDiffeo":
        return cls(Jet.x(order), Jet.y(order))

    @property
    def order(self) -> int:
        return self.A.order

    def jacobian(self) -> tuple[tuple[Jet, Jet], tuple[Jet, Jet]]:
        return ((self.A.diff_x(), self.A.diff_y()),
                (self.B.diff_x(), self.B.diff_y()))

    def jacobian_det(self) -> Jet:
        (ax, ay), (bx, by) = self.jacobian()
        return ax * by - ay * bx

    def __call__(self, f: Jet) -> Jet:
        """Pullback of a function, ``f o phi``."""
        return compose(f, self.A, self.B)

    def then(self, other: "JetDiffeo") -> "JetDiffeo":
        """The composite map ``other o self``."""
        return JetDiffeo(compose(other.A, self.A, self.B), compose(other.B, self.A, self.B))

    def truncate(self, k: int) -> "JetDiffeo":
        return JetDiffeo(self.A.truncate(k), self.B.truncate(k))

    def to_json(self) -> dict:
        return {"A": self.A.to_json(), "B": self.B.to_json()}

    def __str__(self):
        return f"(x, y) -> ({self.A}, {self.B})"


def field_of_form(a: OneForm) -> PlaneField:
    """The field ``X_a`` spanning the kernel of ``a``: ``(-Q, P)``."""
    if ORIENTATION == 1:
        return PlaneField(-a.Q, a.P)
    return PlaneField(a.Q, -a.P)


def lie_derivative(X: PlaneField, f: Jet) -> Jet:
    """``L_X f = u f_x + v f_y``, known to one order less than its inputs."""
    return X.u * f.diff_x() + X.v * f.diff_y()


def pullback_form(phi: JetDiffeo, b: OneForm) -> OneForm:
    """``phi^* b``; differentiating ``phi`` costs one order."""
    (ax, ay), (bx, by) = phi.jacobian()
    P = phi(b.P)
    Q = phi(b.Q)
    return OneForm(P * ax + Q * bx, P * ay + Q * by)


def pullback_field(phi: JetDiffeo, Y: PlaneField) -> PlaneField:
    """``phi^* Y = (d phi)^{-1} (Y o phi)``."""
    (ax, ay), (bx, by) = phi.jacobian()
    inv_det = phi.jacobian_det().reciprocal()
    u = phi(Y.u)
    v = phi(Y.v)
    return PlaneField((by * u - ay * v) * inv_det, (ax * v - bx * u) * inv_det)


def pushforward_field(phi: JetDiffeo, X: PlaneField) -> PlaneField:
    """``d phi . X`` expressed at the source point (not recomposed)."""
    (ax, ay), (bx, by) = phi.jacobian()
    return PlaneField(ax * X.u + ay * X.v, bx * X.u + by * X.v)


@dataclass(frozen=True)
class ConformalCheck:
    holds: bool
    form_residual: OneForm
    field_residual: PlaneField

    def __bool__(self):
        return self.holds


def check_conformal(a: OneForm, b: OneForm, phi: JetDiffeo, k: Jet) -> ConformalCheck:
    """Check ``a = k phi^* b`` and the induced ``X_a = k det(d phi) phi^* X_b``.

    Residuals are returned as jets so callers can assert exact vanishing.
    """
    if not k.constant:
        raise JetError("conformal factor must not vanish at the origin")
    rhs = pullback_form(phi, b) * k
    n = min(a.order, rhs.order)
    form_res = a.truncate(n) - rhs.truncate(n)
    Xa = field_of_form(a)
    Xb_pulled = pullback_field(phi, field_of_form(b)) * (k * phi.jacobian_det())
    m = min(Xa.order, Xb_pulled.order)
    field_res = Xa.truncate(m) - Xb_pulled.truncate(m)
    return ConformalCheck(form_res.is_zero() and field_res.is_zero(), form_res, field_res)


def is_first_integral(X: PlaneField, g: Jet) -> bool:
    return lie_derivative(X, g).is_zero()
