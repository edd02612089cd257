"""Transversal unfoldings ``(f + sum c_i m_i) X_a`` of catalog models."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from kernelflow.classifier import NormalForm, form_kind, is_horizontal
from kernelflow.forms import OneForm, PlaneField, field_of_form
from kernelflow.jet import Jet, JetError, Monomial, _as_fraction, format_monomial
from kernelflow.local_algebra import codim_of, ideal_image, tangent_ideal


class UnfoldingError(JetError):
    pass


@dataclass(frozen=True)
class UnfoldingFamily:
    base: Jet
    monomials: tuple[Monomial, ...]
    form: OneForm

    @property
    def parameter_names(self) -> tuple[str, ...]:
        return tuple(f"c{i}" for i in range(len(self.monomials)))

    @property
    def field(self) -> PlaneField:
        return field_of_form(self.form)

    def describe(self) -> str:
        """Human-readable family, e.g. ``y + c0 + c1*x - x^3``."""
        extra = " + ".join(
            name if m == (0, 0) else f"{name}*{format_monomial(m)}"
            for name, m in zip(self.parameter_names, self.monomials))
        return f"{self.base}" + (f" + {extra}" if extra else "")

    def to_json(self) -> dict:
        return {"base": self.base.to_json(),
                "monomials": [format_monomial(m) for m in self.monomials],
                "parameters": list(self.parameter_names),
                "form": self.form.to_json()}

    @classmethod
    def from_json(cls, data: Mapping) -> "UnfoldingFamily":
        from kernelflow.parse import parse_expr

        base = Jet.from_json(data["base"])
        monos = []
        for text in data["monomials"]:
            j = parse_expr(text, base.order)
            ((m, _),) = j.terms()
            monos.append(m)
        return cls(base, tuple(monos), OneForm.from_json(data["form"]))


def _family_form(nf: NormalForm, a: OneForm) -> OneForm:
    # catalog models of regular forms live in flow-box coordinates, X = -d/dx
    if form_kind(a) == "regular" and not is_horizontal(field_of_form(a)) \
            and nf.cls not in ("Regular", "JetReduced", "NotInCatalog"):
        N = a.order
        return OneForm(Jet.zero(N), Jet.const(1, N))
    return a


def build_unfolding(nf: NormalForm, a: OneForm) -> UnfoldingFamily:
    """Deform the representative along the graded-lex cobasis of its tangent ideal."""
    if nf.codim is None or nf.representative is None:
        raise UnfoldingError(f"{nf.label} has no finite codimension to unfold")
    form = _family_form(nf, a)
    X = field_of_form(form)
    N = min(nf.representative.order, X.order)
    base = nf.representative.truncate(N)
    cr = codim_of(base, X.truncate(N))
    if cr.codim != nf.codim:
        raise UnfoldingError(
            f"representative has codim {cr.codim}, classification says {nf.codim}")
    return UnfoldingFamily(base, tuple(cr.cobasis), form.truncate(N))


def check_transversality(F: UnfoldingFamily) -> bool:
    """Deformation directions together with the tangent ideal fill the local ring."""
    X = F.field
    ideal = tangent_ideal(F.base, X)
    cr = codim_of(F.base, X)
    if not cr.is_finite:
        return False
    img = ideal_image(ideal, cr.stable_at)
    return img.extended_rank(list(F.monomials)) == img.ambient_dim


def member(F: UnfoldingFamily, c: Sequence) -> tuple[Jet, PlaneField]:
    """``f_c = base + sum c_i m_i`` and the field ``f_c X_a``."""
    if len(c) != len(F.monomials):
        raise UnfoldingError(f"expected {len(F.monomials)} parameters, got {len(c)}")
    N = F.base.order
    f = F.base
    for ci, m in zip(c, F.monomials):
        ci = _as_fraction(ci)
        if ci:
            f = f + Jet.monomial(m[0], m[1], N, ci)
    return f, F.field * f


def parse_parameters(text: str) -> list[Fraction]:
    """``"-1/4, 0.3"`` -> ``[-1/4, 3/10]``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise UnfoldingError(f"empty parameter in {text!r}")
        try:
            out.append(Fraction(part))
        except ValueError as exc:
            raise UnfoldingError(f"bad parameter value {part!r}") from exc
    return out


def unfold_germ(f: Jet, a: OneForm) -> UnfoldingFamily:
    """Cobasis family of ``f`` itself, for germs the catalog does not name."""
    cr = codim_of(f, field_of_form(a))
    if not cr.is_finite:
        raise UnfoldingError(f"no finite codimension to unfold ({cr.describe()})")
    N = min(f.order, a.order)
    return UnfoldingFamily(f.truncate(N), tuple(cr.cobasis), a.truncate(N))
