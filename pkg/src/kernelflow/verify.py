"""Built-in identity suite: conformal-equivalence identities, catalog fields, codim table.

Each check returns ``(ok, detail)``.  ``run`` prints one table row per check
and returns the number of failures.
"""

from __future__ import annotations

import random
from typing import Callable

from kernelflow.forms import (JetDiffeo, OneForm, PlaneField, check_conformal, field_of_form,
                              is_first_integral, pullback_field, pullback_form)
from kernelflow.jet import Jet
from kernelflow.local_algebra import codim_of
from kernelflow.parse import parse_expr

ORDER = 10


def _p(text: str, n: int = ORDER) -> Jet:
    return parse_expr(text, n)


def _example():
    b = OneForm(_p("1"), _p("0"))
    phi = JetDiffeo(_p("x + x^2"), _p("x + y"))
    k = _p("2 + x*y")
    a = OneForm(_p("(2 + x*y)*(1 + 2*x)"), _p("0"))
    return a, b, phi, k


def check_example_form() -> tuple[bool, str]:
    a, b, phi, k = _example()
    res = a - pullback_form(phi, b) * k
    return res.is_zero(), f"a - k phi^*b = {res}"


def check_example_field() -> tuple[bool, str]:
    a, b, phi, k = _example()
    chk = check_conformal(a, b, phi, k)
    return chk.field_residual.is_zero(), f"X_a - k det(dphi) phi^*X_b = {chk.field_residual}"


def check_example_multiplier() -> tuple[bool, str]:
    a, b, phi, k = _example()
    lam = _p("exp(x)")
    f2 = _p("x + y")
    f1 = _p("exp(x)*(2*x + y + x^2)")
    if not (f1 - lam * phi(f2)).is_zero():
        return False, "f1 != exp(x) f2(phi)"
    lhs = field_of_form(a) * f1
    rhs = pullback_field(phi, field_of_form(b) * f2) * (lam * k * phi.jacobian_det())
    res = lhs.truncate(rhs.order) - rhs
    return res.is_zero(), f"f1 X_a - exp(x) k det(dphi) phi^*(f2 X_b) = {res}"


_CATALOG = [
    ("0", "1 + x", "-(1 + x)", "0"),           # Darboux
    ("0", "x", "-x", "0"),                     # Liouville
    ("x", "y", "-y", "x"),                     # closed Morse +
    ("x", "-y", "y", "x"),                     # closed Morse -
    ("x^2 - x", "y", "-y", "x^2 - x"),         # dg for g = x^3/3 - x^2/2 + y^2/2
]


def check_catalog_fields() -> tuple[bool, str]:
    bad = []
    for P, Q, u, v in _CATALOG:
        X = field_of_form(OneForm(_p(P), _p(Q)))
        if not X.equals_upto(PlaneField(_p(u), _p(v))):
            bad.append(f"({P}) dx + ({Q}) dy -> {X}")
    return not bad, "; ".join(bad) or f"{len(_CATALOG)} fields match"


def check_diagonalizing_map() -> tuple[bool, str]:
    phi = JetDiffeo(_p("x + y"), _p("x - y"))
    Y = PlaneField(_p("x"), _p("-y"))
    got = pullback_field(phi, Y)
    want = field_of_form(OneForm(_p("x"), _p("-y")))
    return got.equals_upto(want), f"phi^*(x d/dx - y d/dy) = {got}"


def check_first_integral() -> tuple[bool, str]:
    g = _p("x^3/3 - x^2/2 + y^2/2", ORDER + 1)
    X = field_of_form(OneForm.exact(g)) * _p("exp(x^2)")
    return is_first_integral(X, g.truncate(X.order)), "L_{f X_g} g = 0"


def _random_jet(rng: random.Random, n: int, const: int | None = None, lin=None) -> Jet:
    terms = {}
    for d in range(2, 4):
        for i in range(d + 1):
            if rng.random() < 0.5:
                terms[(i, d - i)] = rng.randint(-3, 3)
    if const is not None:
        terms[(0, 0)] = const
    if lin:
        terms[(1, 0)], terms[(0, 1)] = lin
    return Jet(terms, n)


def _random_diffeo(rng: random.Random, n: int) -> JetDiffeo:
    while True:
        a, b, c, d = (rng.randint(-2, 2) for _ in range(4))
        if a * d - b * c:
            return JetDiffeo(_random_jet(rng, n, lin=(a, b)), _random_jet(rng, n, lin=(c, d)))


def check_lemma_roundtrip(trials: int = 20, seed: int = 7) -> tuple[bool, str]:
    rng = random.Random(seed)
    n = 6
    for t in range(trials):
        b = OneForm(_random_jet(rng, n, const=rng.randint(-2, 2)), _random_jet(rng, n, const=rng.randint(-2, 2)))
        phi = _random_diffeo(rng, n)
        k = _random_jet(rng, n, const=rng.choice([-2, -1, 1, 3]))
        a = pullback_form(phi, b) * k
        if not check_conformal(a, b, phi, k):
            return False, f"trial {t}: identity fails"
    return True, f"{trials} random (b, phi, k)"


def check_proposition_roundtrip(trials: int = 20, seed: int = 11) -> tuple[bool, str]:
    rng = random.Random(seed)
    n = 6
    for t in range(trials):
        b = OneForm(_random_jet(rng, n, const=1), _random_jet(rng, n))
        phi = _random_diffeo(rng, n)
        k = _random_jet(rng, n, const=rng.choice([-1, 2]))
        lam = _random_jet(rng, n, const=rng.choice([1, -3]))
        f2 = _random_jet(rng, n, lin=(rng.randint(-2, 2), 1))
        a = pullback_form(phi, b) * k
        f1 = lam * phi(f2)
        lhs = field_of_form(a) * f1
        rhs = pullback_field(phi, field_of_form(b) * f2) * (lam * k * phi.jacobian_det())
        if not (lhs.truncate(rhs.order) - rhs).is_zero():
            return False, f"trial {t}: f1 X_a != lam k det(dphi) phi^*(f2 X_b)"
    return True, f"{trials} random (b, phi, k, lam, f2)"


CODIM_TABLE = (
    [(f"y - x^{k + 1}", k) for k in range(1, 5)]
    + [(f"x*y - x^{k}", k) for k in range(2, 5)]
    + [(f"x^2 {s} y^{k + 1}", k + 1) for k in range(2, 5) for s in "+-"]
    + [("y^2 + x^3", 4)]
)


def check_codim_table(order: int = 12) -> tuple[bool, str]:
    X = PlaneField(Jet.const(1, order), Jet.zero(order))
    bad = []
    for text, want in CODIM_TABLE:
        got = codim_of(parse_expr(text, order), X).codim
        if got != want:
            bad.append(f"{text}: {got} != {want}")
    return not bad, "; ".join(bad) or f"{len(CODIM_TABLE)} rows over d/dx"


CHECKS: dict[str, Callable[[], tuple[bool, str]]] = {
    "example_form_pullback": check_example_form,
    "example_field_identity": check_example_field,
    "example_multiplier_identity": check_example_multiplier,
    "catalog_fields": check_catalog_fields,
    "diagonalizing_map": check_diagonalizing_map,
    "first_integral": check_first_integral,
    "lemma_roundtrip": check_lemma_roundtrip,
    "proposition_roundtrip": check_proposition_roundtrip,
    "codim_table": check_codim_table,
}


def run(out=print) -> int:
    failures = 0
    width = max(map(len, CHECKS))
    for name, fn in CHECKS.items():
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        failures += not ok
        out(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  {detail}")
    out(f"{len(CHECKS) - failures}/{len(CHECKS)} checks passed")
    return failures
