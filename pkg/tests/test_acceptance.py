"""Acceptance suite: one PASS/FAIL line per criterion.

Run under pytest (lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import sympy

sys.path.insert(0, str(Path(__file__).parent))

from support import ACCEPTANCE, N, P, form  # noqa: E402
from kernelflow.classifier import classify  # noqa: E402
from kernelflow.forms import (JetDiffeo, OneForm, check_conformal, field_of_form,  # noqa: E402
                              pullback_field, pullback_form)
from kernelflow.jet import Jet  # noqa: E402
from kernelflow.local_algebra import codim_of  # noqa: E402
from kernelflow.portrait import FIGURES, PortraitSpec, build_scene, evaluator, integrate, render_svg, topology  # noqa: E402
from kernelflow.unfolding import build_unfolding, check_transversality, member  # noqa: E402


def verdict(name: str, problems: list[str], summary: str) -> None:
    ok = not problems
    detail = summary if ok else "; ".join(problems)
    ACCEPTANCE.append((name, ok, detail))
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, detail


# over d/dx, i.e. the form -dy
DX_FORM = form("0", "-1")
DX = field_of_form(DX_FORM)

TABLE = (
    [(f"y - x^{k + 1}", k) for k in range(1, 5)]
    + [(f"x*y - x^{k}", k) for k in range(2, 5)]
    + [(f"x^2 {s} y^{k + 1}", k + 1) for k in range(2, 5) for s in "+-"]
    + [("y^2 + x^3", 4)]
)


def groebner_codim(text: str) -> int:
    """dim Q[x,y]/<f, f_x> from a global Groebner basis.

    Every table entry has the origin as the only common zero of f and f_x,
    so the global quotient equals the local one.
    """
    x, y = sympy.symbols("x y")
    f = sympy.sympify(text.replace("^", "**"))
    G = sympy.groebner([f, sympy.diff(f, x)], x, y, order="grevlex")
    leads = [sympy.Poly(g, x, y).monoms(order="grevlex")[0] for g in G.exprs]
    bound = 20
    return sum(1 for i in range(bound) for j in range(bound)
               if not any(i >= a and j >= b for a, b in leads))


def test_criterion_1_codimension_table():
    problems = []
    slowest = 0.0
    for text, want in TABLE:
        t0 = time.perf_counter()
        got = codim_of(P(text), DX).codim
        dt = time.perf_counter() - t0
        slowest = max(slowest, dt)
        oracle = groebner_codim(text)
        if got != want or oracle != want:
            problems.append(f"{text}: jet codim {got}, groebner {oracle}, expected {want}")
        if dt >= 1.0:
            problems.append(f"{text}: {dt:.2f} s")
    verdict("criterion 1 (codimension table)", problems,
            f"{len(TABLE)} rows exact, oracle agrees, slowest {slowest * 1000:.1f} ms")


def test_criterion_2_liouville_suite():
    aL = form("0", "x")
    problems = []
    nf = classify(aL, P("x + y"))
    if nf.codim != 1 or nf.cls != "LiouvilleRegularCurve":
        problems.append(f"x + y: {nf.label} codim {nf.codim}")
    a, b = classify(aL, P("x - y^2")), classify(aL, P("y - x^2"))
    if not (a.codim == b.codim == 2):
        problems.append(f"codims {a.codim}, {b.codim}")
    if a == b or a.representative == b.representative:
        problems.append("x - y^2 and y - x^2 not separated")
    verdict("criterion 2 (Liouville suite)", problems,
            f"x + y codim 1; x - y^2 -> {a.label} {a.representative}, y - x^2 -> {b.label} {b.representative}")


def test_criterion_3_example_identities():
    n = 10
    b = OneForm(Jet.const(1, n), Jet.zero(n))
    phi = JetDiffeo(P("x + x^2", n), P("x + y", n))
    k = P("2 + x*y", n)
    a = OneForm(P("(2 + x*y)*(1 + 2*x)", n), Jet.zero(n))
    problems = []
    res = a.truncate(n - 1) - pullback_form(phi, b) * k
    if not res.is_zero():
        problems.append(f"a - k phi^*b = {res}")
    chk = check_conformal(a, b, phi, k)
    if not chk.field_residual.is_zero():
        problems.append(f"X_a - k det phi^*X_b = {chk.field_residual}")
    f1 = P("exp(x)*(2*x + y + x^2)", n)
    f2 = P("x + y", n)
    lhs = field_of_form(a) * f1
    rhs = pullback_field(phi, field_of_form(b) * f2) * (P("exp(x)", n) * k)
    resid = lhs.truncate(rhs.order) - rhs
    if not resid.is_zero():
        problems.append(f"f1 X_a - e^x (2+xy) phi^*(f2 X_b) = {resid}")
    verdict("criterion 3 (conformal-equivalence example)", problems,
            "three identities with zero residual at order 10")


def test_criterion_4_first_integral_example():
    aG = OneForm.exact(P("x^3/3 - x^2/2 + y^2/2", N + 1))
    problems = []
    nf = classify(aG, P("exp(x^2)"))
    if (nf.cls, nf.codim) != ("Regular", 0):
        problems.append(f"exp(x^2): {nf.label} codim {nf.codim}")
    nf = classify(aG, P("x + y^2*cos(y)"))
    if nf.codim != 2 or nf.representative != P("x + y^2"):
        problems.append(f"x + y^2 cos y: {nf.label} codim {nf.codim} representative {nf.representative}")
    for a in range(-2, 3):
        for b in range(-2, 3):
            want_one = (a != 0 and b == 0) or (a == 0 and b != 0) or (a * b != 0 and a * a != b * b)
            got = classify(aG, P(f"{a}*x + {b}*y")).codim
            if (got == 1) != want_one:
                problems.append(f"a={a}, b={b}: codim {got}")
            if a == b != 0 and got != 2:
                problems.append(f"a=b={a}: codim {got}, expected 2")
    verdict("criterion 4 (first-integral example)", problems,
            "exp(x^2) regular; x + y^2 cos y -> x + y^2 codim 2; 25-cell grid matches")


def _criterion_inputs():
    aL = form("0", "x")
    return [(DX_FORM, t) for t, _ in TABLE] + [(aL, "x + y"), (aL, "x - y^2"), (aL, "y - x^2")]


def test_criterion_5_transversality():
    problems = []
    count = 0
    for a, text in _criterion_inputs():
        nf = classify(a, P(text))
        F = build_unfolding(nf, a)
        count += 1
        if not check_transversality(F) or len(F.monomials) != nf.codim:
            problems.append(f"{text}: family {F.describe()} not transversal")
    verdict("criterion 5 (transversality)", problems, f"{count} families transversal")


# -- criterion 6 --------------------------------------------------------------

def _rand(rng, lo, hi, only_y=False, n=N):
    return Jet({(i, d - i): rng.randint(-2, 2) for d in range(lo, hi + 1) for i in range(d + 1)
                if rng.random() < 0.4 and not (only_y and i)}, n)


def _unit(rng):
    return _rand(rng, 1, 2) + rng.choice([1, -1, 2, -3])


def _leafwise(rng):
    # (A(x, y), B(y)) preserves the foliation y = const of dy and (1 + x) dy
    return JetDiffeo(Jet.x(N) * rng.choice([1, -1, 2]) + _rand(rng, 2, 3),
                     Jet.y(N) * rng.choice([1, -1, 3]) + _rand(rng, 2, 3, only_y=True))


def _liouville_sym(rng):
    # x U(x, y) dB(y) is a multiple of x dy
    U = _unit(rng)
    return JetDiffeo(Jet.x(N) * U, Jet.y(N) * rng.choice([1, -2]) + _rand(rng, 2, 3, only_y=True))


def _radial(rng, rho):
    return Jet.const(1, N) + rho * rng.randint(-2, 2) + rho * rho * rng.randint(-1, 1)


def _closed_sym(rng, sign):
    # rational rotations (sign +1) or boosts (sign -1) times a radial rescaling
    x, y = Jet.x(N), Jet.y(N)
    if sign > 0:
        c, s = rng.choice([(1, 0), (0, 1), (Fraction(3, 5), Fraction(4, 5)), (-1, 0)])
        L = (x * c - y * s, x * s + y * c)
    else:
        ch, sh = rng.choice([(1, 0), (Fraction(5, 4), Fraction(3, 4)), (-1, 0), (Fraction(5, 4), Fraction(-3, 4))])
        L = (x * ch + y * sh, x * sh + y * ch)
    rho = x * x + y * y * sign
    r = _radial(rng, rho)
    return JetDiffeo(L[0] * r, L[1] * r)


def _catalog():
    a1, aD = form("0", "1"), form("0", "1 + x")
    rows = [(a1, t, _leafwise) for t in
            ["x - y", "y - x^2", "y - x^3", "y - x^4", "x*y - x^2", "x*y - x^3", "x*y - x^4",
             "x^2 + y^3", "x^2 + y^4", "x^2 - y^4", "x^2 + y^5", "y^2 + x^3"]]
    rows += [(aD, "y - x^2", _leafwise), (aD, "y - x^3", _leafwise)]
    rows += [(form("0", "x"), "x + y", _liouville_sym)]
    rows += [(form("x", "y"), "x", lambda r: _closed_sym(r, 1)),
             (form("x", "-y"), "x", lambda r: _closed_sym(r, -1))]
    return rows


def test_criterion_6_recognizer_robustness():
    rng = random.Random(6)
    problems = []
    t0 = time.perf_counter()
    trials = 0
    for a, text, sym in _catalog():
        f0 = P(text)
        base = classify(a, f0)
        key = (base.cls, base.k, base.sign)
        for _ in range(100):
            phi = sym(rng)
            f = _unit(rng) * phi(f0)
            nf = classify(a, f)
            trials += 1
            if (nf.cls, nf.k, nf.sign) != key:
                problems.append(f"{text}: {base.label} became {nf.label}")
                break
    dt = time.perf_counter() - t0
    if dt >= 60:
        problems.append(f"runtime {dt:.1f} s")
    verdict("criterion 6 (recognizer robustness)", problems,
            f"{trials} randomized inputs over {len(_catalog())} models in {dt:.1f} s")


# -- criterion 7 --------------------------------------------------------------

def _drift(X, g: Jet, spec) -> float:
    gv = evaluator(g)
    worst = 0.0
    for tr in integrate(X, spec).trajectories:
        vals = gv(tr.points[:, 0], tr.points[:, 1])
        worst = max(worst, float(np.abs(vals - vals[0]).max()))
    return worst


def test_criterion_7_portraits(tmp_path):
    problems = []
    spec = PortraitSpec(window=0.5, step=1e-3, seed_grid=(5, 5))
    F = FIGURES["closed_plus"].family()
    _, X = member(F, (0,))
    d1 = _drift(X, P("x^2 + y^2"), spec)
    if d1 > 1e-5:
        problems.append(f"a2+ drift {d1:.2e}")
    g = P("x^3/3 - x^2/2 + y^2/2", N + 1)
    Xg = field_of_form(OneForm.exact(g)) * P("x + y^2*cos(y)")
    d2 = _drift(Xg, g.truncate(N), spec)
    if d2 > 1e-5:
        problems.append(f"first-integral drift {d2:.2e}")

    panel = PortraitSpec(seed_grid=(5, 5))
    expect = {
        # (equilibrium components, X_a zero curves, X_a zero points, curves cross, point on curve)
        "darboux": [(1, 0, 0, False, False)] * 3,
        "liouville": [(1, 1, 0, False, False), (1, 1, 0, True, False), (1, 1, 0, False, False)],
        "closed_plus": [(1, 0, 1, False, False), (1, 0, 1, False, True), (1, 0, 1, False, False)],
        "closed_minus": [(1, 0, 1, False, False), (1, 0, 1, False, True), (1, 0, 1, False, False)],
    }
    for name, rows in expect.items():
        pre = FIGURES[name]
        fam = pre.family()
        for c, want in zip(pre.c, rows):
            spec_c = PortraitSpec(window=pre.window, seed_grid=panel.seed_grid)
            scene = build_scene(fam, (c,), spec_c)
            render_svg(scene, tmp_path / f"{name}_{c:+.1f}.svg")
            t = topology(scene)
            got = (t["equilibrium_components"], t["singular_curve_components"], t["singular_points"],
                   t["curves_cross"], t["point_on_curve"])
            if got != want:
                problems.append(f"{name} c={c}: {got} != {want}")
    verdict("criterion 7 (portrait physics and figure topology)", problems,
            f"drift {d1:.1e} (x^2+y^2), {d2:.1e} (g); 12 panels match")


if __name__ == "__main__":
    import tempfile

    failures = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion"):
            try:
                if "tmp_path" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
                    with tempfile.TemporaryDirectory() as d:
                        fn(Path(d))
                else:
                    fn()
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
