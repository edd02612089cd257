from __future__ import annotations

import random

from hypothesis import strategies as st

from kernelflow.forms import JetDiffeo, OneForm, PlaneField
from kernelflow.jet import Jet
from kernelflow.parse import parse_expr

N = 12


def P(text: str, order: int = N) -> Jet:
    return parse_expr(text, order)


def form(p: str, q: str, order: int = N) -> OneForm:
    return OneForm(P(p, order), P(q, order))


def field(u: str, v: str, order: int = N) -> PlaneField:
    return PlaneField(P(u, order), P(v, order))


small = st.integers(min_value=-3, max_value=3)


@st.composite
def jets(draw, order=5, max_deg=4, const=None, min_deg=0):
    terms = {}
    for d in range(min_deg, max_deg + 1):
        for i in range(d + 1):
            c = draw(small)
            if c:
                terms[(i, d - i)] = c
    if const is not None:
        terms[(0, 0)] = draw(const)
    return Jet(terms, order)


@st.composite
def units(draw, order=5):
    return draw(jets(order=order, max_deg=3, const=st.sampled_from([-2, -1, 1, 2, 3])))


@st.composite
def diffeos(draw, order=5):
    a, b, c, d = draw(st.tuples(small, small, small, small).filter(lambda t: t[0] * t[3] - t[1] * t[2]))
    A = draw(jets(order=order, max_deg=3, min_deg=2)) + Jet({(1, 0): a, (0, 1): b}, order)
    B = draw(jets(order=order, max_deg=3, min_deg=2)) + Jet({(1, 0): c, (0, 1): d}, order)
    return JetDiffeo(A, B)




# one (criterion, ok, detail) row per acceptance criterion, printed in the terminal summary
ACCEPTANCE: list[tuple[str, bool, str]] = []
