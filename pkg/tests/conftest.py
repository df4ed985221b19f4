from fractions import Fraction

import pytest
from hypothesis import strategies as st

from dmodres.localcohom import QuasiHomogeneousInput, poly_ring
from dmodres.parse import parse_operator
from dmodres.weyl import Operator, Signature

CASES = {
    "cusp": ("x1^2+x2^3", 2, (Fraction(1, 2), Fraction(1, 3))),
    "a1": ("x1^2+x2^2", 2, (Fraction(1, 2),) * 2),
    "quadric4": ("x1^2+x2^2+x3^2+x4^2", 4, (Fraction(1, 2),) * 4),
}


def qh_input(name):
    text, n, w = CASES[name]
    return QuasiHomogeneousInput(parse_operator(text, poly_ring(n)), w)


@pytest.fixture(scope="session")
def cusp():
    return qh_input("cusp")


@pytest.fixture(scope="session")
def a1():
    return qh_input("a1")


@pytest.fixture(scope="session")
def quadric4():
    return qh_input("quadric4")


coefficients = st.fractions(min_value=-5, max_value=5, max_denominator=4).filter(bool)


@st.composite
def operators(draw, sig, max_terms=3, max_exp=2):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        mono = tuple(draw(st.integers(0, max_exp)) for _ in range(2 * sig.nvars))
        mono += (draw(st.integers(0, max_exp)) if sig.homogenized else 0,)
        terms[mono] = draw(coefficients)
    return Operator(sig, terms)


@st.composite
def signatures(draw, homogenized=None):
    n = draw(st.integers(0, 2))
    p = draw(st.integers(0 if n else 1, 1))
    hom = draw(st.booleans()) if homogenized is None else homogenized
    return Signature(n, p, homogenized=hom)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
