from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from dmodres.filtration import OrderSpec
from dmodres.groebner import buchberger, contains
from dmodres.localcohom import (InvariantError, LaurentElement, QuasiHomogeneousInput, act,
                                annihilates, bernstein_sato_qh, build_M_presentation,
                                certify_bfunction, certify_involutive, cyclic_generator,
                                milnor_data, polar_generators, poly_ring, presentation_prop1,
                                presentation_prop2, presentation_prop4, s_operators, theta,
                                weyl_ring)
from dmodres.parse import parse_operator
from dmodres.restriction import BFunction
from dmodres.weyl import Operator

from conftest import operators, qh_input


def to_sympy(el: LaurentElement, xs):
    """Independent route: the element as a sympy rational function."""
    def poly(g):
        out = 0
        for m, c in g.terms.items():
            term = sympy.Rational(c.numerator, c.denominator)
            for x, a in zip(xs, m):
                term *= x ** a
            out += term
        return out
    F = poly(el.F)
    return sum((poly(g) / F ** j for j, g in el.parts.items()), sympy.Integer(0))


def sympy_act(P: Operator, expr, xs):
    nv = P.sig.nvars
    out = 0
    for m, c in P.terms.items():
        term = expr
        for i in range(nv):
            if m[nv + i]:
                term = sympy.diff(term, xs[i], m[nv + i])
        for i in range(nv):
            term *= xs[i] ** m[i]
        out += sympy.Rational(c.numerator, c.denominator) * term
    return out


def is_polynomial(expr, xs):
    num, den = sympy.fraction(sympy.cancel(sympy.together(expr)))
    return sympy.Poly(den, *xs).is_ground


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_act_matches_calculus(data):
    q = qh_input("cusp")
    sig = weyl_ring(2)
    P = data.draw(operators(sig, max_terms=3, max_exp=2))
    j = data.draw(st.integers(1, 3))
    el = LaurentElement.inverse_power(q.f, j, polar=False)
    xs = sympy.symbols("x1:3")
    got = to_sympy(act(P, el), xs)
    want = sympy_act(P, to_sympy(el, xs), xs)
    assert sympy.simplify(got - want) == 0


@settings(max_examples=20, deadline=None)
@given(st.data())
def test_act_is_a_module_action(data):
    q = qh_input("a1")
    sig = weyl_ring(2)
    P = data.draw(operators(sig, max_terms=2, max_exp=2))
    Q = data.draw(operators(sig, max_terms=2, max_exp=2))
    el = cyclic_generator(q, 2, polar=True)
    assert act(P * Q, el) == act(P, act(Q, el))
    assert act(P + Q, el) == act(P, el) + act(Q, el)


@pytest.mark.parametrize("name", ["cusp", "a1", "quadric4"])
def test_euler_eigenvalue(name):
    q = qh_input(name)
    sig = weyl_ring(q.n)
    for j in (1, 2, 3):
        el = LaurentElement.inverse_power(q.f, j, polar=False)
        assert act(theta(q, sig), el) == el.scale(-j)
        for S in s_operators(q, sig).values():
            assert act(S, el).is_zero()


def test_polar_part_drops_polynomials(cusp):
    el = LaurentElement(cusp.f, {1: cusp.f})
    assert el.is_zero()
    assert not LaurentElement(cusp.f, {1: cusp.f}, polar=False).is_zero()


def test_input_validation():
    R = poly_ring(2)
    with pytest.raises(InvariantError):
        QuasiHomogeneousInput(parse_operator("x1^2+x2^3", R), (Fraction(1, 2), Fraction(1, 2)))
    with pytest.raises(InvariantError):
        QuasiHomogeneousInput(parse_operator("x1^2", R), (Fraction(1, 2), Fraction(1, 2)))
    with pytest.raises(InvariantError):
        QuasiHomogeneousInput(parse_operator("x1^2+x2^2", R), (Fraction(1, 2),))


def test_milnor_data(cusp, quadric4):
    md = milnor_data(cusp)
    assert md.mu == 2
    assert sorted(md.weighted_degrees) == [0, Fraction(1, 3)]
    assert milnor_data(quadric4).basis == ((0, 0, 0, 0),)


@pytest.mark.parametrize("name, roots, kprime, k1", [
    ("cusp", [Fraction(-7, 6), Fraction(-1), Fraction(-5, 6)], 1, 0),
    ("a1", [Fraction(-1)], 1, 0),
    ("quadric4", [Fraction(-2), Fraction(-1)], 2, 1),
])
def test_bernstein_sato_closed_form(name, roots, kprime, k1):
    bs = bernstein_sato_qh(qh_input(name))
    assert sorted({r for r, _ in bs.b_f.roots}) == roots
    assert (bs.kprime, bs.k1) == (kprime, k1)
    assert bs.b_M.k1 == k1
    sign = (-1) ** bs.b_f.degree  # b_M is normalized to be monic
    for X in range(-3, 4):
        assert bs.b_M(Fraction(X)) == sign * bs.b_f(Fraction(-X - 1))


def test_a1_root_multiplicity(a1):
    assert bernstein_sato_qh(a1).b_f.format("s") == "(s+1)^2"


@pytest.mark.parametrize("name", ["cusp", "a1", "quadric4"])
def test_functional_equation_oracle(name):
    q = qh_input(name)
    bs = bernstein_sato_qh(q)
    fe = certify_bfunction(q, bs.b_f)
    assert fe is not None and fe.check(q)


@pytest.mark.parametrize("name", ["cusp", "a1"])
def test_proper_divisors_have_no_functional_equation(name):
    q = qh_input(name)
    roots = [r for r, m in bernstein_sato_qh(q).b_f.roots for _ in range(m)]
    for k in range(len(roots)):
        smaller = BFunction.from_roots(roots[:k] + roots[k + 1:])
        assert certify_bfunction(q, smaller) is None


def test_generators_annihilate_cyclic_vectors(cusp, a1):
    for q in (cusp, a1):
        bs = bernstein_sato_qh(q)
        el = cyclic_generator(q, bs.kprime, polar=False)
        assert annihilates(presentation_prop1(q, bs), el)
        polar = cyclic_generator(q, bs.kprime, polar=True)
        assert annihilates(presentation_prop2(q, bs), polar)


def test_m_presentation_is_adapted(cusp):
    pres = build_M_presentation(cusp)
    assert pres.is_adapted()
    assert pres.names[:2] == ["X1", "X2"]
    assert list(pres.source.vshifts) == [0, 0, 1, 1, 0]


@pytest.mark.parametrize("builder", [presentation_prop1, presentation_prop2])
def test_involutivity_certificates(cusp, builder):
    cert = certify_involutive(builder(cusp))
    assert cert.status == "involutive"
    assert all(cert.relations_ok.values())
    assert cert.symbols_generate


def test_restriction_pipeline_quadric(quadric4):
    r = presentation_prop4(quadric4)
    assert r.complex.ranks()[:2] == [2, 7]
    assert sorted(r.complex.modules[0].fshifts) == [0, 1]
    assert sorted(r.complex.modules[1].fshifts) == [0, 1, 1, 1, 1, 1, 2]
    assert r.ok


def test_restriction_pipeline_cusp_columns_annihilate(cusp):
    r = presentation_prop4(cusp)
    assert r.relations_annihilate
    gens = polar_generators(cusp, r.bs.k1)
    for v in r.complex.maps[0]:
        total = gens[0]._new({})
        for k, c in enumerate(v.coords):
            total = total + act(c, gens[k])
        assert total.is_zero()


def test_cusp_s_operator_not_in_euler_and_f(cusp):
    """Two routes: Groebner normal form, and a linear search for
    S = A (theta + 1) + B f with A of weight 1/6 and B of weight -5/6."""
    sig = weyl_ring(2)
    S = s_operators(cusp, sig)[(0, 1)]
    th1 = theta(cusp, sig) + Operator.const(sig, 1)
    f = parse_operator("x1^2+x2^3", sig)
    assert not contains(buchberger([th1, f], OrderSpec("F")), S)

    w = cusp.weights

    def weight(m):
        return w[0] * (m[0] - m[2]) + w[1] * (m[1] - m[3])

    monos = [(a, b, c, d, 0) for a in range(7) for b in range(7) for c in range(4) for d in range(4)]
    A_monos = [m for m in monos if weight(m) == Fraction(1, 6)]
    B_monos = [m for m in monos if weight(m) == Fraction(-5, 6)]
    cols = [Operator.monomial(sig, m) * th1 for m in A_monos] + \
           [Operator.monomial(sig, m) * f for m in B_monos]
    rows = sorted({m for c in cols for m in c.terms} | set(S.terms))
    M = sympy.Matrix([[sympy.Rational(str(c.terms.get(r, 0))) for c in cols] for r in rows])
    rhs = sympy.Matrix([sympy.Rational(str(S.terms.get(r, 0))) for r in rows])
    unknowns = sympy.symbols(f"u0:{len(cols)}")
    assert sympy.linsolve((M, rhs), *unknowns) == sympy.EmptySet
