import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dmodres import groebner as gb
from dmodres.filtration import OrderSpec, ShiftedFreeModule
from dmodres.groebner import (buchberger, contains, divide, is_involutive, is_relation, lift,
                              same_submodule, spairs_reduce_to_zero, syzygies_of)
from dmodres.parse import parse_operator, parse_vectors
from dmodres.weyl import Operator, Signature

from conftest import operators

W2 = Signature(2, 0, homogenized=False)
H11 = Signature(1, 1)
C2 = Signature(2, 0, homogenized=False, commutative=True)


def ops(text, sig):
    return [parse_operator(t, sig) for t in text.split(";")]


def combo(coeffs, gens):
    total = Operator(gens[0].sig)
    for a, g in zip(coeffs, gens):
        total = total + a * g
    return total


def test_gb_of_partials():
    basis = buchberger(ops("dx1; dx2", W2))
    assert len(basis) == 2
    assert contains(basis, parse_operator("x1*dx1*dx2 + dx2^2", W2))
    assert not contains(basis, parse_operator("x1", W2))


def test_noncommutative_cancellation():
    # (x dx - 1) and dx generate the whole ring only through the commutator
    basis = buchberger(ops("x1*dx1 + 1; dx1", Signature(1, 0, homogenized=False)))
    assert contains(basis, Operator.const(basis.module.sig, 1))


def test_divide_reconstructs():
    gens = ops("x1*dx2 - x2*dx1; x1*dx1 + x2*dx2 + 2", W2)
    basis = buchberger(gens)
    P = parse_operator("dx1^2*x1 + x2^3*dx2", W2)
    qs, rem = divide(P, basis)
    total = combo(qs, [g.coords[0] for g in basis.generators]) + rem.coords[0]
    assert total == P


def test_lift_through_input_generators():
    gens = ops("x1*dx2 - x2*dx1; x1*dx1 + x2*dx2 + 2", W2)
    basis = buchberger(gens, track=True)
    for g in basis.generators:
        rep = lift(g, basis)
        assert combo(rep.coords, gens) == g.coords[0]
    assert lift(parse_operator("1", W2), basis) is None


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_random_gb_properties(data):
    gens = [data.draw(operators(H11, max_terms=2, max_exp=1)) for _ in range(2)]
    gens = [g for g in gens if g.terms]
    if not gens:
        return
    order = OrderSpec(data.draw(st.sampled_from(["F", "FV"])))
    basis = buchberger(gens, order, track=True)
    assert spairs_reduce_to_zero(basis)
    for g in gens:
        assert contains(basis, g)
    for g in basis.generators:
        assert combo(lift(g, basis).coords, gens) == g.coords[0]


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_syzygies_are_relations(data):
    gens = [data.draw(operators(W2, max_terms=2, max_exp=1)) for _ in range(3)]
    gens = [g for g in gens if g.terms]
    if not gens:
        return
    syz = syzygies_of(gens)
    for s in syz.generators:
        assert is_relation(s, gens)


def test_syzygies_generate_all_relations():
    gens = ops("dx1; dx2", W2)
    syz = syzygies_of(gens)
    mod = syz.module
    koszul = mod.element([parse_operator("dx2", W2), parse_operator("-dx1", W2)])
    assert same_submodule(syz.generators, [koszul], module=mod)


def test_module_gb_pot_and_top_agree_on_membership():
    mod = ShiftedFreeModule(W2, (0, 1), (0, 0))
    vecs = [mod.element(v) for v in parse_vectors("[dx1, x1]; [dx2, 1]", W2)]
    top = buchberger(vecs, OrderSpec("F"), mod)
    pot = buchberger(vecs, OrderSpec("F", pot=True), mod)
    probe = mod.element(parse_vectors("[dx1*dx2 - dx2*dx1 + x2*dx1, x2*x1]", W2)[0])
    assert contains(top, probe) == contains(pot, probe) is True


def test_same_submodule():
    a = ops("dx1; dx2", W2)
    b = ops("dx1 + dx2; dx1 - dx2", W2)
    assert same_submodule(a, b)
    assert not same_submodule(a, ops("dx1", W2))


def test_colon_nonzerodivisor():
    x, y = Operator.gen(C2, "x1"), Operator.gen(C2, "x2")
    assert gb.ideal_quotient_by_element([x * y], x + y)
    assert not gb.ideal_quotient_by_element([x * y], x)
    with pytest.raises(ValueError):
        gb.ideal_quotient_by_element(ops("dx1", W2), parse_operator("x1", W2))


def test_involutive_examples():
    # Euler and Koszul-type operators for f = x^2 + y^2
    gens = ops("x1*dx1 + x2*dx2 + 2; x2*dx1 - x1*dx2", W2)
    res = is_involutive(gens)
    assert res.status == "involutive"
    for R in res.lifts:
        assert is_relation(R, gens)


def test_non_involutive_example():
    # the ideal contains 1 = (dx2 + x1) dx1 - dx1 (dx2 + x1), but its symbol ideal is (xi1, xi2)
    res = is_involutive(ops("dx1; dx2 + x1", W2))
    assert res.status == "refuted"
    assert res.failed is not None


def test_degree_bound_inconclusive():
    gens = ops("dx1^3; dx2^3", W2)
    assert is_involutive(gens, degree_bound=1).status == "inconclusive"


def test_nontermination_guard_type():
    assert issubclass(gb.NonTermination, RuntimeError)
