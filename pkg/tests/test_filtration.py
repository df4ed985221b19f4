import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dmodres import filtration as filt
from dmodres.filtration import ModuleElement, OrderSpec, ShiftedFreeModule, parse_order
from dmodres.weyl import Operator, Signature

from conftest import operators

SIG = Signature(1, 1)


def g(name, sig=SIG):
    return Operator.gen(sig, name)


def test_orders_with_shifts():
    mod = ShiftedFreeModule(SIG, (2, 0), (0, 3))
    el = mod.element([g("dx1"), g("t")])
    assert filt.ord_F(el) == 3
    assert filt.ord_V(el) == 2
    assert filt.ord_F(mod.zero()) is None


def test_v_weights():
    assert g("dt").ord_V() == 1
    assert g("t").ord_V() == -1
    assert (g("t") * g("dt")).ord_V() == 0
    assert g("h").ord_V() == 0 and g("x1").ord_V() == 0


def test_homogenize_module_element():
    sig = Signature(1, 0, homogenized=False)
    mod = ShiftedFreeModule(sig, (1, 0), (0, 0))
    el = mod.element([Operator.const(sig, 1), Operator.gen(sig, "dx1") ** 3])
    H = filt.homogenize(el)
    assert filt.is_homogeneous(H)
    assert filt.ord_F(H) == 3
    assert filt.dehomogenize(H) == el


def test_bidegree_adapted():
    target = ShiftedFreeModule(SIG, (0,), (0,))
    source = ShiftedFreeModule(SIG, (1, 0), (1, 0))
    img = lambda P: target.element([P])
    assert filt.bidegree_adapted([img(g("dt")), img(g("t"))], source, target)
    assert not filt.bidegree_adapted([img(g("dt")), img(g("dt"))], source, target)
    assert filt.bidegree_adapted([img(g("dt")), img(g("x1") * g("t"))], source, target)


def test_parse_order():
    assert parse_order("fv") == OrderSpec("FV")
    assert parse_order("V:POT") == OrderSpec("V", pot=True)
    assert parse_order("F:TOP") == OrderSpec("F")
    with pytest.raises(ValueError):
        parse_order("lex")


def test_order_keys_respect_weights():
    key = OrderSpec("V").key_function(SIG, (0,), (0,))
    dt = (0, 0, 0, 1, 0)
    t = (0, 1, 0, 0, 0)
    assert key(0, dt) > key(0, t)
    fkey = OrderSpec("F").key_function(SIG, (0, 5), (0, 0))
    assert fkey(1, SIG.one()) > fkey(0, (0, 0, 1, 0, 0))


def test_pot_prefers_lower_position():
    key = OrderSpec("F", pot=True).key_function(SIG, (0, 0), (0, 0))
    assert key(0, SIG.one()) > key(1, (3, 3, 3, 3, 0))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_order_is_multiplicative(data):
    """Leading monomials multiply under every weight order (needed for the chain criterion)."""
    P = data.draw(operators(SIG))
    Q = data.draw(operators(SIG))
    kind = data.draw(st.sampled_from(["F", "V", "FV", "VF"]))
    if not (P.terms and Q.terms):
        return
    key = OrderSpec(kind).key_function(SIG)
    lead = lambda R: max(R.terms, key=lambda m: key(0, m))
    lp, lq = lead(P), lead(Q)
    expected = tuple(a + b for a, b in zip(lp, lq))
    assert lead(P * Q) == expected


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_module_ops(data):
    mod = ShiftedFreeModule(SIG, (0, 1), (1, 0))
    a = mod.element([data.draw(operators(SIG)), data.draw(operators(SIG))])
    b = mod.element([data.draw(operators(SIG)), data.draw(operators(SIG))])
    assert (a + b) - b == a
    assert ModuleElement.from_flat(mod, a.to_flat()) == a
    P = data.draw(operators(SIG))
    Q = data.draw(operators(SIG))
    assert a.lmul(P).lmul(Q) == a.lmul(Q * P)
