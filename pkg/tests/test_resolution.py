import pytest

from dmodres.filtration import ModuleElement, OrderSpec, ShiftedFreeModule
from dmodres.groebner import is_relation, same_submodule, syzygies_of
from dmodres.localcohom import _lift_poly, build_M_presentation, s_operators
from dmodres.parse import parse_operator
from dmodres.resolution import (FreeComplex, NotMinimalError, betti, free_resolution,
                                homology_vanishes, minimalize, strictness_prop10)
from dmodres.weyl import Operator, Signature

H2 = Signature(2, 0)
W11 = Signature(1, 1, homogenized=False)


def op(text, sig):
    return parse_operator(text, sig)


def partials_resolution(length=3):
    L0 = ShiftedFreeModule(H2, (0,), (0,))
    gens = [L0.element([op("dx1", H2)]), L0.element([op("dx2", H2)])]
    return free_resolution(gens, L0, OrderSpec("F"), length)


def test_resolution_of_partials():
    C = partials_resolution()
    assert C.ranks()[:3] == [1, 2, 1]
    assert C.check_composition()
    assert C.is_adapted(check_v=False)
    assert C.is_h_homogeneous()
    for i in (1, 2):
        assert homology_vanishes(C, i)
    B = betti(minimalize(C))
    assert B.table == {(0, 0): 1, (1, 1): 2, (2, 2): 1}


def test_resolution_fv_adapted():
    sig = Signature(1, 1)
    L0 = ShiftedFreeModule(sig, (0,), (0,))
    gens = [L0.element([op("dt*t + x1*dx1", sig)]), L0.element([op("x1 - t", sig)])]
    C = free_resolution(gens, L0, OrderSpec("FV"), 2)
    assert C.check_composition()
    assert C.is_adapted()


def unit_block():
    """L0 = D e0 + D e1 <- L1 = D a + D b, a -> e0, b -> dx1 e0 + x1 e1."""
    sig = Signature(1, 0)
    L0 = ShiftedFreeModule(sig, (0, 0), (0, 0))
    L1 = ShiftedFreeModule(sig, (0, 1), (0, 0))
    d1 = [L0.element([Operator.const(sig, 1), Operator(sig)]),
          L0.element([op("dx1", sig), op("x1*h", sig)])]
    return FreeComplex([L0, L1], [d1])


def test_minimalize_splits_unit_block():
    C = unit_block()
    rec = []
    M = minimalize(C, rec)
    assert [p.value for p in rec] == [1]
    assert M.ranks() == [1, 1]
    assert M.maps[0][0].coords[0] == op("x1*h", M.sig)
    assert M.is_minimal()


def test_minimalize_fixed_point_on_minimal():
    M = minimalize(partials_resolution())
    again = minimalize(M)
    assert again.ranks() == M.ranks()
    assert all(a == b for ma, mb in zip(M.maps, again.maps) for a, b in zip(ma, mb))


def test_minimalize_preserves_presented_module():
    sig = Signature(1, 0)
    L0 = ShiftedFreeModule(sig, (0,), (0,))
    gens = [L0.element([op("dx1", sig)]), L0.element([op("x1*dx1 + h", sig)])]
    C = free_resolution(gens, L0, OrderSpec("F"), 2)
    M = minimalize(C)
    assert M.check_composition()
    assert M.ranks()[0] == 1
    assert same_submodule(C.maps[0], [ModuleElement(L0, v.coords) for v in M.maps[0]],
                          OrderSpec("F"), L0)


def test_betti_refuses_non_minimal():
    with pytest.raises(NotMinimalError):
        betti(unit_block())


def test_dehomogenize_roundtrip():
    C = partials_resolution()
    D = C.dehomogenize()
    assert not D.sig.homogenized
    assert D.check_composition()
    assert D.homogenize().ranks() == C.ranks()


def test_second_syzygies_with_corrected_sign(cusp):
    """delta1(e_i^e_j) - e_i^e_j is a relation among the D_{x,t} f^s generators."""
    pres = build_M_presentation(cusp)
    ops = pres.operators()
    sig = ops[0].sig
    grads = [_lift_poly(g, sig) for g in cusp.gradient()]
    idx = {name: k for k, name in enumerate(pres.names)}
    for (i, j) in s_operators(cusp, sig):
        v = [Operator(sig)] * len(ops)
        v[idx[f"e{j + 1}"]] = grads[i]
        v[idx[f"e{i + 1}"]] = -grads[j]
        v[idx[f"e{i + 1}^e{j + 1}"]] = Operator.const(sig, -1)
        rel = ModuleElement(ShiftedFreeModule(sig, (0,) * len(ops)), v)
        assert is_relation(rel, ops)
        v[idx[f"e{i + 1}^e{j + 1}"]] = Operator.const(sig, 1)
        assert not is_relation(ModuleElement(rel.module, v), ops)


def test_syzygies_of_presentation_are_relations(cusp):
    pres = build_M_presentation(cusp)
    ops = pres.operators()
    for s in syzygies_of(pres.images, OrderSpec("F"), pres.target).generators:
        assert is_relation(s, ops)


def test_strictness_holds_for_local_cohomology(cusp, a1):
    for q in (cusp, a1):
        pres = build_M_presentation(q)
        rep = strictness_prop10(pres.images, pres.target)
        assert tuple(rep) == (True, True)


def test_t_injectivity_fails():
    # D^2 / D(t, 1) with F-shifts (1, 0): gr^F has t-torsion
    mod = ShiftedFreeModule(W11, (1, 0), (0, 0))
    rep = strictness_prop10([mod.element([op("t", W11), op("1", W11)])], mod)
    assert rep.t_injective is False


def test_h_injectivity_fails():
    mod = ShiftedFreeModule(W11, (1, 0), (0, 1))
    rep = strictness_prop10([mod.element([op("1", W11), op("1", W11)])], mod)
    assert rep.h_injective is False


def test_strictness_argument_checks():
    mod = ShiftedFreeModule(Signature(1, 1), (0,), (0,))
    with pytest.raises(ValueError):
        strictness_prop10([mod.element([op("t", mod.sig)])], mod)


def test_json_shape():
    data = minimalize(partials_resolution()).to_json()
    assert [m["rank"] for m in data["modules"]] == [1, 2, 1, 0][:len(data["modules"])]
    assert isinstance(data["differentials"][0][0][0], str)
