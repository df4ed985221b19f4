"""Division, Buchberger completion, Schreyer syzygies, involutivity and
colon tests for submodules of shifted free modules.

The engine works on flat dictionaries ``{(pos, mono): Fraction}``.  Left
multiplication by a monomial keeps leading monomials additive in every ring
handled here (D^(h), the Weyl algebra, polynomial rings) for the orders of
:class:`~dmodres.filtration.OrderSpec`, which is what makes the classical
algorithms valid.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from fractions import Fraction

from . import weyl
from .filtration import ModuleElement, OrderSpec, ShiftedFreeModule, ord_F, ord_V
from .weyl import Operator, Signature, mono_mul

log = logging.getLogger(__name__)

MAX_REDUCTION_STEPS = 2_000_000


class NonTermination(RuntimeError):
    """Raised when a reduction exceeds the step guard (possible with V-orders,
    which are not well-orders on polynomial coefficients)."""


class _Rev:
    __slots__ = ("k", "pm")

    def __init__(self, k, pm):
        self.k = k
        self.pm = pm

    def __lt__(self, other):
        return other.k < self.k


class Ring:
    """Bundle of signature, order key and multiplication used by the engine."""

    def __init__(self, sig: Signature, key):
        self.sig = sig
        self.nv = sig.nvars
        self.hom = sig.homogenized
        self.comm = sig.commutative
        self._key = key
        self._cache = {}

    def key(self, pm):
        v = self._cache.get(pm)
        if v is None:
            v = self._key(*pm)
            self._cache[pm] = v
        return v

    def lead(self, f):
        return max(f, key=self.key)

    def add_mul(self, acc, c, q, g, heap=None):
        """acc += c * q * g for a monomial q and flat g (in place)."""
        nv, hom, comm = self.nv, self.hom, self.comm
        for (pos, m2), v in g.items():
            cv = c * v
            for mm, k in mono_mul(nv, hom, comm, q, m2):
                pm = (pos, mm)
                old = acc.get(pm)
                if old is None:
                    acc[pm] = cv * k
                    if heap is not None:
                        heapq.heappush(heap, _Rev(self.key(pm), pm))
                else:
                    new = old + cv * k
                    if new:
                        acc[pm] = new
                    else:
                        del acc[pm]

    def op_mul(self, P: dict, g: dict) -> dict:
        """P * g for a ring element P given as {mono: coeff}."""
        out = {}
        for q, c in P.items():
            self.add_mul(out, c, q, g)
        return out


def _divides(a, b):
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _diff(a, b):
    return tuple(x - y for x, y in zip(a, b))


class _Elt:
    __slots__ = ("poly", "rep", "lpos", "lmono", "lc")

    def __init__(self, ring, poly, rep=None):
        self.poly = poly
        self.rep = rep
        pos, mono = ring.lead(poly)
        self.lpos, self.lmono = pos, mono
        self.lc = poly[(pos, mono)]

    def monic(self, ring):
        if self.lc != 1:
            inv = 1 / self.lc
            self.poly = {k: v * inv for k, v in self.poly.items()}
            if self.rep is not None:
                self.rep = {k: v * inv for k, v in self.rep.items()}
            self.lc = Fraction(1)
        return self


def _find_divisor(elts, pos, m):
    for idx, e in enumerate(elts):
        if e.lpos == pos and _divides(e.lmono, m):
            return idx
    return None


def _reduce(ring, f, elts, rep=None, full=True, quotients=False):
    """Reduce flat f by the marked elements.

    Returns (remainder, rep, quot) where ``quot`` maps element index to the
    quotient {mono: coeff} when requested.
    """
    f = dict(f)
    rep = dict(rep) if rep is not None else None
    quot = {} if quotients else None
    rem = {}
    heap = [_Rev(ring.key(pm), pm) for pm in f]
    heapq.heapify(heap)
    steps = 0
    byposition = {}
    for idx, e in enumerate(elts):
        byposition.setdefault(e.lpos, []).append(idx)
    while heap:
        item = heapq.heappop(heap)
        pm = item.pm
        c = f.get(pm)
        if c is None:
            continue
        pos, m = pm
        d = None
        for idx in byposition.get(pos, ()):
            if _divides(elts[idx].lmono, m):
                d = idx
                break
        if d is None:
            del f[pm]
            if not full:
                rem[pm] = c
                rem.update(f)
                break
            rem[pm] = c
            continue
        steps += 1
        if steps > MAX_REDUCTION_STEPS:
            raise NonTermination("reduction step limit exceeded")
        g = elts[d]
        q = _diff(m, g.lmono)
        coef = -c / g.lc
        ring.add_mul(f, coef, q, g.poly, heap)
        if rep is not None and g.rep is not None:
            ring.add_mul(rep, coef, q, g.rep)
        if quot is not None:
            qd = quot.setdefault(d, {})
            v = qd.get(q, 0) - coef
            if v:
                qd[q] = v
            else:
                qd.pop(q, None)
    return rem, rep, quot


def _spoly(ring, a: _Elt, b: _Elt):
    L = _lcm(a.lmono, b.lmono)
    qa, qb = _diff(L, a.lmono), _diff(L, b.lmono)
    s = {}
    ring.add_mul(s, 1 / a.lc, qa, a.poly)
    ring.add_mul(s, -1 / b.lc, qb, b.poly)
    rep = None
    if a.rep is not None and b.rep is not None:
        rep = {}
        ring.add_mul(rep, 1 / a.lc, qa, a.rep)
        ring.add_mul(rep, -1 / b.lc, qb, b.rep)
    return s, rep, qa, qb


# -- public API ---------------------------------------------------------------


@dataclass
class MarkedBasis:
    """A (reduced) Groebner basis together with its order data.

    ``reps[k]`` (when tracked) expresses generators[k] as a combination of
    the input generators, as an element of the free module ``input_module``.
    """

    module: ShiftedFreeModule
    order: OrderSpec
    generators: list
    leading: list
    reps: list | None = None
    input_module: ShiftedFreeModule | None = None
    _elts: list = field(default=None, repr=False)
    _ring: Ring = field(default=None, repr=False)

    def __len__(self):
        return len(self.generators)

    @property
    def ring(self):
        return self._ring


def make_ring(module: ShiftedFreeModule, order: OrderSpec) -> Ring:
    return Ring(module.sig, order.key_function(module.sig, module.fshifts, module.vshifts))


def _as_elements(gens, module=None):
    out = []
    for g in gens:
        if isinstance(g, Operator):
            mod = module or ShiftedFreeModule.free(g.sig, 1)
            g = ModuleElement(mod, [g])
        out.append(g)
    return out


def _wrap(module, order, ring, elts, input_module):
    gens = [ModuleElement.from_flat(module, e.poly) for e in elts]
    reps = None
    if input_module is not None:
        reps = [ModuleElement.from_flat(input_module, e.rep) for e in elts]
    return MarkedBasis(module, order, gens, [(e.lpos, e.lmono) for e in elts],
                       reps, input_module, elts, ring)


def buchberger(gens, order: OrderSpec | None = None, module: ShiftedFreeModule | None = None,
               track: bool = False, degree_bound: int | None = None) -> MarkedBasis:
    """Groebner basis of the left submodule generated by ``gens``.

    Normal selection strategy; Buchberger's chain criterion (all rings) and
    the coprime criterion (commutative rings only).  With ``degree_bound``
    only S-pairs whose lcm has weighted degree <= bound are treated (a
    truncated basis, exact up to that degree for graded input).
    """
    order = order or OrderSpec()
    gens = _as_elements(gens, module)
    if module is None:
        if not gens:
            raise ValueError("need a module for an empty generator list")
        module = gens[0].module
    ring = make_ring(module, order)
    input_module = None
    if track:
        input_module = ShiftedFreeModule(module.sig, tuple(_fshift(g) for g in gens),
                                         tuple(_vshift(g) for g in gens))
    elts: list[_Elt] = []
    pairs = []
    counter = 0
    comm = module.sig.commutative

    def deg_of(pm):
        return ring.key(pm)[0] if not order.pot else ring.key(pm)[1]

    def add(elt):
        nonlocal counter
        k = len(elts)
        # chain criterion on pending pairs
        keep = []
        for item in pairs:
            _, _, i, j = item
            L = _lcm(elts[i].lmono, elts[j].lmono)
            if (elts[i].lpos == elt.lpos and _divides(elt.lmono, L)
                    and _lcm(elts[i].lmono, elt.lmono) != L
                    and _lcm(elts[j].lmono, elt.lmono) != L):
                continue
            keep.append(item)
        pairs[:] = keep
        heapq.heapify(pairs)
        elts.append(elt)
        for i in range(k):
            if elts[i].lpos != elt.lpos:
                continue
            L = _lcm(elts[i].lmono, elt.lmono)
            if comm and all(a == 0 or b == 0 for a, b in zip(elts[i].lmono, elt.lmono)):
                continue
            counter += 1
            heapq.heappush(pairs, (ring.key((elt.lpos, L)), counter, i, k))

    for idx, g in enumerate(gens):
        f = g.to_flat()
        rep = None
        if track:
            rep = {(idx, module.sig.one()): Fraction(1)}
        f, rep, _ = _reduce(ring, f, elts, rep)
        if f:
            add(_Elt(ring, f, rep).monic(ring))

    while pairs:
        lkey, _, i, j = heapq.heappop(pairs)
        if degree_bound is not None and lkey[0 if not order.pot else 1] > degree_bound:
            continue
        s, rep, _, _ = _spoly(ring, elts[i], elts[j])
        s, rep, _ = _reduce(ring, s, elts, rep)
        if s:
            add(_Elt(ring, s, rep).monic(ring))

    elts = _autoreduce(ring, elts)
    return _wrap(module, order, ring, elts, input_module)


def _fshift(g):
    d = ord_F(g)
    return 0 if d is None else d


def _vshift(g):
    d = ord_V(g)
    return 0 if d is None else d


def _autoreduce(ring, elts):
    # drop elements whose leading monomial is divisible by another's
    keep = []
    for i, e in enumerate(elts):
        redundant = False
        for j, o in enumerate(elts):
            if j == i or o.lpos != e.lpos or not _divides(o.lmono, e.lmono):
                continue
            if o.lmono != e.lmono or j < i:
                redundant = True
                break
        if not redundant:
            keep.append(e)
    out = []
    for i, e in enumerate(keep):
        others = keep[:i] + keep[i + 1:]
        poly, rep, _ = _reduce(ring, e.poly, others, e.rep)
        out.append(_Elt(ring, poly, rep).monic(ring))
    out.sort(key=lambda e: ring.key((e.lpos, e.lmono)))
    return out


def _basis_from_gens(basis_or_gens, order=None, module=None):
    if isinstance(basis_or_gens, MarkedBasis):
        return basis_or_gens
    return buchberger(basis_or_gens, order, module)


def divide(el, basis: MarkedBasis):
    """Return (quotients, remainder): el = sum q_k g_k + remainder."""
    el = _as_elements([el], basis.module)[0]
    ring = basis.ring
    rem, _, quot = _reduce(ring, el.to_flat(), basis._elts, quotients=True)
    qs = [Operator(basis.module.sig, quot.get(k, {})) for k in range(len(basis))]
    return qs, ModuleElement.from_flat(basis.module, rem)


def normal_form(el, basis: MarkedBasis) -> ModuleElement:
    el = _as_elements([el], basis.module)[0]
    rem, _, _ = _reduce(basis.ring, el.to_flat(), basis._elts)
    return ModuleElement.from_flat(basis.module, rem)


def contains(basis: MarkedBasis, el) -> bool:
    return normal_form(el, basis).is_zero()


def lift(el, basis: MarkedBasis):
    """Express el through the original generators of a tracked basis.

    Returns an element of ``basis.input_module`` or None if el is not in the
    submodule.
    """
    if basis.reps is None:
        raise ValueError("basis was computed without tracking")
    el = _as_elements([el], basis.module)[0]
    ring = basis.ring
    rem, _, quot = _reduce(ring, el.to_flat(), basis._elts, quotients=True)
    if rem:
        return None
    out = {}
    for k, q in quot.items():
        for mono, c in q.items():
            ring.add_mul(out, c, mono, basis._elts[k].rep)
    return ModuleElement.from_flat(basis.input_module, out)


def spairs_reduce_to_zero(basis: MarkedBasis) -> bool:
    ring = basis.ring
    elts = basis._elts
    for i in range(len(elts)):
        for j in range(i + 1, len(elts)):
            if elts[i].lpos != elts[j].lpos:
                continue
            s, _, _, _ = _spoly(ring, elts[i], elts[j])
            r, _, _ = _reduce(ring, s, elts)
            if r:
                return False
    return True


@dataclass
class SyzygyResult:
    """Syzygy generators living in ``module`` (one basis vector per basis
    generator, with Schreyer-induced F/V shifts)."""

    module: ShiftedFreeModule
    generators: list


def schreyer_module(basis: MarkedBasis) -> ShiftedFreeModule:
    return ShiftedFreeModule(basis.module.sig,
                             tuple(_fshift(g) for g in basis.generators),
                             tuple(_vshift(g) for g in basis.generators))


def syzygies(basis: MarkedBasis) -> SyzygyResult:
    """Schreyer generators of the syzygy module of a Groebner basis."""
    ring = basis.ring
    elts = basis._elts
    target = schreyer_module(basis)
    out = []
    nb = len(elts)
    for i in range(nb):
        for j in range(i + 1, nb):
            a, b = elts[i], elts[j]
            if a.lpos != b.lpos:
                continue
            L = _lcm(a.lmono, b.lmono)
            redundant = False
            for k in range(nb):
                if k in (i, j) or elts[k].lpos != a.lpos or not _divides(elts[k].lmono, L):
                    continue
                if _lcm(a.lmono, elts[k].lmono) != L and _lcm(b.lmono, elts[k].lmono) != L:
                    redundant = True
                    break
            if redundant:
                continue
            s, _, qa, qb = _spoly(ring, a, b)
            rem, _, quot = _reduce(ring, s, elts, quotients=True)
            if rem:
                raise ValueError("input is not a Groebner basis (S-pair does not reduce to 0)")
            syz = {}
            syz[(i, qa)] = syz.get((i, qa), 0) + 1 / a.lc
            syz[(j, qb)] = syz.get((j, qb), 0) - 1 / b.lc
            for k, q in quot.items():
                for mono, c in q.items():
                    v = syz.get((k, mono), 0) - c
                    if v:
                        syz[(k, mono)] = v
                    else:
                        syz.pop((k, mono), None)
            syz = {k: v for k, v in syz.items() if v}
            if syz:
                out.append(ModuleElement.from_flat(target, syz))
    return SyzygyResult(target, out)


def apply_map(images, el: ModuleElement, target: ShiftedFreeModule) -> ModuleElement:
    """Image of el under the left-linear map e_j -> images[j]."""
    ring = Ring(target.sig, lambda pos, m: (0,))
    acc = {}
    for j, c in enumerate(el.coords):
        if c.terms:
            acc_j = ring.op_mul(c.terms, images[j].to_flat())
            for k, v in acc_j.items():
                nv = acc.get(k, 0) + v
                if nv:
                    acc[k] = nv
                else:
                    acc.pop(k, None)
    return ModuleElement.from_flat(target, acc)


def syzygies_of(gens, order: OrderSpec | None = None, module=None) -> SyzygyResult:
    """Generators of all relations sum_j a_j gens[j] = 0 (gens need not be a
    Groebner basis)."""
    order = order or OrderSpec()
    gens = _as_elements(gens, module)
    gb = buchberger(gens, order, module, track=True)
    src = gb.input_module
    syz = syzygies(gb)
    out = []
    for s in syz.generators:
        v = apply_map(gb.reps, s, src)
        if not v.is_zero():
            out.append(v)
    for l, g in enumerate(gens):
        q, rem = divide(g, gb)
        assert rem.is_zero()
        v = src.basis(l) - apply_map(gb.reps, ModuleElement(syz.module, q), src)
        if not v.is_zero():
            out.append(v)
    return SyzygyResult(src, _dedupe(out))


def _dedupe(els):
    seen = set()
    out = []
    for e in els:
        if e not in seen:
            seen.add(e)
            out.append(e)
    return out


def same_submodule(gens_a, gens_b, order=None, module=None) -> bool:
    """Mutual membership of two generating sets."""
    ga = buchberger(gens_a, order, module)
    gb = buchberger(gens_b, order, module or ga.module)
    return all(contains(ga, g) for g in _as_elements(gens_b, ga.module)) and \
        all(contains(gb, g) for g in _as_elements(gens_a, gb.module))


# -- colon / nonzerodivisor test ---------------------------------------------


def ideal_quotient_by_element(presentation, g: Operator, order: OrderSpec | None = None) -> bool:
    """True iff g is a nonzerodivisor on S^r / I (commutative S), i.e. (I : g) = I.

    The colon module is the projection of the syzygies of
    (generators of I, g e_1, ..., g e_r) onto the last r slots.
    """
    order = order or OrderSpec()
    basis = _basis_from_gens(presentation, order)
    mod = basis.module
    if not mod.sig.commutative:
        raise ValueError("ideal_quotient_by_element needs a commutative ring")
    r = mod.rank
    k = len(basis.generators)
    extra = [mod.basis(i).lmul(g) for i in range(r)]
    syz = syzygies_of(list(basis.generators) + extra, order, mod)
    for s in syz.generators:
        v = ModuleElement(mod, s.coords[k:])
        if not contains(basis, v):
            return False
    return True


# -- involutive bases -------------------------------------------------------------


@dataclass
class InvolutivityResult:
    status: str  # "involutive", "refuted", "inconclusive"
    symbol_relations: list
    lifts: list
    failed: object = None

    def __bool__(self):
        return self.status == "involutive"


def symbol_vector(rel: ModuleElement, shifts, degree=None) -> ModuleElement:
    """F-symbol of a vector of (dehomogenized) operators w.r.t. shifts."""
    sig = rel.sig
    csig = Signature(sig.n, sig.p, homogenized=False, commutative=True)
    mod = ShiftedFreeModule(csig, tuple(shifts))
    el = ModuleElement(ShiftedFreeModule(sig, tuple(shifts)), rel.coords)
    if degree is None:
        degree = ord_F(el)
    coords = []
    for i, c in enumerate(rel.coords):
        if c.terms and c.ord_F() + shifts[i] == degree:
            coords.append(weyl.symbol(c, degree - shifts[i]))
        else:
            coords.append(Operator(csig))
    return ModuleElement(mod, coords)


def is_involutive(gens, degree_bound: int | None = None) -> InvolutivityResult:
    """Involutivity test for generators P_1..P_r of a left ideal of the Weyl
    algebra (h = 1): every generator of the relations among the F-symbols
    must lift to a relation among the P_j with that symbol.

    Lifting is decided in D^(h): a symbol relation S of degree d lifts iff the
    homogenized defect sum_j S_j(quantized) P_j lies in the ideal generated by
    the homogenized P_j in degree d - 1.
    """
    gens = [g for g in gens]
    sig = gens[0].sig
    if sig.homogenized or sig.commutative:
        raise ValueError("is_involutive expects Weyl-algebra (h = 1) operators")
    orders = [g.ord_F() for g in gens]
    if degree_bound is None:
        degree_bound = max(orders) + 4
    csig = Signature(sig.n, sig.p, homogenized=False, commutative=True)
    cmod = ShiftedFreeModule(csig, (0,))
    symbols = [ModuleElement(cmod, [weyl.symbol(g)]) for g in gens]
    rels = syzygies_of(symbols, OrderSpec("F"), cmod)
    rel_module = ShiftedFreeModule(csig, tuple(orders))
    rel_gens = [ModuleElement(rel_module, r.coords) for r in rels.generators]
    if len(gens) == 1:
        return InvolutivityResult("involutive", [], [])

    hsig = sig.with_mode(homogenized=True)
    hmod = ShiftedFreeModule(hsig, (0,))
    hgens = [ModuleElement(hmod, [weyl.homogenize(g)]) for g in gens]
    max_deg = max(ord_F(r) for r in rel_gens) if rel_gens else 0
    hb = buchberger(hgens, OrderSpec("F"), hmod, track=True,
                    degree_bound=min(degree_bound, max_deg))
    lifts = []
    wmod = ShiftedFreeModule(sig, tuple(orders))
    for S in rel_gens:
        d = ord_F(S)
        if d > degree_bound:
            return InvolutivityResult("inconclusive", rel_gens, lifts, S)
        R0 = ModuleElement(wmod, [weyl.quantize(c, sig) for c in S.coords])
        defect = Operator(sig)
        for q, P in zip(R0.coords, gens):
            defect = defect + q * P
        if defect.is_zero():
            lifts.append(R0)
            continue
        dd = defect.ord_F()
        if dd >= d:
            raise AssertionError("symbol relation does not cancel the top degree")
        target = weyl.homogenize(defect, d - 1)
        rep = lift(ModuleElement(hmod, [target]), hb)
        if rep is None:
            return InvolutivityResult("refuted", rel_gens, lifts, S)
        corr = [weyl.dehomogenize(c) for c in rep.coords]
        R = ModuleElement(wmod, [a - b for a, b in zip(R0.coords, corr)])
        lifts.append(R)
    return InvolutivityResult("involutive", rel_gens, lifts)


def is_relation(rel: ModuleElement, gens) -> bool:
    total = Operator(gens[0].sig)
    for q, P in zip(rel.coords, gens):
        total = total + q * P
    return total.is_zero()
