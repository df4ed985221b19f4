"""Filtered and bifiltered free resolutions, minimalization, Betti tables and
the sufficient strictness conditions for 0 -> V_{k1+1}(M) -t-> V_{k1}(M) -> 0."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from . import filtration as filt
from . import weyl
from .filtration import ModuleElement, OrderSpec, ShiftedFreeModule, bidegree_adapted
from .groebner import (
    apply_map,
    buchberger,
    contains,
    ideal_quotient_by_element,
    schreyer_module,
    symbol_vector,
    syzygies,
)
from .weyl import Operator, Signature


class NotMinimalError(ValueError):
    pass


@dataclass
class FreeComplex:
    """L_0 <- L_1 <- ... <- L_l.  ``maps[i-1]`` lists d_i(e_j) in L_{i-1}."""

    modules: list
    maps: list
    labels: list | None = None

    @property
    def length(self) -> int:
        return len(self.maps)

    @property
    def sig(self):
        return self.modules[0].sig

    def ranks(self):
        return [m.rank for m in self.modules]

    def d(self, i):
        return self.maps[i - 1]

    def check_composition(self) -> bool:
        for i in range(2, self.length + 1):
            prev = self.maps[i - 2]
            for v in self.maps[i - 1]:
                if not apply_map(prev, v, self.modules[i - 2]).is_zero():
                    return False
        return True

    def is_adapted(self, check_v: bool = True) -> bool:
        return all(
            bidegree_adapted(self.maps[i - 1], self.modules[i], self.modules[i - 1], check_v)
            for i in range(1, self.length + 1)
        )

    def is_h_homogeneous(self) -> bool:
        for i in range(1, self.length + 1):
            src, tgt = self.modules[i], self.modules[i - 1]
            for j, v in enumerate(self.maps[i - 1]):
                for k, c in enumerate(v.coords):
                    for m in c.terms:
                        if weyl.fdeg(c.sig, m) + tgt.fshifts[k] != src.fshifts[j]:
                            return False
        return True

    def unit_entries(self):
        """(i, column, row, value) for entries with a nonzero constant term."""
        one = self.sig.one()
        out = []
        for i in range(1, self.length + 1):
            for c, v in enumerate(self.maps[i - 1]):
                for r, e in enumerate(v.coords):
                    u = e.terms.get(one)
                    if u:
                        out.append((i, c, r, e))
        return out

    def is_minimal(self) -> bool:
        return not self.unit_entries()

    def dehomogenize(self) -> "FreeComplex":
        sig = self.sig.with_mode(homogenized=False)
        mods = [m.with_sig(sig) for m in self.modules]
        maps = []
        for i, imgs in enumerate(self.maps):
            maps.append([ModuleElement(mods[i], [weyl.dehomogenize(c) for c in v.coords]) for v in imgs])
        return FreeComplex(mods, maps, self.labels)

    def homogenize(self) -> "FreeComplex":
        sig = self.sig.with_mode(homogenized=True)
        mods = [m.with_sig(sig) for m in self.modules]
        maps = []
        for i, imgs in enumerate(self.maps):
            out = []
            for j, v in enumerate(imgs):
                hv = filt.homogenize(v, self.modules[i + 1].fshifts[j]) if not v.is_zero() else mods[i].zero()
                out.append(ModuleElement(mods[i], hv.coords))
            maps.append(out)
        return FreeComplex(mods, maps, self.labels)

    def to_json(self):
        from .weyl import render
        return {
            "modules": [
                {"rank": m.rank, "fshifts": list(m.fshifts), "vshifts": list(m.vshifts),
                 **({"labels": [list(l) for l in self.labels[i]]} if self.labels else {})}
                for i, m in enumerate(self.modules)
            ],
            "differentials": [[[render(c) for c in v.coords] for v in imgs] for imgs in self.maps],
        }


def free_resolution(gens, module: ShiftedFreeModule, order: OrderSpec | None = None,
                    length: int = 3) -> FreeComplex:
    """Schreyer resolution of module / <gens>.

    Each step replaces the current generators by a Groebner basis (w.r.t. an
    order whose weight part refines the filtrations) and takes its Schreyer
    syzygies; shifts of the new free module are the shifted orders of the
    basis elements, so every differential is adapted.
    """
    order = order or OrderSpec("FV" if module.sig.p else "F")
    modules = [module]
    maps = []
    current = [g for g in gens if not g.is_zero()]
    cur_mod = module
    for step in range(length):
        if not current:
            break
        gb = buchberger(current, order, cur_mod)
        nxt = schreyer_module(gb)
        modules.append(nxt)
        maps.append(list(gb.generators))
        if step + 1 < length:
            current = [s for s in syzygies(gb).generators if not s.is_zero()]
            cur_mod = nxt
    return FreeComplex(modules, maps)


def _drop(v: ModuleElement, idx: int, module: ShiftedFreeModule) -> ModuleElement:
    return ModuleElement(module, v.coords[:idx] + v.coords[idx + 1:])


def _remove_basis(module: ShiftedFreeModule, idx: int) -> ShiftedFreeModule:
    return ShiftedFreeModule(module.sig, module.fshifts[:idx] + module.fshifts[idx + 1:],
                             module.vshifts[:idx] + module.vshifts[idx + 1:])


@dataclass
class Pivot:
    index: int
    column: int
    row: int
    value: Fraction


def _find_pivot(C: FreeComplex):
    one = C.sig.one()
    for i in range(1, C.length + 1):
        imgs = C.maps[i - 1]
        nrows = C.modules[i - 1].rank
        for r in range(nrows):
            for c, v in enumerate(imgs):
                e = v.coords[r]
                if len(e.terms) == 1 and one in e.terms:
                    return Pivot(i, c, r, e.terms[one])
    return None


def minimalize(C: FreeComplex, record: list | None = None) -> FreeComplex:
    """Split off contractible summands e_c -> u e_r' for scalar entries u.

    For the pivot d_i(e_c) = u e_r + ..., the other columns of d_i are
    cleared against d_i(e_c), row r and column c are dropped, the c-th
    coordinate of d_{i+1} and the r-th image of d_{i-1} are removed.
    Entries with a constant term that are not scalars (units only in the
    local ring) are left in place; see :meth:`FreeComplex.is_minimal`.
    """
    modules = list(C.modules)
    maps = [list(m) for m in C.maps]
    labels = [list(l) for l in C.labels] if C.labels else None
    cur = FreeComplex(modules, maps, labels)
    while True:
        piv = _find_pivot(cur)
        if piv is None:
            return cur
        if record is not None:
            record.append(piv)
        i, c, r, u = piv.index, piv.column, piv.row, piv.value
        modules, maps = list(cur.modules), [list(m) for m in cur.maps]
        labels = [list(l) for l in cur.labels] if cur.labels else None
        src, tgt = modules[i], modules[i - 1]
        pivcol = maps[i - 1][c]
        new_tgt = _remove_basis(tgt, r)
        new_src = _remove_basis(src, c)
        cols = []
        for b, v in enumerate(maps[i - 1]):
            if b == c:
                continue
            beta = v.coords[r]
            if beta.terms:
                v = v - pivcol.lmul(beta.scale(Fraction(1) / u))
            cols.append(_drop(v, r, new_tgt))
        maps[i - 1] = cols
        if i < len(maps):
            maps[i] = [_drop(v, c, new_src) for v in maps[i]]
        if i - 2 >= 0:
            del maps[i - 2][r]
        modules[i - 1] = new_tgt
        modules[i] = new_src
        if labels:
            del labels[i - 1][r]
            del labels[i][c]
        # rebind the modules of the surviving images
        if i - 2 >= 0:
            maps[i - 2] = [ModuleElement(modules[i - 2], v.coords) for v in maps[i - 2]]
        cur = FreeComplex(modules, maps, labels)


@dataclass
class BettiTable:
    table: dict = field(default_factory=dict)

    def __getitem__(self, ij):
        return self.table.get(ij, 0)

    def rank(self, i):
        return sum(v for (a, _), v in self.table.items() if a == i)

    def to_json(self):
        return {f"{i},{j}": v for (i, j), v in sorted(self.table.items())}

    def __str__(self):
        if not self.table:
            return "(empty)"
        rows = sorted({i for i, _ in self.table})
        cols = sorted({j for _, j in self.table})
        lines = ["i\\j " + " ".join(f"{j:>3}" for j in cols)]
        for i in rows:
            lines.append(f"{i:>3} " + " ".join(f"{self[i, j]:>3}" for j in cols))
        return "\n".join(lines)


def betti(C: FreeComplex) -> BettiTable:
    if not C.is_minimal():
        raise NotMinimalError("complex has entries with a nonzero constant term; minimalize first")
    table = Counter()
    for i, m in enumerate(C.modules):
        for s in m.fshifts:
            table[(i, s)] += 1
    return BettiTable(dict(table))


# -- strictness -----------------------------------------------------------------


@dataclass
class StrictnessReport:
    t_injective: bool
    h_injective: bool
    grF_relations: list = field(default_factory=list)
    grV_relations: list = field(default_factory=list)

    def __iter__(self):
        return iter((self.t_injective, self.h_injective))

    def __bool__(self):
        return self.t_injective and self.h_injective


def initial_V(el: ModuleElement) -> ModuleElement:
    """Terms of maximal shifted V-degree."""
    top = filt.ord_V(el)
    coords = []
    for i, c in enumerate(el.coords):
        sh = el.module.vshifts[i]
        coords.append(Operator(c.sig, {m: v for m, v in c.terms.items()
                                       if weyl.vdeg(c.sig, m) + sh == top}))
    return ModuleElement(el.module, coords)


def _weyl_gb_F(gens, module):
    return buchberger(gens, OrderSpec("F"), module)


def t_injective_on_grF(gens, module: ShiftedFreeModule) -> tuple:
    """Is t a nonzerodivisor on gr^F(M), M = module/<gens> over D_{x,t}?"""
    sig = module.sig
    gb = _weyl_gb_F(gens, module)
    csig = Signature(sig.n, sig.p, homogenized=False, commutative=True)
    cmod = ShiftedFreeModule(csig, module.fshifts)
    rels = [ModuleElement(cmod, symbol_vector(g, module.fshifts).coords) for g in gb.generators]
    t = Operator.gen(csig, "t")
    if not rels:
        return True, rels
    return ideal_quotient_by_element(rels, t), rels


def h_injective_on_grV(gens, module: ShiftedFreeModule) -> tuple:
    """Is h a nonzerodivisor on gr^V(R M)?

    R M is presented by the homogenizations of an F-Groebner basis; its
    V-initial module J is read off a V-first Groebner basis, and h is
    injective iff J is h-saturated.
    """
    sig = module.sig
    gb = _weyl_gb_F(gens, module)
    hsig = sig.with_mode(homogenized=True)
    hmod = module.with_sig(hsig)
    hgens = [ModuleElement(hmod, filt.homogenize(g).coords) for g in gb.generators]
    if not hgens:
        return True, []
    vgb = buchberger(hgens, OrderSpec("VF"), hmod)
    J = [initial_V(g) for g in vgb.generators]
    Jgb = buchberger(J, OrderSpec("VF"), hmod)
    deh = [ModuleElement(module, filt.dehomogenize(g).coords) for g in J]
    sat = _weyl_gb_F(deh, module)
    for g in sat.generators:
        hg = ModuleElement(hmod, filt.homogenize(g).coords)
        if not contains(Jgb, hg):
            return False, J
    return True, J


def strictness_prop10(gens, module: ShiftedFreeModule) -> StrictnessReport:
    """The two sufficient conditions for strictness of t: V_{k1+1}(M) -> V_{k1}(M):
    t injective on gr^F(M) and h injective on gr^V(R M)."""
    if module.sig.p != 1:
        raise ValueError("strictness test needs exactly one t-variable")
    if module.sig.homogenized:
        raise ValueError("give the presentation over the Weyl algebra (h = 1)")
    t_ok, rels_f = t_injective_on_grF(gens, module)
    h_ok, rels_v = h_injective_on_grV(gens, module)
    return StrictnessReport(t_ok, h_ok, rels_f, rels_v)


def homology_vanishes(C: FreeComplex, i: int, order: OrderSpec | None = None) -> bool:
    """ker d_i == im d_{i+1} (d_0 = 0, d_{l+1} = 0), by a syzygy computation."""
    from .groebner import syzygies_of

    order = order or OrderSpec("F")
    mod = C.modules[i]
    if mod.rank == 0:
        return True
    if i == 0:
        kernel = [mod.basis(j) for j in range(mod.rank)]
    else:
        imgs = C.maps[i - 1]
        kernel = [s for s in syzygies_of(imgs, order, C.modules[i - 1]).generators
                  if not s.is_zero()] if imgs else []
        kernel = [ModuleElement(mod, s.coords) for s in kernel]
    if not kernel:
        return True
    images = [v for v in C.maps[i]] if i < C.length else []
    images = [v for v in images if not v.is_zero()]
    if not images:
        return False
    gb = buchberger(images, order, mod)
    return all(contains(gb, k) for k in kernel)
