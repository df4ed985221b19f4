"""F- and V-orders, shifted free modules and the homogenization functor R."""

from __future__ import annotations

from dataclasses import dataclass

from . import weyl
from .weyl import Operator, Signature, fdeg, vdeg


@dataclass(frozen=True)
class ShiftedFreeModule:
    """D^r[n][m]: rank r, F-shifts n, V-shifts m."""

    sig: Signature
    fshifts: tuple = ()
    vshifts: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "fshifts", tuple(int(v) for v in self.fshifts))
        vs = tuple(int(v) for v in self.vshifts) if self.vshifts else (0,) * len(self.fshifts)
        object.__setattr__(self, "vshifts", vs)
        if len(self.fshifts) != len(self.vshifts):
            raise ValueError("F- and V-shift vectors differ in length")

    @classmethod
    def free(cls, sig, rank, fshifts=None, vshifts=None):
        return cls(sig, tuple(fshifts or (0,) * rank), tuple(vshifts or (0,) * rank))

    @property
    def rank(self) -> int:
        return len(self.fshifts)

    def zero(self) -> "ModuleElement":
        return ModuleElement(self, [Operator(self.sig)] * self.rank)

    def basis(self, i) -> "ModuleElement":
        coords = [Operator(self.sig)] * self.rank
        coords[i] = Operator.const(self.sig, 1)
        return ModuleElement(self, coords)

    def element(self, coords) -> "ModuleElement":
        return ModuleElement(self, coords)

    def with_sig(self, sig) -> "ShiftedFreeModule":
        return ShiftedFreeModule(sig, self.fshifts, self.vshifts)


class ModuleElement:
    """A vector of operators in a shifted free module (left module structure)."""

    __slots__ = ("module", "coords")

    def __init__(self, module: ShiftedFreeModule, coords):
        coords = tuple(coords)
        if len(coords) != module.rank:
            raise ValueError(f"expected {module.rank} coordinates, got {len(coords)}")
        for c in coords:
            if c.sig != module.sig:
                raise ValueError("coordinate signature does not match module")
        self.module = module
        self.coords = coords

    @property
    def sig(self):
        return self.module.sig

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __len__(self):
        return len(self.coords)

    def is_zero(self):
        return all(c.is_zero() for c in self.coords)

    def __eq__(self, other):
        if not isinstance(other, ModuleElement):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __add__(self, other):
        return ModuleElement(self.module, [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other):
        return ModuleElement(self.module, [a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self):
        return ModuleElement(self.module, [-a for a in self.coords])

    def lmul(self, P) -> "ModuleElement":
        """Left multiplication P * self."""
        if not isinstance(P, Operator):
            P = Operator.const(self.sig, P)
        return ModuleElement(self.module, [P * c for c in self.coords])

    def __repr__(self):
        return "[" + ", ".join(str(c) for c in self.coords) + "]"

    # flat dict {(pos, mono): coeff}, the representation used by the engine
    def to_flat(self) -> dict:
        out = {}
        for i, c in enumerate(self.coords):
            for m, v in c.terms.items():
                out[(i, m)] = v
        return out

    @classmethod
    def from_flat(cls, module, flat) -> "ModuleElement":
        parts = [dict() for _ in range(module.rank)]
        for (i, m), v in flat.items():
            parts[i][m] = v
        return cls(module, [Operator._raw(module.sig, p) for p in parts])


def _as_element(el):
    if isinstance(el, Operator):
        return ShiftedFreeModule.free(el.sig, 1).element([el])
    return el


def ord_F(el):
    """F-order with shifts; None stands for minus infinity (zero element)."""
    el = _as_element(el)
    best = None
    for i, c in enumerate(el.coords):
        if c.terms:
            d = c.ord_F() + el.module.fshifts[i]
            best = d if best is None else max(best, d)
    return best


def ord_V(el):
    """V-order with shifts (t weighs -1, dt weighs +1, h weighs 0)."""
    el = _as_element(el)
    best = None
    for i, c in enumerate(el.coords):
        if c.terms:
            d = c.ord_V() + el.module.vshifts[i]
            best = d if best is None else max(best, d)
    return best


def homogenize(el, degree=None):
    """Multiply each term by the power of h that brings it to ``degree``
    (default ord_F(el)) with respect to the F-shifts."""
    if isinstance(el, Operator):
        return weyl.homogenize(el, degree)
    mod = el.module
    hsig = mod.sig.with_mode(homogenized=True)
    hmod = mod.with_sig(hsig)
    if el.is_zero():
        return hmod.zero()
    if degree is None:
        degree = ord_F(el)
    coords = []
    for i, c in enumerate(el.coords):
        if c.terms:
            coords.append(weyl.homogenize(c, degree - mod.fshifts[i]))
        else:
            coords.append(Operator(hsig))
    return ModuleElement(hmod, coords)


def dehomogenize(el):
    if isinstance(el, Operator):
        return weyl.dehomogenize(el)
    mod = el.module.with_sig(el.sig.with_mode(homogenized=False))
    return ModuleElement(mod, [weyl.dehomogenize(c) for c in el.coords])


def is_homogeneous(el) -> bool:
    el = _as_element(el)
    degs = set()
    for i, c in enumerate(el.coords):
        for m in c.terms:
            degs.add(fdeg(el.sig, m) + el.module.fshifts[i])
    return len(degs) <= 1


def bidegree_adapted(images, source: ShiftedFreeModule, target: ShiftedFreeModule,
                     check_v: bool = True) -> bool:
    """True iff the map e_j -> images[j] respects both filtrations:
    ord_F(images[j]) <= n_j and ord_V(images[j]) <= m_j (target shifts used
    inside ord)."""
    if len(images) != source.rank:
        raise ValueError("one image per source generator expected")
    for j, img in enumerate(images):
        img = _as_element(img)
        if img.module.rank != target.rank:
            raise ValueError("image rank does not match target")
        img = ModuleElement(target, img.coords)
        f = ord_F(img)
        if f is not None and f > source.fshifts[j]:
            return False
        if check_v:
            v = ord_V(img)
            if v is not None and v > source.vshifts[j]:
                return False
    return True


# -- orders -------------------------------------------------------------------

KINDS = ("F", "V", "FV", "VF")


@dataclass(frozen=True)
class OrderSpec:
    """A module monomial order on (position, monomial) pairs.

    The weight part is given by ``kind`` (shifted F-degree and/or shifted
    V-degree); ties are broken by total degree in the non-h variables, then
    lexicographically on the exponent tuple, then by position index (lower
    index wins).  ``pot`` puts the position comparison first.
    """

    kind: str = "F"
    pot: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown order kind {self.kind!r}")

    def key_function(self, sig: Signature, fshifts=(), vshifts=()):
        nv = sig.nvars
        w = 2 * nv
        kind = self.kind
        fsh = tuple(fshifts)
        vsh = tuple(vshifts)
        pot = self.pot

        def key(pos, m):
            F = sum(m[nv:w]) + m[w] + (fsh[pos] if fsh else 0)
            V = vdeg(sig, m) + (vsh[pos] if vsh else 0)
            T = sum(m[:w])
            if kind == "F":
                wt = (F,)
            elif kind == "V":
                wt = (V,)
            elif kind == "FV":
                wt = (F, V)
            else:
                wt = (V, F)
            if pot:
                return (-pos,) + wt + (T, m)
            return wt + (T, m, -pos)

        return key

    def to_json(self):
        return {"kind": self.kind, "position": "POT" if self.pot else "TOP"}


def parse_order(text: str) -> OrderSpec:
    text = text.strip().upper()
    pot = False
    if text.endswith(":POT"):
        pot, text = True, text[:-4]
    elif text.endswith(":TOP"):
        text = text[:-4]
    return OrderSpec(text, pot)
