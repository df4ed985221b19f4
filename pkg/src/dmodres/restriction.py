"""b-functions, the truncation index, Koszul complexes on the t-variables and
the restriction complex V_{k1}(L)/t V_{k1+1}(L) for one t-variable.

Why terms with a positive t-exponent may be deleted: a normal-ordered term
t^u Q (u >= 1) of V-order <= k1 equals t * (t^(u-1) Q) and t^(u-1) Q has
V-order <= k1 + 1, so the term lies in t V_{k1+1}.  What survives is a sum of
x-operators times dt^k, and the shifted V-bound forces k <= k1 - m_i.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import sympy

from . import filtration as filt
from .filtration import ModuleElement, OrderSpec, ShiftedFreeModule
from .groebner import buchberger, contains
from .resolution import FreeComplex, initial_V
from .weyl import Operator, Signature


# -- b-functions ------------------------------------------------------------------


def _poly_to_sympy(coeffs: dict, var):
    return sympy.Poly(
        sum(sympy.Rational(c.numerator, c.denominator) * var ** d for d, c in coeffs.items()),
        var, domain="QQ")


def rational_roots(coeffs: dict):
    """Rational roots of a univariate polynomial with multiplicities, sorted."""
    s = sympy.Symbol("s")
    P = _poly_to_sympy(coeffs, s)
    roots = P.ground_roots()
    return sorted((Fraction(int(r.p), int(r.q)), m) for r, m in roots.items())


def _clean(coeffs) -> dict:
    return {int(d): Fraction(c) for d, c in dict(coeffs).items() if c}


def truncation_index(b) -> int | None:
    """Maximal integral root of b; None when b has no integral root (then
    every V-truncation is trivial)."""
    coeffs = b.coeffs if isinstance(b, BFunction) else _clean(b)
    if not coeffs:
        raise ValueError("the zero polynomial is not a b-function")
    ints = [r for r, _ in rational_roots(coeffs) if r.denominator == 1]
    return int(max(ints)) if ints else None


@dataclass(frozen=True)
class BFunction:
    """A nonzero polynomial b with b(k) != 0 for every integer k > k1."""

    coeffs: dict
    roots: tuple
    k1: int | None

    @classmethod
    def from_coeffs(cls, coeffs, k1: int | None = None) -> "BFunction":
        coeffs = _clean(coeffs)
        if not coeffs:
            raise ValueError("the zero polynomial is not a b-function")
        auto = truncation_index(coeffs)
        if k1 is not None and auto is not None and k1 < auto:
            raise ValueError(f"k1 = {k1} is below the maximal integral root {auto}")
        return cls(coeffs, tuple(rational_roots(coeffs)), auto if k1 is None else k1)

    @classmethod
    def from_roots(cls, roots, k1: int | None = None) -> "BFunction":
        """Monic polynomial prod (X - r)."""
        poly = {0: Fraction(1)}
        for r in roots:
            nxt = {}
            for d, c in poly.items():
                nxt[d + 1] = nxt.get(d + 1, 0) + c
                nxt[d] = nxt.get(d, 0) - Fraction(r) * c
            poly = nxt
        return cls.from_coeffs(poly, k1)

    @property
    def degree(self) -> int:
        return max(self.coeffs)

    def __call__(self, x):
        return sum(c * x ** d for d, c in self.coeffs.items())

    def is_split(self) -> bool:
        return sum(m for _, m in self.roots) == self.degree

    def format(self, var: str = "s") -> str:
        """Factored form when b splits over Q, else expanded."""
        lead = self.coeffs[self.degree]
        if not self.is_split():
            return format_poly(self.coeffs, var)
        parts = []
        for r, m in sorted(self.roots, key=lambda rm: (-rm[0])):
            c = -r
            if c == 0:
                f = var
            else:
                sign = "+" if c > 0 else "-"
                f = f"({var}{sign}{_fmt(abs(c))})"
            parts.append(f if m == 1 else f"{f}^{m}")
        body = "*".join(parts) if parts else "1"
        return body if lead == 1 else f"{_fmt(lead)}*{body}"

    def __str__(self):
        return self.format("s")

    def to_json(self, var: str = "s"):
        return {
            "polynomial": self.format(var),
            "coefficients": {str(d): _fmt(c) for d, c in sorted(self.coeffs.items())},
            "roots": [[_fmt(r), m] for r, m in self.roots],
            "k1": self.k1,
        }


def _fmt(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(coeffs: dict, var: str = "s") -> str:
    out = []
    for d in sorted(coeffs, reverse=True):
        c = coeffs[d]
        mag = abs(c)
        mono = "" if d == 0 else (var if d == 1 else f"{var}^{d}")
        if not mono:
            term = _fmt(mag)
        elif mag == 1:
            term = mono
        else:
            term = f"{_fmt(mag)}*{mono}"
        if not out:
            out.append(term if c > 0 else "-" + term)
        else:
            out.append((" + " if c > 0 else " - ") + term)
    return "".join(out) or "0"


def euler_t(sig: Signature) -> Operator:
    """t_1 dt_1 + ... + t_p dt_p."""
    names = sig.coord_names()[sig.n:]
    out = Operator(sig)
    for nm in names:
        out = out + Operator.gen(sig, nm) * Operator.gen(sig, "d" + nm)
    return out


def _poly_in(coeffs: dict, X: Operator) -> Operator:
    out = Operator(X.sig)
    for d, c in coeffs.items():
        out = out + (X ** d).scale(c)
    return out


def _v_adapted_basis(gens, module: ShiftedFreeModule):
    """Dehomogenized V-first Groebner basis of <gens> (Weyl algebra input)."""
    fgb = buchberger(gens, OrderSpec("F"), module)
    hmod = module.with_sig(module.sig.with_mode(homogenized=True))
    hg = [ModuleElement(hmod, filt.homogenize(g).coords) for g in fgb.generators]
    vgb = buchberger(hg, OrderSpec("VF"), hmod)
    return [filt.dehomogenize(g) for g in vgb.generators]


def verify_bfunction(b, gens, module: ShiftedFreeModule) -> bool:
    """Check b(t dt) gr^V_0(M) = 0 for M = module/<gens> over D_{x,t}, p = 1.

    gr^V_0(M) is generated by the classes of t^{m_i} e_i (m_i >= 0) or
    dt^{-m_i} e_i (m_i < 0), and t dt is central in gr^V(D); so it suffices
    that each b(t dt) g_i, which is V-homogeneous of degree 0, lies in the
    V-initial module in_V(I), read off a V-adapted Groebner basis.
    """
    coeffs = b.coeffs if isinstance(b, BFunction) else _clean(b)
    sig = module.sig
    if sig.p != 1 or sig.homogenized:
        raise ValueError("verify_bfunction expects a Weyl-algebra presentation with one t")
    G = [ModuleElement(module, g.coords) for g in _v_adapted_basis(gens, module)]
    J = [initial_V(g) for g in G if not g.is_zero()]
    bt = _poly_in(coeffs, euler_t(sig))
    t, dt = Operator.gen(sig, "t"), Operator.gen(sig, "dt")
    Jgb = buchberger(J, OrderSpec("VF"), module) if J else None
    for i, m in enumerate(module.vshifts):
        g = module.basis(i).lmul(t ** m if m >= 0 else dt ** (-m))
        P = g.lmul(bt)
        if P.is_zero():
            continue
        if Jgb is None or not contains(Jgb, P):
            return False
    return True


# -- Koszul complex ---------------------------------------------------------------


def koszul_complex(sig: Signature, p: int | None = None) -> FreeComplex:
    """Koszul complex on right multiplication by t_1..t_p on D_{x,t}.

    Basis of the j-th module: increasing j-subsets I of {0..p-1} (labels);
    d(e_I) = sum_k (-1)^k t_{I_k} e_{I - I_k}.  V-shift of e_I is -|I| so the
    differentials are V-adapted.
    """
    p = sig.p if p is None else p
    if p < 1 or p > sig.p:
        raise ValueError("need 1 <= p <= number of t-variables")
    tnames = sig.coord_names()[sig.n:sig.n + p]
    ts = [Operator.gen(sig, nm) for nm in tnames]
    subsets = [list(combinations(range(p), j)) for j in range(p + 1)]
    modules = [ShiftedFreeModule(sig, (0,) * len(s), (-j,) * len(s)) for j, s in enumerate(subsets)]
    maps = []
    for j in range(1, p + 1):
        index = {I: k for k, I in enumerate(subsets[j - 1])}
        imgs = []
        for I in subsets[j]:
            coords = [Operator(sig)] * len(subsets[j - 1])
            for k, tk in enumerate(I):
                rest = I[:k] + I[k + 1:]
                coords[index[rest]] = ts[tk].scale(-1 if k % 2 else 1)
            imgs.append(ModuleElement(modules[j - 1], coords))
        maps.append(imgs)
    return FreeComplex(modules, maps, [[list(I) for I in s] for s in subsets])


# -- restriction ------------------------------------------------------------------


class RestrictionError(ValueError):
    pass


def quotient_labels(module: ShiftedFreeModule, k1: int | None):
    """Labels (i, k) of the basis dt^k e_i of V_{k1}/t V_{k1+1}, 0 <= k <= k1 - m_i."""
    if k1 is None:
        return []
    return [(i, k) for i, m in enumerate(module.vshifts) for k in range(k1 - m + 1)]


def quotient_normal_form(el, k1: int, module: ShiftedFreeModule | None = None):
    """Coordinates (dict label -> x-operator) of the class of el in
    V_{k1}(L)/t V_{k1+1}(L)."""
    if isinstance(el, Operator):
        module = module or ShiftedFreeModule.free(el.sig, 1)
        el = ModuleElement(module, [el])
    elif module is not None:
        el = ModuleElement(module, el.coords)
    module = el.module
    sig = module.sig
    if sig.p != 1:
        raise ValueError("quotient normal form is implemented for one t-variable")
    v = filt.ord_V(el)
    if v is not None and v > k1:
        raise RestrictionError(f"V-order {v} exceeds k1 = {k1}")
    base = sig.base()
    n, nv = sig.n, sig.nvars
    out: dict = {}
    for i, c in enumerate(el.coords):
        for m, coef in c.terms.items():
            if m[n]:
                continue
            k = m[nv + n]
            xm = m[:n] + m[nv:nv + n] + (m[-1],)
            terms = out.setdefault((i, k), {})
            terms[xm] = terms.get(xm, 0) + coef
    return {lab: Operator(base, t) for lab, t in out.items() if any(t.values())}


@dataclass
class RestrictionComplex:
    """The restricted complex over the x-only algebra; ``complex.labels[i]``
    lists (source basis index, dt-exponent) for the basis of the i-th module."""

    complex: FreeComplex
    k1: int | None

    @property
    def labels(self):
        return self.complex.labels

    def to_json(self):
        data = self.complex.to_json()
        data["k1"] = self.k1
        return data


def restriction_complex(C: FreeComplex, b) -> RestrictionComplex:
    """V_{k1}(C)/t V_{k1+1}(C) for a (F,V)-adapted complex C over D_{x,t}.

    ``b`` is a BFunction, an integer k1, or None (no integral root).
    """
    k1 = b.k1 if isinstance(b, BFunction) else b
    sig = C.sig
    if sig.p != 1:
        raise NotImplementedError("restriction is implemented for p = 1")
    if not C.is_adapted():
        raise RestrictionError("complex is not adapted to the bifiltration")
    base = sig.base()
    dt = Operator.gen(sig, "dt")
    labels = [quotient_labels(m, k1) for m in C.modules]
    modules = [ShiftedFreeModule(base, tuple(C.modules[i].fshifts[j] + k for j, k in labs))
               for i, labs in enumerate(labels)]
    maps = []
    for i in range(1, C.length + 1):
        src_labels, tgt_labels = labels[i], labels[i - 1]
        index = {lab: r for r, lab in enumerate(tgt_labels)}
        imgs = []
        for j, k in src_labels:
            v = C.maps[i - 1][j].lmul(dt ** k)
            v = ModuleElement(C.modules[i - 1], v.coords)
            coords = [Operator(base)] * len(tgt_labels)
            for lab, op in quotient_normal_form(v, k1).items():
                if lab not in index:
                    raise RestrictionError(f"label {lab} outside the truncated basis")
                coords[index[lab]] = op
            imgs.append(ModuleElement(modules[i - 1], coords))
        maps.append(imgs)
    out = FreeComplex(modules, maps, labels)
    if not out.check_composition():
        raise RestrictionError("restricted differentials do not compose to zero")
    return RestrictionComplex(out, k1)
