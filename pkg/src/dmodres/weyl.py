"""Exact arithmetic in the homogenized Weyl algebra and its graded relatives.

A monomial is stored as a flat exponent tuple

    (x_1..x_n, t_1..t_p, dx_1..dx_n, dt_1..dt_p, e)

read in left normal form ``x^a t^u dx^b dt^v h^e``.  The same representation
serves three rings, selected on the :class:`Signature`:

* ``homogenized`` -- D^(h), with ``dx_i x_i - x_i dx_i = h`` (h central);
* plain Weyl algebra (h set to 1, the ``e`` slot stays 0);
* ``commutative`` -- a polynomial ring (all brackets zero), used for
  associated graded rings such as gr^F(D) = C[x, xi].
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb, perm
from numbers import Rational


@dataclass(frozen=True)
class Signature:
    n: int
    p: int = 0
    homogenized: bool = True
    commutative: bool = False

    def __post_init__(self):
        # n = p = 0 (the ground ring, or C[h]) is allowed: it is the target
        # of restricting a module on the t-line
        if self.n < 0 or self.p < 0:
            raise ValueError(f"bad signature n={self.n}, p={self.p}")

    @property
    def nvars(self) -> int:
        return self.n + self.p

    @property
    def width(self) -> int:
        return 2 * self.nvars + 1

    def coord_names(self) -> list[str]:
        names = [f"x{i + 1}" for i in range(self.n)]
        if self.p == 1:
            names.append("t")
        else:
            names += [f"t{i + 1}" for i in range(self.p)]
        return names

    def names(self) -> list[str]:
        """Printable names of all exponent slots, in key order."""
        coords = self.coord_names()
        return coords + ["d" + c for c in coords] + ["h"]

    def one(self) -> tuple:
        return (0,) * self.width

    def with_mode(self, homogenized=None, commutative=None) -> "Signature":
        return Signature(
            self.n,
            self.p,
            self.homogenized if homogenized is None else homogenized,
            self.commutative if commutative is None else commutative,
        )

    def base(self) -> "Signature":
        """The x-only signature (t-variables dropped)."""
        return Signature(self.n, 0, self.homogenized, self.commutative)


@lru_cache(maxsize=1 << 20)
def mono_mul(nv: int, homogenized: bool, commutative: bool, m1: tuple, m2: tuple):
    """Product of two normal-ordered monomials as ((mono, int coeff), ...).

    Uses the closed Leibniz rule
    dx^b x^c = sum_k C(b,k) c!/(c-k)! x^(c-k) dx^(b-k) h^k, per variable.
    """
    w = 2 * nv
    base = [i + j for i, j in zip(m1, m2)]
    if commutative:
        return ((tuple(base), 1),)
    ranges = []
    idx = []
    for i in range(nv):
        b, c = m1[nv + i], m2[i]
        if b and c:
            idx.append(i)
            ranges.append(range(min(b, c) + 1))
    if not idx:
        if not homogenized:
            base[w] = 0
        return ((tuple(base), 1),)
    out = []
    for ks in product(*ranges):
        coeff = 1
        mono = list(base)
        tot = 0
        for i, k in zip(idx, ks):
            if k:
                coeff *= comb(m1[nv + i], k) * perm(m2[i], k)
                mono[i] -= k
                mono[nv + i] -= k
                tot += k
        mono[w] = mono[w] + tot if homogenized else 0
        out.append((tuple(mono), coeff))
    return tuple(out)


def _coerce(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    raise TypeError(f"not an exact rational: {c!r}")


class Operator:
    """An element of the algebra given by ``sig``; immutable after construction."""

    __slots__ = ("sig", "terms", "_hash")

    def __init__(self, sig: Signature, terms=None):
        self.sig = sig
        if terms is None:
            terms = {}
        elif not isinstance(terms, dict):
            terms = dict(terms)
        self.terms = {m: _coerce(c) for m, c in terms.items() if c != 0}
        self._hash = None

    @classmethod
    def _raw(cls, sig, terms):
        op = cls.__new__(cls)
        op.sig = sig
        op.terms = terms
        op._hash = None
        return op

    # -- constructors -------------------------------------------------------

    @classmethod
    def const(cls, sig, c) -> "Operator":
        return cls(sig, {sig.one(): c})

    @classmethod
    def monomial(cls, sig, mono, c=1) -> "Operator":
        return cls(sig, {tuple(mono): c})

    @classmethod
    def gen(cls, sig, name: str) -> "Operator":
        names = sig.names()
        if sig.p == 1 and name in ("t1", "dt1"):
            name = name[:-1]
        try:
            i = names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r} for {sig}") from None
        if i == sig.width - 1 and not sig.homogenized:
            return cls.const(sig, 1)
        m = [0] * sig.width
        m[i] = 1
        return cls(sig, {tuple(m): 1})

    def gens(self):
        return {n: Operator.gen(self.sig, n) for n in self.sig.names()}

    # -- basic protocol -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, Operator):
            return self.sig == other.sig and self.terms == other.terms
        if isinstance(other, (int, Rational)):
            return self == Operator.const(self.sig, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.sig, frozenset(self.terms.items())))
        return self._hash

    def _check(self, other):
        if isinstance(other, (int, Rational)):
            return Operator.const(self.sig, other)
        if not isinstance(other, Operator):
            return NotImplemented
        if other.sig != self.sig:
            raise ValueError(f"signature mismatch: {self.sig} vs {other.sig}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        t = dict(self.terms)
        for m, c in other.terms.items():
            v = t.get(m, 0) + c
            if v:
                t[m] = v
            else:
                t.pop(m, None)
        return Operator._raw(self.sig, t)

    __radd__ = __add__

    def __neg__(self):
        return Operator._raw(self.sig, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Operator":
        c = _coerce(c)
        if not c:
            return Operator._raw(self.sig, {})
        return Operator._raw(self.sig, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scale(other)
        other = self._check(other)
        if other is NotImplemented:
            return other
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scale(Fraction(1) / _coerce(other))
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = Operator.const(self.sig, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- gradings -----------------------------------------------------------

    def sorted_terms(self):
        """Terms in the canonical storage order (largest first).

        The canonical order is F-degree, then total degree, then lex on the
        exponent tuple; it is independent of any Groebner order.
        """
        return sorted(self.terms.items(), key=lambda mc: canonical_key(self.sig, mc[0]), reverse=True)

    def ord_F(self):
        if not self.terms:
            return None
        return max(fdeg(self.sig, m) for m in self.terms)

    def ord_V(self):
        if not self.terms:
            return None
        return max(vdeg(self.sig, m) for m in self.terms)

    def is_h_homogeneous(self) -> bool:
        return len({fdeg(self.sig, m) for m in self.terms}) <= 1

    def constant_term(self) -> Fraction:
        return self.terms.get(self.sig.one(), Fraction(0))

    def has_t(self) -> bool:
        s = self.sig
        tslots = list(range(s.n, s.nvars)) + list(range(s.nvars + s.n, 2 * s.nvars))
        return any(m[i] for m in self.terms for i in tslots)

    def __repr__(self):
        return f"Operator({render(self)!r})"

    def __str__(self):
        return render(self)


def fdeg(sig: Signature, m: tuple) -> int:
    nv = sig.nvars
    return sum(m[nv:2 * nv]) + m[2 * nv]


def vdeg(sig: Signature, m: tuple) -> int:
    n, nv = sig.n, sig.nvars
    return sum(m[nv + n:2 * nv]) - sum(m[n:nv])


def canonical_key(sig, m):
    return (fdeg(sig, m), sum(m[:2 * sig.nvars]), m)


def multiply(P: Operator, Q: Operator) -> Operator:
    if P.sig != Q.sig:
        raise ValueError(f"signature mismatch: {P.sig} vs {Q.sig}")
    s = P.sig
    nv, hom, comm = s.nvars, s.homogenized, s.commutative
    out: dict = {}
    get = out.get
    for m1, c1 in P.terms.items():
        for m2, c2 in Q.terms.items():
            c = c1 * c2
            for m, k in mono_mul(nv, hom, comm, m1, m2):
                v = get(m, 0) + c * k
                if v:
                    out[m] = v
                else:
                    del out[m]
    return Operator._raw(s, out)


def commutator(P: Operator, Q: Operator) -> Operator:
    return multiply(P, Q) - multiply(Q, P)


def apply_substitution_h(P: Operator, value: int) -> Operator:
    """h -> 1 (dehomogenize, result lives in the plain Weyl algebra) or
    h -> 0 (keep the h-free part; on an h-homogeneous element this is its
    top F-symbol)."""
    s = P.sig
    w = s.width - 1
    if value == 1:
        target = s.with_mode(homogenized=False)
        out: dict = {}
        for m, c in P.terms.items():
            mm = m[:w] + (0,)
            v = out.get(mm, 0) + c
            if v:
                out[mm] = v
            else:
                out.pop(mm, None)
        return Operator._raw(target, out)
    if value == 0:
        return Operator._raw(s, {m: c for m, c in P.terms.items() if m[w] == 0})
    raise ValueError("h can only be specialised to 0 or 1")


def dehomogenize(P: Operator) -> Operator:
    return apply_substitution_h(P, 1)


def homogenize(P: Operator, degree: int | None = None) -> Operator:
    """Lift a Weyl-algebra element into D^(h), padding with powers of h up to
    ``degree`` (default: its F-order)."""
    s = P.sig
    target = s.with_mode(homogenized=True)
    if not P.terms:
        return Operator._raw(target, {})
    if degree is None:
        degree = P.ord_F()
    w = s.width - 1
    out = {}
    for m, c in P.terms.items():
        d = fdeg(s, m)
        if d > degree:
            raise ValueError("cannot homogenize below the F-order")
        mm = m[:w] + (m[w] + degree - d,)
        out[mm] = out.get(mm, 0) + c
    return Operator(target, out)


def symbol(P: Operator, degree: int | None = None) -> Operator:
    """F-principal symbol as a commutative polynomial in (x, t, xi, tau)."""
    s = P.sig
    target = Signature(s.n, s.p, homogenized=False, commutative=True)
    if not P.terms:
        return Operator._raw(target, {})
    if degree is None:
        degree = P.ord_F()
    w = s.width - 1
    out = {}
    for m, c in P.terms.items():
        if fdeg(s, m) == degree:
            if s.homogenized and m[w]:
                continue
            out[m[:w] + (0,)] = c
    return Operator._raw(target, out)


def quantize(S: Operator, sig: Signature) -> Operator:
    """Read a commutative polynomial back as a normal-ordered operator."""
    return Operator(sig, {m[:-1] + (0,): c for m, c in S.terms.items()})


def change_signature(P: Operator, sig: Signature) -> Operator:
    """Reinterpret the exponent tuples of P in a signature of the same width."""
    if sig.width != P.sig.width:
        raise ValueError("signatures have different widths")
    return Operator(sig, P.terms)


def embed(P: Operator, sig: Signature) -> Operator:
    """Embed an x-only operator into a signature with extra t-variables."""
    s = P.sig
    if sig.n != s.n or sig.p < s.p:
        raise ValueError("incompatible embedding")
    out = {}
    for m, c in P.terms.items():
        coords = m[:s.n] + m[s.n:s.nvars] + (0,) * (sig.p - s.p)
        ders = m[s.nvars:s.nvars + s.n] + m[s.nvars + s.n:2 * s.nvars] + (0,) * (sig.p - s.p)
        out[coords + ders + (m[-1],)] = c
    return Operator(sig, out)


def restrict_to_x(P: Operator, sig: Signature) -> Operator:
    """Inverse of :func:`embed` for operators free of t and dt."""
    s = P.sig
    out = {}
    for m, c in P.terms.items():
        if any(m[s.n:s.nvars]) or any(m[s.nvars + s.n:2 * s.nvars]):
            raise ValueError("operator involves t-variables")
        out[m[:s.n] + m[s.nvars:s.nvars + s.n] + (m[-1],)] = c
    return Operator(sig, out)


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def render(P: Operator) -> str:
    """Text form accepted by :func:`dmodres.parse.parse_operator`."""
    if not P.terms:
        return "0"
    names = P.sig.names()
    parts = []
    for m, c in P.sorted_terms():
        factors = []
        for name, k in zip(names, m):
            if k == 1:
                factors.append(name)
            elif k > 1:
                factors.append(f"{name}^{k}")
        a = abs(c)
        if not factors:
            body = _fmt_coeff(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = _fmt_coeff(a) + "*" + "*".join(factors)
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out
