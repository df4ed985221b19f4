"""Quasi-homogeneous isolated singularities: Milnor data, the Bernstein-Sato
polynomial, the action of operators on O[1/f], and filtered presentations of
O[1/f] and of N = O[1/f]/O.

Throughout, f is a polynomial in x_1..x_n with rational coefficients and
weights w with theta(f) = f, theta = sum w_i x_i d_i.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import factorial

import sympy

from . import filtration as filt
from . import weyl
from .filtration import ModuleElement, OrderSpec, ShiftedFreeModule
from .groebner import (
    buchberger,
    divide,
    is_involutive,
    is_relation,
    same_submodule,
    symbol_vector,
)
from .resolution import FreeComplex, free_resolution, minimalize
from .restriction import BFunction, restriction_complex
from .weyl import Operator, Signature


class InvariantError(ValueError):
    """Input violates quasi-homogeneity or isolatedness."""


class PipelineError(RuntimeError):
    def __init__(self, stage, message):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


# -- polynomials ------------------------------------------------------------------


def poly_ring(n: int, p: int = 0) -> Signature:
    return Signature(n, p, homogenized=False, commutative=True)


def pdiff(g: Operator, i: int) -> Operator:
    """Partial derivative of a commutative polynomial in its i-th coordinate."""
    out = {}
    for m, c in g.terms.items():
        if m[i]:
            mm = m[:i] + (m[i] - 1,) + m[i + 1:]
            out[mm] = out.get(mm, 0) + c * m[i]
    return Operator(g.sig, out)


def as_operator(g: Operator, sig: Signature) -> Operator:
    """A polynomial (no xi-variables) as a multiplication operator."""
    if g.sig.nvars != sig.nvars:
        raise ValueError("variable count mismatch")
    return Operator(sig, {m[:-1] + (0,): c for m, c in g.terms.items()})


def as_polynomial(P: Operator, sig: Signature) -> Operator:
    return Operator(sig, {m[:-1] + (0,): c for m, c in P.terms.items()})


@dataclass(frozen=True)
class QuasiHomogeneousInput:
    f: Operator
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(Fraction(w) for w in self.weights))
        sig = self.f.sig
        if not sig.commutative or sig.p:
            object.__setattr__(self, "f", as_polynomial(self.f, poly_ring(sig.n)))
        n = self.n
        if len(self.weights) != n:
            raise InvariantError("one weight per variable expected")
        if any(w <= 0 for w in self.weights):
            raise InvariantError("weights must be positive")
        euler = Operator(self.f.sig)
        for i, w in enumerate(self.weights):
            euler = euler + (Operator.gen(self.f.sig, f"x{i + 1}") * pdiff(self.f, i)).scale(w)
        if euler != self.f:
            raise InvariantError("theta(f) != f for the given weights")
        if not milnor_finite(self):
            raise InvariantError("the Jacobian ideal is not zero-dimensional")

    @property
    def n(self) -> int:
        return self.f.sig.n

    @property
    def wsum(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    def gradient(self):
        return [pdiff(self.f, i) for i in range(self.n)]

    def wdeg(self, mono) -> Fraction:
        return sum((w * a for w, a in zip(self.weights, mono)), Fraction(0))


def _jacobian_basis(q: QuasiHomogeneousInput):
    grads = [g for g in q.gradient() if g.terms]
    mod = ShiftedFreeModule(q.f.sig, (0,))
    return buchberger([ModuleElement(mod, [g]) for g in grads], OrderSpec("F"), mod)


def _leading_exponents(gb):
    n = gb.module.sig.n
    return [lm[:n] for _, lm in gb.leading]


def milnor_finite(q: QuasiHomogeneousInput) -> bool:
    leads = _leading_exponents(_jacobian_basis(q))
    for i in range(q.n):
        if not any(e[i] > 0 and all(e[j] == 0 for j in range(q.n) if j != i) for e in leads):
            return False
    return True


@dataclass(frozen=True)
class MilnorData:
    basis: tuple
    weighted_degrees: tuple
    wsum: Fraction

    @property
    def mu(self) -> int:
        return len(self.basis)


def milnor_data(q: QuasiHomogeneousInput) -> MilnorData:
    """Standard monomials of C[x]/J(f) w.r.t. a degree order."""
    leads = _leading_exponents(_jacobian_basis(q))
    bounds = []
    for i in range(q.n):
        bounds.append(min(e[i] for e in leads
                          if e[i] > 0 and all(e[j] == 0 for j in range(q.n) if j != i)))
    basis = []
    for e in product(*(range(b) for b in bounds)):
        if not any(all(a >= b for a, b in zip(e, L)) for L in leads):
            basis.append(tuple(e))
    basis.sort(key=lambda e: (sum(e), e))
    return MilnorData(tuple(basis), tuple(q.wdeg(e) for e in basis), q.wsum)


# -- Bernstein-Sato polynomial --------------------------------------------------


@dataclass(frozen=True)
class BernsteinSato:
    """b_f(s) with k' = -(least integral root) and k1 = k' - 1; ``b_M`` is the
    b-function of D_{x,t} f^s along t = 0, b_M(X) = b_f(-X-1)."""

    b_f: BFunction
    kprime: int
    k1: int
    b_M: BFunction
    shifts: tuple


def bernstein_sato_qh(q: QuasiHomogeneousInput) -> BernsteinSato:
    """Closed form for quasi-homogeneous isolated singularities:
    b_f(s) = (s+1) prod_{c in S} (s+c), S = {|w| + wdeg(m)} over a monomial
    basis of the Milnor algebra (a set: repeated values count once)."""
    md = milnor_data(q)
    S = sorted({md.wsum + d for d in md.weighted_degrees})
    b_f = BFunction.from_roots([Fraction(-1)] + [-c for c in S])
    ints = [int(c) for c in S if c.denominator == 1] + [1]
    kprime = max(ints)
    k1 = kprime - 1
    b_M = BFunction.from_roots([Fraction(0)] + [c - 1 for c in S], k1)
    return BernsteinSato(b_f, kprime, k1, b_M, tuple(S))


def _sympy_f(q: QuasiHomogeneousInput):
    xs = sympy.symbols(f"x1:{q.n + 1}")
    expr = 0
    for m, c in q.f.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for x, a in zip(xs, m[:q.n]):
            term *= x ** a
        expr += term
    return xs, sympy.expand(expr)


@dataclass
class FunctionalEquation:
    """b(s) f^s = P(s) f^{s+1} with P(s) = sum_beta c_beta(x, s) d^beta."""

    b: object
    operator: dict

    def check(self, q: QuasiHomogeneousInput) -> bool:
        xs, f = _sympy_f(q)
        s = sympy.Symbol("s")
        lhs = 0
        N = max((sum(beta) for beta in self.operator), default=0)
        for beta, c in self.operator.items():
            lhs += c * _d_beta(xs, f, s, beta) * f ** (N - sum(beta))
        return sympy.expand(lhs - self.b * f ** (N - 1) if N >= 1 else lhs - self.b / f) == 0


def _d_beta(xs, f, s, beta):
    """Q with d^beta f^{s+1} = Q f^{s+1-|beta|}."""
    Q = sympy.Integer(1)
    k = 0
    for i, b in enumerate(beta):
        for _ in range(b):
            Q = sympy.expand(sympy.diff(Q, xs[i]) * f + (s + 1 - k) * Q * sympy.diff(f, xs[i]))
            k += 1
    return Q


def functional_equation(q: QuasiHomogeneousInput, b: BFunction, order: int,
                        xdeg: int, sdeg: int) -> FunctionalEquation | None:
    """Solve for P(s) of the given shape with b(s) f^s = P(s) f^{s+1}.

    Unknowns are the coefficients of c_beta in x^a s^k (|beta| <= order,
    |a| <= xdeg, k <= sdeg); multiplying by f^{order - 1 - s} turns the
    equation into a polynomial identity in (x, s), solved exactly.
    """
    xs, f = _sympy_f(q)
    s = sympy.Symbol("s")
    bexpr = sum(sympy.Rational(c.numerator, c.denominator) * s ** d for d, c in b.coeffs.items())
    N = order
    betas = [beta for k in range(N + 1) for beta in _compositions(k, q.n)]
    xmonos = [a for k in range(xdeg + 1) for a in _compositions(k, q.n)]
    unknowns = []
    columns = []
    cache = {beta: sympy.expand(_d_beta(xs, f, s, beta) * f ** (N - sum(beta))) for beta in betas}
    for beta in betas:
        for a in xmonos:
            xm = sympy.Mul(*[x ** e for x, e in zip(xs, a)])
            for k in range(sdeg + 1):
                unknowns.append((beta, a, k))
                columns.append(sympy.Poly(sympy.expand(xm * s ** k * cache[beta]), *xs, s))
    rhs = sympy.Poly(sympy.expand(bexpr * f ** (N - 1)) if N >= 1 else bexpr, *xs, s)
    monos = sorted({m for col in columns for m in col.as_dict()} | set(rhs.as_dict()))
    index = {m: r for r, m in enumerate(monos)}
    A = [[Fraction(0)] * len(columns) for _ in monos]
    for j, col in enumerate(columns):
        for m, c in col.as_dict().items():
            A[index[m]][j] = Fraction(int(c.p), int(c.q))
    rvec = [Fraction(0)] * len(monos)
    for m, c in rhs.as_dict().items():
        rvec[index[m]] = Fraction(int(c.p), int(c.q))
    sol = _solve(A, rvec)
    if sol is None:
        return None
    op = {}
    for (beta, a, k), v in zip(unknowns, sol):
        if v:
            xm = sympy.Mul(*[x ** e for x, e in zip(xs, a)])
            op[beta] = op.get(beta, 0) + sympy.Rational(v.numerator, v.denominator) * xm * s ** k
    return FunctionalEquation(bexpr, op)


def certify_bfunction(q: QuasiHomogeneousInput, b: BFunction) -> FunctionalEquation | None:
    """Search operators of increasing order and coefficient degree; the
    s-degree of the coefficients is bounded by deg b - order + 1."""
    for order in range(1, b.degree + 1):
        for xdeg in range(order + 1):
            fe = functional_equation(q, b, order, xdeg, max(0, b.degree - order + 1))
            if fe is not None and fe.check(q):
                return fe
    return None


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _solve(A, b):
    """One solution of A u = b over Q by Gauss-Jordan elimination, or None."""
    rows = [row[:] + [rhs] for row, rhs in zip(A, b)]
    ncols = len(A[0]) if A else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                fac = rows[i][c]
                rows[i] = [a - fac * p for a, p in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(row[-1] for row in rows[r:]):
        return None
    sol = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        sol[c] = rows[i][-1]
    return sol


# -- Laurent elements -------------------------------------------------------------


class LaurentElement:
    """sum_j g_j / F^j with polynomials g_j; ``polar`` keeps only the class
    modulo polynomials (j >= 1).  Normalized so that no g_j (j >= 1) is
    divisible by F."""

    __slots__ = ("F", "parts", "polar", "_basis")

    def __init__(self, F: Operator, parts: dict, polar: bool = True, _basis=None):
        self.F = F
        self.polar = polar
        self._basis = _basis or buchberger([F], OrderSpec("F"))
        self.parts = self._normalize(parts)

    def _normalize(self, parts):
        zero = Operator(self.F.sig)
        parts = {j: g for j, g in parts.items() if g.terms}
        if not parts:
            return {}
        # the basis holds F / lc(F); quotients are rescaled accordingly
        Fm = self._basis.generators[0].coords[0]
        m0 = next(iter(Fm.terms))
        ratio = Fm.terms[m0] / self.F.terms[m0]
        poly = zero
        for j in [k for k in parts if k <= 0]:
            poly = poly + parts[j] * self.F ** (-j)
        out = {}
        carry = zero
        for j in range(max(max(parts), 0), 0, -1):
            g = parts.get(j, zero) + carry
            carry = zero
            if not g.terms:
                continue
            (qq,), rem = divide(g, self._basis)
            if rem.coords[0].terms:
                out[j] = rem.coords[0]
            carry = qq.scale(ratio)
        poly = poly + carry
        if not self.polar and poly.terms:
            out[0] = poly
        return out

    @classmethod
    def inverse_power(cls, F, j, coeff=1, polar=True, _basis=None):
        return cls(F, {j: Operator.const(F.sig, coeff)}, polar, _basis)

    def _new(self, parts):
        return LaurentElement(self.F, parts, self.polar, self._basis)

    def is_zero(self):
        return not self.parts

    def __eq__(self, other):
        return isinstance(other, LaurentElement) and self.F == other.F and self.parts == other.parts

    def __add__(self, other):
        parts = dict(self.parts)
        for j, g in other.parts.items():
            parts[j] = parts.get(j, Operator(self.F.sig)) + g
        return self._new(parts)

    def __neg__(self):
        return self._new({j: -g for j, g in self.parts.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return self._new({j: g.scale(c) for j, g in self.parts.items()})

    def mul_poly(self, g: Operator):
        return self._new({j: g * v for j, v in self.parts.items()})

    def diff(self, i: int):
        Fi = pdiff(self.F, i)
        parts = {}
        for j, g in self.parts.items():
            parts[j] = parts.get(j, Operator(self.F.sig)) + pdiff(g, i)
            if j:
                parts[j + 1] = parts.get(j + 1, Operator(self.F.sig)) + (g * Fi).scale(-j)
        return self._new(parts)

    def __repr__(self):
        if not self.parts:
            return "0"
        return " + ".join(f"({g})/F^{j}" for j, g in sorted(self.parts.items()))


def act(P: Operator, el: LaurentElement) -> LaurentElement:
    """P . el for a Weyl-algebra operator (h = 1) in the variables of el.F."""
    sig = P.sig
    if sig.homogenized and any(m[-1] for m in P.terms):
        raise ValueError("act expects an operator without h")
    nv = sig.nvars
    if el.F.sig.nvars != nv:
        raise ValueError("operator and Laurent element use different variables")
    psig = el.F.sig
    out = el._new({})
    for m, c in P.terms.items():
        cur = el
        for i in range(nv):
            for _ in range(m[nv + i]):
                cur = cur.diff(i)
        coeff = Operator(psig, {m[:nv] + (0,) * nv + (0,): c})
        out = out + cur.mul_poly(coeff)
    return out


# -- operators and presentations ---------------------------------------------


def weyl_ring(n: int, p: int = 0, homogenized: bool = False) -> Signature:
    return Signature(n, p, homogenized=homogenized)


def theta(q: QuasiHomogeneousInput, sig: Signature) -> Operator:
    out = Operator(sig)
    for i, w in enumerate(q.weights):
        out = out + (Operator.gen(sig, f"x{i + 1}") * Operator.gen(sig, f"dx{i + 1}")).scale(w)
    return out


def _lift_poly(g: Operator, sig: Signature) -> Operator:
    """Polynomial in x (n variables) as an operator in a signature with t."""
    base = Signature(g.sig.n, 0, homogenized=False)
    return weyl.embed(as_operator(g, base), sig)


def s_operators(q: QuasiHomogeneousInput, sig: Signature | None = None) -> dict:
    """{(i, j): f'_i d_j - f'_j d_i} for i < j (0-based indices)."""
    sig = sig or weyl_ring(q.n)
    grads = [_lift_poly(g, sig) for g in q.gradient()]
    out = {}
    for i, j in combinations(range(q.n), 2):
        out[(i, j)] = grads[i] * Operator.gen(sig, f"dx{j + 1}") - grads[j] * Operator.gen(sig, f"dx{i + 1}")
    return out


@dataclass
class Presentation:
    """target / <images>; ``source`` carries the generator shifts and
    ``names`` the generator labels."""

    target: ShiftedFreeModule
    source: ShiftedFreeModule
    images: list
    names: list
    certificates: dict = field(default_factory=dict)

    def columns(self):
        return [img.coords[0] if self.target.rank == 1 else img for img in self.images]

    def operators(self):
        return [img.coords[0] for img in self.images]

    def is_adapted(self, check_v=True) -> bool:
        return filt.bidegree_adapted(self.images, self.source, self.target, check_v)


def build_M_presentation(q: QuasiHomogeneousInput) -> Presentation:
    """D_{x,t} f^s = D_{x,t} [1/(f - t)]: generators dt t + theta, f - t,
    -f'_i dt - d_i, -S_ij with (F, V) shifts (1,0), (0,0), (1,1), (1,0)."""
    sig = weyl_ring(q.n, 1)
    L0 = ShiftedFreeModule(sig, (0,), (0,))
    t, dt = Operator.gen(sig, "t"), Operator.gen(sig, "dt")
    f = _lift_poly(q.f, sig)
    grads = [_lift_poly(g, sig) for g in q.gradient()]
    images, names, fs, vs = [], [], [], []

    def add(op, name, F, V):
        images.append(L0.element([op]))
        names.append(name)
        fs.append(F)
        vs.append(V)

    add(dt * t + theta(q, sig), "X1", 1, 0)
    add(f - t, "X2", 0, 0)
    for i in range(q.n):
        add(-(grads[i] * dt) - Operator.gen(sig, f"dx{i + 1}"), f"e{i + 1}", 1, 1)
    for (i, j), S in s_operators(q, sig).items():
        add(-S, f"e{i + 1}^e{j + 1}", 1, 0)
    return Presentation(L0, ShiftedFreeModule(sig, tuple(fs), tuple(vs)), images, names)


def _pair_index(n):
    return {pair: k for k, pair in enumerate(combinations(range(n), 2))}


def presentation_prop1(q: QuasiHomogeneousInput, bs: BernsteinSato | None = None) -> Presentation:
    """O[1/f] = D [1/f^{k'}] = D/D(theta + k', S_ij), all generators of order 1."""
    bs = bs or bernstein_sato_qh(q)
    sig = weyl_ring(q.n)
    L0 = ShiftedFreeModule(sig, (0,))
    kp = bs.kprime
    ops = [theta(q, sig) + Operator.const(sig, kp)]
    names = ["e"]
    S = s_operators(q, sig)
    for (i, j), op in S.items():
        ops.append(op)
        names.append(f"e{i + 1},{j + 1}")
    pres = Presentation(L0, ShiftedFreeModule(sig, (1,) * len(ops)),
                        [L0.element([o]) for o in ops], names)
    pres.certificates = _s_certificates(q, sig, ops, offset=1, theta_index=0, kp=kp)
    return pres


def presentation_prop2(q: QuasiHomogeneousInput, bs: BernsteinSato | None = None) -> Presentation:
    """N = D [1/f^{k'}] = D/D(f^{k'}, theta + k', S_ij) with shifts 0, 1, 1."""
    bs = bs or bernstein_sato_qh(q)
    sig = weyl_ring(q.n)
    L0 = ShiftedFreeModule(sig, (0,))
    kp = bs.kprime
    f = as_operator(q.f, sig)
    ops = [f ** kp, theta(q, sig) + Operator.const(sig, kp)]
    names = ["e0", "e1"]
    S = s_operators(q, sig)
    for (i, j), op in S.items():
        ops.append(op)
        names.append(f"e{i + 1},{j + 1}")
    shifts = (0,) + (1,) * (len(ops) - 1)
    pres = Presentation(L0, ShiftedFreeModule(sig, shifts), [L0.element([o]) for o in ops], names)
    certs = _s_certificates(q, sig, ops, offset=2, theta_index=1, kp=kp)
    # -d_j f^{k'} + f^{k'-1} f'_j (theta + k') - sum_i f^{k'-1} w_i x_i S_{j,i} = 0
    index = _pair_index(q.n)
    fk1 = f ** (kp - 1)
    grads = [as_operator(g, sig) for g in q.gradient()]
    for j in range(q.n):
        v = [Operator(sig)] * len(ops)
        v[0] = -Operator.gen(sig, f"dx{j + 1}")
        v[1] = fk1 * grads[j]
        for i in range(q.n):
            if i == j:
                continue
            c = fk1 * Operator.gen(sig, f"x{i + 1}").scale(q.weights[i])
            # S_{j,i} = -S_{i,j} when i < j
            k = index[(min(i, j), max(i, j))] + 2
            v[k] = v[k] + (-c if i > j else c)
        certs[f"power j={j + 1}"] = v
    pres.certificates = certs
    return pres


def _s_certificates(q, sig, ops, offset, theta_index, kp):
    """Exact relations: S_ij (theta+k') = (theta+k'-1+w_i+w_j) S_ij, and the
    cyclic identities among the S_ij with f'-coefficients and with d-coefficients."""
    certs = {}
    n = q.n
    index = _pair_index(n)
    th = theta(q, sig) + Operator.const(sig, kp)
    grads = [as_operator(g, sig) for g in q.gradient()]
    S = s_operators(q, sig)
    for (i, j), k in index.items():
        v = [Operator(sig)] * len(ops)
        v[theta_index] = -S[(i, j)]
        v[offset + k] = th - Operator.const(sig, 1 - q.weights[i] - q.weights[j])
        certs[f"euler {i + 1},{j + 1}"] = v
    partials = [Operator.gen(sig, f"dx{i + 1}") for i in range(n)]
    for a, b, c in combinations(range(n), 3):
        for tag, coef in (("cyclic-gradient", grads), ("cyclic-partial", partials)):
            v = [Operator(sig)] * len(ops)
            v[offset + index[(b, c)]] = coef[a]
            v[offset + index[(a, c)]] = -coef[b]
            v[offset + index[(a, b)]] = coef[c]
            certs[f"{tag} {a + 1},{b + 1},{c + 1}"] = v
    return certs


@dataclass
class InvolutivityCertificate:
    status: str
    relations_ok: dict
    symbols_generate: bool
    lifts: list

    def __bool__(self):
        return self.status == "involutive" and all(self.relations_ok.values()) and self.symbols_generate


def certify_involutive(pres: Presentation, degree_bound: int | None = None) -> InvolutivityCertificate:
    """is_involutive on the generators, exactness of each certificate relation,
    and equality of the module of symbol relations with the one spanned by the
    certificates' symbols (plus the ones computed)."""
    ops = pres.operators()
    res = is_involutive(ops, degree_bound)
    orders = [o.ord_F() for o in ops]
    rel_ok = {name: is_relation(ModuleElement(ShiftedFreeModule(ops[0].sig, tuple(orders)), v), ops)
              for name, v in pres.certificates.items()}
    certs = [symbol_vector(ModuleElement(ShiftedFreeModule(ops[0].sig, tuple(orders)), v), orders)
             for v in pres.certificates.values()]
    certs = [c for c in certs if not c.is_zero()]
    symbols_generate = True
    if res.symbol_relations:
        mod = res.symbol_relations[0].module
        certs = [ModuleElement(mod, c.coords) for c in certs]
        symbols_generate = bool(certs) and same_submodule(res.symbol_relations, certs, OrderSpec("F"), mod)
    return InvolutivityCertificate(res.status, rel_ok, symbols_generate, res.lifts)


def cyclic_generator(q: QuasiHomogeneousInput, power: int, polar: bool) -> LaurentElement:
    return LaurentElement.inverse_power(q.f, power, polar=polar)


def annihilates(pres: Presentation, el: LaurentElement) -> bool:
    return all(act(P, el).is_zero() for P in pres.operators())


# -- restriction pipeline -----------------------------------------------------------


@dataclass
class RestrictionPresentation:
    bs: BernsteinSato
    complex: FreeComplex
    homogeneous: FreeComplex
    expected: FreeComplex
    same_columns: bool
    shifts_match: bool
    relations_annihilate: bool

    @property
    def ok(self) -> bool:
        return self.same_columns and self.shifts_match and self.relations_annihilate


def expected_restriction_presentation(q: QuasiHomogeneousInput, bs: BernsteinSato) -> FreeComplex:
    """The expected presentation of N over D, target basis dt^k (k = 0..k1):
    dt^k X1 -> (k+1+theta) at k; dt^k e_i -> -d_i at k, -f'_i at k+1
    (k < k1); X2 -> f at 0."""
    sig = weyl_ring(q.n)
    k1 = bs.k1
    L0 = ShiftedFreeModule(sig, tuple(range(k1 + 1)))
    th = theta(q, sig)
    grads = [as_operator(g, sig) for g in q.gradient()]
    cols, shifts, labels = [], [], []

    def col(entries):
        v = [Operator(sig)] * (k1 + 1)
        for k, e in entries:
            v[k] = v[k] + e
        return L0.element(v)

    for k in range(k1 + 1):
        cols.append(col([(k, th + Operator.const(sig, k + 1))]))
        shifts.append(k + 1)
        labels.append(("X1", k))
    for k in range(k1):
        for i in range(q.n):
            cols.append(col([(k, -Operator.gen(sig, f"dx{i + 1}")), (k + 1, -grads[i])]))
            shifts.append(k + 1)
            labels.append((f"e{i + 1}", k))
    cols.append(col([(0, as_operator(q.f, sig))]))
    shifts.append(0)
    labels.append(("X2", 0))
    L1 = ShiftedFreeModule(sig, tuple(shifts))
    return FreeComplex([L0, L1], [cols], [[("L0", k) for k in range(k1 + 1)], labels])


def polar_generators(q: QuasiHomogeneousInput, k1: int):
    """dt^k -> k! [1/f^{k+1}] in N."""
    basis = buchberger([q.f], OrderSpec("F"))
    return [LaurentElement.inverse_power(q.f, k + 1, factorial(k), True, basis) for k in range(k1 + 1)]


def presentation_prop4(q: QuasiHomogeneousInput, bs: BernsteinSato | None = None,
                       length: int = 2) -> RestrictionPresentation:
    """M presentation -> homogenize -> (F,V)-adapted resolution -> restriction
    at k1 -> minimalize -> dehomogenize, compared with the expected presentation."""
    bs = bs or bernstein_sato_qh(q)
    try:
        pres = build_M_presentation(q)
        hsig = pres.target.sig.with_mode(homogenized=True)
        L0 = pres.target.with_sig(hsig)
        hgens = [ModuleElement(L0, filt.homogenize(g).coords) for g in pres.images]
    except Exception as exc:  # pragma: no cover - defensive
        raise PipelineError("presentation", str(exc)) from exc
    try:
        C = free_resolution(hgens, L0, OrderSpec("FV"), length)
    except Exception as exc:
        raise PipelineError("resolution", str(exc)) from exc
    try:
        R = restriction_complex(C, bs.k1)
    except Exception as exc:
        raise PipelineError("restriction", str(exc)) from exc
    try:
        Mn = minimalize(R.complex)
    except Exception as exc:  # pragma: no cover - defensive
        raise PipelineError("minimalize", str(exc)) from exc
    out = Mn.dehomogenize()
    expected = expected_restriction_presentation(q, bs)
    got_cols = [v for v in out.maps[0]] if out.length else []
    rows_ok = out.modules[0].rank == expected.modules[0].rank
    same = False
    if rows_ok and got_cols:
        mod = expected.modules[0]
        # target basis labels (0, k) in the same order as the expected dt^k
        order = [lab[1] for lab in out.labels[0]]
        perm_cols = []
        for v in got_cols:
            coords = [Operator(mod.sig)] * mod.rank
            for r, k in enumerate(order):
                coords[k] = v.coords[r]
            perm_cols.append(mod.element(coords))
        same = same_submodule(perm_cols, expected.maps[0], OrderSpec("F"), mod)
    shifts_ok = (rows_ok and sorted(out.modules[0].fshifts) == sorted(expected.modules[0].fshifts)
                 and out.length >= 1
                 and sorted(out.modules[1].fshifts) == sorted(expected.modules[1].fshifts))
    gens = polar_generators(q, bs.k1)
    ann = True
    for v in expected.maps[0]:
        total = gens[0]._new({})
        for k, c in enumerate(v.coords):
            total = total + act(c, gens[k])
        ann = ann and total.is_zero()
    return RestrictionPresentation(bs, out, Mn, expected, same, shifts_ok, ann)


# -- report -------------------------------------------------------------------------


def _fmtq(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def lc_report(q: QuasiHomogeneousInput) -> dict:
    """Everything about N = O[1/f]/O in one JSON-ready dictionary."""
    from .resolution import betti

    md = milnor_data(q)
    bs = bernstein_sato_qh(q)
    fe = certify_bfunction(q, bs.b_f)
    p2 = presentation_prop2(q, bs)
    inv = certify_involutive(p2)
    r4 = presentation_prop4(q, bs)
    C = r4.complex
    cols = [[weyl.render(c) for c in v.coords] for v in C.maps[0]] if C.length else []
    return {
        "input": {"f": weyl.render(q.f), "weights": [_fmtq(w) for w in q.weights]},
        "milnor": {"mu": md.mu, "basis": [list(m) for m in md.basis],
                   "weighted_degrees": [_fmtq(d) for d in md.weighted_degrees]},
        "bernstein_sato": {"b_f": bs.b_f.to_json("s"), "b_M": bs.b_M.to_json("X"),
                           "kprime": bs.kprime, "k1": bs.k1,
                           "functional_equation_certified": fe is not None},
        "order_filtration_presentation": {
            "columns": [weyl.render(o) for o in p2.operators()],
            "shifts": list(p2.source.fshifts),
            "involutive": inv.status,
            "certificates_exact": all(inv.relations_ok.values()),
            "symbol_relations_generated": inv.symbols_generate,
        },
        "restriction_presentation": {
            "L0_labels": [list(l) for l in C.labels[0]],
            "L0_shifts": list(C.modules[0].fshifts),
            "L1_labels": [list(l) for l in C.labels[1]] if C.length else [],
            "L1_shifts": list(C.modules[1].fshifts) if C.length else [],
            "columns": cols,
            "betti": betti(r4.homogeneous.__class__(r4.homogeneous.modules[:2],
                                                    r4.homogeneous.maps[:1])).to_json(),
            "matches_expected_columns": r4.same_columns,
            "matches_expected_shifts": r4.shifts_match,
            "expected_relations_annihilate": r4.relations_annihilate,
        },
    }
