"""Command-line interface: ``dmodres <command> [options]``.

Exit codes: 0 success, 1 mathematical failure (violated invariant,
non-minimal complex, failed certificate), 2 usage or syntax error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from . import filtration as filt
from .filtration import ModuleElement, ShiftedFreeModule, parse_order
from .groebner import NonTermination, buchberger, syzygies_of
from .parse import ElaborationError, ParseError, parse_operator, parse_rationals, parse_univariate, parse_vectors
from .resolution import NotMinimalError, betti, free_resolution, minimalize, strictness_prop10
from .restriction import BFunction, RestrictionError, restriction_complex
from .weyl import Signature, render

SCHEMA = "dmodres-report/1"


class UsageError(Exception):
    pass


class MathError(Exception):
    pass


def _ints(text, what):
    if text is None:
        return None
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated integers, got {text!r}") from None


def _signature(args, homogenized=None) -> Signature:
    if args.n is None:
        raise UsageError("--n is required")
    if args.n < 0 or args.p < 0 or args.n + args.p < 1:
        raise UsageError("need n >= 0, p >= 0 and n + p >= 1")
    hom = args.homogenized if homogenized is None else homogenized
    return Signature(args.n, args.p, homogenized=hom)


def _order(args):
    try:
        order = parse_order(args.order)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if "V" in order.kind and args.p < 1:
        raise UsageError("V-orders need at least one t-variable (--p)")
    return order


def _module_and_gens(args, sig):
    if not args.gens:
        raise UsageError("--gens is required")
    vecs = parse_vectors(args.gens, sig)
    rank = len(vecs[0])
    if any(len(v) != rank for v in vecs):
        raise UsageError("all generators must have the same number of coordinates")
    fs = _ints(args.shifts_f, "--shifts-f") or (0,) * rank
    vs = _ints(args.shifts_v, "--shifts-v") or (0,) * rank
    if len(fs) != rank or len(vs) != rank:
        raise UsageError("shift vectors must match the rank")
    mod = ShiftedFreeModule(sig, fs, vs)
    return mod, [mod.element(v) for v in vecs]


def _vec_json(v):
    return [render(c) for c in v.coords]


def _qh(args):
    from .localcohom import QuasiHomogeneousInput, poly_ring

    if not args.f or not args.weights:
        raise UsageError("--f and --weights are required")
    weights = parse_rationals(args.weights)
    n = args.n if args.n is not None else len(weights)
    f = parse_operator(args.f, poly_ring(n))
    return QuasiHomogeneousInput(f, weights)


def _bfunction(args):
    if args.bfun is not None:
        return BFunction.from_coeffs(parse_univariate(args.bfun), args.k1)
    if args.k1 is not None:
        return args.k1
    raise UsageError("give --bfun or --k1")


# -- commands ---------------------------------------------------------------------


def cmd_mul(args):
    sig = _signature(args)
    if len(args.operands) != 2:
        raise UsageError("mul takes two operands")
    a, b = (parse_operator(t, sig) for t in args.operands)
    prod = a * b
    return render(prod), {"product": render(prod)}


def cmd_gb(args):
    sig = _signature(args)
    mod, gens = _module_and_gens(args, sig)
    gb = buchberger(gens, _order(args), mod)
    rows = [_vec_json(g) for g in gb.generators]
    text = "\n".join("[" + ", ".join(r) + "]" for r in rows)
    return text, {"order": _order(args).to_json(), "basis": rows}


def cmd_syz(args):
    sig = _signature(args)
    mod, gens = _module_and_gens(args, sig)
    syz = syzygies_of(gens, _order(args), mod)
    rows = [_vec_json(s) for s in syz.generators]
    text = "\n".join("[" + ", ".join(r) + "]" for r in rows) or "(no syzygies)"
    return text, {"syzygies": rows}


def _resolve(args, homogenize):
    sig = _signature(args)
    mod, gens = _module_and_gens(args, sig)
    if homogenize and not sig.homogenized:
        hmod = mod.with_sig(sig.with_mode(homogenized=True))
        gens = [ModuleElement(hmod, filt.homogenize(g).coords) for g in gens]
        mod = hmod
    return free_resolution(gens, mod, _order(args), args.length)


def _complex_text(C):
    lines = []
    for i, m in enumerate(C.modules):
        lines.append(f"L{i}: rank {m.rank}, F-shifts {list(m.fshifts)}, V-shifts {list(m.vshifts)}")
    return "\n".join(lines)


def cmd_res(args):
    C = _resolve(args, homogenize=False)
    return _complex_text(C), {"complex": C.to_json()}


def cmd_minres(args):
    C = minimalize(_resolve(args, homogenize=True))
    return _complex_text(C), {"complex": C.to_json()}


def cmd_betti(args):
    C = _resolve(args, homogenize=True)
    if not args.no_minimalize:
        C = minimalize(C)
    B = betti(C)
    return str(B), {"betti": B.to_json()}


def cmd_bfun(args):
    from .localcohom import bernstein_sato_qh, certify_bfunction

    q = _qh(args)
    bs = bernstein_sato_qh(q)
    data = {"b_f": bs.b_f.to_json("s"), "kprime": bs.kprime, "k1": bs.k1,
            "b_M": bs.b_M.to_json("X")}
    text = bs.b_f.format("s")
    if args.certify:
        cert = certify_bfunction(q, bs.b_f)
        data["certified"] = cert is not None
        if cert is None:
            raise MathError("no functional equation found within the search bounds")
    return text, data


def cmd_annfs(args):
    from .localcohom import build_M_presentation

    q = _qh(args)
    pres = build_M_presentation(q)
    rows = []
    for name, img, fs, vs in zip(pres.names, pres.images, pres.source.fshifts, pres.source.vshifts):
        rows.append({"name": name, "operator": render(img.coords[0]), "shift": [fs, vs]})
    text = "\n".join(f"{r['name']}: {r['operator']}  (F,V) = ({r['shift'][0]},{r['shift'][1]})" for r in rows)
    return text, {"generators": rows}


def cmd_restrict(args):
    if args.p != 1:
        raise UsageError("restrict needs --p 1")
    b = _bfunction(args)
    C = _resolve(args, homogenize=True)
    R = restriction_complex(C, b)
    out = minimalize(R.complex).dehomogenize()
    return _complex_text(out), {"k1": R.k1, "complex": out.to_json()}


def cmd_strict(args):
    if args.p != 1:
        raise UsageError("strict needs --p 1")
    sig = _signature(args, homogenized=False)
    mod, gens = _module_and_gens(args, sig)
    rep = strictness_prop10(gens, mod)
    text = f"t-injective on gr^F: {rep.t_injective}\nh-injective on gr^V(R M): {rep.h_injective}"
    return text, {"t_injective": rep.t_injective, "h_injective": rep.h_injective}


def cmd_lc(args):
    from .localcohom import lc_report

    q = _qh(args)
    report = lc_report(q)
    lines = [
        f"b_f(s) = {report['bernstein_sato']['b_f']['polynomial']}",
        f"k' = {report['bernstein_sato']['kprime']}, k1 = {report['bernstein_sato']['k1']}",
        "restriction presentation columns:",
    ]
    for col in report["restriction_presentation"]["columns"]:
        lines.append("  [" + ", ".join(col) + "]")
    return "\n".join(lines), report


COMMANDS = {
    "mul": cmd_mul, "gb": cmd_gb, "syz": cmd_syz, "res": cmd_res, "minres": cmd_minres,
    "betti": cmd_betti, "bfun": cmd_bfun, "annfs": cmd_annfs, "restrict": cmd_restrict,
    "strict": cmd_strict, "lc": cmd_lc,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dmodres", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("operands", nargs="*", help="operands for mul")
    ap.add_argument("--n", type=int, help="number of x-variables")
    ap.add_argument("--p", type=int, default=0, help="number of t-variables")
    ap.add_argument("--homogenized", action="store_true", help="work in D^(h) instead of the Weyl algebra")
    ap.add_argument("--order", default="F", help="F, V, FV or VF, optionally suffixed :POT")
    ap.add_argument("--length", type=int, default=3)
    ap.add_argument("--gens", help="generators: expressions or [a, b, ...] vectors separated by ';'")
    ap.add_argument("--shifts-f", dest="shifts_f")
    ap.add_argument("--shifts-v", dest="shifts_v")
    ap.add_argument("--bfun", help="b-function as a polynomial in s")
    ap.add_argument("--k1", type=int, help="truncation index (overrides upward)")
    ap.add_argument("--f", help="quasi-homogeneous polynomial in x1..xn")
    ap.add_argument("--weights", help="comma-separated rational weights")
    ap.add_argument("--certify", action="store_true", help="bfun: also solve the functional equation")
    ap.add_argument("--no-minimalize", dest="no_minimalize", action="store_true")
    ap.add_argument("--json", help="write the JSON report to this path ('-' for stdout)")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_intermixed_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    from .localcohom import InvariantError, PipelineError

    try:
        text, data = COMMANDS[args.command](args)
    except (UsageError, ParseError, ElaborationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (MathError, NotMinimalError, InvariantError, PipelineError, RestrictionError,
            NonTermination, NotImplementedError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report = {"schema": SCHEMA, "version": __version__, "command": args.command, "result": data}
    if args.json == "-":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(text)
        if args.json:
            with open(args.json, "w") as fh:
                json.dump(report, fh, indent=2, sort_keys=True)
                fh.write("\n")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
