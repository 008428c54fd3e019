"""Command-line frontend.

Every subcommand builds one JSON document {"command", "config", "result"}
(verify-all adds "checks" and "pass"), prints a short summary and, with
--json PATH, writes the document to PATH ("-" for standard output).
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from . import acceptance, bloch, chern2, grassmann, multival, periods, realdeligne
from .acceptance import RunConfig
from .multival import TWO_PI_I, PathSpec, continue_along

__all__ = ["main", "build_parser"]


def _complex(s: str) -> complex:
    return complex(s.replace(" ", "").replace("i", "j"))


def _cpx(v: complex) -> list[float]:
    v = complex(v)
    return [v.real, v.imag]


def _precision(s: str) -> tuple[str, int]:
    if s == "binary64":
        return "binary64", 53
    if s.startswith("extended"):
        bits = s.partition(":")[2] or "113"
        return "extended", int(bits)
    raise argparse.ArgumentTypeError("precision is binary64 or extended[:bits]")


def _config(args) -> RunConfig:
    kind, bits = args.precision
    return RunConfig(precision=kind, bits=bits, atom_tol=args.tol_atom, quadrature_tol=args.tol_quad,
                     fd_tol=args.tol_fd, seed=args.seed, output=args.json,
                     corrupt_beta=getattr(args, "corrupt_beta", False))


def _state(z: complex, depth: int, waypoints: list[complex] | None = None):
    if waypoints:
        return continue_along(PathSpec(0.5, tuple(waypoints) + (z,)), depth)
    return continue_along(PathSpec.straight(0.5, z), depth)


# ---------------------------------------------------------------- subcommands

def cmd_polylog(args, cfg):
    st = _state(args.z, args.n, args.via)
    return {
        "state": st.to_json(),
        "Li": {str(m): _cpx(st.Li(m)) for m in range(1, args.n + 1)},
        "L": _cpx(multival.L_n(st, args.n)),
        "single_valued": _cpx(multival.zagier_single_valued(st, args.n)),
    }, f"L_{args.n}({args.z}) = {multival.L_n(st, args.n):.12g}"


def cmd_monodromy(args, cfg):
    st = _state(args.z, max(args.n, 2))
    closed = multival.monodromy_defect(st, args.loop, args.n)
    moved = multival.numeric_monodromy(st, args.loop)
    numeric = (multival.L_n(moved, args.n) - multival.L_n(st, args.n)) / TWO_PI_I
    exact = bloch.monodromy_of_L(args.loop, args.n)
    res = {"loop": args.loop, "n": args.n, "closed_form": _cpx(closed), "numeric": _cpx(numeric),
           "residual": abs(closed - numeric), "polynomial": repr(exact)}
    return res, f"(T-1)/2πi L_{args.n} = {exact}   residual {res['residual']:.2e}"


def cmd_period(args, cfg):
    if args.matrix:
        with open(args.matrix) as fh:
            M = periods.PeriodMatrix.from_json(json.load(fh))
    elif args.example == "four-by-four":
        got, _ = acceptance.four_by_four_example()
        return {"period_prime": repr(got)}, repr(got)
    else:
        M = periods.polylog_matrix(args.n, _state(args.z, args.n))
    F = periods.top_frame(M)
    t = periods.period_tensor(F)
    res = {"matrix": M.to_json(), "period_prime": repr(t), "period": repr(periods.big_period(F).normalize())}
    if args.example is None and not args.matrix:
        res["lie_period"] = _cpx(periods.combination_period(periods.lie_l(F)).value({**M.env, "T": TWO_PI_I}))
    return res, res["period_prime"]


def cmd_five_term(args, cfg):
    if args.reals:
        ts = sorted(float(x) for x in args.points)
        r = bloch.p2_sum(bloch.five_term_points(ts)).residual(cfg.atom_tol)
        return {"points": ts, "p2_residual": r}, f"p2(five-term) residual {r:.2e}"
    pts = [Fraction(x) for x in args.points]
    rel = bloch.five_term(*pts)
    zero = bloch.delta(rel).is_zero()
    return ({"points": [str(p) for p in pts], "relation": {str(k): v for k, v in rel.items()}, "delta_zero": zero},
            f"delta(five-term) = 0: {zero}")


def cmd_ladder(args, cfg):
    st = _state(args.z, 5)
    ys = args.y or []
    n, k = args.n, args.k
    need = k - 1 if k < n - 1 else n - 2
    if len(ys) < need:
        raise SystemExit(f"l_{n}^{k} needs {need} values of --y")
    sq = bloch.ladder_square(n, k, st, ys[:need])
    om = bloch.ladder_omega_residual(n, k, st, ys[:k - 1])
    res = {"n": n, "k": k, "map": repr(bloch.ladder(n, k)), "square_residual": sq, "omega_residual": om}
    return res, f"l_{n}^{k}: square {sq:.2e}, omega {om:.2e}"


def cmd_bigrass(args, cfg):
    if args.flags:
        with open(args.flags) as fh:
            flags = grassmann.DecoratedFlagTuple.from_json(json.load(fh))
    else:
        flags = grassmann.random_flag_tuple(args.m + 1, args.N, random.Random(cfg.seed))
    image = grassmann.c_m(flags)
    resid = grassmann.chain_map_residual(flags)
    res = {"flags": flags.to_json(), "terms": len(image.terms), "bidegrees": sorted(map(list, image.bidegrees())),
           "chain_map": resid.is_zero()}
    return res, f"d c_m = c_(m-1) d: {resid.is_zero()} ({len(image.terms)} configuration terms)"


def cmd_hypersimplex(args, cfg):
    dec = grassmann.hypersimplicial_decomposition(args.m, args.N)
    res = {"m": args.m, "N": args.N,
           "cells": [{"p": h.p, "q": h.q, "a": list(h.a)} for h in dec],
           "counts": {str(q): grassmann.hypersimplex_count(args.m, args.N, q) for q in range(args.m)},
           "facet_pairing": grassmann.facet_pairing_check(args.m, args.N)}
    return res, f"{len(dec)} hypersimplices, facet pairing {res['facet_pairing']}"


def cmd_chern2(args, cfg):
    if args.data:
        with open(args.data) as fh:
            data = chern2.SectionData.from_json(json.load(fh))
    else:
        data = chern2.random_section_data(args.charts, random.Random(cfg.seed))
    if args.cover == "boundary":
        nerve = chern2.Nerve.simplex_boundary(args.charts - 1)
    else:
        nerve = chern2.Nerve.full_simplex(args.charts - 1)
    c = chern2.assemble_class(nerve, data)
    rep = c.report()
    rep["data"] = data.to_json()
    return json.loads(json.dumps(rep, default=str)), f"cocycle residual {rep['cocycle_residual']:.2e}"


def cmd_homotopy(args, cfg):
    r = realdeligne.homotopy_check(args.n, args.samples, args.h, seed=cfg.seed)
    return {"n": args.n, "samples": args.samples, "h": args.h, "residual": r}, f"max residual {r:.2e}"


# ---------------------------------------------------------------- driver

def _global_flags(ap: argparse.ArgumentParser, defaults: bool) -> None:
    def dflt(v):
        return v if defaults else argparse.SUPPRESS
    ap.add_argument("--precision", type=_precision, default=dflt(("binary64", 53)),
                    help="binary64 (default) or extended[:bits] for the mpmath oracles")
    ap.add_argument("--seed", type=int, default=dflt(0))
    ap.add_argument("--tol-atom", type=float, default=dflt(1e-9))
    ap.add_argument("--tol-quad", type=float, default=dflt(1e-8))
    ap.add_argument("--tol-fd", type=float, default=dflt(1e-6))
    ap.add_argument("--json", metavar="PATH", default=dflt(None),
                    help="write the JSON document here ('-' for stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="expcomplex", description="Exponential complexes and polylogarithms")
    _global_flags(ap, defaults=True)
    # the same flags are accepted after the subcommand name
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, defaults=False)
    sub = ap.add_subparsers(dest="command", required=True)
    _add = sub.add_parser
    sub.add_parser = lambda *a, **k: _add(*a, parents=[common], **k)

    p = sub.add_parser("polylog", help="continue log and Li_k along a path")
    p.add_argument("--z", type=_complex, required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--via", type=_complex, nargs="*", help="waypoints after the base point 1/2")
    p.set_defaults(fn=cmd_polylog)

    p = sub.add_parser("monodromy", help="closed-form and numeric monodromy of L_n")
    p.add_argument("--z", type=_complex, default=complex(0.3, 0.4))
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--loop", choices=multival.LOOPS, default="g1")
    p.set_defaults(fn=cmd_monodromy)

    p = sub.add_parser("period", help="big period of a framed matrix")
    p.add_argument("--matrix", help="JSON file {weights, entries}")
    p.add_argument("--example", choices=["four-by-four"])
    p.add_argument("--n", type=int, default=2, help="weight of the polylogarithm matrix")
    p.add_argument("--z", type=_complex, default=complex(0.3, 0.4))
    p.set_defaults(fn=cmd_period)

    p = sub.add_parser("five-term", help="five-term relation: exact delta or p2 residual")
    p.add_argument("points", nargs=5)
    p.add_argument("--reals", action="store_true", help="treat points as reals and evaluate p2")
    p.set_defaults(fn=cmd_five_term)

    p = sub.add_parser("ladder", help="ladder maps l_n^k")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--z", type=_complex, default=complex(0.3, 0.4))
    p.add_argument("--y", type=_complex, nargs="*")
    p.set_defaults(fn=cmd_ladder)

    p = sub.add_parser("bigrass", help="decorated flags to the Grassmannian bicomplex")
    p.add_argument("--flags", help="JSON file: list of flags, each a list of N vectors")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--N", type=int, default=3)
    p.set_defaults(fn=cmd_bigrass)

    p = sub.add_parser("hypersimplex", help="hypersimplicial N-decomposition of the m-simplex")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(fn=cmd_hypersimplex)

    p = sub.add_parser("chern2", help="second Chern class cocycle on a synthetic nerve")
    p.add_argument("--data", help="JSON file of section minors")
    p.add_argument("--charts", type=int, default=5)
    p.add_argument("--cover", choices=["boundary", "full"], default="boundary")
    p.set_defaults(fn=cmd_chern2)

    p = sub.add_parser("homotopy-check", help="s delta + d s = phi at random points")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--h", type=float, default=1e-4)
    p.set_defaults(fn=cmd_homotopy)

    p = sub.add_parser("verify-all", help="run the acceptance suite")
    p.add_argument("--only", nargs="*", choices=sorted(acceptance.CHECKS))
    p.add_argument("--corrupt-beta", action="store_true", help="fault injection: perturb one Bernoulli coefficient")
    p.set_defaults(fn=None)
    return ap


def _emit(doc: dict, path: str | None) -> None:
    if not path:
        return
    text = json.dumps(doc, indent=2, default=str)
    if path == "-":
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.command == "verify-all":
        results = acceptance.verify_all(cfg, args.only)
        doc = {"command": "verify-all", **acceptance.report(results, cfg)}
        for r in results:
            print(r.line())
        print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
        _emit(doc, args.json)
        return 0 if doc["pass"] else 1
    result, summary = args.fn(args, cfg)
    doc = {"command": args.command, "config": acceptance.report([], cfg)["config"], "result": result}
    if args.json != "-":
        print(summary)
    _emit(doc, args.json)
    return 0


if __name__ == "__main__":
    sys.exit(main())
