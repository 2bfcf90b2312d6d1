"""Command-line surface: one subcommand per verifiable artifact.

Every subcommand runs a library operation, prints a machine-readable result
on stdout in the requested format (TSV by default, JSON with --format json),
and exits 0 when the operation's invariants held, 1 when a checked property
failed, and 2 on usage or domain errors.  Diagnostics go to stderr only.

TSV output is versioned: the first line is a `# kzero <command> v1` comment,
followed by a sorted `# key=value` parameter comment, a fixed column header,
the data rows, and a final `# status <pass|fail|error>` comment.  Output is
deterministic for fixed arguments, so re-running a command with a warm a_p
cache is byte-identical.

Frobenius traces computed along the way persist in an append-only TSV cache
(default ./apcache.tsv, overridable with --cache or KZERO_AP_CACHE; the flag
wins).  Only first occurrences are kept and flushes rewrite the file
atomically, so the cache too is reproducible byte for byte.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, TextIO

from kzero import bratteli, coherence, contfrac, elliptic, groupalg, lfunction, quadfield

__all__ = ["CommandResult", "run", "main"]

_CACHE_ENV = "KZERO_AP_CACHE"
_DEFAULT_CACHE = "./apcache.tsv"


@dataclass
class CommandResult:
    """What a subcommand computed: parameters, pass/fail/error, and payload."""

    command: str
    parameters: dict
    status: str
    payload: dict


@dataclass
class _Table:
    columns: tuple[str, ...] = ()
    rows: list[tuple] = field(default_factory=list)


class _CacheBox:
    """Lazily opened a_p cache; only commands that count points touch it."""

    def __init__(self, path: str):
        self.path = path
        self._cache: Optional[elliptic.ApCache] = None

    def get(self) -> elliptic.ApCache:
        if self._cache is None:
            self._cache = elliptic.ApCache(self.path)
        return self._cache

    def flush(self) -> None:
        if self._cache is not None:
            self._cache.flush()


def _parse_s(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected re or re,im, got {text!r}")


def _fmt(x: object) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.15g}"
    return str(x)


def _resolve_curve(args: argparse.Namespace) -> elliptic.CurveQ:
    if getattr(args, "D", None) is not None:
        return elliptic.cm_curve_for(args.D)
    if args.a4 is None or args.a6 is None:
        raise ValueError("give either --D for a table curve or both --a4 and --a6")
    return elliptic.CurveQ(args.a4, args.a6)


# -- handlers (return parameters, status, payload, table) -------------------------


def _cmd_contfrac(args, box):
    w = quadfield.omega_of(args.D)
    cf = contfrac.expand(w)
    ok = True
    for conv in contfrac.convergents(cf, 8):
        # |omega - p/q| < 1/q^2, checked exactly in the field
        delta = w - Fraction(conv.p, conv.q)
        if delta.sign() < 0:
            delta = -delta
        ok = ok and delta < Fraction(1, conv.q * conv.q)
    payload = {
        "D": args.D,
        "omega": str(w),
        "preperiod": list(cf.preperiod),
        "period": list(cf.period),
    }
    table = _Table(
        ("D", "preperiod", "period"),
        [(args.D, ",".join(map(str, cf.preperiod)), ",".join(map(str, cf.period)))],
    )
    return {"D": args.D}, ("pass" if ok else "fail"), payload, table


def _cmd_unit(args, box):
    res = quadfield.fundamental_unit(args.D)
    stable = quadfield.unit_stability_check(args.D)
    ok = abs(res.norm) == 1 and res.epsilon > 1 and stable
    payload = {
        "D": args.D,
        "epsilon": str(res.epsilon),
        "norm": res.norm,
        "stable": stable,
    }
    table = _Table(
        ("D", "epsilon", "norm", "stable"),
        [(args.D, str(res.epsilon), res.norm, _fmt(stable))],
    )
    return {"D": args.D}, ("pass" if ok else "fail"), payload, table


def _cmd_omega(args, box):
    w = quadfield.omega_of(args.D)
    payload = {
        "D": args.D,
        "omega": str(w),
        "trace": str(w.trace()),
        "norm": str(w.norm()),
    }
    table = _Table(
        ("D", "omega", "trace", "norm"),
        [(args.D, str(w), str(w.trace()), str(w.norm()))],
    )
    return {"D": args.D}, "pass", payload, table


def _cmd_dimgroup(args, box):
    if args.uhf_p is not None:
        diagram = bratteli.uhf_diagram(args.uhf_p, args.depth)
        sizes = [lv.sizes[0] for lv in diagram.levels]
        payload = {"uhf_p": args.uhf_p, "depth": args.depth, "sizes": sizes}
        table = _Table(
            ("p", "depth", "sizes"),
            [(args.uhf_p, args.depth, ",".join(map(str, sizes)))],
        )
        return {"uhf_p": args.uhf_p, "depth": args.depth}, "pass", payload, table
    if args.D is None:
        raise ValueError("give either --D or --uhf-p")
    w = quadfield.omega_of(args.D)
    diagram = bratteli.effros_shen(w - w.floor())
    group = bratteli.stationary_k0(diagram)
    lam = bratteli.pf_data(diagram).eigenvalue
    shift_ok = bratteli.shift_action_check(diagram)
    assert group.real_embedding is not None
    gens = [str(g) for g in group.real_embedding.generators]
    payload = {
        "D": args.D,
        "seed": list(diagram.seed.sizes),
        "matrix": [list(r) for r in diagram.B],
        "period": diagram.period_length,
        "lambda": str(lam),
        "embedding": gens,
        "shift_check": shift_ok,
    }
    table = _Table(
        ("D", "seed", "matrix", "period", "lambda", "embedding", "shift_check"),
        [(
            args.D,
            ",".join(map(str, diagram.seed.sizes)),
            ";".join(",".join(map(str, r)) for r in diagram.B),
            diagram.period_length,
            str(lam),
            " ; ".join(gens),
            _fmt(shift_ok),
        )],
    )
    return {"D": args.D}, ("pass" if shift_ok else "fail"), payload, table


def _cmd_tower(args, box):
    tower = groupalg.cyclic_tower(args.p, args.depth)
    similar = groupalg.self_similarity_check(tower, args.window)
    orders = [lv.order for lv in tower.levels]
    payload = {
        "p": args.p,
        "depth": args.depth,
        "window": args.window,
        "level_orders": orders,
        "self_similar": similar,
    }
    table = _Table(
        ("p", "depth", "window", "level_orders", "self_similar"),
        [(args.p, args.depth, args.window, ",".join(map(str, orders)), _fmt(similar))],
    )
    params = {"p": args.p, "depth": args.depth, "window": args.window}
    return params, ("pass" if similar else "fail"), payload, table


def _cmd_sl2(args, box):
    profile = groupalg.sl2_degree_profile(args.p)
    counts: dict[int, int] = {}
    for d in profile.degrees:
        counts[d] = counts.get(d, 0) + 1
    payload = {
        "p": args.p,
        "order": profile.order,
        "class_count": len(profile.degrees),
        "degrees": list(profile.degrees),
    }
    table = _Table(
        ("degree", "multiplicity"),
        [(d, counts[d]) for d in sorted(counts)],
    )
    return {"p": args.p}, "pass", payload, table


def _cmd_count(args, box):
    curve = _resolve_curve(args)
    if args.r == 1:
        data = elliptic.trace_of_frobenius(curve, args.p, box.get())
        if not data.good:
            raise elliptic.BadReductionError(f"p = {args.p} is bad for this curve")
        count = args.p + 1 - data.a_p
    else:
        count = elliptic.count_points_extension(curve, args.p, args.r, box.get())
    payload = {"a4": curve.a4, "a6": curve.a6, "p": args.p, "r": args.r, "count": count}
    table = _Table(
        ("a4", "a6", "p", "r", "count"),
        [(curve.a4, curve.a6, args.p, args.r, count)],
    )
    params = {"a4": curve.a4, "a6": curve.a6, "p": args.p, "r": args.r}
    return params, "pass", payload, table


def _cmd_ap(args, box):
    curve = _resolve_curve(args)
    data = elliptic.trace_of_frobenius(curve, args.p, box.get())
    if not data.good:
        raise elliptic.BadReductionError(f"p = {args.p} is bad for this curve")
    payload = {"a4": curve.a4, "a6": curve.a6, "p": args.p, "ap": data.a_p}
    params = {"a4": curve.a4, "a6": curve.a6, "p": args.p}
    if args.D is not None:
        other = elliptic.hecke_ap_cm(args.D, args.p)
        agree = other == data.a_p
        payload.update({"ap_norm_form": other, "match": agree})
        table = _Table(
            ("p", "ap_point_count", "ap_norm_form", "match"),
            [(args.p, data.a_p, other, _fmt(agree))],
        )
        params["D"] = args.D
        return params, ("pass" if agree else "fail"), payload, table
    table = _Table(("p", "ap"), [(args.p, data.a_p)])
    return params, "pass", payload, table


def _cmd_zeta_local(args, box):
    curve = _resolve_curve(args)
    zeta = elliptic.weil_zeta_local(curve, args.p)
    payload = {
        "a4": curve.a4,
        "a6": curve.a6,
        "p": args.p,
        "ap": zeta.a_p,
        "numerator": list(zeta.numerator),
        "factor": str(zeta),
    }
    table = _Table(
        ("p", "ap", "numerator", "factor"),
        [(args.p, zeta.a_p, ",".join(map(str, zeta.numerator)), str(zeta))],
    )
    return {"a4": curve.a4, "a6": curve.a6, "p": args.p}, "pass", payload, table


def _cmd_lfun(args, box):
    if args.which == "zeta":
        approx = lfunction.zeta_partial(args.s, args.bound)
    elif args.which == "motivic":
        curve = _resolve_curve(args)
        approx = lfunction.motivic_l1_partial(curve, args.s, args.bound, box.get())
    else:
        if args.D is None:
            raise ValueError("--which auto needs --D")
        approx = lfunction.automorphic_l_partial(args.D, args.i, args.s, args.bound)
    ok = approx.recompute() == approx.value
    payload = {
        "which": args.which,
        "s": [args.s.real, args.s.imag],
        "bound": args.bound,
        "value_re": float(approx.value.real),
        "value_im": float(approx.value.imag),
        "factor_count": len(approx.factors),
    }
    table = _Table(
        ("which", "s", "bound", "value_re", "value_im", "factors"),
        [(
            args.which,
            _fmt(args.s.real) + ("," + _fmt(args.s.imag) if args.s.imag else ""),
            args.bound,
            _fmt(float(approx.value.real)),
            _fmt(float(approx.value.imag)),
            len(approx.factors),
        )],
    )
    params = {"which": args.which, "s": _fmt(args.s.real), "bound": args.bound}
    if args.s.imag:
        params["s_im"] = _fmt(args.s.imag)
    if args.which != "zeta" and args.D is not None:
        params["D"] = args.D
    if args.which == "auto":
        params["i"] = args.i
    return params, ("pass" if ok else "fail"), payload, table


def _cmd_match(args, box):
    report = lfunction.local_factor_match(args.D, args.bound, box.get())
    table = _Table(("p", "ap_motivic", "ap_automorphic", "match"))
    for row in report.rows:
        table.rows.append((row.p, row.ap_motivic, row.ap_automorphic, _fmt(row.match)))
    payload = {
        "D": args.D,
        "bound": args.bound,
        "primes": len(report.rows),
        "mismatches": list(report.mismatches),
    }
    status = "pass" if not report.mismatches else "fail"
    return {"D": args.D, "bound": args.bound}, status, payload, table


def _cmd_prop3(args, box):
    residual = lfunction.proposition3_check(args.D, args.s, args.bound, box.get())
    ok = residual < args.tol
    payload = {
        "D": args.D,
        "s": [args.s.real, args.s.imag],
        "bound": args.bound,
        "residual": residual,
        "tol": args.tol,
    }
    table = _Table(
        ("D", "s", "bound", "residual", "tol", "ok"),
        [(args.D, _fmt(args.s.real), args.bound, _fmt(residual), _fmt(args.tol), _fmt(ok))],
    )
    params = {"D": args.D, "s": _fmt(args.s.real), "bound": args.bound}
    return params, ("pass" if ok else "fail"), payload, table


def _cmd_coherence(args, box):
    es = coherence.effros_shen_coherence(args.D)
    stable = quadfield.unit_stability_check(args.D)
    g_ok: Optional[bool] = None
    if args.D in elliptic.cm_table_discriminants() and args.D > 1:
        g_ok = coherence.g_coherence_check(
            coherence.trace_cohomology_ecm(args.D), coherence.k0_automorphic(args.D)
        )
    ok = es and stable and (g_ok is not False)
    payload = {"D": args.D, "effros_shen": es, "unit_stable": stable, "g_coherence": g_ok}
    table = _Table(
        ("D", "effros_shen", "unit_stable", "g_coherence"),
        [(args.D, _fmt(es), _fmt(stable), "-" if g_ok is None else _fmt(g_ok))],
    )
    return {"D": args.D}, ("pass" if ok else "fail"), payload, table


def _cmd_adelic(args, box):
    ramified = [int(x) for x in args.ramified.split(",") if x.strip()] if args.ramified else []
    w = quadfield.omega_of(args.D)
    seed = bratteli.effros_shen(w - w.floor())
    spec = groupalg.assemble_restricted_product(ramified, args.bound, seed, args.depth)
    serialized = groupalg.serialize_restricted_product(spec)
    payload = {
        "ramified": sorted(spec.ramified),
        "factors": [
            {"p": p, "levels": [lv.order for lv in t.levels]}
            for p, t in sorted(spec.factors.items())
        ],
        "infinite": {
            "seed": list(seed.seed.sizes),
            "matrix": [list(r) for r in seed.B],
            "period": seed.period_length,
        },
    }
    table = _Table(rows=[tuple(line.split("\t")) for line in serialized.splitlines()])
    params = {
        "ramified": ",".join(map(str, sorted(spec.ramified))) or "-",
        "bound": args.bound,
        "depth": args.depth,
        "D": args.D,
    }
    return params, "pass", payload, table


# -- parser and driver -------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "tsv"), default="tsv",
                        help="output format on stdout (default tsv)")
    common.add_argument("--cache", default=None,
                        help=f"a_p cache path (default {_DEFAULT_CACHE}; env {_CACHE_ENV})")

    parser = argparse.ArgumentParser(prog="kzero", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler, **kwargs):
        p = sub.add_parser(name, parents=[common], **kwargs)
        p.set_defaults(handler=handler)
        return p

    p = add("contfrac", _cmd_contfrac, help="continued fraction of omega")
    p.add_argument("--D", type=int, required=True)

    p = add("unit", _cmd_unit, help="fundamental unit and stability check")
    p.add_argument("--D", type=int, required=True)

    p = add("omega", _cmd_omega, help="integer-ring generator of Q(sqrt(D))")
    p.add_argument("--D", type=int, required=True)

    p = add("dimgroup", _cmd_dimgroup, help="stationary or UHF dimension group")
    p.add_argument("--D", type=int)
    p.add_argument("--uhf-p", type=int, dest="uhf_p")
    p.add_argument("--depth", type=int, default=3)

    p = add("tower", _cmd_tower, help="cyclic profinite tower self-similarity")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--window", type=int, default=3)

    p = add("sl2", _cmd_sl2, help="irreducible degree profile of SL2(F_p)")
    p.add_argument("--p", type=int, required=True)

    for name, handler, hlp in (
        ("count", _cmd_count, "point count over F_p or a small extension"),
        ("ap", _cmd_ap, "Frobenius trace (and norm-form comparison with --D)"),
        ("zeta-local", _cmd_zeta_local, "local zeta factor with its log identity"),
    ):
        p = add(name, handler, help=hlp)
        p.add_argument("--a4", type=int)
        p.add_argument("--a6", type=int)
        p.add_argument("--D", type=int)
        p.add_argument("--p", type=int, required=True)
        if name == "count":
            p.add_argument("--r", type=int, default=1, choices=(1, 2, 3))

    p = add("lfun", _cmd_lfun, help="partial Euler product value")
    p.add_argument("--which", choices=("zeta", "motivic", "auto"), required=True)
    p.add_argument("--s", type=_parse_s, required=True)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--D", type=int)
    p.add_argument("--a4", type=int)
    p.add_argument("--a6", type=int)
    p.add_argument("--i", type=int, default=1, choices=(0, 1, 2))

    p = add("match", _cmd_match, help="per-prime motivic vs automorphic traces")
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--bound", type=int, required=True)

    p = add("prop3", _cmd_prop3, help="factorization residual of the assembled products")
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--s", type=_parse_s, required=True)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("coherence", _cmd_coherence, help="module coherence checks for one D")
    p.add_argument("--D", type=int, required=True)

    p = add("adelic", _cmd_adelic, help="restricted-product descriptor records")
    p.add_argument("--ramified", default="")
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--D", type=int, default=5)

    return parser


def _emit(result: CommandResult, table: _Table, fmt: str, out: TextIO) -> None:
    if fmt == "json":
        doc = {
            "command": result.command,
            "parameters": result.parameters,
            "status": result.status,
            "payload": result.payload,
        }
        out.write(json.dumps(doc, sort_keys=True) + "\n")
        return
    out.write(f"# kzero {result.command} v1\n")
    if result.parameters:
        out.write("# " + " ".join(f"{k}={v}" for k, v in sorted(result.parameters.items())) + "\n")
    if table.columns:
        out.write("\t".join(table.columns) + "\n")
    for row in table.rows:
        out.write("\t".join(_fmt(x) for x in row) + "\n")
    out.write(f"# status {result.status}\n")


def run(argv: Sequence[str], stdout: Optional[TextIO] = None) -> tuple[CommandResult, int]:
    """Execute one subcommand; returns the result and the process exit code."""
    out = stdout if stdout is not None else sys.stdout
    parser = _build_parser()
    args = parser.parse_args(list(argv))
    box = _CacheBox(args.cache or os.environ.get(_CACHE_ENV) or _DEFAULT_CACHE)
    try:
        parameters, status, payload, table = args.handler(args, box)
    except AssertionError as exc:
        result = CommandResult(args.command, {}, "fail", {"message": str(exc)})
        _emit(result, _Table(), args.format, out)
        print(f"kzero {args.command}: invariant failed: {exc}", file=sys.stderr)
        return result, 1
    except (ValueError, ArithmeticError, elliptic.CalibrationError) as exc:
        result = CommandResult(args.command, {}, "error", {"message": str(exc)})
        _emit(result, _Table(), args.format, out)
        print(f"kzero {args.command}: {exc}", file=sys.stderr)
        return result, 2
    finally:
        box.flush()
    result = CommandResult(args.command, parameters, status, payload)
    _emit(result, table, args.format, out)
    return result, 0 if status == "pass" else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    _, code = run(sys.argv[1:] if argv is None else argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
