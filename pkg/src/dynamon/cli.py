"""Command line front end: one subcommand per engine.

Exit codes: 0 every check passed, 1 a mathematical check failed, 2 a budget was
exceeded, 3 bad usage (including points of different types).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass

from . import SCHEMA
from .cyclo import DEFAULT_ENUMERATION_BOUND, EnumerationBoundError, factorize
from .dynatomic import DEFAULT_DEGREE_BUDGET, BudgetError, gleason, gleason_mod_p, is_squarefree
from .ffdyn import (FIELD_SIZE_BUDGET, FieldSizeError, curve_period_survey, field, fixed_curve_fibers,
                    orbit, power_census, survey_csv)

EXIT_PASS, EXIT_FAIL, EXIT_BUDGET, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    seed: int = 0
    degree_budget: int = DEFAULT_DEGREE_BUDGET
    enum_bound: int = DEFAULT_ENUMERATION_BOUND
    order_bound: int = 10**7
    field_budget: int = FIELD_SIZE_BUDGET
    out: str | None = None
    format: str = "json"
    jobs: int = 1

    def __post_init__(self):
        for name in ("degree_budget", "enum_bound", "order_bound", "field_budget", "jobs"):
            if getattr(self, name) <= 0:
                raise UsageError(f"{name} must be positive")
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed must be a 64-bit unsigned integer")

    def echo(self):
        out = asdict(self)
        out.pop("out")
        return out


def _positive(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="file of key=value lines; flags override it")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--jobs", type=_positive, default=1)
    p.add_argument("--degree-budget", type=_positive, default=DEFAULT_DEGREE_BUDGET)
    p.add_argument("--enum-bound", type=_positive, default=DEFAULT_ENUMERATION_BOUND)
    p.add_argument("--order-bound", type=_positive, default=10**7)
    p.add_argument("--field-budget", type=_positive, default=FIELD_SIZE_BUDGET)


def build_parser():
    parser = _Parser(prog="dynamon", description="Periodic points, monodromy and lifting experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gleason", help="squarefreeness of P_b(c) = f_c^b(0)")
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--d-max", type=int, help="sweep d..d_max")
    g.add_argument("--b", type=int, help="a single b")
    g.add_argument("--b-max", type=int, help="sweep b = 1..b_max")
    _add_common(g)

    m = sub.add_parser("moves", help="move certificates for the power map")
    m.add_argument("--d", type=int, required=True)
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--a", type=int, default=0)
    m.add_argument("--b", type=int, required=True)
    grp = m.add_mutually_exclusive_group(required=True)
    grp.add_argument("--pair", nargs=2, metavar=("P", "Q"))
    grp.add_argument("--survey", type=int, metavar="N", help="N random pairs; 0 means all pairs")
    _add_common(m)

    mo = sub.add_parser("monodromy", help="monodromy group of f_c^b(z) - z")
    mo.add_argument("--d", type=int, required=True)
    mo.add_argument("--b", type=int, required=True)
    mo.add_argument("--loops", type=_positive, default=60)
    mo.add_argument("--prep1", action="store_true", help="local cycle check for z(z - eps)^(d-1) + c")
    mo.add_argument("--eps", type=complex, default=1e-2)
    _add_common(mo)

    pa = sub.add_parser("padic", help="p-adic limit of a residue-periodic orbit")
    pa.add_argument("--p", type=int, required=True)
    pa.add_argument("--d", type=int, required=True)
    pa.add_argument("--c", required=True, help="parameter, or comma-separated parameters")
    pa.add_argument("--x", required=True, help="starting point, one integer per parameter")
    pa.add_argument("--prec", type=_positive, default=32)
    _add_common(pa)

    ff = sub.add_parser("ffdyn", help="finite-field dynamics")
    fsub = ff.add_subparsers(dest="action", required=True, parser_class=_Parser)
    s = fsub.add_parser("survey", help="period growth along a curve")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--curve", choices=["diag", "crit", "power"], default="diag")
    s.add_argument("--k-max", type=_positive, default=12)
    _add_common(s)
    c = fsub.add_parser("census", help="periods of roots of unity under z -> z^d")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--d", type=int, required=True)
    c.add_argument("--m-max", type=_positive, default=10**4)
    _add_common(c)
    fb = fsub.add_parser("fibers", help="Frobenius orbits on fixed points")
    fb.add_argument("--p", type=int, required=True)
    fb.add_argument("--d", type=int, required=True)
    fb.add_argument("--k", type=_positive, required=True)
    _add_common(fb)
    o = fsub.add_parser("orbit", help="orbit of x under z -> z^d + c in F_{p^k}")
    o.add_argument("--p", type=int, required=True)
    o.add_argument("--k", type=_positive, required=True)
    o.add_argument("--d", type=int, required=True)
    o.add_argument("--c", type=int, required=True, help="field element as an integer code")
    o.add_argument("--x", type=int, required=True)
    _add_common(o)
    return parser


def _read_config(path):
    values = {}
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key=value")
        key, value = (t.strip() for t in line.split("=", 1))
        values[key.replace("-", "_")] = value.strip('"')
    return values


def _leaf_parser(parser, argv):
    """The subparser that will handle argv."""
    actions = [a for a in parser._actions if isinstance(a, argparse._SubParsersAction)]
    if not actions:
        return parser
    for tok in argv:
        if tok in actions[0].choices:
            rest = argv[argv.index(tok) + 1:]
            return _leaf_parser(actions[0].choices[tok], rest)
    return parser


def _config_path(argv):
    for k, tok in enumerate(argv):
        if tok == "--config":
            if k + 1 >= len(argv):
                raise UsageError("--config needs a path")
            return argv[k + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def parse_args(argv):
    """Parse flags; values from --config become defaults, so flags override them."""
    parser = build_parser()
    path = _config_path(argv)
    if path:
        leaf = _leaf_parser(parser, argv)
        known = {a.dest: a for a in leaf._actions}
        cfg = _read_config(path)
        for key, value in cfg.items():
            if key not in known or key in ("config", "help"):
                raise UsageError(f"unknown config key {key!r}")
            act = known[key]
            if act.nargs == 0:
                cfg[key] = value.lower() in ("1", "true", "yes")
            elif act.type is not None:
                try:
                    cfg[key] = act.type(value)
                except (TypeError, ValueError, argparse.ArgumentTypeError) as exc:
                    raise UsageError(f"config key {key}: {exc}") from exc
            act.required = False
            for grp in leaf._mutually_exclusive_groups:
                if act in grp._group_actions:
                    grp.required = False
        leaf.set_defaults(**cfg)
    return parser.parse_args(argv)


def _config(args):
    return RunConfig(args.seed, args.degree_budget, args.enum_bound, args.order_bound,
                     args.field_budget, args.out, args.format, args.jobs)


def _rows_csv(rows):
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in r.items()})
    return buf.getvalue()


def _emit(text, cfg):
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _finish(report, cfg, rows=None, csv_text=None):
    report = {"schema": SCHEMA, **report, "config": cfg.echo()}
    if cfg.format == "csv":
        if csv_text is None:
            if rows is None:
                raise UsageError("this report has no tabular form; use --format json")
            csv_text = _rows_csv(rows)
        _emit(csv_text, cfg)
    else:
        _emit(json.dumps(report, indent=2) + "\n", cfg)
    return EXIT_PASS if report.get("verdict") == "PASS" else EXIT_FAIL


# -- subcommands ------------------------------------------------------------------

def cmd_gleason(args, cfg):
    ds = range(args.d, (args.d_max or args.d) + 1)
    if args.b is not None:
        bs = [args.b]
    elif args.b_max is not None:
        bs = range(1, args.b_max + 1)
    else:
        raise UsageError("give --b or --b-max")
    for d in ds:
        for b in bs:
            if d < 2 or b < 1:
                raise UsageError("need d >= 2 and b >= 1")
            if d ** (b - 1) > cfg.degree_budget:
                raise BudgetError(f"degree {d}^{b - 1} of P_{b} exceeds budget {cfg.degree_budget}")
    rows = []
    for d in ds:
        for b in bs:
            P = gleason(d, b, cfg.degree_budget)
            sq, g = is_squarefree(P)
            mods = {str(p): gleason_mod_p(d, b, p, cfg.degree_budget)["derivative_is_one"]
                    for p in factorize(d)}
            ok = sq and all(mods.values())
            rows.append({"d": d, "b": b, "degree": P.degree, "squarefree": sq,
                         "gcd_witness": g.to_text(), "derivative_is_one_mod_p": mods,
                         "verdict": "PASS" if ok else "FAIL"})
    verdict = "PASS" if all(r["verdict"] == "PASS" for r in rows) else "FAIL"
    return _finish({"command": "gleason", "rows": rows, "verdict": verdict}, cfg, rows)


def cmd_moves(args, cfg):
    from .moves import CyclotomicProjPoint, TypeMismatchError, connect, point_type, transitivity_survey, validate
    if args.pair:
        try:
            P, Q = (CyclotomicProjPoint.parse(t) for t in args.pair)
        except ValueError as exc:
            raise UsageError(f"bad point: {exc}") from exc
        if P.n != args.n or Q.n != args.n:
            raise UsageError(f"points must have n + 1 = {args.n + 1} coordinates")
        want = (args.a, args.b)
        for X in (P, Q):
            t = point_type(X, args.d)
            if tuple(t) != want:
                raise TypeMismatchError(f"{X} has type {tuple(t)}, expected {want}")
        cert = connect(P, Q, args.d)
        rep = validate(cert)
        report = {"command": "moves", "certificate": cert.to_json(), "validation": rep.to_json(),
                  "verdict": "PASS" if rep.ok else "FAIL"}
        return _finish(report, cfg, [{"step": i, **s.to_json()} for i, s in enumerate(cert.steps)])
    sample = None if args.survey == 0 else args.survey
    rep = transitivity_survey(args.d, args.n, args.a, args.b, sample=sample, seed=cfg.seed,
                              bound=cfg.enum_bound)
    rep.pop("schema", None)
    rep["verdict"] = "PASS" if rep["success_rate"] == 1.0 else "FAIL"
    rows = [{"steps": k, "count": v} for k, v in rep["step_histogram"].items()]
    return _finish({"command": "moves", **rep}, cfg, rows)


def cmd_monodromy(args, cfg):
    from .monodromy_num import prep1_cycle_check, verify_morton
    if args.prep1:
        rep = prep1_cycle_check(args.d, args.b, args.eps, cfg.seed)
        rep["eps"] = [args.eps.real, args.eps.imag]
        return _finish({"command": "monodromy", **rep}, cfg)
    if args.d ** args.b > 32:
        raise BudgetError(f"tracking degree {args.d}^{args.b} exceeds 32")
    rep = verify_morton(args.d, args.b, args.loops, cfg.seed, jobs=cfg.jobs, order_bound=cfg.order_bound)
    return _finish({"command": "monodromy", **rep}, cfg, rep["loops"])


def _int_list(text):
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError as exc:
        raise UsageError(f"expected integers, got {text!r}") from exc


def cmd_padic(args, cfg):
    from .padic import PAdicMap, lift_agreement, product_family_lift
    cs, xs = _int_list(args.c), _int_list(args.x)
    if len(cs) != len(xs):
        raise UsageError("need as many starting coordinates as parameters")
    if args.d % args.p:
        raise UsageError(f"p={args.p} must divide d={args.d}")
    runs = [lift_agreement(PAdicMap.unicritical(args.p, args.d, c), x, args.prec) for c, x in zip(cs, xs)]
    report = {"command": "padic", "p": args.p, "d": args.d, "c": list(cs), "x": list(xs),
              "prec": args.prec, "coordinates": runs}
    if len(cs) > 1:
        prod = product_family_lift(len(cs), args.d, args.p, cs, xs, args.prec)
        report["product"] = {k: (list(v) if isinstance(v, tuple) else v) for k, v in prod.items()}
    ok = all(r["agree"] and r["contraction_monotone"] and r["fixed_mod_p^N"] for r in runs)
    report["verdict"] = "PASS" if ok else "FAIL"
    return _finish(report, cfg, [{"coordinate": i, **r} for i, r in enumerate(runs)])


def cmd_ffdyn(args, cfg):
    if args.action == "survey":
        rep = curve_period_survey(args.p, args.d, args.curve, args.k_max, cfg.field_budget)
        rep.pop("schema", None)
        return _finish({"command": "ffdyn survey", **rep}, cfg, csv_text=survey_csv(rep))
    if args.action == "census":
        rep = power_census(args.d, args.p, args.m_max)
        rep.pop("schema", None)
        vals = list(rep["distinct_at_checkpoints"].values())
        rep["verdict"] = "PASS" if rep["strictly_increasing"] and vals else "FAIL"
        rows = [{"period": k, "count": v} for k, v in rep["periods"].items()]
        return _finish({"command": "ffdyn census", **rep}, cfg, rows)
    if args.action == "fibers":
        rep = fixed_curve_fibers(args.p, args.d, args.k, budget=cfg.field_budget)
        rep.pop("schema", None)
        rows = [{**f, "orbit_sizes": " ".join(map(str, f["orbit_sizes"]))} for f in rep["fibers"]]
        return _finish({"command": "ffdyn fibers", **rep}, cfg, rows)
    F = field(args.p, args.k, cfg.field_budget)
    for v in (args.c, args.x):
        if not 0 <= v < F.q:
            raise UsageError(f"element code {v} outside 0..{F.q - 1}")
    rec = orbit(F, args.d, args.c, args.x)
    report = {"command": "ffdyn orbit", "p": args.p, "k": args.k, "d": args.d, "c": args.c,
              "x": args.x, "modulus": F.modulus, "preperiod": rec.preperiod, "period": rec.period,
              "verdict": "PASS"}
    return _finish(report, cfg, [{"preperiod": rec.preperiod, "period": rec.period}])


COMMANDS = {"gleason": cmd_gleason, "moves": cmd_moves, "monodromy": cmd_monodromy,
            "padic": cmd_padic, "ffdyn": cmd_ffdyn}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"dynamon: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BudgetError, EnumerationBoundError, FieldSizeError) as exc:
        print(f"dynamon: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        # type mismatches and other invalid inputs
        print(f"dynamon: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, AssertionError, RuntimeError) as exc:
        print(f"dynamon: check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
