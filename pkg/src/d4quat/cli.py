"""Command line interface: lift, verify, reduce and whittaker.

Exit codes: 0 success, 1 a verification check failed, 2 bad usage or input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .errors import D4Error

OUTDIR_ENV = "D4QUAT_OUTDIR"

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CHECKS = ("maass", "spezialschar", "symmetry", "cuspidal", "vanishing")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    weight: int | None = None
    alpha: int = 2
    qmax: int | None = None
    dmax: int = 4000
    trunc: int | None = None
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    inputs: list = field(default_factory=list)
    output: str | None = None

    def validate(self):
        for name in ("qmax", "dmax", "trunc"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise UsageError(f"--{name} must be positive, got {v}")
        if self.command == "lift":
            if self.weight is None:
                raise UsageError("lift needs --weight")
            if self.weight % 2:
                raise UsageError(f"lift needs an even weight, got {self.weight}")
            if self.weight < 16:
                raise UsageError(f"lift needs weight >= 16, got {self.weight}")
        if self.alpha <= 0 or self.alpha % 2:
            raise UsageError(f"--alpha must be a positive even integer, got {self.alpha}")


# -- config and output helpers


def read_config(path: str) -> dict:
    """key=value lines; '#' starts a comment. Keys use the long option names."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _output_path(arg: str | None, default_name: str) -> Path | None:
    if arg:
        p = Path(arg)
        base = os.environ.get(OUTDIR_ENV)
        return Path(base) / p if base and not p.is_absolute() else p
    base = os.environ.get(OUTDIR_ENV)
    return Path(base) / default_name if base else None


def _write_text(path: Path | None, text: str):
    if path is None:
        sys.stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _dump_json(data) -> str:
    return json.dumps(data, indent=1, sort_keys=True) + "\n"


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _parse_json_arg(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON for {what}: {exc}") from exc


def _int_range(text: str) -> list[int]:
    """'0..3' or '0,1,2'."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad integer list {text!r}") from exc


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad number list {text!r}") from exc


def _note(msg: str):
    print(msg, file=sys.stderr)


# -- commands


def cmd_lift(args) -> int:
    from . import plotting
    from .jacobi import jacobi_cusp_basis
    from .quaternionic import theta_lift
    from .siegel import maass_lift

    cfg = RunConfig("lift", weight=args.weight, qmax=args.qmax, trunc=args.trunc, seed=args.seed, output=args.out)
    cfg.validate()
    jac_weight = cfg.weight
    n = cfg.trunc or cfg.qmax // 4 + 4
    basis = jacobi_cusp_basis(jac_weight, n)
    if not basis:
        raise UsageError(f"no Jacobi cusp forms of weight {jac_weight} and index 1")
    if args.combination:
        coeffs = _int_range(args.combination)
        if len(coeffs) != len(basis):
            raise UsageError(f"--combination needs {len(basis)} coefficients")
    else:
        if not 0 <= args.basis_index < len(basis):
            raise UsageError(f"--basis-index must be in 0..{len(basis) - 1}")
        coeffs = [1 if i == args.basis_index else 0 for i in range(len(basis))]
    phi = None
    for c, f in zip(coeffs, basis):
        if c:
            phi = f.scale(c) if phi is None else _add_forms(phi, f.scale(c))
    if phi is None:
        raise UsageError("the combination is zero")
    siegel = maass_lift(phi, cfg.qmax)
    table = theta_lift(siegel, cfg.weight, cfg.qmax, seed=cfg.seed)
    out = _output_path(cfg.output, "lift.json")
    if out is None:
        raise UsageError(f"lift needs --out or ${OUTDIR_ENV}")
    _write_text(out, _dump_json(table.to_json()))
    siegel_out = Path(args.siegel_out) if args.siegel_out else out.with_name(out.stem + ".siegel.json")
    _write_text(siegel_out, _dump_json(siegel.to_json()))
    if args.plot:
        plotting.lift_figure(table, _output_path(args.plot, "lift.png"))
    _note(f"lift: weight {cfg.weight}, Q <= {cfg.qmax}, {len(table.entries)} entries -> {out}")
    return EXIT_OK


def _add_forms(a, b):
    from .jacobi import JacobiForm

    return JacobiForm(a.weight, a.h0 + b.h0, a.h1 + b.h1, cuspidal=a.cuspidal and b.cuspidal, name="combination")


def cmd_verify(args) -> int:
    from . import plotting
    from .jacobi import cusp_classifier, jacobi_cusp_basis
    from .quaternionic import (QuatCoeffTable, cuspidality_classifier, maass_relation_check,
                               primitive_vanishing_detector, spezialschar_test, symmetry_check)

    checks = args.check or ["maass"]
    for c in checks:
        if c not in CHECKS + ("all",):
            raise UsageError(f"unknown check {c!r}; choose from {', '.join(CHECKS)} or all")
    if "all" in checks:
        checks = list(CHECKS)
    cfg = RunConfig("verify", weight=args.weight, dmax=args.dmax, seed=args.seed, output=args.out)
    cfg.validate()
    report = {"checks": []}
    ok = True
    table = None
    if args.inp:
        table = QuatCoeffTable.from_json(_load_json(args.inp))
        if args.weight is not None and args.weight != table.weight:
            raise UsageError(f"--weight {args.weight} does not match the table weight {table.weight}")
    for c in checks:
        if c == "cuspidal" and table is None:
            if cfg.weight is None:
                raise UsageError("cuspidal without --in needs --weight")
            jw = cfg.weight
            for i, phi in enumerate(jacobi_cusp_basis(jw, cfg.dmax // 4 + 4)):
                rep = cusp_classifier(phi, jw, d_max=cfg.dmax)
                entry = {"check": "cuspidal", "form": f"jacobi weight {jw} basis {i}", **rep.to_json()}
                entry["passed"] = rep.is_cusp_consistent
                report["checks"].append(entry)
                ok &= rep.is_cusp_consistent
                if args.plot:
                    pts = [(d, phi.disc_coeff(d)) for d in range(1, cfg.dmax + 1) if d % 4 in (0, 3)]
                    plotting.growth_figure(pts, (jw + 1) / 2, _plot_name(args.plot, i), f"weight {jw} basis {i}")
            continue
        if table is None:
            raise UsageError(f"check {c!r} needs --in TABLE")
        if c == "maass":
            rep = maass_relation_check(table).to_json()
        elif c == "spezialschar":
            rep = spezialschar_test(table).to_json()
        elif c == "symmetry":
            rep = symmetry_check(table, seed=cfg.seed).to_json()
        elif c == "cuspidal":
            g = cuspidality_classifier(table, cfg.weight)
            rep = {"check": "cuspidal", **g.to_json(), "passed": g.is_cusp_consistent}
            if args.plot:
                plotting.lift_figure(table, _output_path(args.plot, "verify.png"))
        else:
            v = primitive_vanishing_detector(table, args.vanishing_bound)
            # informational: the verdict itself is the result
            rep = {"check": "vanishing", **v.to_json(), "passed": True}
        report["checks"].append(rep)
        ok &= bool(rep["passed"])
    report["passed"] = ok
    _write_text(_output_path(cfg.output, "verify.json"), _dump_json(report))
    for rep in report["checks"]:
        _note(f"{rep['check']}: {'pass' if rep['passed'] else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


def _plot_name(arg: str, i: int) -> Path:
    p = _output_path(arg, "verify.png")
    return p.with_name(f"{p.stem}-{i}{p.suffix}") if i else p


def cmd_reduce(args) -> int:
    from .orbits import reduce_pair_rank3
    from .pairspace import PairB

    pair = PairB.from_json(_parse_json_arg(args.pair, "--pair"))
    c = reduce_pair_rank3(pair, check_psd=not args.no_psd_check)
    g, h, u = c.transform
    out = {
        "pair": pair.to_json(),
        "alpha": c.alpha,
        "n": c.n,
        "m": c.m,
        "r": c.r,
        "canonical": c.pair().to_json(),
        "transform": {"g": _plain(g), "h": _plain(h), "u": _plain(u)},
    }
    _write_text(_output_path(args.out, "reduce.json") if args.out else None, _dump_json(out))
    return EXIT_OK


def _plain(m):
    return [[int(v) if float(v).is_integer() else str(v) for v in row] for row in m]


def cmd_whittaker(args) -> int:
    modes = [args.bessel_sweep, args.arch, args.eval is not None]
    if sum(bool(m) for m in modes) != 1:
        raise UsageError("choose exactly one of --bessel-sweep, --arch, --eval PAIR")
    if args.bessel_sweep:
        return _bessel_sweep(args)
    if args.arch:
        return _arch_sweep(args)
    return _point_eval(args)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def _bessel_sweep(args) -> int:
    from . import plotting
    from .whittaker import bessel_line_integral, fit_line_model

    vs = _int_range(args.v)
    cs = _float_list(args.c)
    if any(c <= 0 for c in cs):
        raise UsageError("every c must be positive")
    rows, raw = [], []
    for v in vs:
        vals = {c: bessel_line_integral(v, c) for c in cs}
        fit = fit_line_model(v, cs, {c: r.value for c, r in vals.items()}) if len(cs) > 1 else None
        for c in cs:
            r = vals[c]
            raw.append((v, c, r.value))
            rows.append([v, c, r.value.real, r.value.imag, abs(r.value), r.tail_bound,
                         fit.kappa if fit else "", fit.lam if fit else "", fit.phase_residual if fit else ""])
    header = ["v", "c", "re", "im", "abs", "tail_bound", "kappa", "lambda", "phase_residual"]
    _write_text(_output_path(args.out, "bessel_sweep.csv") if args.out else None, _csv_text(header, rows))
    if args.plot:
        plotting.line_integral_figure(raw, _output_path(args.plot, "bessel_sweep.png"))
    return EXIT_OK


def _arch_sweep(args) -> int:
    from . import plotting
    from .whittaker import fj_arch_integral

    s_index = tuple(_int_range(args.s))
    if len(s_index) != 3:
        raise UsageError("--s needs three integers n,m,r")
    u = tuple(_float_list(args.u)) if args.u else (0.0, 0.0, 0.0)
    if len(u) != 3:
        raise UsageError("--u needs three numbers")
    ts = _float_list(args.t)
    if any(t <= 0 for t in ts):
        raise UsageError("every t must be positive")
    rows, raw = [], []
    for t in ts:
        res = fj_arch_integral(args.n, args.alpha, s_index, t, args.ell, u, normalization=args.normalization)
        for v in range(-args.ell, args.ell + 1):
            val, pred = res.value.component(v), res.predicted.component(v)
            raw.append((t, v, val, pred))
            rows.append([t, v, val.real, val.imag, pred.real, pred.imag, res.sigma, res.tail_bound])
    header = ["t", "v", "re", "im", "closed_form_re", "closed_form_im", "sigma", "tail_bound"]
    _write_text(_output_path(args.out, "arch.csv") if args.out else None, _csv_text(header, rows))
    if args.plot:
        plotting.arch_figure(raw, _output_path(args.plot, "arch.png"))
    return EXIT_OK


def _point_eval(args) -> int:
    import numpy as np

    from .pairspace import PairB
    from .whittaker import whittaker_eval

    pair = PairB.from_json(_parse_json_arg(args.eval, "--eval"))
    g = np.eye(8) if args.g is None else np.array(_parse_json_arg(args.g, "--g"), dtype=float)
    if g.shape != (8, 8):
        raise UsageError("--g must be an 8x8 matrix")
    val = whittaker_eval(pair, g, args.ell, normalization=args.normalization)
    _write_text(_output_path(args.out, "whittaker.json") if args.out else None, _dump_json(val.to_json()))
    return EXIT_OK


# -- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="d4quat", description="Coefficient tables and checks for quaternionic lifts.")
    p.add_argument("--config", help="key=value file supplying option defaults")
    sub = p.add_subparsers(dest="command", required=True)

    lift = sub.add_parser("lift", help="build a lifted coefficient table")
    lift.add_argument("--weight", type=int)
    lift.add_argument("--qmax", type=int, default=200)
    lift.add_argument("--trunc", type=int, help="q-expansion truncation of the Jacobi forms")
    lift.add_argument("--basis-index", type=int, default=0)
    lift.add_argument("--combination", help="comma separated integer coefficients on the cusp basis")
    lift.add_argument("--seed", type=int, default=0)
    lift.add_argument("--out")
    lift.add_argument("--siegel-out")
    lift.add_argument("--plot", help="PNG path")
    lift.set_defaults(func=cmd_lift)

    ver = sub.add_parser("verify", help="run checks on a coefficient table")
    ver.add_argument("--check", action="append", help=f"one of {', '.join(CHECKS)}, all; repeatable")
    ver.add_argument("--in", dest="inp")
    ver.add_argument("--weight", type=int)
    ver.add_argument("--dmax", type=int, default=4000)
    ver.add_argument("--vanishing-bound", type=int, default=50)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--out")
    ver.add_argument("--plot", help="PNG path")
    ver.set_defaults(func=cmd_verify)

    red = sub.add_parser("reduce", help="canonical form of an integral pair")
    red.add_argument("--pair", required=True, help="JSON [[[a,b],[c,d]],[[e,f],[g,h]]]")
    red.add_argument("--no-psd-check", action="store_true")
    red.add_argument("--out")
    red.set_defaults(func=cmd_reduce)

    wh = sub.add_parser("whittaker", help="Whittaker values and archimedean integrals")
    wh.add_argument("--bessel-sweep", action="store_true")
    wh.add_argument("--v", default="0..3")
    wh.add_argument("--c", default="0.5,1,2,4")
    wh.add_argument("--arch", action="store_true")
    wh.add_argument("--alpha", type=int, default=2)
    wh.add_argument("--n", type=int, default=1)
    wh.add_argument("--s", default="1,1,1", help="n,m,r of the Fourier-Jacobi index")
    wh.add_argument("--t", default="1,1.25,1.5")
    wh.add_argument("--u", help="three Lie algebra coordinates of u")
    wh.add_argument("--eval", help="JSON pair for a point evaluation")
    wh.add_argument("--g", help="JSON 8x8 group element (default identity)")
    wh.add_argument("--ell", type=int, default=2)
    wh.add_argument("--normalization", choices=("doubled", "standard"), default="doubled")
    wh.add_argument("--out")
    wh.add_argument("--plot", help="PNG path")
    wh.set_defaults(func=cmd_whittaker)
    return p


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    values = read_config(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in values.items():
        if key not in known:
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        action = known[key]
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = raw.lower() in ("1", "true", "yes")
        elif isinstance(action, argparse._AppendAction):
            defaults[key] = [s.strip() for s in raw.split(",")]
        else:
            try:
                defaults[key] = action.type(raw) if action.type else raw
            except ValueError as exc:
                raise UsageError(f"bad value for {key}: {raw!r}") from exc
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    except UsageError as exc:
        _note(f"error: {exc}")
        return EXIT_USAGE
    except D4Error as exc:
        _note(f"error [{exc.kind}]: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
