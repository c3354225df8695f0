"""Command-line entry point: ``cylfrac <subcommand> [options]``.

Tables go to stdout unless ``--output`` is given.  Relative output paths are
resolved against ``$CYLFRAC_OUTPUT_DIR`` when that variable is set.
"""
import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__, acceptance, extension, fowler, geometry, linearization, symbol
from .errors import CylfracError
from .symbol import CylinderParams

OUTPUT_DIR_ENV = "CYLFRAC_OUTPUT_DIR"
EXIT_ERROR = 1
EXIT_ACCEPTANCE = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


# ------------------------------------------------------------ grids


def _split(text):
    return [part.strip() for part in text.split(",") if part.strip()]


def int_grid(text):
    """'3', '3,5,8' or '3..6' (inclusive)."""
    out = []
    for part in _split(text):
        if ".." in part:
            lo, hi = (int(v) for v in part.split(".."))
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    if not out:
        raise UsageError(f"empty integer grid {text!r}")
    return out


def float_grid(text, points):
    """'0.5', '0.3,0.5' or 'lo..hi' (``points`` equally spaced values, inclusive)."""
    out = []
    for part in _split(text):
        if ".." in part:
            lo, hi = (float(v) for v in part.split(".."))
            if points < 1:
                raise UsageError("--points must be positive")
            out.extend(np.linspace(lo, hi, points).tolist() if points > 1 else [lo])
        else:
            out.append(float(part))
    if not out:
        raise UsageError(f"empty grid {text!r}")
    return out


# ------------------------------------------------------------ output


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if value is None:
        return ""
    return str(value)


def _json_value(value):
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def render(rows, columns, config, fmt):
    body = io.StringIO()
    writer = csv.writer(body, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    table = body.getvalue()
    digest = hashlib.sha256(table.encode()).hexdigest()
    if fmt == "csv":
        head = f"# config: {json.dumps(config, sort_keys=True)}\n# sha256: {digest}\n"
        return head + table
    doc = {
        "metadata": {"config": config, "sha256": digest, "version": __version__, "columns": columns},
        "rows": [{c: _json_value(row.get(c)) for c in columns} for row in rows],
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def emit(text, output):
    if output in (None, "-"):
        sys.stdout.write(text)
        return
    base = os.environ.get(OUTPUT_DIR_ENV)
    path = output if (os.path.isabs(output) or not base) else os.path.join(base, output)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _config(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "output", "format")}


# ------------------------------------------------------------ subcommands


def cmd_symbol(args):
    rows = []
    for n in int_grid(args.n):
        for g in float_grid(args.gamma, args.points):
            for k in int_grid(args.k):
                p = CylinderParams(n, g, k)
                xs = float_grid(args.xi, args.points)
                vals = symbol.theta(p, np.array(xs))
                rows += [{"n": n, "gamma": g, "k": k, "xi": x, "theta": float(v)} for x, v in zip(xs, vals)]
    return rows, ["n", "gamma", "k", "xi", "theta"]


CONSTANT_COLUMNS = ["n", "gamma", "c_ngamma", "d_gamma", "dtilde_gamma", "kappa_ngamma",
                    "C_hamiltonian", "Q_sphere"]


def cmd_constants(args):
    rows = []
    for n in int_grid(args.n):
        for g in float_grid(args.gamma, args.points):
            c = symbol.scattering_constants(n, g)
            rows.append({col: getattr(c, col) for col in CONSTANT_COLUMNS})
    return rows, CONSTANT_COLUMNS


def cmd_period(args):
    rows = []
    for n in int_grid(args.n):
        for g in float_grid(args.gamma, args.points):
            for k in int_grid(args.k):
                r = linearization.solve_lambda(n, g, k)
                rows.append({"n": n, "gamma": g, "k": k, "F0": r.F0, "lambda": r.lambda_,
                             "period": r.period, "bracket_lo": r.bracket[0],
                             "bracket_hi": r.bracket[1], "note": r.note})
    return rows, ["n", "gamma", "k", "F0", "lambda", "period", "bracket_lo", "bracket_hi", "note"]


def cmd_scan(args):
    report = linearization.conjecture_scan(int_grid(args.n), float_grid(args.gamma, args.points), args.k_max)
    flagged = {(c["n"], c["gamma"]) for c in report.counterexamples}
    cols = ["n", "gamma"] + [f"f{k}" for k in range(args.k_max + 1)] + ["increasing_in_k", "f1_gt_1", "flagged"]
    rows = [{**r, "flagged": (r["n"], r["gamma"]) in flagged} for r in report.rows]
    for key, value in report.flags.items():
        print(f"{key}: {value}", file=sys.stderr)
    return rows, cols


def cmd_oracle(args):
    rows = []
    for n in int_grid(args.n):
        for g in float_grid(args.gamma, args.points):
            for k in int_grid(args.k):
                p = CylinderParams(n, g, k)
                for x in float_grid(args.xi, args.points):
                    prof = extension.solve_mode_ode(p, x, npoints=args.npoints)
                    th = symbol.theta(p, x)
                    rows.append({"n": n, "gamma": g, "k": k, "xi": x, "theta": th, "theta_ode": prof.symbol,
                                 "rel_err": abs(prof.symbol / th - 1), "A1": prof.A1, "A2": prof.A2})
    return rows, ["n", "gamma", "k", "xi", "theta", "theta_ode", "rel_err", "A1", "A2"]


def cmd_hamiltonian(args):
    times = float_grid(args.times, 1)
    rows = []
    for n in int_grid(args.n):
        for g in float_grid(args.gamma, args.points):
            profiles = {"v1": _trace("one", n, g, args.length, args.modes),
                        "vinf": _trace("bubble", n, g, args.length, args.modes)}
            for name, v in profiles.items():
                f = extension.extension_field(v, args.length, n, g)
                for kind, fn in (("H", extension.hamiltonian), ("H*", extension.hamiltonian_star)):
                    vals = [fn(f, t) for t in times]
                    hs = np.array([h.H for h in vals])
                    scale = max(h.scale for h in vals)
                    rows.append({"n": n, "gamma": g, "profile": name, "quantity": kind,
                                 "modes": args.modes, "H_mean": float(hs.mean()),
                                 "spread": float(hs.max() - hs.min()),
                                 "rel_spread": float((hs.max() - hs.min()) / scale)})
    return rows, ["n", "gamma", "profile", "quantity", "modes", "H_mean", "spread", "rel_spread"]


def _trace(profile, n, g, L, N):
    t = extension.periodic_grid(L, N)
    return np.ones(N) if profile == "one" else geometry.bubble_profile(t, n, g)


def cmd_field(args):
    n, g = int_grid(args.n)[0], float_grid(args.gamma, args.points)[0]
    f = extension.extension_field(_trace(args.profile, n, g, args.length, args.modes), args.length, n, g)
    rho = np.array(float_grid(args.rho, args.points))
    times = np.array(float_grid(args.times, args.points))
    V, _, _ = f.evaluate(times, rho)
    rows = [{"rho": r, "t": s, "V": V[i, j]} for i, r in enumerate(rho) for j, s in enumerate(times)]
    return rows, ["rho", "t", "V"]


def cmd_fowler(args):
    ns = int_grid(args.n)
    if args.orbit:
        n = ns[0]
        o = fowler.integrate_orbit(fowler.FowlerState(1 + float_grid(args.eps, args.points)[0], 0.0, n), args.t_end, args.dt)
        stride = max(1, args.stride)
        rows = [{"t": t, "v": v, "vdot": w, "H1": h}
                for t, v, w, h in zip(o.t[::stride], o.v[::stride], o.vdot[::stride], o.H[::stride])]
        return rows, ["t", "v", "vdot", "H1"]
    if args.portrait:
        rows = []
        for n in ns:
            for orb in fowler.portrait(n, float_grid(args.portrait, args.points), args.t_end, args.dt):
                for t, v, w in zip(orb.t[::args.stride], orb.v[::args.stride], orb.vdot[::args.stride]):
                    rows.append({"n": n, "level": orb.level, "bounded": orb.bounded, "t": t, "v": v,
                                 "vdot": w, "H1": float(fowler.h1(v, w, n))})
        return rows, ["n", "level", "bounded", "t", "v", "vdot", "H1"]
    rows = []
    for n in ns:
        for eps in float_grid(args.eps, args.points):
            L = fowler.orbit_period(fowler.FowlerState(1 + eps, 0.0, n), dt=args.dt)
            rows.append({"n": n, "eps": eps, "period": L, "L1": fowler.linear_period(n),
                         "diff": L - fowler.linear_period(n)})
    return rows, ["n", "eps", "period", "L1", "diff"]


def cmd_verify_all(args):
    selected = set(int_grid(args.only)) if args.only else None
    results = acceptance.run_all(selected)
    for r in results:
        print(r.line(), file=sys.stderr)
    rows = [{"criterion": r.number, "title": r.title, "passed": r.passed,
             "detail": r.detail} for r in results]
    return rows, ["criterion", "title", "passed", "detail"]


# ------------------------------------------------------------ parser


def build_parser():
    parser = _Parser(prog="cylfrac", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
        p.add_argument("--points", type=int, default=11, help="points per 'lo..hi' float range")
        p.add_argument("--seed", type=int, default=0, help="recorded in the artifact metadata")
        return p

    p = common(sub.add_parser("symbol", help="tabulate the Fourier symbol"))
    p.add_argument("--n", default="3")
    p.add_argument("--gamma", default="0.5")
    p.add_argument("--k", default="0")
    p.add_argument("--xi", default="0..10")
    p.set_defaults(func=cmd_symbol)

    p = common(sub.add_parser("constants", help="normalisation constants"))
    p.add_argument("--n", default="3")
    p.add_argument("--gamma", default="0.5")
    p.set_defaults(func=cmd_constants)

    p = common(sub.add_parser("period", help="linearized periods"))
    p.add_argument("--n", default="3")
    p.add_argument("--gamma", default="0.5")
    p.add_argument("--k", default="0")
    p.set_defaults(func=cmd_period)

    p = common(sub.add_parser("scan-conjecture", help="f_k = F(0) table with flags"))
    p.add_argument("--n", default="3..10")
    p.add_argument("--gamma", default="0.02..0.98")
    p.add_argument("--k-max", type=int, default=3)
    p.set_defaults(func=cmd_scan, points=50)

    p = common(sub.add_parser("oracle-verify", help="mode-ODE symbol vs closed form"))
    p.add_argument("--n", default="3..5")
    p.add_argument("--gamma", default="0.3,0.5,0.7")
    p.add_argument("--k", default="0..2")
    p.add_argument("--xi", default="0,1,2")
    p.add_argument("--npoints", type=int, default=400)
    p.set_defaults(func=cmd_oracle)

    p = common(sub.add_parser("hamiltonian-check", help="spread of H and H* over t"))
    p.add_argument("--n", default="3")
    p.add_argument("--gamma", default="0.5")
    p.add_argument("--modes", type=int, default=2048)
    p.add_argument("--length", type=float, default=40.0)
    p.add_argument("--times", default="0,0.5,1,2,4")
    p.set_defaults(func=cmd_hamiltonian)

    p = common(sub.add_parser("field", help="snapshot V(rho, t) of the extension of v1 or v_inf"))
    p.add_argument("--n", default="3")
    p.add_argument("--gamma", default="0.5")
    p.add_argument("--profile", choices=("one", "bubble"), default="bubble")
    p.add_argument("--modes", type=int, default=2048)
    p.add_argument("--length", type=float, default=40.0)
    p.add_argument("--rho", default="0.01..1.99")
    p.add_argument("--times", default="-4..4")
    p.set_defaults(func=cmd_field)

    p = common(sub.add_parser("fowler", help="classical orbits, portraits and periods"))
    p.add_argument("--n", default="3")
    p.add_argument("--eps", default="0.001", help="amplitudes: initial state (1 + eps, 0)")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-end", type=float, default=20.0)
    p.add_argument("--stride", type=int, default=10, help="keep every stride-th sample")
    p.add_argument("--orbit", action="store_true", help="emit one orbit (first n, first eps)")
    p.add_argument("--portrait", default=None, help="H1 levels, e.g. '-0.05..0.01'")
    p.set_defaults(func=cmd_fowler)

    p = common(sub.add_parser("verify-all", help="run the acceptance checks"))
    p.add_argument("--only", default=None, help="subset of criterion numbers, e.g. '1..4,7'")
    p.set_defaults(func=cmd_verify_all)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rows, cols = args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"cylfrac: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (CylfracError, ValueError) as exc:
        print(f"cylfrac: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    emit(render(rows, cols, _config(args), args.format), args.output)
    if args.command == "verify-all" and not all(r["passed"] for r in rows):
        return EXIT_ACCEPTANCE
    return 0


if __name__ == "__main__":
    sys.exit(main())
