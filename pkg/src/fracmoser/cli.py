"""Command-line experiment runner.

Subcommands: constants, moser, fraclap, sharpness, solve, validate.
Every subcommand also reads ``--config FILE`` (JSON whose keys mirror the
long flags, dashes or underscores); explicit flags override config values
and unknown keys are rejected. Exit status: 0 ok, 1 numeric failure, 2 usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import constants as C
from .errors import DomainError, FracMoserError
from .fraclap import bessel_pointwise, frac_lap
from .moser import MoserParams, decompose, u_eps, v_eps
from .mt_functionals import SWEEP_FIELDS, WeightFn, bessel_sharpness_sweep, phi_truncated
from .nehari import ProblemParams, assemble_space, lambda1, minimize_on_S
from .profiles import constant_profile, log_profile

FMT = "%.17g"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return FMT % float(x)


def _write_csv(out, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    out.write(buf.getvalue())


def _write_json(out, obj):
    out.write(json.dumps(obj, indent=2, sort_keys=True, default=_json_default))
    out.write("\n")


def _json_default(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not serializable: {type(x).__name__}")


def _floats(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def build_parser():
    parser = _Parser(prog="fracmoser", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="JSON file with default values for the flags")
        p.add_argument("--output", "-o", help="write to this file instead of stdout")
        return p

    p = common(sub.add_parser("constants", help="JSON table of constants"))
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--tau", type=float)

    p = common(sub.add_parser("moser", help="sample the Moser-type family as CSV"))
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--samples", type=int)

    p = common(sub.add_parser("fraclap", help="pointwise fractional Laplacian or Bessel operator"))
    p.add_argument("--profile", choices=("log", "moser", "indicator"))
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float, help="exponent of the Moser profile")
    p.add_argument("--k", type=float, help="eps = e^{-k} for the Moser profile")
    p.add_argument("--sigma", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--at", type=_floats, help="comma-separated radii")
    p.add_argument("--tol", type=float)

    p = common(sub.add_parser("sharpness", help="divergence sweep as CSV or JSON"))
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--kmin", type=int)
    p.add_argument("--kmax", type=int)
    p.add_argument("--weight")
    p.add_argument("--phi", action="store_const", const=True, help="use the truncated exponential")
    p.add_argument("--json", action="store_const", const=True, help="JSON instead of CSV")
    p.add_argument("--tol", type=float)

    p = common(sub.add_parser("solve", help="Nehari-manifold solve on the unit interval or square"))
    p.add_argument("--dim", type=int, choices=(1, 2))
    p.add_argument("--h", type=float)
    p.add_argument("--lambda-frac", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--mass", choices=("lumped", "consistent"))
    p.add_argument("--profile-csv", help="write the nodal solution profile here")

    p = common(sub.add_parser("validate", help="run the oracle suite"))
    p.add_argument("--seed", type=int, help="seed for sampled checks")
    return parser


DEFAULTS = {
    "constants": {"n": 2, "p": 2.0, "sigma": None, "tau": None},
    "moser": {"n": 2, "p": 2.0, "eps": math.exp(-4), "samples": 200},
    "fraclap": {"profile": "log", "n": 2, "p": 2.0, "k": 4.0, "sigma": 0.5, "tau": 0.0,
                "at": [0.5, 1.0, 2.0], "tol": 1e-9},
    "sharpness": {"n": 2, "p": 2.0, "tau": 0.0, "kmin": 3, "kmax": 7, "weight": "t^2",
                  "phi": False, "json": False, "tol": 1e-9},
    "solve": {"dim": 2, "h": 1 / 32, "lambda_frac": 0.5, "b": 1.0, "mass": "lumped",
              "profile_csv": None},
    "validate": {"seed": 0},
}


def resolve(args):
    """Merge defaults, the JSON config and explicit flags (flags win)."""
    cmd = args.command
    values = dict(DEFAULTS[cmd])
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        for key, val in cfg.items():
            k = key.replace("-", "_")
            if k not in values:
                raise UsageError(f"unknown config key {key!r} for {cmd}")
            values[k] = val
    for key in values:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    if cmd == "fraclap" and isinstance(values["at"], str):
        values["at"] = _floats(values["at"])
    return values


# subcommands -----------------------------------------------------------------


def cmd_constants(v, out):
    if v["n"] is None or v["p"] is None:
        raise UsageError("constants needs --n and --p")
    _write_json(out, C.constants_table(int(v["n"]), float(v["p"]), v["sigma"], v["tau"]))


def cmd_moser(v, out):
    params = MoserParams(int(v["n"]), float(v["p"]), float(v["eps"]))
    u, vv = u_eps(params), v_eps(params)
    f, g, R = decompose(params)
    # f and R carry log(1/r), so the origin itself is left out
    r = np.unique(np.concatenate([np.linspace(0.0, 1.1, int(v["samples"]) + 1)[1:], params.breakpoints]))
    cols = [u(r), vv(r), f(r), g(r), R(r)]
    _write_csv(out, ["r", "u_eps", "v_eps", "f_eps", "g_eps", "R_eps"],
               zip(r, *cols))


def _profile(v):
    n = int(v["n"])
    kind = v["profile"]
    if kind == "log":
        return log_profile(n)
    if kind == "indicator":
        return constant_profile(n, 1.0, support=1.0)
    return u_eps(MoserParams.from_k(n, float(v["p"]), float(v["k"])))


def cmd_fraclap(v, out):
    g = _profile(v)
    r = np.asarray(v["at"], dtype=float)
    spec = C.OperatorSpec(float(v["sigma"]), float(v["tau"] or 0.0))
    if spec.is_riesz:
        vals = frac_lap(g, spec, r, float(v["tol"]))
    else:
        vals = bessel_pointwise(g, spec, r, float(v["tol"]))
    _write_csv(out, ["r", "value"], zip(r, vals))


def cmd_sharpness(v, out):
    n, p = int(v["n"]), float(v["p"])
    w = WeightFn.parse(str(v["weight"]))
    ks = range(int(v["kmin"]), int(v["kmax"]) + 1)
    tau = float(v["tau"] or 0.0)
    sweep = bessel_sharpness_sweep(n, p, tau, ks, w, bool(v["phi"]), float(v["tol"]))
    rows = sweep.rows
    if v["json"]:
        _write_json(out, {"n": n, "p": p, "tau": tau, "weight": w.label, "use_phi": bool(v["phi"]),
                          "threshold_M": sweep.threshold_M,
                          "rows": [r.as_dict() for r in rows]})
    else:
        _write_csv(out, SWEEP_FIELDS, ([getattr(r, f) for f in SWEEP_FIELDS] for r in rows))


def cmd_solve(v, out):
    space = assemble_space(int(v["dim"]), float(v["h"]), v["mass"])
    lam1, eig = lambda1(space)
    params = ProblemParams(float(v["lambda_frac"]) * lam1, float(v["b"]))
    res = minimize_on_S(space, params, seed=eig, lam1=lam1)
    report = res.report()
    report.update({"dim": space.dim, "h": space.h, "mass": space.mass, "lambda": params.lam,
                   "b": params.b, "level_bound": C.alpha_np(space.dim, 2) / (2 * params.b)})
    _write_json(out, report)
    if v["profile_csv"]:
        N = int(round(1 / space.h))
        if space.dim == 1:
            x, vals = space.nodes(), res.u
        else:
            idx = np.arange(N - 1)
            x, vals = (idx + 1) * space.h, res.u.reshape(N - 1, N - 1)[idx, idx]
        with open(v["profile_csv"], "w", encoding="utf-8", newline="") as fh:
            _write_csv(fh, ["x", "u"], zip(x, vals))
    if not res.converged:
        raise FracMoserError(f"descent stopped after {res.iterations} iterations without converging")


def validation_checks():
    """(name, passed, detail) for each oracle of the quick validation suite."""
    checks = []
    for n, sigma in ((1, 0.25), (2, 0.25), (2, 0.5), (3, 0.75)):
        r = np.array([0.5, 1.0, 2.0])
        got = frac_lap(log_profile(n), C.OperatorSpec(sigma), r)
        want = C.log_kernel_constant(n, sigma) * r ** (-2 * sigma)
        err = float(np.max(np.abs(got / want - 1)))
        checks.append((f"log_kernel n={n} sigma={sigma:g}", err <= 1e-6, err))
    for n, p, k in ((2, 2.0, 4), (3, 1.5, 6), (1, 3.0, 5)):
        params = MoserParams.from_k(n, p, k)
        u0 = float(u_eps(params)(0.0))
        val = C.alpha_np(n, p) * u0 ** params.p_conj
        err = abs(val / (n * k) - 1)
        checks.append((f"plateau_identity n={n} p={p:g} k={k}", err <= 1e-10, err))
    for t in (1.0, 10.0, 50.0):
        phi = float(phi_truncated(t, 2.0))
        ratio = phi / math.exp(t)
        ok = phi <= math.exp(t) and (t < 50 or abs(ratio - 1) < 1e-15)
        checks.append((f"phi_bound t={t:g}", ok, ratio))
    space = assemble_space(1, 1 / 64)
    lam1, _ = lambda1(space)
    bound = C.poincare_lower_bound(1, 0.5, 1.0)
    checks.append(("poincare_lower_bound dim=1", lam1 >= bound, lam1 / bound))
    ident = [abs(C.alpha_np(n, p) * C.kappa_np(n, p) ** (p / (p - 1)) / n - 1)
             for n in range(1, 9) for p in (1.25, 1.5, 2.0, 3.0, 5.0)]
    checks.append(("alpha_kappa_identity", max(ident) <= 1e-11, max(ident)))
    return checks


def cmd_validate(v, out):
    checks = validation_checks()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["check", "status", "detail"])
    for name, ok, detail in checks:
        w.writerow([name, "PASS" if ok else "FAIL", _fmt(detail)])
    failed = [name for name, ok, _ in checks if not ok]
    if failed:
        raise FracMoserError(f"validation failed: {', '.join(failed)}")


COMMANDS = {
    "constants": cmd_constants,
    "moser": cmd_moser,
    "fraclap": cmd_fraclap,
    "sharpness": cmd_sharpness,
    "solve": cmd_solve,
    "validate": cmd_validate,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        values = resolve(args)
    except UsageError as exc:
        parser.print_usage(stderr)
        print(exc, file=stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                COMMANDS[args.command](values, fh)
        else:
            COMMANDS[args.command](values, stdout)
    except (UsageError, DomainError) as exc:
        # parameters outside their documented ranges are usage errors
        print(f"{args.command}: {exc}", file=stderr)
        return 2
    except (FracMoserError, ValueError, ArithmeticError) as exc:
        diag = {"command": args.command, "error": type(exc).__name__, "message": str(exc)}
        where = getattr(exc, "where", None)
        if where is not None:
            diag["where"] = where
        print(json.dumps(diag, default=str), file=stderr)
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
