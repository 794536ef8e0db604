"""Command-line front end: ``pld simulate|verify|figure1|brackets|reduce``.

Exit codes: 0 success, 1 failed verification or integrator abort, 2 usage.
"""

import argparse
import json
import math
import os
import re
import sys

import numpy as np

from . import svg
from .figure import figure1
from .integrate import IntegrationError, IntegratorConfig, integrate
from .models import FAULTS, build, coupled_model, model_card
from .reduction import ReductionRecord, random_start, reduction_residual
from .verify import run_suite, suite_report

PI_TOKENS = {"pi/4": math.pi / 4, "-pi/4": -math.pi / 4, "pi/8": math.pi / 8, "-pi/8": -math.pi / 8}
DEFAULT_SEED = 42


def parse_eta(text):
    text = text.strip()
    if text in PI_TOKENS:
        return PI_TOKENS[text]
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"eta must be a real number or one of {', '.join(PI_TOKENS)}; got {text!r}") from None


def parse_reals(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}") from None


def parse_etas(text):
    return [parse_eta(v) for v in text.split(",") if v.strip()]


def parse_plane(text):
    parts = [p.strip().lower() for p in text.split(",")]
    if len(parts) != 2 or not all(p.startswith("x") and p[1:].isdigit() for p in parts):
        raise argparse.ArgumentTypeError(f"plane must look like x2,x3; got {text!r}")
    return tuple(int(p[1:]) - 1 for p in parts)


def resolve_seed(seed):
    if seed is not None:
        return seed
    env = os.environ.get("PLD_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            pass
    return DEFAULT_SEED


def _system_args(p, eta=True):
    p.add_argument("--system", choices=("lorenz", "euler"), required=True)
    if eta:
        p.add_argument("--eta", type=parse_eta, default=0.0)


def build_parser():
    parser = argparse.ArgumentParser(prog="pld", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="integrate a catalog flow and write CSV/SVG")
    _system_args(s)
    s.add_argument("--x0", type=parse_reals, required=True)
    s.add_argument("--t-end", type=float, default=10.0)
    s.add_argument("--dt", type=float, default=1e-3)
    s.add_argument("--method", choices=("rk4", "dopri5"), default="rk4")
    s.add_argument("--rtol", type=float, default=1e-9)
    s.add_argument("--atol", type=float, default=1e-12)
    s.add_argument("--sample-every", type=int, default=1)
    s.add_argument("--couple", type=int, default=1, help="number of copies N (1 = base flow)")
    s.add_argument("--which", type=int, choices=(0, 1), default=0)
    s.add_argument("--out", default="trajectory.csv")
    s.add_argument("--svg")
    s.add_argument("--plane", type=parse_plane, default=(1, 2))

    v = sub.add_parser("verify", help="run the invariant suite")
    _system_args(v, eta=False)
    v.add_argument("--etas", type=parse_etas, default=parse_etas("-1,-0.25,0,0.25,1"))
    v.add_argument("--seed", type=int)
    v.add_argument("--points", type=int, default=100)
    v.add_argument("--inject-fault")
    v.add_argument("--report")

    f = sub.add_parser("figure1", help="closed Lorenz orbits for several eta")
    f.add_argument("--panel", choices=("A", "B", "both"), default="both")
    f.add_argument("--t-end", type=float, default=60.0)
    f.add_argument("--dt", type=float, default=1e-3)
    f.add_argument("--svg", default="figure1.svg")
    f.add_argument("--report")

    b = sub.add_parser("brackets", help="print bracket matrices and the model card")
    _system_args(b)
    b.add_argument("--alpha", type=float, help="pencil parameter; default prints p0 and p1")
    b.add_argument("--x0", type=parse_reals, help="evaluation point")

    r = sub.add_parser("reduce", help="reduction residual of a coupled flow")
    _system_args(r)
    r.add_argument("--couple", type=int, default=2)
    r.add_argument("--which", type=int, choices=(0, 1), default=0)
    r.add_argument("--x0", type=parse_reals, help="N*n start coordinates; default random")
    r.add_argument("--seed", type=int)
    r.add_argument("--t-end", type=float, default=10.0)
    r.add_argument("--dt", type=float, default=1e-3)
    r.add_argument("--report")
    return parser


def _write_json(path, data):
    text = json.dumps(data, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


def _abort(err):
    print(json.dumps(err.diagnostic()), file=sys.stderr)
    return 1


def cmd_simulate(args, parser):
    b = build(args.system, args.eta)
    if args.couple < 1:
        parser.error("--couple must be >= 1")
    if args.couple == 1:
        field, monitors, dim = b.flow(args.which), b.monitors(), b.dim
    else:
        cb = coupled_model(b, args.couple)
        field, monitors, dim = cb.flow(args.which), cb.monitors(args.which), cb.dim
    if len(args.x0) != dim:
        parser.error(f"--x0 has {len(args.x0)} values; {args.system} with N={args.couple} needs {dim}")
    if max(args.plane) >= dim:
        parser.error(f"--plane index out of range for dimension {dim}")
    try:
        cfg = IntegratorConfig(args.method, args.dt, args.t_end, args.sample_every, args.rtol, args.atol)
    except ValueError as e:
        parser.error(str(e))
    try:
        traj = integrate(field, np.array(args.x0), cfg, monitors)
    except IntegrationError as e:
        if e.partial is not None:
            e.partial.to_csv(args.out)
        return _abort(e)
    traj.to_csv(args.out)
    if args.svg:
        i, j = args.plane
        label = f"{args.system}, eta={args.eta:g}"
        svg.write(args.svg, [svg.Panel(label, [svg.Curve(traj.states[:, i], traj.states[:, j])],
                                       f"x{i + 1}", f"x{j + 1}")])
    print(json.dumps({"out": args.out, "samples": len(traj), "max_drift": traj.max_drift()}))
    return 0


def cmd_verify(args, parser):
    if args.inject_fault is not None and args.inject_fault not in FAULTS[args.system]:
        parser.error(f"unknown fault {args.inject_fault!r}; {args.system} faults: "
                     f"{', '.join(sorted(FAULTS[args.system]))}")
    seed = resolve_seed(args.seed)
    records = run_suite(args.system, args.etas, seed, args.points, args.inject_fault)
    report = suite_report(args.system, args.etas, seed, records, args.inject_fault)
    _write_json(args.report, report)
    for r in records:
        if not r.passed:
            print(f"FAIL {r.check:20s} {r.structure}: {r.value:.3g} > {r.tolerance:g}")
    print(f"{report['n_checks'] - report['n_failed']}/{report['n_checks']} checks passed")
    return 0 if report["pass"] else 1


def cmd_figure1(args, parser):
    keys = ("A", "B") if args.panel == "both" else (args.panel,)
    panels, orbits = figure1(keys, args.t_end, args.dt)
    svg.write(args.svg, panels)
    results = [o.as_dict() for o in orbits]
    for o in results:
        state = f"closure {o['distance']:.2e}" if o["returned"] else "not returned"
        print(f"x0={tuple(o['x0'])} eta={o['eta']:+.6f}: {state}")
    _write_json(args.report, {"svg": args.svg, "orbits": results})
    return 0


def cmd_brackets(args, parser):
    b = build(args.system, args.eta)
    x = np.ones(b.dim) if args.x0 is None else np.array(args.x0)
    if x.size != b.dim:
        parser.error(f"--x0 needs {b.dim} values for {args.system}")
    out = {"card": json.loads(model_card(b)), "point": x.tolist()}
    if args.alpha is None:
        out["p0"] = b.p0.bivector(x).tolist()
        out["p1"] = b.p1.bivector(x).tolist()
    else:
        out["alpha"] = args.alpha
        out["p_alpha"] = b.pencil_structure(args.alpha).bivector(x).tolist()
        out["lie_alpha"] = b.linear_pencil(args.alpha).bivector(x).tolist()
    print(json.dumps(out, indent=2))
    return 0


def cmd_reduce(args, parser):
    if args.couple < 2:
        parser.error("--couple must be >= 2")
    b = build(args.system, args.eta)
    cb = coupled_model(b, args.couple)
    seed = resolve_seed(args.seed)
    start = random_start(cb, seed) if args.x0 is None else np.array(args.x0)
    if start.size != cb.dim:
        parser.error(f"--x0 needs {cb.dim} values")
    try:
        res, err = reduction_residual(cb, args.which, start, args.t_end, args.dt), ""
    except IntegrationError as e:
        res, err = math.inf, str(e)
    rec = ReductionRecord(b.name, b.eta, args.which, args.couple, seed, res, error=err)
    text = rec.to_json()
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return 0 if rec.passed else 1


COMMANDS = {"simulate": cmd_simulate, "verify": cmd_verify, "figure1": cmd_figure1,
            "brackets": cmd_brackets, "reduce": cmd_reduce}


_NEGATIVE = re.compile(r"^-(\d|\.\d|pi)")


def _glue_negative_values(argv):
    """Turn ``--etas -1,0`` into ``--etas=-1,0`` so argparse keeps the value."""
    out = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and _NEGATIVE.match(tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_negative_values(argv))
    return COMMANDS[args.command](args, parser)


if __name__ == "__main__":
    sys.exit(main())
