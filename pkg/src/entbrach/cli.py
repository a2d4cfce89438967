"""Command-line interface.

Exit codes: 0 success, 1 input error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import warnings
from typing import Optional, Sequence

import numpy as np

from .brachistochrone import SWEEP_HEADER, best_rate_p, sweep_p, verify_composition
from .dynamics import (
    EntanglementLevel,
    ExactState,
    hitting_time,
    sample_trajectory,
    trajectory_header,
    trajectory_rows,
)
from .errors import InputError, NumericalError
from .geometry import min_time_bound
from .hamiltonian import (
    SIGMA_X,
    SIGMA_Y,
    CanonicalTwoQubit,
    NonlocalHamiltonian,
    from_canonical,
    load_hamiltonian,
    uncertainty,
)
from .rates import RATE_HEADER, rate_bound, rate_profile, time_avg_rate
from .sampling import random_hamiltonian, random_state
from .state import (
    bell_psi_plus,
    entropy,
    geodesic_distance,
    load_state,
    schmidt,
    two_qubit_state,
)


def _floats(text: str, n: Optional[int] = None, flag: str = "") -> list:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"{flag}: expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise InputError(f"{flag}: expected {n} values, got {len(vals)}")
    return vals


def _log_base(text: str):
    return 2 if text == "2" else "e"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        if math.isinf(x):
            return "unreachable"
        return f"{float(x):.12g}"
    return str(x)


def _jsonable(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return "unreachable" if math.isinf(x) else x
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _emit_rows(args, header: list, rows: list) -> None:
    """Write a table of rows in the chosen format."""
    out = args._stream
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(x) for x in r])
    elif args.format == "json":
        json.dump(
            {"hbar": args.hbar, "rows": [_jsonable(dict(zip(header, r))) for r in rows]}, out, indent=2
        )
        out.write("\n")
    else:
        cells = [header] + [[_fmt(x) for x in r] for r in rows]
        widths = [max(len(c[k]) for c in cells) for k in range(len(header))]
        out.write(f"# hbar = {args.hbar}\n")
        for c in cells:
            out.write("  ".join(s.rjust(wd) for s, wd in zip(c, widths)) + "\n")


def _emit_record(args, record: dict) -> None:
    out = args._stream
    if args.format == "json":
        json.dump(_jsonable({"hbar": args.hbar, **record}), out, indent=2)
        out.write("\n")
    elif args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(list(record))
        w.writerow([_fmt(v) for v in record.values()])
    else:
        out.write(f"# hbar = {args.hbar}\n")
        width = max(len(k) for k in record)
        for k, v in record.items():
            out.write(f"{k.ljust(width)}  {_fmt(v)}\n")


# -- problem inputs ----------------------------------------------------------

def _hamiltonian(args) -> NonlocalHamiltonian:
    if getattr(args, "ham", None):
        return load_hamiltonian(args.ham)
    if getattr(args, "mu", None):
        return from_canonical(CanonicalTwoQubit(tuple(_floats(args.mu, 3, "--mu"))))
    raise InputError("a Hamiltonian is required: pass --ham FILE or --mu a,b,c")


def _initial(args):
    if getattr(args, "initial", None):
        return load_state(args.initial)
    if getattr(args, "p", None) is not None:
        return two_qubit_state(args.p)
    raise InputError("an initial state is required: pass --initial FILE or --p P")


def _target(args, dims, required: bool = True):
    if getattr(args, "target", None):
        return load_state(args.target)
    if dims == (2, 2):
        return bell_psi_plus()
    if required:
        raise InputError("a target state is required for non-two-qubit problems: pass --target FILE")
    return None


def _tmax(args, H: NonlocalHamiltonian) -> float:
    if args.tmax is not None:
        return args.tmax
    norm = H.norm()
    if norm == 0:
        raise InputError("--tmax is required when the Hamiltonian is zero")
    return 2.0 * math.pi * args.hbar / norm


def _check_dims(H, *states) -> None:
    for s in states:
        if s is not None and s.dims != H.dims:
            raise InputError(f"dimension mismatch: Hamiltonian {H.dims} vs state {s.dims}")


# -- commands ----------------------------------------------------------------

def cmd_schmidt(args) -> int:
    s = load_state(args.state)
    sf = schmidt(s)
    base = _log_base(args.log_base)
    unit = "ebits" if base == 2 else "nats"
    rec = {f"lambda_{k + 1}": float(x) for k, x in enumerate(sf.coefficients)}
    rec[f"entropy_{unit}"] = entropy(sf, base)
    _emit_record(args, rec)
    return 0


def cmd_bound(args) -> int:
    H = _hamiltonian(args)
    s = _initial(args)
    target = _target(args, s.dims)
    _check_dims(H, s, target)
    rep = min_time_bound(H, s, target, args.hbar)
    rec = {
        "delta_h": rep.delta_h,
        "s0": rep.s0,
        "overlap": rep.overlap,
        "t_bound": rep.t_bound if rep.reachable else "unreachable",
    }
    _emit_record(args, rec)
    return 0


def cmd_evolve(args) -> int:
    H = _hamiltonian(args)
    s = _initial(args)
    target = _target(args, s.dims, required=False)
    _check_dims(H, s, target)
    traj = sample_trajectory(H, s, _tmax(args, H), args.steps, args.hbar)
    _emit_rows(args, trajectory_header(min(s.dims)), trajectory_rows(traj, target))
    return 0


def cmd_hit(args) -> int:
    H = _hamiltonian(args)
    s = _initial(args)
    if args.ebits is not None:
        spec = EntanglementLevel(args.ebits)
        target = None
    else:
        target = _target(args, s.dims)
        spec = ExactState(target, args.fidelity)
    _check_dims(H, s, target)
    t = hitting_time(H, s, spec, _tmax(args, H), args.steps, args.hbar)
    rec = {"t_hit": t if t is not None else "not reached"}
    if target is not None:
        rep = min_time_bound(H, s, target, args.hbar)
        rec["t_bound"] = rep.t_bound if rep.reachable else "unreachable"
        rec["slack"] = rep.with_achieved(t).slack
    _emit_record(args, rec)
    return 0


def cmd_sweep_p(args) -> int:
    if not args.mu:
        raise InputError("sweep-p needs --mu a,b,c")
    mu = CanonicalTwoQubit(tuple(_floats(args.mu, 3, "--mu")))
    rows = sweep_p(mu, args.grid, args.hbar, args.tmax, args.steps)
    _emit_rows(args, SWEEP_HEADER, [r.as_list() for r in rows])
    return 0


def cmd_rates(args) -> int:
    H = _hamiltonian(args)
    s = _initial(args)
    _check_dims(H, s)
    times = np.linspace(0.0, _tmax(args, H), args.steps)
    rows = rate_profile(H, s, times, args.dt, args.hbar, _log_base(args.log_base))
    _emit_rows(args, RATE_HEADER, rows)
    return 0


def cmd_compose(args) -> int:
    alpha = _floats(args.alpha, 2, "--alpha")
    if args.ham1 or args.ham2:
        if not (args.ham1 and args.ham2):
            raise InputError("compose needs both --ham1 and --ham2")
        h1, h2 = load_hamiltonian(args.ham1), load_hamiltonian(args.ham2)
    else:
        if not args.mu:
            raise InputError("compose needs --mu a,b,c or --ham1/--ham2")
        mu = _floats(args.mu, 3, "--mu")
        h1 = NonlocalHamiltonian(2, 2, mu[0] * np.kron(SIGMA_X, SIGMA_X))
        h2 = NonlocalHamiltonian(2, 2, mu[1] * np.kron(SIGMA_Y, SIGMA_Y))
    s = _initial(args)
    target = _target(args, s.dims)
    _check_dims(h1, s, target)
    rep = verify_composition(h1, h2, alpha[0], alpha[1], s, target, args.hbar)
    rec = rep.as_dict()
    rec.pop("hbar")
    _emit_record(args, rec)
    return 0


def cmd_best_p(args) -> int:
    p0, fmax = best_rate_p()
    _emit_record(args, {"p0": p0, "f_max": fmax, "entropy_ebits": entropy(schmidt(two_qubit_state(p0)))})
    return 0


def cmd_check(args) -> int:
    """Seeded random checks of the minimum-time and average-rate bounds."""
    rng = np.random.default_rng(args.seed)
    base = _log_base(args.log_base)
    dims = [(2, 2), (2, 3), (3, 3)]
    bound_viol = rate_viol = 0
    worst_slack = math.inf
    for k in range(args.count):
        da, db = dims[k % len(dims)]
        H = random_hamiltonian(da, db, rng)
        s = random_state(da, db, rng)
        t_star = float(rng.uniform(0.2, 1.5)) / H.norm()
        traj = sample_trajectory(H, s, t_star, 64, args.hbar)
        target = traj.state(len(traj) - 1)
        rep = min_time_bound(H, s, target, args.hbar)
        t_hit = hitting_time(H, s, ExactState(target), 1.25 * t_star, args.steps, args.hbar)
        if t_hit is None or t_hit < rep.t_bound - 1e-9:
            bound_viol += 1
        else:
            worst_slack = min(worst_slack, t_hit - rep.t_bound)
        gbar = time_avg_rate(traj, base)
        bnd = rate_bound(min(da, db), uncertainty(H, s), geodesic_distance(s, target), args.hbar, base)
        if abs(gbar) > bnd + 1e-9:
            rate_viol += 1
    _emit_record(
        args,
        {
            "instances": args.count,
            "seed": args.seed,
            "bound_violations": bound_viol,
            "rate_bound_violations": rate_viol,
            "min_slack": worst_slack,
        },
    )
    return 2 if bound_viol or rate_viol else 0


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--hbar", type=float, default=1.0)
    common.add_argument("--log-base", choices=["2", "e"], default="2")
    common.add_argument("--tmax", type=float, default=None)
    common.add_argument("--steps", type=int, default=4096)
    common.add_argument("--format", choices=["table", "csv", "json"], default="table")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="write output here instead of stdout")

    problem = argparse.ArgumentParser(add_help=False)
    problem.add_argument("--ham", help="Hamiltonian JSON file")
    problem.add_argument("--mu", help="canonical two-qubit couplings mu1,mu2,mu3")
    problem.add_argument("--initial", help="initial state JSON file")
    problem.add_argument("--p", type=float, default=None, help="initial state sqrt(p)|01> + sqrt(1-p)|10>")
    problem.add_argument("--target", help="target state JSON file (two-qubit default: |Psi+>)")

    parser = argparse.ArgumentParser(
        prog="entbrach", description="Minimum-time and entanglement-rate tools for bipartite pure states."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schmidt", parents=[common], help="Schmidt coefficients and entropy of a state")
    p.add_argument("state")
    p.set_defaults(func=cmd_schmidt)

    p = sub.add_parser("bound", parents=[common, problem], help="minimum-time bound")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("evolve", parents=[common, problem], help="trajectory CSV")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("hit", parents=[common, problem], help="hitting time of a target")
    p.add_argument("--ebits", type=float, default=None, help="entanglement level target instead of a state")
    p.add_argument("--fidelity", type=float, default=1.0 - 1e-9)
    p.set_defaults(func=cmd_hit)

    p = sub.add_parser("sweep-p", parents=[common], help="two-qubit bound sweep over p")
    p.add_argument("--mu", required=False)
    p.add_argument("--grid", type=int, default=101)
    p.set_defaults(func=cmd_sweep_p)

    p = sub.add_parser("rates", parents=[common, problem], help="entanglement-rate profile")
    p.add_argument("--dt", type=float, default=None, help="finite-difference step")
    p.set_defaults(func=cmd_rates, steps=64)

    p = sub.add_parser("compose", parents=[common, problem], help="composition law for H' = a1 H1 + a2 H2")
    p.add_argument("--alpha", default="0.5,0.5")
    p.add_argument("--ham1")
    p.add_argument("--ham2")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("best-p", parents=[common], help="optimal initial weight p0 and peak rate")
    p.set_defaults(func=cmd_best_p)

    p = sub.add_parser("check", parents=[common], help="seeded random bound checks")
    p.add_argument("--count", type=int, default=100)
    p.set_defaults(func=cmd_check, steps=1024)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.hbar > 0:
        print("error: --hbar must be positive", file=sys.stderr)
        return 1
    if args.steps < 2:
        print("error: --steps must be >= 2", file=sys.stderr)
        return 1
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = lambda msg, *a, **k: print(f"warning: {msg}", file=sys.stderr)
            if args.out:
                with open(args.out, "w", newline="") as fh:
                    args._stream = fh
                    return args.func(args)
            args._stream = sys.stdout
            return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
