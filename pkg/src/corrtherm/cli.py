"""Command line entry point.

Exit codes: 0 when every requested verdict passes, 2 when a verdict fails
(or an optimizer iterate breaks a bound), 1 on input errors.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import scenario as sc
from .laws import PreconditionError
from .linalg import LinalgError
from .optimize import BoundViolationError
from .states import StateError

EXIT_OK, EXIT_INPUT, EXIT_FAIL = 0, 1, 2


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _alpha(text: str):
    return text if text == "max" else float(text)


def _demo_scenario(args) -> dict:
    if args.demo in ("example1", "example2"):
        return {"kind": args.demo, "parameters": {"p": args.p, "T": args.T, "hamiltonian": args.hamiltonian}}
    if args.demo == "erasure":
        return {
            "kind": "erasure",
            "parameters": {"T": args.T, "system_probs": args.p},
            "checks": ["first", "info_second", "landauer", "clausius_chain"],
        }
    if args.demo == "anomalous":
        return {
            "kind": "two_bath",
            "parameters": {"gap": args.gap, "T_A": args.Ta, "T_B": args.Tb, "alpha": args.alpha},
            "optimizer": {"seed": 0 if args.seed is None else args.seed, "restarts": args.restarts},
        }
    if args.demo == "zeroth":
        return {"kind": "zeroth", "parameters": {"gap": args.gap, "T": args.T, "alpha": args.alpha}}
    raise sc.ScenarioError(f"unknown demo {args.demo!r}")


def _print_summary(result: sc.RunResult, stream=None):
    stream = stream or sys.stdout
    for r in result.reports:
        print(r.narrative, file=stream)
    for key, value in result.extras.items():
        if key != "search":
            print(f"{key}: {value}", file=stream)
    if "search" in result.extras:
        s = result.extras["search"]
        print(f"optimizer best {s['objective']} = {s['best_objective']!r} after {s['n_evaluations']} evaluations; "
              f"min Clausius slack over all evaluations = {s['min_clausius_slack']:.3e}", file=stream)
    print("ALL PASS" if result.all_passed else "SOME VERDICTS FAILED", file=stream)


def _finish(result: sc.RunResult, args, stem: str) -> int:
    _print_summary(result)
    if args.out:
        jp, cp = sc.write_outputs(result, args.out, stem)
        print(f"wrote {jp} and {cp}")
    return EXIT_OK if result.all_passed else EXIT_FAIL


def _apply_overrides(data: dict, args) -> dict:
    if args.tol is not None:
        data["tol"] = args.tol
    if getattr(args, "seed", None) is not None and "optimizer" in data:
        data["optimizer"]["seed"] = args.seed
    return data


def cmd_demo(args) -> int:
    data = _apply_overrides(_demo_scenario(args), args)
    result = sc.run_optimizer(data) if args.demo == "anomalous" else sc.run_checks(data)
    return _finish(result, args, f"demo-{args.demo}")


def cmd_check(args) -> int:
    data = _apply_overrides(sc.load(args.file), args)
    return _finish(sc.run_checks(data), args, Path(args.file).stem)


def cmd_optimize(args) -> int:
    data = sc.load(args.file)
    data.setdefault("optimizer", {})
    data = _apply_overrides(data, args)
    return _finish(sc.run_optimizer(data), args, Path(args.file).stem)


def cmd_sweep(args) -> int:
    data = _apply_overrides(sc.load(args.file), args)
    values = sc.parse_range(args.range, data, args.param)
    rows = sc.sweep(data, args.param, values)
    text = sc.rows_to_csv(rows)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{Path(args.file).stem}.sweep-{args.param}.csv"
        path.write_text(text)
        print(f"wrote {path}")
    else:
        sys.stdout.write(text)
    bad = [r for r in rows if r["clausius_slack"] < -(data.get("tol", 1e-7))
           or (math.isfinite(r["eta"]) and r["carnot_slack"] < -(data.get("tol", 1e-7)))]
    return EXIT_FAIL if bad else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrtherm",
        description="Heat, work and free energy of correlated system-bath states; law checks and anomalous-flow search.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="verdict tolerance override")
    common.add_argument("--seed", type=int, default=None, help="optimizer seed override")
    common.add_argument("--out", default=None, help="directory for report JSON / CSV files")
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("demo", parents=[common], help="reproduce a built-in scenario")
    d.add_argument("demo", choices=["example1", "example2", "anomalous", "erasure", "zeroth"])
    d.add_argument("--p", type=_floats, default=[0.5, 0.5], help="probability vector, comma separated")
    d.add_argument("--T", type=float, default=1.0, help="bath temperature")
    d.add_argument("--hamiltonian", choices=["zero", "thermal"], default="zero")
    d.add_argument("--gap", type=float, default=1.0)
    d.add_argument("--Ta", type=float, default=1.0, help="temperature of bath A (cold)")
    d.add_argument("--Tb", type=float, default=2.0, help="temperature of bath B (hot)")
    d.add_argument("--alpha", type=_alpha, default="max", help="correlation strength or 'max'")
    d.add_argument("--restarts", type=int, default=4)
    d.set_defaults(func=cmd_demo)

    c = sub.add_parser("check", parents=[common], help="run the law checks of a scenario file")
    c.add_argument("file")
    c.set_defaults(func=cmd_check)

    o = sub.add_parser("optimize", parents=[common], help="search energy-preserving unitaries of a two_bath scenario")
    o.add_argument("file")
    o.set_defaults(func=cmd_optimize)

    s = sub.add_parser("sweep", parents=[common], help="tabulate a two_bath scenario over one parameter")
    s.add_argument("file")
    s.add_argument("--param", required=True, choices=list(sc.SWEEP_PARAMS))
    s.add_argument("--range", required=True, help="lo:hi:n (inclusive); hi may be 'max' for alpha")
    s.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BoundViolationError as exc:
        print(f"bound violation: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (sc.ScenarioError, StateError, LinalgError, PreconditionError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
