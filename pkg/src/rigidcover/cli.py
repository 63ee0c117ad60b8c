"""``rigidcover`` command line: gen, info, partitions, separability, area, lu, compare.

Every command prints one JSON report on stdout. Exit status is 0 when the
analysis ran, 1 when ``--assert`` was given and the check failed, and 2 on
bad input.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
import warnings

from . import __version__
from .cover import WEIGHT_FLOOR
from .errors import CoverError
from .invariants import area_pair
from .io import (
    file_digest,
    load_json,
    lu_from_spec,
    parse_region,
    read_state,
    state_from_spec,
    write_state,
)
from .motion import MOTION_TOL, apply_lu, motion_equivalent
from .partition import enumerate_bipartitions, parse_bipartition
from .separability import (
    ORACLE_ENTANGLED,
    ORACLE_SEPARABLE,
    SHRINK_TOL,
    is_fully_separable,
    is_partially_separable,
)
from .state import edge_ratio


class _Fail(Exception):
    """Assertion-mode failure after a successful analysis."""


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol-shrink", type=float, default=SHRINK_TOL)
    p.add_argument("--tol-motion", type=float, default=MOTION_TOL)
    p.add_argument("--seed", type=int, default=0, help="default seed for random LU kernels")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--human", action="store_true", help="tabular summary instead of JSON")
    p.add_argument("--assert", dest="assert_", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="rigidcover", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"rigidcover {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="build a state file from a spec")
    p.add_argument("spec")
    p.add_argument("out")
    p.add_argument("--binary", action="store_true", help="write coefficients to a sidecar")

    p = sub.add_parser("info", parents=[common], help="summarize a state file")
    p.add_argument("state")

    p = sub.add_parser("partitions", parents=[common], help="list bipartitions of N modes")
    p.add_argument("n", type=int)

    p = sub.add_parser("separability", parents=[common], help="shrink test per bipartition")
    p.add_argument("state")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--partition")
    group.add_argument("--all", action="store_true")

    p = sub.add_parser("area", parents=[common], help="area pair of a bipartition")
    p.add_argument("state")
    p.add_argument("--partition", required=True)
    p.add_argument("--region", nargs="+", default=["full"], help="'full' or one a:b per mode")
    # Let intervals such as -3:3 pass as values instead of being read as flags.
    p._negative_number_matcher = re.compile(r"^-\d+$|^-\d*\.\d+$|^-[\d.eE+-]*:[\d.eE+-]+$")

    p = sub.add_parser("lu", parents=[common], help="apply a local unitary")
    p.add_argument("state")
    p.add_argument("lu_spec")
    p.add_argument("out")

    p = sub.add_parser("compare", parents=[common], help="motion equivalence of two states")
    p.add_argument("a")
    p.add_argument("b")
    return parser


def _gen(args, inputs):
    inputs[args.spec] = file_digest(args.spec)
    state, spec = state_from_spec(args.spec)
    write_state(args.out, state, spec, binary=args.binary)
    return {
        "output": args.out,
        "norm": round(state.norm_sq(), 12),
        "modes": [g.to_dict() for g in state.modes],
        "edge_ratio": edge_ratio(state.coeffs),
    }


def _load(path, inputs):
    inputs[path] = file_digest(path)
    return read_state(path)


def _info(args, inputs):
    state = _load(args.state, inputs)
    return {
        "n_modes": state.n_modes,
        "shape": list(state.shape),
        "norm": round(state.norm_sq(), 12),
        "modes": [g.to_dict() for g in state.modes],
        "edge_ratio": edge_ratio(state.coeffs),
        "n_bipartitions": len(enumerate_bipartitions(state.n_modes)) if state.n_modes > 1 else 0,
    }


def _partitions(args, inputs):
    return {"partitions": [p.label() for p in enumerate_bipartitions(args.n)]}


def _separability(args, inputs):
    state = _load(args.state, inputs)
    if args.all:
        separable, verdicts = is_fully_separable(state, args.tol_shrink, args.threads)
    else:
        part = parse_bipartition(args.partition, state.n_modes)
        verdicts = [is_partially_separable(state, part, args.tol_shrink)]
        separable = verdicts[0].separable
    result = {"separable": separable, "verdicts": [v.to_dict() for v in verdicts]}
    if args.assert_ and not separable:
        raise _Fail(result)
    return result


def _area(args, inputs):
    state = _load(args.state, inputs)
    part = parse_bipartition(args.partition, state.n_modes)
    pair = area_pair(state, part, parse_region(args.region, state.modes))
    return pair.to_dict()


def _lu(args, inputs):
    state = _load(args.state, inputs)
    inputs[args.lu_spec] = file_digest(args.lu_spec)
    lu = lu_from_spec(load_json(args.lu_spec, allow_list=True), state.modes, args.seed)
    out = apply_lu(state, lu)
    write_state(args.out, out)
    return {"output": args.out, "norm": round(out.norm_sq(), 12)}


def _compare(args, inputs):
    a = _load(args.a, inputs)
    b = _load(args.b, inputs)
    equivalent, report = motion_equivalent(a, b, args.tol_motion)
    if args.assert_ and not equivalent:
        raise _Fail(report)
    return report


COMMANDS = {
    "gen": _gen,
    "info": _info,
    "partitions": _partitions,
    "separability": _separability,
    "area": _area,
    "lu": _lu,
    "compare": _compare,
}


def _report(args, inputs, results, caught, elapsed_ms) -> dict:
    return {
        "tool": "rigidcover",
        "version": __version__,
        "command": args.command,
        "inputs": inputs,
        "tolerances": {
            "shrink": args.tol_shrink,
            "motion": args.tol_motion,
            "weight_floor": WEIGHT_FLOOR,
            "oracle_separable": ORACLE_SEPARABLE,
            "oracle_entangled": ORACLE_ENTANGLED,
        },
        "results": results,
        "warnings": [f"{w.category.__name__}: {w.message}" for w in caught],
        "timing_ms": elapsed_ms,
    }


def _human(report: dict) -> str:
    lines = [f"rigidcover {report['version']} {report['command']}"]
    results = report["results"]
    if "verdicts" in results:
        lines.append(f"{'partition':<12}{'separable':<11}{'max_dist':>12}{'sigma2/1':>12}  agree")
        for v in results["verdicts"]:
            lines.append(
                f"{v['partition']:<12}{str(v['separable']):<11}"
                f"{v['max_pair_distance']:>12.3e}{v['oracle_sigma_ratio']:>12.3e}  {v['agreement']}"
            )
    elif "partitions" in results and "equivalent" in results:
        lines.append(f"equivalent={results['equivalent']}")
        for e in results["partitions"]:
            lines.append(f"  {e['partition']:<10}{str(e['identical']):<7}{e['max_deviation']:.3e}")
    else:
        for key, value in results.items():
            lines.append(f"{key}={value}")
    lines.extend(f"warning: {w}" for w in report["warnings"])
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    inputs = {}
    start = time.perf_counter()
    status = 0
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            results = COMMANDS[args.command](args, inputs)
        except _Fail as fail:
            results, status = fail.args[0], 1
        except (CoverError, OSError, KeyError, TypeError, ValueError) as exc:
            print(json.dumps({"error": f"{type(exc).__name__}: {exc}"}), file=sys.stderr)
            return 2
    elapsed = round((time.perf_counter() - start) * 1000.0, 3)
    report = _report(args, inputs, results, caught, elapsed)
    if args.human:
        print(_human(report))
    else:
        print(json.dumps(report, indent=2, sort_keys=True))
    return status


if __name__ == "__main__":
    sys.exit(main())
