"""Experiment driver: seeded subcommands over the library, CSV out.

Every run writes one CSV whose leading `# key=value` comment lines hold the
full replay configuration (subcommand, numeric flags, rectangle family,
generator algorithm).  Output is a pure function of that header: reruns are
byte-identical, including under different GHRLAB_THREADS settings.

Exit codes: 0 success; 1 when a declared mathematical invariant fails the
run's check (or output cannot be written); 2 for usage errors.
"""

from __future__ import annotations

import argparse
import re
import sys
from fractions import Fraction
from pathlib import Path

from .bitkit import RNG_ALGORITHM, BitString, Rng, random_bitstring
from .bounds import (
    chernoff_dominance_report,
    hoeffding_dominance_report,
    shift_xor_tail_check,
    window_lower_dominance_report,
)
from .classical import (
    RectangleSpec,
    all_instances,
    estimate_baseline_success,
    reduction_xi,
    relative_weight,
    xi_parameters,
)
from .coupling import verify_independence
from .protocol import estimate_success, failure_probability_exact
from .relation import (
    aleph,
    answer_length,
    enumerate_pairs,
    estimate_aleph_probability,
    require_transform_size,
)

_SEED_LIMIT = 1 << 64


def parse_rect(text: str, n: int) -> RectangleSpec:
    """Named rectangle families: full, parity_even, prefix_zeros(m)."""
    if text == "full":
        return RectangleSpec.full(n)
    if text == "parity_even":
        return RectangleSpec.parity_even(n)
    match = re.fullmatch(r"prefix_zeros\((\d+)\)", text)
    if match:
        return RectangleSpec.prefix_zeros(n, int(match.group(1)))
    raise ValueError(f"unknown rectangle family: {text!r}")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, (float, Fraction)):
        return format(float(value), ".12g")
    return str(value)


def write_csv(rows, schema, path, meta) -> None:
    """UTF-8 CSV: `# key=value` config lines, header line, data rows."""
    lines = [f"# {key}={_fmt(value)}" for key, value in meta]
    lines.append(",".join(schema))
    lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _root_rng(seed: int) -> Rng:
    if not 0 <= seed < _SEED_LIMIT:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return Rng(seed)


def _cmd_aleph_estimate(args):
    est = estimate_aleph_probability(args.n, args.trials, _root_rng(args.seed))
    meta = [
        ("subcommand", "aleph-estimate"),
        ("n", args.n),
        ("trials", args.trials),
        ("seed", args.seed),
        ("rng", RNG_ALGORITHM),
    ]
    schema = ("n", "trials", "seed", "estimate", "stderr")
    rows = [(args.n, args.trials, args.seed, est.mean, est.stderr)]
    return rows, schema, meta, True


def _cmd_protocol_success(args):
    t = args.t if args.t is not None else answer_length(args.n)
    est = estimate_success(args.n, args.trials, _root_rng(args.seed), t=t)
    meta = [
        ("subcommand", "protocol-success"),
        ("n", args.n),
        ("trials", args.trials),
        ("seed", args.seed),
        ("t", t),
        ("rng", RNG_ALGORITHM),
    ]
    schema = ("n", "trials", "seed", "t", "estimate", "stderr")
    rows = [(args.n, args.trials, args.seed, t, est.mean, est.stderr)]
    return rows, schema, meta, True


def _cmd_protocol_failure_exact(args):
    require_transform_size(args.n)
    meta = [
        ("subcommand", "protocol-failure-exact"),
        ("n", args.n),
    ]
    if args.exhaustive:
        if 2 * args.n > 20:
            raise ValueError(f"exhaustive enumeration infeasible for n={args.n}")
        pairs = list(enumerate_pairs(args.n))
        meta.append(("exhaustive", True))
    else:
        rng = _root_rng(args.seed)
        pairs = []
        for i in range(args.trials):
            child = rng.child(i)
            pairs.append((random_bitstring(args.n, child), random_bitstring(args.n, child)))
        meta.extend([("trials", args.trials), ("seed", args.seed), ("exhaustive", False)])
    meta.append(("rng", RNG_ALGORITHM))
    schema = ("x", "y", "aleph", "failure")
    rows = [
        (str(x), str(y), aleph(x, y), float(failure_probability_exact(x, y)))
        for x, y in pairs
    ]
    return rows, schema, meta, True


def _cmd_baseline_tghr(args):
    est = estimate_baseline_success(args.n, args.t, args.trials, _root_rng(args.seed))
    meta = [
        ("subcommand", "baseline-tghr"),
        ("n", args.n),
        ("t", args.t),
        ("trials", args.trials),
        ("seed", args.seed),
        ("rng", RNG_ALGORITHM),
    ]
    schema = ("n", "t", "trials", "seed", "estimate", "stderr")
    rows = [(args.n, args.t, args.trials, args.seed, est.mean, est.stderr)]
    return rows, schema, meta, True


def _cmd_coupling_verify(args):
    if args.n < 2 or args.n % 2 or args.n > 12:
        raise ValueError(f"n must be even in [2, 12], got {args.n}")
    meta = [
        ("subcommand", "coupling-verify"),
        ("n", args.n),
        ("tol", args.tol),
    ]
    rows = []
    all_ok = True
    for value in range(1 << args.n):
        report = verify_independence(BitString(value, args.n), tol=args.tol)
        rows.append((str(report.s), float(report.max_tv), report.passed))
        all_ok = all_ok and report.passed
    schema = ("s", "max_tv", "pass")
    return rows, schema, meta, all_ok


def _cmd_bounds_validate(args):
    meta = [
        ("subcommand", "bounds-validate"),
        ("n", args.n),
        ("trials", args.trials),
        ("seed", args.seed),
    ]
    reports = [
        ("hoeffding", hoeffding_dominance_report()),
        ("chernoff", chernoff_dominance_report()),
        ("window_lower", window_lower_dominance_report()),
    ]
    if args.trials > 0:
        t_values = [t for t in (args.n // 16, args.n // 8, 3 * args.n // 16) if t >= 1]
        meta.append(("rng", RNG_ALGORITHM))
        reports.append(
            (
                "shift_xor_tail",
                shift_xor_tail_check(args.n, t_values, args.trials, _root_rng(args.seed)),
            )
        )
    rows = []
    all_ok = True
    for name, report in reports:
        worst = min(p.bound_value - p.observed for p in report.points)
        rows.append((name, len(report.points), worst, report.passed))
        all_ok = all_ok and report.passed
    schema = ("suite", "points", "worst_margin", "pass")
    return rows, schema, meta, all_ok


def _set_string(members, l: int) -> BitString:
    return BitString.from_bits([1 if i in members else 0 for i in range(1, 4 * l)])


def _cmd_reduction_demo(args):
    params = xi_parameters(args.c1, args.c2, args.n)
    rect = parse_rect(args.rect, args.n)
    meta = [
        ("subcommand", "reduction-demo"),
        ("n", args.n),
        ("trials", args.trials),
        ("seed", args.seed),
        ("rect", args.rect),
        ("c1", args.c1),
        ("c2", args.c2),
        ("rng", RNG_ALGORITHM),
    ]
    rows = []
    for r in range(args.trials):
        for inst in all_instances(params.l):
            # fresh Rng per instance: one trial shares (S, T) across instances
            tr = reduction_xi(
                inst, args.c1, args.c2, args.n, rect, _root_rng(args.seed).child(r)
            )
            rows.append(
                (
                    r,
                    str(_set_string(inst.x, params.l)),
                    str(_set_string(inst.y, params.l)),
                    inst.intersection_size(),
                    tr.encoded_distance(),
                    tr.masked_distance(),
                    tr.accepted,
                )
            )
    schema = ("trial", "x_set", "y_set", "intersection", "d3", "d5", "accepted")
    return rows, schema, meta, True


def _cmd_rect_spectrum(args):
    rect = parse_rect(args.rect, args.n)
    meta = [
        ("subcommand", "rect-spectrum"),
        ("n", args.n),
        ("rect", args.rect),
    ]
    rows = []
    for k in range(args.n + 1):
        rows.append((str(k), float(relative_weight(rect, {k}))))
    for k in range(args.n):
        rows.append((f"{k}+{k + 1}", float(relative_weight(rect, {k, k + 1}))))
    schema = ("dist_set", "rw")
    return rows, schema, meta, True


_HANDLERS = {
    "aleph-estimate": _cmd_aleph_estimate,
    "protocol-success": _cmd_protocol_success,
    "protocol-failure-exact": _cmd_protocol_failure_exact,
    "baseline-tghr": _cmd_baseline_tghr,
    "coupling-verify": _cmd_coupling_verify,
    "bounds-validate": _cmd_bounds_validate,
    "reduction-demo": _cmd_reduction_demo,
    "rect-spectrum": _cmd_rect_spectrum,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghrlab", description="Gap-Hamming relation experiments, CSV out."
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--out", default=None, help="output CSV path (default stdout)")
        return p

    p = add("aleph-estimate", "Monte Carlo estimate of the typicality probability")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = add("protocol-success", "Monte Carlo protocol success rate on uniform pairs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t", type=int, default=None, help="outcome samples per run (default log2 n)")

    p = add("protocol-failure-exact", "exact per-pair failure probabilities")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--exhaustive", action="store_true", help="all pairs (small n)")
    p.add_argument("--trials", type=int, default=100, help="sampled pairs when not exhaustive")
    p.add_argument("--seed", type=int, default=0)

    p = add("baseline-tghr", "shared-randomness baseline success rate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int, required=True, help="shared samples per run")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = add("coupling-verify", "exact coupled-mixture check for every selector")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-9)

    p = add("bounds-validate", "tail-bound dominance grids, plus sampled shift tails")
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--trials", type=int, default=0, help="samples per shift (0 skips)")
    p.add_argument("--seed", type=int, default=0)

    p = add("reduction-demo", "set-disjointness encoding over all instances")
    p.add_argument("--c1", type=int, required=True)
    p.add_argument("--c2", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rect", default="full")
    p.add_argument("--trials", type=int, default=1, help="independent seeds")
    p.add_argument("--seed", type=int, default=0)

    p = add("rect-spectrum", "relative distance weights of a rectangle")
    p.add_argument("--rect", required=True)
    p.add_argument("--n", type=int, required=True)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        rows, schema, meta, ok = _HANDLERS[args.subcommand](args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        write_csv(rows, schema, args.out, meta)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
