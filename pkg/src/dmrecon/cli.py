"""Command-line interface.

    dmrecon run --config <path> --out <dir>     run every scenario, write CSV
    dmrecon exact --state <spec> --theta <t> --method <W|I|II> [--d <int>]
    dmrecon validate                            run the oracle-equivalence suite

The environment variable DMRECON_SEED, when set, overrides the config file's
root seed so CI runs can pin reproducibility externally.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import correlations, experiments, io, protocol, qmath, reconstruct, states
from .protocol import CouplingConfig

_RECONSTRUCTORS = {
    "W": (reconstruct.reconstruct_weak, correlations.PAIRS_WEAK),
    "I": (reconstruct.reconstruct_exact_i, correlations.PAIRS_EXACT_I),
    "II": (reconstruct.reconstruct_exact_ii, correlations.PAIRS_EXACT_II),
}


def _cmd_run(args) -> int:
    text = Path(args.config).read_text(encoding="utf-8")
    try:
        doc = io.parse_config(text)
    except io.ConfigError as exc:
        for err in exc.errors:
            print(err, file=sys.stderr)
        return 2
    env_seed = os.environ.get("DMRECON_SEED")
    if env_seed is not None:
        doc = replace(doc, root_seed=int(env_seed))
    out_dir = Path(args.out) if args.out else Path(doc.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows: list[experiments.ResultRow] = []
    for scn in doc.scenarios:
        rows += experiments.run_scenario(scn, doc.root_seed)
    rows = experiments.sort_rows(rows)
    out_path = out_dir / "results.csv"
    io.write_results(rows, out_path)
    print(f"wrote {len(rows)} rows to {out_path}")
    return 0


def _cmd_exact(args) -> int:
    if args.method not in _RECONSTRUCTORS:
        print(f"unknown method '{args.method}'", file=sys.stderr)
        return 2
    rho = states.parse_state_spec(args.state, args.d)
    cfg = CouplingConfig(args.d, args.theta, args.theta)
    rebuild, pairs = _RECONSTRUCTORS[args.method]
    correls = correlations.exact_correlation_set(rho, cfg, pairs)
    result = rebuild(correls, cfg)
    print(f"method {result.method}, d={args.d}, theta={args.theta}")
    print(io.write_matrix(result.finalized.matrix, "text"))
    return 0


def _cmd_validate(args) -> int:
    failures = 0

    def check(name: str, ok: bool, detail: str = "") -> None:
        nonlocal failures
        status = "ok" if ok else "FAIL"
        if not ok:
            failures += 1
        print(f"[{status}] {name}" + (f" ({detail})" if detail else ""))

    rng = np.random.Generator(np.random.Philox(20260808))

    # Closed-form coupling unitary vs eigendecomposition exponential.
    worst = 0.0
    for _ in range(50):
        d = int(rng.integers(2, 7))
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        v /= np.linalg.norm(v)
        proj = np.outer(v, v.conj())
        theta = float(rng.uniform(0.01, math.pi / 2))
        closed = protocol.coupling_unitary(proj, theta)
        y = np.array([[0, -1j], [1j, 0]])
        oracle = qmath.matrix_exponential(qmath.tensor(proj, y), theta)
        worst = max(worst, float(np.max(np.abs(closed - oracle))))
    check("coupling unitary matches matrix exponential", worst < 1e-12, f"max dev {worst:.2e}")

    # Trace-based vs closed-form correlations, randomized over everything.
    worst = 0.0
    for i in range(200):
        d = int(rng.integers(2, 6))
        rho = states.random_density(d, int(rng.integers(0, 2**31)))
        cfg = CouplingConfig(d, float(rng.uniform(0.05, math.pi / 2)), float(rng.uniform(0.05, math.pi / 2)))
        j = int(rng.integers(1, d + 1))
        k = int(rng.integers(1, d + 1))
        for pair in correlations.SUPPORTED_PAIRS:
            exact = correlations.exact_correlation(rho, j, k, pair[0], pair[1], cfg)
            closed = correlations.analytic_correlation(rho, j, k, pair[0], pair[1], cfg)
            worst = max(worst, abs(exact.value - closed.value))
    check("trace correlations match closed forms", worst < 1e-10, f"max dev {worst:.2e}")

    # Exactness of both strong-coupling estimators.
    worst = 0.0
    for d in (2, 3, 4):
        rho = states.random_density(d, 97 + d)
        for theta in (0.2, math.pi / 2):
            cfg = CouplingConfig(d, theta, theta)
            correls = correlations.exact_correlation_set(rho, cfg, correlations.PAIRS_EXACT_I)
            for rebuild in (reconstruct.reconstruct_exact_i, reconstruct.reconstruct_exact_ii):
                result = rebuild(correls, cfg)
                worst = max(worst, qmath.trace_distance(result.finalized.matrix, rho.matrix))
    check("exact estimators reproduce the state", worst < 1e-9, f"max distance {worst:.2e}")

    print("validation " + ("failed" if failures else "passed"))
    return 1 if failures else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dmrecon", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run scenarios from a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None, help="output directory (default: from config)")
    p_run.set_defaults(func=_cmd_run)

    p_exact = sub.add_parser("exact", help="exact-correlation reconstruction of one state")
    p_exact.add_argument("--state", required=True, help="state spec, e.g. pure:D or mixed")
    p_exact.add_argument("--theta", required=True, type=float)
    p_exact.add_argument("--method", required=True, choices=("W", "I", "II"))
    p_exact.add_argument("--d", type=int, default=2)
    p_exact.set_defaults(func=_cmd_exact)

    p_val = sub.add_parser("validate", help="run the oracle-equivalence suite")
    p_val.set_defaults(func=_cmd_validate)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
