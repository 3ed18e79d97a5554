"""Command-line front end.

Exit status: 0 on success, 2 when any Monte Carlo cell contains
non-converged alignment solves (results are still written).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .allocation import LinkQuantStats, allocate_bits
from .codebook import distortion_coefficient_beta
from .harness import ScenarioConfig, simulate, sweep, table1_experiment, write_records

_EXIT_OK = 0
_EXIT_NOT_CONVERGED = 2


def _load_config(path: str) -> ScenarioConfig:
    with open(path) as f:
        return ScenarioConfig.from_json(f.read())


def _emit(records, cfg, out_path):
    write_records(records, out_path, cfg)
    print(f"wrote {len(records)} records to {out_path}")
    if any(r.converged_frac < 1.0 for r in records):
        bad = [r for r in records if r.converged_frac < 1.0]
        print(f"warning: {len(bad)} cells contain non-converged solves",
              file=sys.stderr)
        return _EXIT_NOT_CONVERGED
    return _EXIT_OK


def _cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    out = args.out or cfg.output or "results.csv"
    return _emit(simulate(cfg), cfg, out)


def _cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    out = args.out or cfg.output or f"sweep-{args.axis}.csv"
    return _emit(sweep(cfg, args.axis), cfg, out)


def _cmd_table1(args) -> int:
    res = table1_experiment(trials=args.trials, seed=args.seed,
                            n_jobs=args.jobs)
    budgets = sorted({b for (_, b) in res.cells})
    print(f"mean RINR at receiver 1 ({res.trials} trials, seed {res.seed})")
    header = "scheme        " + "".join(f"B={b:<12}" for b in budgets)
    print(header)
    for name in ("conventional", "dynamic"):
        cells = [res.cells[(name, b)] for b in budgets]
        line = f"{name:<14}" + "".join(
            f"{m:.4f}±{hw:.4f}  " for m, hw in cells
        )
        print(line)
    return _EXIT_OK


def _cmd_alloc(args) -> int:
    with open(args.stats_file) as f:
        entries = json.load(f)
    stats = [
        LinkQuantStats(rx=int(e["rx"]), tx=int(e["tx"]), beta=float(e["beta"]),
                       gain=float(e["gain"]), m_r=int(e["m_r"]),
                       m_t=int(e["m_t"]))
        for e in entries
    ]
    alloc = allocate_bits(stats, args.budget)
    doc = {
        "budget": alloc.budget,
        "water_level": alloc.water_level,
        "bits": {f"{j},{i}": b for (j, i), b in sorted(alloc.bits.items())},
    }
    print(json.dumps(doc, indent=2))
    return _EXIT_OK


def _mat_from_lists(rows):
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def _cmd_beta(args) -> int:
    with open(args.link_stats) as f:
        doc = json.load(f)
    phi_r = _mat_from_lists(doc["phi_r"])
    phi_t = _mat_from_lists(doc["phi_t"])
    n = int(doc.get("n_samples", 100_000))
    rng = np.random.default_rng(int(doc.get("seed", 0)))
    est = distortion_coefficient_beta(phi_r, phi_t, n_samples=n, rng=rng)
    print(json.dumps({"beta": est.value, "stderr": est.stderr,
                      "n_samples": est.n_samples}))
    return _EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="iafeedback",
        description="Limited-feedback interference alignment simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the full scheme x SNR x budget grid")
    p.add_argument("config", help="scenario configuration (JSON)")
    p.add_argument("--out", default=None, help="output CSV path")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="sweep one axis")
    p.add_argument("config")
    p.add_argument("--axis", required=True,
                   choices=("bits", "snr", "snr-scaled", "correlation", "shadowing"))
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("table1", help="two-quantized-link toy comparison")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=-1)
    p.set_defaults(func=_cmd_table1)

    p = sub.add_parser("alloc", help="water-fill a bit budget over links")
    p.add_argument("stats_file", help="JSON list of per-link statistics")
    p.add_argument("--budget", type=int, required=True)
    p.set_defaults(func=_cmd_alloc)

    p = sub.add_parser("beta", help="estimate a link's distortion coefficient")
    p.add_argument("link_stats", help="JSON with phi_r / phi_t matrices")
    p.set_defaults(func=_cmd_beta)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
