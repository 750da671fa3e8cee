"""Command line front end.

    fpp simulate|verify|p2p-variance|random-regular|oracle-check \
        --config cfg.json --out-dir out [--threads N]

Writes <out-dir>/samples.csv and <out-dir>/summary.json.  Outputs are
byte-identical across reruns and thread counts.

Exit codes: 0 success, 2 config error, 3 resource budget error,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

from . import __version__
from . import lab
from .config import (ExperimentConfig, config_hash, parse_config)
from .engine import brute_force_level, first_passage_levels
from .errors import ConfigError, FppError, ResourceBudgetError
from .structure import shipped_embedding, verify_all
from .weights import WeightField, derive_seed

CSV_HEADER = "experiment,family,law,n,replicate,seed,value"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_INTERNAL = 4


def format_value(x: float) -> str:
    return format(float(x), ".17g")


def write_samples(path: Path, rows) -> str:
    """Write rows sorted by (n, replicate); returns the file's sha256."""
    rows = sorted(rows, key=lambda r: (r[3], r[4]))
    lines = [CSV_HEADER]
    lines.extend(",".join([r[0], r[1], r[2], str(r[3]), str(r[4]), str(r[5]),
                           format_value(r[6])]) for r in rows)
    data = ("\n".join(lines) + "\n").encode()
    path.write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def write_summary(path: Path, payload: dict) -> None:
    import json
    path.write_bytes((json.dumps(payload, indent=2, sort_keys=True) + "\n")
                     .encode())


def _simulate(config: ExperimentConfig, threads: int):
    rows, summary, errors = [], {}, []
    samples = lab.run_replicates(
        config.family, config.law, config.n_grid, config.replicates,
        config.master_seed, max_vertices=config.budgets.max_ball_vertices,
        n_jobs=threads)
    flabel, llabel = config.family.label(), config.law.label()
    for n in samples.n_grid:
        z = samples.samples(n)
        for i in range(samples.replicates):
            rows.append(("simulate", flabel, llabel, n, i, samples.seeds[i],
                         z[i]))
    summary["stats"] = {str(n): lab.summary_stats(samples, n).to_dict()
                        for n in samples.n_grid}
    if len(samples.n_grid) >= 3 and samples.replicates >= 200:
        summary["tightness"] = lab.tightness_diagnostic(
            samples, config.epsilon).to_dict()
    ctx = lab.coupling_context(config.family)
    if ctx is not None and samples.replicates >= 200:
        r_1, r_2 = ctx
        coupling = {}
        for n in samples.n_grid:
            if 1 <= n + 1 - max(r_1, r_2):
                coupling[str(n)] = lab.estimate_mean_abs_diff(
                    samples, n, r_1, r_2).to_dict()
        if coupling:
            summary["coupling"] = coupling
    return rows, summary, errors


def _verify(config: ExperimentConfig, threads: int):
    emb = shipped_embedding(config.family)
    if emb is None:
        raise ConfigError([f"no shipped embedding for {config.family.label()}"])
    radius = max(config.n_grid) if config.n_grid else 5
    report = verify_all(config.family, emb, radius,
                        max_vertices=config.budgets.max_ball_vertices)
    return [], {"verification": report.to_dict()}, []


def _p2p_variance(config: ExperimentConfig, threads: int):
    scaling = lab.variance_vs_distance(
        config.family, config.law, config.distance_grid, config.replicates,
        config.master_seed, max_settled=config.budgets.max_settled)
    rows = []
    flabel, llabel = config.family.label(), config.law.label()
    # re-derive the per-sample values for the CSV
    from .engine import point_to_point
    for m in scaling.distance_grid:
        target = lab.canonical_target(config.family, m)
        for i in range(config.replicates):
            seed = derive_seed(config.master_seed, m, i)
            field = WeightField(seed=seed, law=config.law)
            val = point_to_point(config.family, field, config.family.root(),
                                 target, max_settled=config.budgets.max_settled,
                                 keep_path=False).value
            rows.append(("p2p-variance", flabel, llabel, m, i, seed, val))
    return rows, {"variance_scaling": scaling.to_dict()}, []


def _random_regular(config: ExperimentConfig, threads: int):
    fam = config.family
    sizes = config.n_grid or [fam.n_vertices]
    stats = lab.random_pair_tightness(
        fam.d, sizes, config.law, config.replicates, config.master_seed,
        max_settled=config.budgets.max_settled)
    rows = []
    llabel = config.law.label()
    for nv in stats.sizes:
        flabel = f"random_regular[d={fam.d};n={nv}]"
        for i, val in enumerate(stats.values[nv]):
            rows.append(("random-regular", flabel, llabel, nv, i,
                         derive_seed(config.master_seed, nv, i), float(val)))
    return rows, {"random_pair": stats.to_dict()}, []


def _oracle_check(config: ExperimentConfig, threads: int):
    rows, errors = [], []
    mismatches = []
    flabel, llabel = config.family.label(), config.law.label()
    grid = config.n_grid or [2, 3]
    for n in grid:
        for i in range(config.replicates):
            seed = derive_seed(config.master_seed, n, i)
            field = WeightField(seed=seed, law=config.law)
            fast = first_passage_levels(
                config.family, field, n, keep_path=False,
                max_vertices=config.budgets.max_ball_vertices).t(n)
            slow = brute_force_level(config.family, field, n)
            rows.append(("oracle-check", flabel, llabel, n, i, seed, fast))
            if fast != slow:
                mismatches.append({"n": n, "replicate": i, "engine": fast,
                                   "brute_force": slow})
    summary = {"oracle_check": {"mismatches": mismatches,
                                "checked": len(rows)}}
    return rows, summary, errors, bool(mismatches)


def run_experiment(config: ExperimentConfig, out_dir: Path,
                   threads: int = 1) -> int:
    """Run one experiment; writes samples.csv and summary.json."""
    out_dir.mkdir(parents=True, exist_ok=True)
    internal_failure = False
    errors: list[str] = []
    rows: list = []
    summary: dict = {}
    code = EXIT_OK
    try:
        if config.experiment == "simulate":
            rows, summary, errors = _simulate(config, threads)
        elif config.experiment == "verify":
            rows, summary, errors = _verify(config, threads)
        elif config.experiment == "p2p-variance":
            rows, summary, errors = _p2p_variance(config, threads)
        elif config.experiment == "random-regular":
            rows, summary, errors = _random_regular(config, threads)
        elif config.experiment == "oracle-check":
            rows, summary, errors, internal_failure = _oracle_check(config,
                                                                    threads)
        else:
            raise ConfigError([f"unknown experiment {config.experiment!r}"])
    except ResourceBudgetError as exc:
        errors.append(str(exc))
        code = EXIT_RESOURCE
    samples_sha = write_samples(out_dir / "samples.csv", rows)
    payload = {
        "config": config.to_dict(),
        "config_hash": config_hash(config),
        "version": __version__,
        "samples_sha256": samples_sha,
        "errors": errors,
    }
    payload.update(summary)
    write_summary(out_dir / "summary.json", payload)
    if internal_failure:
        return EXIT_INTERNAL
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fpp", description="first-passage percolation experiment runner")
    parser.add_argument("experiment",
                        choices=["simulate", "verify", "p2p-variance",
                                 "random-regular", "oracle-check"])
    parser.add_argument("--config", required=True, type=Path)
    parser.add_argument("--out-dir", required=True, type=Path)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args(argv)
    try:
        text = args.config.read_text()
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        config = parse_config(text)
    except ConfigError as exc:
        for msg in exc.messages:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    if config.experiment != args.experiment:
        print(f"config error: config is for experiment "
              f"'{config.experiment}', command line says '{args.experiment}'",
              file=sys.stderr)
        return EXIT_CONFIG
    try:
        return run_experiment(config, args.out_dir, threads=args.threads)
    except ConfigError as exc:
        for msg in exc.messages:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceBudgetError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except FppError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
