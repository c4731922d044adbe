"""Command line runner: ``psido run --config cfg.json`` and ``psido catalog``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import catalog
from .checks import EXPERIMENTS, TOL, Outcome, run_experiment
from .errors import ConfigError
from .quantize import GridContext, quantize, write_binary
from .symbols import DEFAULT_L

CSV_COLUMNS = ("experiment", "check", "N", "t_or_z", "value", "threshold", "pass")


@dataclass
class ExperimentConfig:
    experiment: str = "full_suite"
    N: int = 256
    L: float = DEFAULT_L
    tolerances: dict = field(default_factory=dict)
    output_dir: str = "psido_out"
    seed: int = 0
    t_max: int = 64
    symbols: dict = field(default_factory=dict)
    dump_operator: bool = False

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        known = {"grid", "experiment", "tolerances", "output_dir", "seed", "t_max",
                 "symbol_catalog_entries", "dump_operator"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        grid = d.get("grid", {})
        cfg = cls(
            experiment=d.get("experiment", "full_suite"),
            N=grid.get("N", 256),
            L=float(grid.get("L", DEFAULT_L)),
            tolerances=dict(d.get("tolerances", {})),
            output_dir=d.get("output_dir", "psido_out"),
            seed=d.get("seed", 0),
            t_max=d.get("t_max", 64),
            symbols=dict(d.get("symbol_catalog_entries", {})),
            dump_operator=bool(d.get("dump_operator", False)),
        )
        cfg.validate()
        return cfg

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}")
        if not isinstance(self.N, int) or self.N < 64 or self.N > 1024 or self.N & (self.N - 1):
            raise ConfigError("grid.N must be a power of two in [64, 1024]")
        if not self.L > 0:
            raise ConfigError("grid.L must be positive")
        for k, v in self.tolerances.items():
            if k not in TOL:
                raise ConfigError(f"unknown tolerance {k!r}")
            if not isinstance(v, (int, float)) or (k not in ("gap_slope",) and v < np.finfo(float).eps):
                raise ConfigError(f"tolerance {k!r} must be a number >= machine epsilon")
        if not isinstance(self.seed, int) or self.seed < 0 or self.seed >= 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if not isinstance(self.t_max, int) or self.t_max < 4:
            raise ConfigError("t_max must be an integer >= 4")
        for name, entry in self.symbols.items():
            kind = entry.get("kind") if isinstance(entry, dict) else None
            try:
                catalog.symbol(kind)
            except (KeyError, TypeError, ValueError):
                raise ConfigError(f"symbol entry {name!r} has unknown kind {kind!r}") from None


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return ExperimentConfig.from_dict(data)


def _num(v):
    return float(f"{v:.12g}")


def write_outputs(out: Outcome, cfg: ExperimentConfig, outdir: Path):
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "results.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in out.records:
            row = r.row()
            row["value"] = repr(_num(row["value"]))
            w.writerow(row)
    summary = {
        "experiment": cfg.experiment,
        "grid": {"N": cfg.N, "L": cfg.L},
        "seed": cfg.seed,
        "passed": out.passed,
        "checks": [
            {"name": r.check, "anchor": r.anchor, "N": r.N, "t_or_z": r.t_or_z,
             "value": _num(r.value), "threshold": r.threshold, "pass": r.passed}
            for r in out.records
        ],
    }
    (outdir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True, ensure_ascii=False)
                                         + "\n", encoding="utf-8")
    if out.plotdata:
        pdir = outdir / "plotdata"
        pdir.mkdir(exist_ok=True)
        for name, rows in sorted(out.plotdata.items()):
            with open(pdir / f"{name}.csv", "w", newline="", encoding="utf-8") as fh:
                w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
                w.writeheader()
                for row in rows:
                    w.writerow({k: repr(_num(v)) if isinstance(v, float) else v for k, v in row.items()})
    if cfg.dump_operator:
        grid = GridContext(cfg.N, cfg.L)
        write_binary(quantize(catalog.c2_symbol(), grid), outdir / "c2_operator.bin")


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    outdir = Path(args.output_dir or cfg.output_dir)
    out = run_experiment(cfg.experiment, cfg.N, cfg.L, cfg.tolerances, cfg.seed, args.threads, cfg.t_max)
    write_outputs(out, cfg, outdir)
    failed = [r for r in out.records if not r.passed]
    for r in failed:
        print(f"FAIL {r.experiment}/{r.check} [{r.t_or_z}] value={r.value:.6g} threshold {r.threshold}",
              file=sys.stderr)
    return 1 if failed else 0


def cmd_catalog(args) -> int:
    print(catalog.list_catalog())
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="psido", description="Pseudodifferential operator experiments.")
    p.add_argument("--list-catalog", action="store_true", help="print the built-in catalog and exit")
    sub = p.add_subparsers(dest="command")
    run = sub.add_parser("run", help="run an experiment from a JSON config")
    run.add_argument("--config", required=True)
    run.add_argument("--output-dir")
    run.add_argument("--threads", type=int, default=1)
    run.set_defaults(func=cmd_run)
    cat = sub.add_parser("catalog", help="list built-in symbols and kernels")
    cat.set_defaults(func=cmd_catalog)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_catalog:
        return cmd_catalog(args)
    if args.command is None:
        parser.print_help(sys.stderr)
        return 2
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
