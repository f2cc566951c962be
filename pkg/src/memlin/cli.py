"""Command-line front end.

Subcommands::

    memlin gen            --config cfg.json -o out/   # signal CSVs
    memlin design         --config cfg.json -o out/   # params.json
    memlin eval           --params out/params.json -o out/
    memlin sweep-branches --config cfg.json -o out/   # branch-sweep CSV
    memlin sweep-mults    --config cfg.json -o out/   # multiplication-sweep CSV
    memlin spectrum       --config cfg.json -o out/   # before/after spectra

Every command writes its outputs plus a ``*_metadata.json`` reproducibility
record into the output directory.  Exit codes: 0 success, 2 configuration
error, 3 computation error, 4 I/O error.  Failures print a one-line JSON
error object to stderr.  The output directory defaults to $MEMLIN_OUTPUT_DIR
or the current directory.  Metric CSV/JSON values are decimal text with 12
significant digits.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from .design import design_hammerstein, design_proposed
from .errors import MemlinError, ValidationError
from .harness import (
    ExperimentConfig,
    evaluate_ensemble,
    experiment_metadata,
    make_eval_ensemble,
    make_training_set,
    make_validation_set,
    run_branch_sweep,
    run_mult_sweep,
    run_spectrum_case,
    save_metadata,
    write_sweep_csv,
)
from .linearizer import load_params, params_to_dict
from .signals import save_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_COMPUTE = 3
EXIT_IO = 4


def _parse_override(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise ValidationError(f"override {text!r} is not of the form key=value")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def load_config(path: str | None, overrides: list[str]) -> ExperimentConfig:
    if path is None:
        cfg = ExperimentConfig()
    else:
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config file {path}: invalid JSON ({exc})") from exc
        if not isinstance(doc, dict):
            raise ValidationError(f"config file {path}: expected a JSON object")
        cfg = ExperimentConfig.from_dict(doc)
    if overrides:
        cfg = cfg.with_overrides(dict(_parse_override(o) for o in overrides))
    return cfg


def _out_dir(args) -> Path:
    out = args.output_dir or os.environ.get("MEMLIN_OUTPUT_DIR") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _cmd_gen(args, cfg: ExperimentConfig) -> None:
    out = _out_dir(args)
    refs, dists = make_training_set(cfg)
    save_csv(out / "train_ref.csv", refs[0])
    save_csv(out / "train_dist.csv", dists[0])
    pairs = make_eval_ensemble(replace(cfg, ensemble_size=args.count))
    for i, (ref, dist) in enumerate(pairs):
        save_csv(out / f"eval_{i:03d}_ref.csv", ref)
        save_csv(out / f"eval_{i:03d}_dist.csv", dist)
    save_metadata(out / "gen_metadata.json", experiment_metadata(cfg, eval_signals=args.count))


def _cmd_design(args, cfg: ExperimentConfig) -> None:
    out = _out_dir(args)
    train = make_training_set(cfg)
    if args.type == "proposed":
        val = make_validation_set(cfg)
        sol = design_proposed(train[0], train[1], cfg.design, val_refs=val[0], val_dist=val[1])
    else:
        sol = design_hammerstein(train[0], train[1], cfg.design)
    doc = sol.to_dict(lam=cfg.design.lam, seed=cfg.seed)
    with open(out / "params.json", "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    save_metadata(out / "design_metadata.json", experiment_metadata(cfg, linearizer=args.type))


def _cmd_eval(args, cfg: ExperimentConfig) -> None:
    out = _out_dir(args)
    params = load_params(args.params)
    pairs = make_eval_ensemble(cfg)
    stats = evaluate_ensemble(params, pairs, cfg.threads)
    report = {
        "mean_sndr_db": float(f"{stats.mean_db:.12g}"),
        "std_sndr_db": float(f"{stats.std_db:.12g}"),
        "min_sndr_db": float(f"{stats.min_db:.12g}"),
        "pooled_sndr_db": float(f"{stats.pooled_db:.12g}"),
        "ensemble_size": cfg.ensemble_size,
    }
    with open(out / "eval.json", "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    save_metadata(
        out / "eval_metadata.json",
        experiment_metadata(cfg, params=params_to_dict(params)),
    )


def _cmd_sweep(args, cfg: ExperimentConfig, by_mults: bool) -> None:
    out = _out_dir(args)
    if by_mults:
        rows = run_mult_sweep(cfg)
        csv_path = out / "sweep_mults.csv"
        meta_path = out / "sweep_mults_metadata.json"
    else:
        rows = run_branch_sweep(cfg)
        csv_path = out / "sweep_branches.csv"
        meta_path = out / "sweep_branches_metadata.json"
    write_sweep_csv(csv_path, rows)
    failed = [
        {"type": r.type, "branches": r.branches, "error": r.error} for r in rows if not r.valid
    ]
    pooled = {f"{r.type}:{r.branches}": float(f"{r.pooled_sndr_db:.12g}") for r in rows if r.valid}
    save_metadata(
        meta_path,
        experiment_metadata(cfg, failed_designs=failed, pooled_sndr_db=pooled),
    )


def _cmd_spectrum(args, cfg: ExperimentConfig) -> None:
    out = _out_dir(args)
    n = args.branches if args.branches is not None else cfg.design.n_branches
    before, after = run_spectrum_case(cfg, n)
    before.save_csv(out / "spectrum_before.csv")
    after.save_csv(out / "spectrum_after.csv")
    save_metadata(out / "spectrum_metadata.json", experiment_metadata(cfg, n_branches=n))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="memlin", description="Memoryless ADC linearizer experiments"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="experiment config JSON (defaults to paper values)")
        p.add_argument("-o", "--output-dir", help="output directory")
        p.add_argument(
            "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
            help="dotted-path config override, e.g. design.n_branches=20",
        )
        p.add_argument("--threads", type=int, help="parallelism degree (outputs unchanged)")

    p = sub.add_parser("gen", help="write training and evaluation signal CSVs")
    common(p)
    p.add_argument("--count", type=int, default=1, help="number of evaluation signals to write")

    p = sub.add_parser("design", help="train a linearizer, write params.json")
    common(p)
    p.add_argument("--type", choices=("proposed", "hammerstein"), default="proposed")

    p = sub.add_parser("eval", help="evaluate saved params over the ensemble")
    common(p)
    p.add_argument("--params", required=True, help="params.json written by 'design'")

    p = sub.add_parser("sweep-branches", help="SNDR versus branch count CSV")
    common(p)

    p = sub.add_parser("sweep-mults", help="SNDR versus multiplication count CSV")
    common(p)

    p = sub.add_parser("spectrum", help="before/after spectrum CSVs")
    common(p)
    p.add_argument("--branches", type=int, help="branch count (default: design.n_branches)")

    return parser


def _fail(code: int, kind: str, message: str) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.overrides)
        if args.threads is not None:
            cfg = cfg.with_overrides({"threads": args.threads})
    except ValidationError as exc:
        return _fail(EXIT_CONFIG, "config", str(exc))
    except OSError as exc:
        return _fail(EXIT_IO, "io", str(exc))

    handlers = {
        "gen": _cmd_gen,
        "design": _cmd_design,
        "eval": _cmd_eval,
        "sweep-branches": lambda a, c: _cmd_sweep(a, c, by_mults=False),
        "sweep-mults": lambda a, c: _cmd_sweep(a, c, by_mults=True),
        "spectrum": _cmd_spectrum,
    }
    try:
        handlers[args.command](args, cfg)
    except ValidationError as exc:
        return _fail(EXIT_CONFIG, "config", str(exc))
    except MemlinError as exc:
        return _fail(EXIT_COMPUTE, "computation", str(exc))
    except OSError as exc:
        return _fail(EXIT_IO, "io", str(exc))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
